#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lyaptrade/error.hpp"
#include "lyaptrade/harness.hpp"

using namespace lyaptrade;
using nlohmann::json;

namespace {

json base_config() {
  return json{{"stocks", {{{"mu_max", 1}, {"p_max", 2}}}},
              {"source", {{"kind", "iid"}, {"support", {{"1.00"}, {"2.00"}}}, {"probs", {0.5, 0.5}}}},
              {"trader", {{"V", 50}}},
              {"horizon", 10},
              {"seed", 7}};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lyaptrade_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string pointer_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ErrorsCarryPointers) {
  auto j = base_config();
  j.erase("seed");
  EXPECT_EQ(pointer_of(j), "/seed");
  EXPECT_EQ(parse_config(j, ".", 3).seed, 3u);

  j = base_config();
  j["horizon"] = 0;
  EXPECT_EQ(pointer_of(j), "/horizon");
  j = base_config();
  j["verify"] = {"queue_band", "nope"};
  EXPECT_EQ(pointer_of(j), "/verify/1");
  j = base_config();
  j["source"]["support"][1] = {"3.00"};
  EXPECT_EQ(pointer_of(j), "/source");
  j = base_config();
  j["trader"]["V"] = -1;
  EXPECT_EQ(pointer_of(j), "/trader/V");
  j = base_config();
  j["source"]["kind"] = "random";
  EXPECT_EQ(pointer_of(j), "/source/kind");
}

TEST(Config, EchoRoundTrips) {
  auto j = base_config();
  j["trader"]["theta"] = {"52.5"};
  j["verify"] = {"queue_band", "slot_optimality"};
  j["memory"] = {{"epsilon", 0.125}, {"T", 4}};
  auto c = parse_config(j);
  auto echo = config_to_json(c);
  auto back = parse_config(echo);
  EXPECT_EQ(config_to_json(back).dump(), echo.dump());
  EXPECT_EQ(back.trader, c.trader);
  EXPECT_EQ(back.market, c.market);

  json m = base_config();
  m["source"] = {{"kind", "markov"},
                 {"states", {{"1"}, {"2"}}},
                 {"transition", {{0.75, 0.25}, {0.25, 0.75}}},
                 {"initial_state", 1}};
  auto mc = parse_config(m);
  EXPECT_EQ(config_to_json(parse_config(config_to_json(mc))).dump(), config_to_json(mc).dump());
}

TEST(Config, TraceSourceResolvesAndExpands) {
  auto dir = temp_dir("trace_cfg");
  std::ofstream(dir / "t.csv") << "slot,p_1\n0,1.00\n1,5.00\n";
  auto j = base_config();
  j["source"] = {{"kind", "trace"}, {"path", "t.csv"}};
  EXPECT_THROW(parse_config(j, dir.string()), ConfigError);
  j["source"]["cap_policy"] = "auto_expand";
  auto c = parse_config(j, dir.string());
  EXPECT_EQ(c.market.stocks[0].p_max, 500);
}

TEST(Run, MinimalAndEnsemble) {
  auto dir = temp_dir("run");
  auto j = base_config();
  j["output"] = {{"trajectories", true}};
  auto c = parse_config(j);
  auto r = cmd_run(c, 1, dir.string());
  EXPECT_EQ(r.exit_code, kExitOk);
  std::ifstream traj(dir / "trajectory_0.csv");
  std::string line;
  int rows = -1;
  while (std::getline(traj, line)) ++rows;
  EXPECT_EQ(rows, 10);

  j["replications"] = 100;
  j["output"]["trajectories"] = false;
  auto many = cmd_run(parse_config(j), 3, "");
  EXPECT_EQ(many.summary["replications"].size(), 100u);
  EXPECT_EQ(many.summary["reports"][0]["checked"].get<int>() > 0, true);
}

TEST(Run, ByteIdenticalAcrossJobCounts) {
  auto j = base_config();
  j["replications"] = 40;
  j["horizon"] = 300;
  j["verify"] = {"queue_band", "one_slot_drift", "iid_profit"};
  auto c = parse_config(j);
  auto a = cmd_run(c, 1, "");
  auto b = cmd_run(c, 4, "");
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  EXPECT_EQ(a.summary["config"], config_to_json(c));
}

TEST(Run, CorruptionHookFailsDeterministicCheck) {
  auto c = parse_config(base_config());
  RunHooks hooks;
  hooks.corrupt_slot = 4;
  auto r = cmd_run(c, 1, "", hooks);
  EXPECT_EQ(r.exit_code, kExitDeterministic);
}

TEST(Run, StatisticalChecksNeedPower) {
  auto j = base_config();
  j["verify"] = {"iid_profit"};
  j["replications"] = 10;
  EXPECT_THROW(cmd_run(parse_config(j), 1, ""), ConfigError);
}

TEST(Oracle, PhiOptAndLookahead) {
  auto c = parse_config(base_config());
  auto r = cmd_oracle(c, "");
  EXPECT_EQ(r.summary["phi_opt_exact"], "1/2");

  auto dir = temp_dir("oracle");
  std::ofstream(dir / "t.csv") << "slot,p_1\n0,1\n1,2\n2,2\n3,1\n";
  std::ofstream(dir / "flat.csv") << "slot,p_1\n0,1\n1,1\n2,1\n3,1\n";
  auto j = base_config();
  j["source"] = {{"kind", "trace"}, {"path", "t.csv"}};
  j["horizon"] = 4;
  j["oracle"] = {{"mode", "lookahead"}, {"T", 2}};
  auto la = cmd_oracle(parse_config(j, dir.string()), "");
  ASSERT_EQ(la.summary["frames"].size(), 2u);
  EXPECT_EQ(la.summary["frames"][0]["psi"], "1.00");
  EXPECT_EQ(la.summary["frames"][1]["psi"], "1.00");
  j["source"]["path"] = "flat.csv";
  auto flat = cmd_oracle(parse_config(j, dir.string()), "");
  for (const auto& f : flat.summary["frames"]) EXPECT_EQ(f["psi"], "0.00");
}

TEST(Verify, SavedTrajectoryAndEditedFile) {
  auto dir = temp_dir("verify");
  auto j = base_config();
  j["horizon"] = 200;
  j["output"] = {{"trajectories", true}};
  j["verify"] = {"queue_band", "queue_dynamics", "slot_optimality", "one_slot_drift"};
  auto c = parse_config(j);
  cmd_run(c, 1, dir.string());
  auto ok = cmd_verify(c, (dir / "trajectory_0.csv").string(), dir.string());
  EXPECT_EQ(ok.exit_code, kExitOk);

  std::string text = slurp(dir / "trajectory_0.csv");
  auto pos = text.find('\n', text.find('\n') + 1);  // end of first data row
  auto row_start = text.find('\n') + 1;
  std::string row = text.substr(row_start, pos - row_start);
  // Replace the queue column (second to last) with 0.
  auto last = row.rfind(',');
  auto prev = row.rfind(',', last - 1);
  row = row.substr(0, prev + 1) + "0" + row.substr(last);
  text = text.substr(0, row_start) + row + text.substr(pos);
  std::ofstream(dir / "edited.csv") << text;
  auto bad = cmd_verify(c, (dir / "edited.csv").string(), dir.string());
  EXPECT_EQ(bad.exit_code, kExitDeterministic);
}

TEST(Scaled, FlatAndSingleWindow) {
  auto j = base_config();
  j["scaled"] = {{"beta", 0.0}, {"T", 10}, {"M", 5}, {"windows", 3}};
  auto r = cmd_scaled(parse_config(j), "");
  for (const auto& w : r.summary["windows"]) EXPECT_EQ(w["scale"], 1.0);

  // One window equals a plain run over W slots started from fake shares.
  j["scaled"] = {{"beta", 0.3}, {"T", 10}, {"M", 5}, {"windows", 1}};
  j["trader"]["placeholder"] = true;
  j["horizon"] = 50;
  auto c = parse_config(j);
  auto one = cmd_scaled(c, "");
  auto plain = run_backtest(c.market, c.trader, c.source.source, 50, c.seed);
  EXPECT_EQ(one.summary["total_profit"], format_money(plain.cumulative_profit()));
}

TEST(TraceConvert, SamplesRandomSources) {
  auto dir = temp_dir("convert");
  auto c = parse_config(base_config());
  auto r = cmd_trace_convert(c, dir.string());
  EXPECT_EQ(r.summary["slots"], 10);
  auto text = slurp(dir / "trace.csv");
  EXPECT_EQ(text.substr(0, 9), "slot,p_1\n");
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(CapacityError("x")), kExitCapacity);
  EXPECT_EQ(exit_code_for(ConfigError("/a", "x")), kExitConfig);
  EXPECT_EQ(exit_code_for(StatisticalPowerError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}
