#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lyaptrade/error.hpp"
#include "lyaptrade/harness.hpp"

using namespace lyaptrade;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "override the config seed");
  sub->add_option("--out", c.out, "output directory (default: config output.dir)");
  sub->add_option("--jobs", c.jobs, "worker threads for replications")->check(CLI::PositiveNumber);
}

void report(const CommandResult& r, const std::string& out_dir) {
  std::cout << "exit " << r.exit_code;
  if (!out_dir.empty()) std::cout << "  (results in " << out_dir << ")";
  std::cout << '\n';
  if (auto it = r.summary.find("reports"); it != r.summary.end()) {
    for (const auto& rep : *it) {
      std::cout << "  " << rep["check"].get<std::string>() << ": " << rep["verdict"].get<std::string>()
                << "  slack " << rep["slack"].dump() << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyaptrade: queue-based trading engine, oracles and bound checks"};
  app.require_subcommand(1);
  Common common;
  std::string trajectory;
  std::int64_t corrupt_slot = -1;

  auto* run = app.add_subcommand("run", "backtest one or more replications and run the configured checks");
  add_common(run, common);
  run->add_option("--test-corrupt-slot", corrupt_slot)->group("");

  auto* oracle = app.add_subcommand("oracle", "optimal price-only profit or per-frame lookahead profit");
  add_common(oracle, common);

  auto* verify = app.add_subcommand("verify", "check a saved trajectory CSV against the config");
  add_common(verify, common);
  verify->add_option("--trajectory", trajectory, "trajectory CSV")->required()->check(CLI::ExistingFile);

  auto* scaled = app.add_subcommand("scaled", "windowed run with growing trade sizes");
  add_common(scaled, common);

  auto* convert = app.add_subcommand("trace-convert", "write the configured source as a canonical trace CSV");
  add_common(convert, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    ExperimentConfig cfg = load_config_file(common.config, common.seed);
    std::string out = common.out.empty() ? cfg.output.dir : common.out;
    CommandResult res;
    if (run->parsed()) {
      RunHooks hooks;
      if (corrupt_slot >= 0) hooks.corrupt_slot = corrupt_slot;
      res = cmd_run(cfg, common.jobs, out, hooks);
    } else if (oracle->parsed()) {
      res = cmd_oracle(cfg, out);
    } else if (verify->parsed()) {
      res = cmd_verify(cfg, trajectory, out);
    } else if (scaled->parsed()) {
      res = cmd_scaled(cfg, out);
    } else {
      res = cmd_trace_convert(cfg, out);
    }
    report(res, out);
    return res.exit_code;
  } catch (const std::exception& e) {
    int code = exit_code_for(e);
    std::cerr << "lyaptrade: " << e.what() << '\n';
    if (code == kExitCapacity) std::cerr << "hint: switch to the greedy buy solver, shrink T, or raise LYAPTRADE_CAPACITY_CELLS\n";
    return code;
  }
}
