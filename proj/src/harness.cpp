#include "lyaptrade/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lyaptrade/analysis.hpp"
#include "lyaptrade/error.hpp"
#include "lyaptrade/trajectory_io.hpp"

namespace lyaptrade {

namespace {

using nlohmann::json;

json header(const ExperimentConfig& cfg, const std::string& command) {
  return {{"tool", "lyaptrade"},
          {"version", LYAPTRADE_VERSION},
          {"command", command},
          {"rng", {{"name", CounterRng::kName}, {"version", CounterRng::kVersion}}},
          {"config", config_to_json(cfg)}};
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (std::filesystem::path(dir) / name).string());
  out << text;
}

void write_summary(const std::string& dir, const std::string& name, const json& j) {
  write_text(dir, name, j.dump(2) + "\n");
}

json constants_to_json(const BoundConstants& c) {
  return {{"T", c.T}, {"epsilon", c.epsilon}, {"B", c.B}, {"B_tilde", c.B_tilde},
          {"D", c.D}, {"C1", c.C1},           {"C2", c.C2}};
}

bool wants(const ExperimentConfig& cfg, const std::string& check) {
  return std::find(cfg.verify.begin(), cfg.verify.end(), check) != cfg.verify.end();
}

std::int64_t frame_T(const ExperimentConfig& cfg) { return cfg.oracle.T; }

std::vector<PriceVector> sample_prices(const ExperimentConfig& cfg, std::int64_t count) {
  PriceStream stream(cfg.source.source, CounterRng(cfg.seed, 0), cfg.source.initial_state);
  if (auto left = stream.remaining(); left && static_cast<std::int64_t>(*left) < count) {
    throw StructuralError("trace has " + std::to_string(*left) + " slots, need " + std::to_string(count));
  }
  std::vector<PriceVector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t t = 0; t < count; ++t) out.push_back(stream.next());
  return out;
}

// Deterministic checks selected in the config, on one trajectory.
std::vector<BoundReport> deterministic_checks(const ExperimentConfig& cfg, const Trajectory& traj) {
  std::vector<BoundReport> out;
  for (const auto& name : cfg.verify) {
    if (name == "queue_band") {
      out.push_back(verify_queue_band(traj));
    } else if (name == "queue_dynamics") {
      out.push_back(verify_queue_dynamics(traj));
    } else if (name == "real_holdings") {
      out.push_back(verify_real_holdings(traj));
    } else if (name == "slot_optimality") {
      out.push_back(verify_slot_optimality_exhaustive(traj));
    } else if (name == "one_slot_drift") {
      out.push_back(verify_one_slot_drift(traj));
    } else if (name == "tslot_drift") {
      out.push_back(verify_tslot_drift(traj, frame_T(cfg), frame_T(cfg)));
    } else if (name == "frame_lookahead") {
      const std::int64_t T = frame_T(cfg);
      std::int64_t M = cfg.oracle.M > 0 ? cfg.oracle.M : static_cast<std::int64_t>(traj.size()) / T;
      if (M < 1) throw ConfigError("/oracle/T", "horizon shorter than one lookahead frame");
      std::vector<PriceVector> prices;
      for (const auto& r : traj.records) prices.push_back(r.prices);
      std::vector<Money> psi;
      for (const auto& f : lookahead_frames(traj.spec, prices, T, M)) psi.push_back(f.psi);
      out.push_back(verify_frame_bound(traj, psi, M, T));
    }
  }
  return out;
}

struct Replication {
  json summary;
  double avg = 0.0;
  std::vector<BoundReport> reports;
};

template <class Fn>
void parallel_for(std::int64_t count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  auto worker = [&]() {
    while (true) {
      std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_lock);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

int verdict_exit(const std::vector<BoundReport>& reports) {
  bool det = false, stat = false;
  for (const auto& r : reports) {
    if (r.ok()) continue;
    (r.statistical ? stat : det) = true;
  }
  return det ? kExitDeterministic : stat ? kExitStatistical : kExitOk;
}

std::string trajectory_name(std::int64_t rep) { return "trajectory_" + std::to_string(rep) + ".csv"; }

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CapacityError*>(&e)) return kExitCapacity;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const StatisticalPowerError*>(&e)) return kExitConfig;
  return 1;
}

PonlySolution source_phi_opt(const ExperimentConfig& cfg) {
  if (const auto* d = std::get_if<PriceDistribution>(&cfg.source.source)) return solve_phi_opt(cfg.market, *d);
  if (const auto* m = std::get_if<MarkovPriceModel>(&cfg.source.source)) {
    return solve_phi_opt(cfg.market, stationary_distribution(*m));
  }
  throw ConfigError("/source/kind", "phi_opt needs an iid or markov source");
}

CommandResult cmd_run(const ExperimentConfig& cfg, int jobs, const std::string& out_dir, const RunHooks& hooks) {
  CommandResult res;
  const bool want_iid = wants(cfg, "iid_profit");
  const bool want_markov = wants(cfg, "markov_profit");
  if (want_iid && cfg.source.kind != "iid") throw ConfigError("/verify", "iid_profit needs an iid source");
  if (want_markov && cfg.source.kind != "markov") throw ConfigError("/verify", "markov_profit needs a markov source");
  if ((want_iid || want_markov) && cfg.replications < 30) {
    throw ConfigError("/replications", "statistical checks need at least 30 replications");
  }

  std::vector<Replication> reps(static_cast<std::size_t>(cfg.replications));
  BacktestOptions opts;
  opts.markov_initial_state = cfg.source.initial_state;
  parallel_for(cfg.replications, jobs, [&](std::int64_t r) {
    BacktestOptions o = opts;
    o.stream = static_cast<std::uint64_t>(r);
    Trajectory traj = run_backtest(cfg.market, cfg.trader, cfg.source.source, cfg.horizon, cfg.seed, o);
    if (r == 0 && hooks.corrupt_slot) {
      auto k = static_cast<std::size_t>(*hooks.corrupt_slot);
      if (k >= traj.size()) throw ConfigError("/horizon", "corrupt slot beyond the horizon");
      traj.records[k].queue_after[0] = 0;
    }
    auto& rep = reps[static_cast<std::size_t>(r)];
    rep.summary = trajectory_summary(traj);
    rep.summary["id"] = r;
    rep.avg = time_avg_profit(traj, static_cast<std::int64_t>(traj.size()));
    rep.reports = deterministic_checks(cfg, traj);
    if (cfg.output.trajectories && !out_dir.empty()) {
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      write_text(out_dir, trajectory_name(r), csv.str());
    }
  });

  std::vector<double> avgs;
  json runs = json::array();
  std::vector<std::string> order;
  for (const auto& name : cfg.verify) {
    if (!is_statistical_check(name)) order.push_back(name);
  }
  std::vector<std::vector<BoundReport>> by_check(order.size());
  for (auto& rep : reps) {
    avgs.push_back(rep.avg);
    runs.push_back(rep.summary);
    for (std::size_t k = 0; k < rep.reports.size(); ++k) by_check[k].push_back(rep.reports[k]);
  }
  std::vector<BoundReport> merged;
  for (std::size_t k = 0; k < order.size(); ++k) {
    BoundReport m = merge_reports(by_check[k], order[k]);
    for (std::size_t r = 0; r < by_check[k].size(); ++r) {
      if (!by_check[k][r].ok()) {
        m.detail = "replication " + std::to_string(r) + ", slot " + std::to_string(by_check[k][r].locus) +
                   (by_check[k][r].detail.empty() ? "" : ": " + by_check[k][r].detail);
        break;
      }
    }
    merged.push_back(m);
  }

  TimeAverage avg = time_avg_profit(avgs);
  json summary = header(cfg, "run");
  const TraderParams resolved = resolve_params(cfg.market, cfg.trader);
  json params = trader_to_json(resolved);
  params["theta_conforms"] = theta_conforms(cfg.market, cfg.trader);
  params["initial_queue_conforms"] = initial_queue_conforms(cfg.market, cfg.trader);
  summary["params"] = params;
  summary["profit"] = {{"mean", avg.mean}, {"sigma_mean", avg.sigma_mean}, {"ci_low", avg.ci_low},
                       {"ci_high", avg.ci_high}, {"samples", avg.samples}};

  const double L0 = lyapunov(resolved.initial_queue, resolved.theta);
  if (want_iid) {
    auto sol = source_phi_opt(cfg);
    auto c = compute_constants(cfg.market, 1, 0.0);
    summary["phi_opt"] = sol.phi_opt;
    summary["constants"] = constants_to_json(c);
    merged.push_back(verify_iid_profit(avg, sol.phi_opt, c, resolved.V, L0, cfg.horizon));
  }
  if (want_markov) {
    auto sol = drift_rebalance(source_phi_opt(cfg));
    const auto& model = std::get<MarkovPriceModel>(cfg.source.source);
    double eps = cfg.memory.epsilon;
    if (cfg.memory.estimate) {
      auto est = estimate_memory(model, sol, cfg.memory.T, cfg.memory.paths, cfg.seed);
      eps = est.epsilon;
      summary["memory"] = {{"T", est.T}, {"epsilon", est.epsilon}, {"drift_dev", est.drift_dev},
                           {"profit_dev", est.profit_dev}, {"paths", est.paths}};
    }
    auto c = compute_constants(cfg.market, cfg.memory.T, eps);
    const std::int64_t M = cfg.horizon / cfg.memory.T;
    if (M < 1) throw ConfigError("/memory/T", "horizon shorter than T");
    if (M * cfg.memory.T != cfg.horizon) {
      throw ConfigError("/horizon", "markov_profit needs a horizon that is a multiple of memory.T");
    }
    summary["phi_opt"] = sol.phi_opt;
    summary["constants"] = constants_to_json(c);
    merged.push_back(verify_markov_profit(avg, sol.phi_opt, c, resolved.V, L0, M));
  }

  json reports = json::array();
  for (const auto& r : merged) reports.push_back(report_to_json(r));
  summary["reports"] = reports;
  summary["replications"] = runs;
  res.exit_code = verdict_exit(merged);
  summary["exit_code"] = res.exit_code;
  res.summary = summary;
  write_summary(out_dir, "summary.json", summary);
  return res;
}

CommandResult cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir) {
  CommandResult res;
  json summary = header(cfg, "oracle");
  if (cfg.oracle.mode == "phi_opt") {
    auto sol = source_phi_opt(cfg);
    auto flat = drift_rebalance(sol);
    auto policy_json = [](const PonlySolution& s) {
      json prices = json::array();
      for (std::size_t k = 0; k < s.policy.actions.size(); ++k) {
        const auto& set = s.policy.actions[k];
        json acts = json::array();
        for (std::size_t a = 0; a < set.size(); ++a) {
          if (s.policy.q[k][a] <= 0.0) continue;
          acts.push_back({{"buys", set.actions[a].buys},
                          {"sells", set.actions[a].sells},
                          {"probability", s.policy.q[k][a]},
                          {"profit", format_money(set.profit[a])}});
        }
        json price = json::array();
        for (Money m : set.price.prices) price.push_back(format_money(m));
        prices.push_back({{"price", price}, {"probability", s.policy.price_probs[k]}, {"actions", acts}});
      }
      return json{{"phi", s.phi}, {"drifts", s.drifts}, {"policy", prices}};
    };
    summary["phi_opt"] = sol.phi_opt;
    if (sol.exact) summary["phi_opt_exact"] = sol.phi_opt_exact;
    summary["exact"] = sol.exact;
    summary["solution"] = policy_json(sol);
    summary["rebalanced"] = policy_json(flat);
  } else {
    const std::int64_t T = cfg.oracle.T;
    std::int64_t horizon = cfg.horizon;
    if (const auto* tr = std::get_if<PriceTrace>(&cfg.source.source)) {
      horizon = std::min<std::int64_t>(horizon, static_cast<std::int64_t>(tr->size()));
    }
    const std::int64_t M = cfg.oracle.M > 0 ? cfg.oracle.M : horizon / T;
    if (M < 1) throw ConfigError("/oracle/T", "horizon shorter than one lookahead frame");
    auto prices = sample_prices(cfg, M * T);
    json frames = json::array();
    Money total = 0;
    for (const auto& f : lookahead_frames(cfg.market, prices, T, M)) {
      json decisions = json::array();
      for (const auto& d : f.decisions) decisions.push_back({{"buys", d.buys}, {"sells", d.sells}});
      frames.push_back({{"psi", format_money(f.psi)}, {"nodes", f.nodes}, {"decisions", decisions}});
      total += f.psi;
    }
    summary["T"] = T;
    summary["M"] = M;
    summary["frames"] = frames;
    summary["psi_total"] = format_money(total);
  }
  summary["exit_code"] = res.exit_code;
  res.summary = summary;
  write_summary(out_dir, "oracle.json", summary);
  return res;
}

CommandResult cmd_verify(const ExperimentConfig& cfg, const std::string& trajectory_csv, const std::string& out_dir) {
  CommandResult res;
  std::ifstream in(trajectory_csv);
  if (!in) throw ConfigError("/", "cannot open trajectory file " + trajectory_csv);
  Trajectory traj;
  try {
    traj = read_trajectory_csv(in, cfg.market, cfg.trader);
  } catch (const ParseError& e) {
    throw ConfigError("/", trajectory_csv + ": " + e.what());
  }
  std::vector<BoundReport> reports = deterministic_checks(cfg, traj);
  json summary = header(cfg, "verify");
  summary["trajectory"] = trajectory_csv;
  summary["slots"] = traj.size();
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  summary["reports"] = arr;
  json skipped = json::array();
  for (const auto& name : cfg.verify) {
    if (is_statistical_check(name)) skipped.push_back(name);
  }
  if (!skipped.empty()) summary["skipped"] = skipped;
  res.exit_code = verdict_exit(reports);
  summary["exit_code"] = res.exit_code;
  res.summary = summary;
  write_summary(out_dir, "verify.json", summary);
  return res;
}

CommandResult cmd_scaled(const ExperimentConfig& cfg, const std::string& out_dir) {
  CommandResult res;
  const auto& sc = cfg.scaled;
  auto run = scaled_windows_run(cfg.market, cfg.trader, sc.beta, sc.T, sc.M, sc.windows, cfg.source.source,
                                cfg.seed);
  json summary = header(cfg, "scaled");
  json windows = json::array();
  std::ostringstream csv;
  csv << "window,scale,V,profit,q,alpha,wealth\n";
  Money wealth = 0;
  for (const auto& w : run.windows) {
    wealth += w.profit;
    json wj = window_stats_to_json(w);
    wj["wealth"] = format_money(wealth);
    windows.push_back(wj);
    csv << w.window << ',' << w.scale << ',' << w.V.to_string() << ',' << format_money(w.profit) << ',' << w.q
        << ',' << w.alpha << ',' << format_money(wealth) << '\n';
  }
  summary["window_slots"] = sc.M * sc.T;
  summary["windows"] = windows;
  summary["total_profit"] = format_money(wealth);
  summary["exit_code"] = res.exit_code;
  res.summary = summary;
  write_text(out_dir, "windows.csv", csv.str());
  write_summary(out_dir, "scaled.json", summary);
  return res;
}

CommandResult cmd_trace_convert(const ExperimentConfig& cfg, const std::string& out_dir) {
  CommandResult res;
  PriceTrace trace;
  if (const auto* tr = std::get_if<PriceTrace>(&cfg.source.source)) {
    trace = *tr;
  } else {
    trace.sequence = sample_prices(cfg, cfg.horizon);
    trace.source = cfg.source.kind + " seed " + std::to_string(cfg.seed);
  }
  std::ostringstream csv;
  write_trace(csv, trace);
  write_text(out_dir, "trace.csv", csv.str());
  json summary = header(cfg, "trace-convert");
  summary["slots"] = trace.size();
  summary["exit_code"] = res.exit_code;
  res.summary = summary;
  return res;
}

}  // namespace lyaptrade
