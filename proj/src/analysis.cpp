#include "lyaptrade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

using i128 = __int128;

// Records exact margins (right side minus left side, scaled by `unit`).
class Tracker {
 public:
  Tracker(BoundReport& r, long double unit) : r_(r), unit_(unit) {}

  void note(i128 diff, std::int64_t locus) {
    double s = static_cast<double>(static_cast<long double>(diff) / unit_);
    if (r_.checked == 0 || s < r_.slack || (diff < 0 && r_.verdict != Verdict::kFail)) {
      r_.slack = s;
      r_.locus = locus;
    }
    if (diff < 0) r_.verdict = Verdict::kFail;
    ++r_.checked;
  }

 private:
  BoundReport& r_;
  long double unit_;
};

i128 gap(const ObjectiveScale& os, std::size_t n, Shares q) {
  return static_cast<i128>(q) * os.scale - os.theta_scaled[n];
}

// 2 S^2 L(Q) = sum (Q S - theta S)^2.
i128 lyapunov_scaled(const ObjectiveScale& os, const std::vector<Shares>& q) {
  i128 v = 0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    i128 g = gap(os, n, q[n]);
    v += g * g;
  }
  return v;
}

std::int64_t sum_mu_sq(const MarketSpec& spec) {
  std::int64_t s = 0;
  for (const auto& st : spec.stocks) s += st.mu_max * st.mu_max;
  return s;
}

void check_frame(const Trajectory& traj, std::int64_t t0, std::int64_t T) {
  if (T < 1) throw RangeError("T must be a positive integer");
  if (t0 < 0 || t0 + T > static_cast<std::int64_t>(traj.size())) {
    throw RangeError("frame [" + std::to_string(t0) + ", " + std::to_string(t0 + T) +
                     ") outside a trajectory of " + std::to_string(traj.size()) + " slots");
  }
}

std::string describe(const Feasibility& f) {
  std::string s;
  for (const auto& v : f.violations) {
    if (!s.empty()) s += ", ";
    s += constraint_name(v.constraint);
    if (v.stock >= 0) s += " (stock " + std::to_string(v.stock) + ")";
  }
  return s;
}

BoundReport named(const std::string& check) {
  BoundReport r;
  r.check = check;
  return r;
}

}  // namespace

double lyapunov(const std::vector<Shares>& queue, const std::vector<Rational>& theta) {
  if (queue.size() != theta.size()) throw StructuralError("queue and theta lengths differ");
  double v = 0.0;
  for (std::size_t n = 0; n < queue.size(); ++n) {
    double g = static_cast<double>(queue[n]) - theta[n].to_double();
    v += g * g;
  }
  return 0.5 * v;
}

double sample_path_drift(const Trajectory& traj, std::int64_t t0, std::int64_t T) {
  check_frame(traj, t0, T);
  return lyapunov(traj.queue_at(t0 + T), traj.params.theta) - lyapunov(traj.queue_at(t0), traj.params.theta);
}

BoundConstants compute_constants(const MarketSpec& spec, std::int64_t T, double epsilon) {
  if (T < 1) throw RangeError("T must be a positive integer");
  if (epsilon < 0) throw RangeError("epsilon must be non-negative");
  BoundConstants c;
  c.T = T;
  c.epsilon = epsilon;
  double mu_sum = 0.0, pmax_sum = 0.0;
  for (const auto& s : spec.stocks) {
    c.sum_mu_sq += static_cast<double>(s.mu_max * s.mu_max);
    mu_sum += static_cast<double>(s.mu_max);
    pmax_sum += to_dollars(s.p_max);
  }
  const double t = static_cast<double>(T);
  c.B = 0.5 * c.sum_mu_sq;
  c.B_tilde = 0.5 * (1.0 + 1.0 / (t * t)) * c.sum_mu_sq;
  c.D = (1.5 + 0.5 / (t * t) + 1.0 / t) * c.sum_mu_sq;
  c.C1 = c.D + epsilon / t * mu_sum;
  c.C2 = 1.0 + pmax_sum;
  return c;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kVacuousPass: return "vacuous_pass";
    case Verdict::kFail: return "fail";
  }
  return "?";
}

nlohmann::json report_to_json(const BoundReport& r) {
  nlohmann::json j = {{"check", r.check},
                      {"verdict", verdict_name(r.verdict)},
                      {"slack", r.slack},
                      {"locus", r.locus},
                      {"checked", r.checked}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  if (r.statistical) {
    j["estimate"] = r.estimate;
    j["bound"] = r.bound;
    j["sigma"] = r.sigma;
    j["samples"] = r.samples;
  }
  return j;
}

BoundReport merge_reports(const std::vector<BoundReport>& reports, const std::string& check) {
  BoundReport out = named(check);
  bool first = true;
  for (const auto& r : reports) {
    if (r.checked == 0 && !r.statistical) continue;
    out.checked += r.checked;
    out.statistical = out.statistical || r.statistical;
    if (r.verdict == Verdict::kFail) {
      out.verdict = Verdict::kFail;
    } else if (r.verdict == Verdict::kVacuousPass && out.verdict == Verdict::kPass) {
      out.verdict = Verdict::kVacuousPass;
    }
    if (first || r.slack < out.slack) {
      out.slack = r.slack;
      out.locus = r.locus;
      out.detail = r.detail;
    }
    first = false;
  }
  return out;
}

BoundReport verify_queue_band(const Trajectory& traj) {
  BoundReport r = named("queue_band");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  Tracker tr(r, static_cast<long double>(os.scale));
  const std::size_t N = traj.spec.size();
  for (std::size_t t = 0; t <= traj.size(); ++t) {
    const auto& q = traj.queue_at(t);
    for (std::size_t n = 0; n < N; ++n) {
      const auto& s = traj.spec.stock(n);
      i128 qs = static_cast<i128>(q[n]) * os.scale;
      i128 lo = static_cast<i128>(s.mu_max) * os.scale;
      i128 hi = static_cast<i128>(os.v_per_cent) * s.p_max + static_cast<i128>(3 * s.mu_max) * os.scale;
      tr.note(std::min(qs - lo, hi - qs), static_cast<std::int64_t>(t));
      if (t == traj.size()) continue;
      const auto& d = traj.records[t].decision;
      bool below = qs < os.theta_scaled[n] - static_cast<i128>(os.v_per_cent) * s.p_max;
      if (below && d.sells[n] != 0) {
        tr.note(-static_cast<i128>(d.sells[n]) * os.scale, static_cast<std::int64_t>(t));
        r.detail = "sale below the no-sell threshold, stock " + std::to_string(n);
      }
      if (qs > os.theta_scaled[n] && d.buys[n] != 0) {
        tr.note(-static_cast<i128>(d.buys[n]) * os.scale, static_cast<std::int64_t>(t));
        r.detail = "purchase above theta, stock " + std::to_string(n);
      }
    }
  }
  return r;
}

BoundReport verify_queue_dynamics(const Trajectory& traj) {
  BoundReport r = named("queue_dynamics");
  Tracker tr(r, 1.0L);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& q = traj.queue_at(t);
    const auto& d = traj.records[t].decision;
    const auto& next = traj.records[t].queue_after;
    if (q.size() != traj.spec.size() || next.size() != q.size() || d.size() != q.size()) {
      throw StructuralError("trajectory record " + std::to_string(t) + " has the wrong width");
    }
    for (std::size_t n = 0; n < q.size(); ++n) {
      Shares expect = std::max<Shares>(q[n] - d.sells[n] + d.buys[n], 0);
      tr.note(expect == next[n] ? 0 : -std::abs(expect - next[n]), static_cast<std::int64_t>(t));
    }
  }
  return r;
}

BoundReport verify_real_holdings(const Trajectory& traj) {
  BoundReport r = named("real_holdings");
  Tracker tr(r, 1.0L);
  for (std::size_t t = 0; t <= traj.size(); ++t) {
    auto real = traj.real_queue_at(t);
    for (std::size_t n = 0; n < real.size(); ++n) {
      Shares sold = t < traj.size() ? traj.records[t].decision.sells[n] : 0;
      tr.note(std::min(real[n], real[n] - sold), static_cast<std::int64_t>(t));
    }
  }
  return r;
}

BoundReport verify_slot_optimality(const Trajectory& traj,
                                   const std::vector<std::vector<TradeDecision>>& alternatives) {
  BoundReport r = named("slot_optimality");
  if (alternatives.size() > traj.size()) throw RangeError("more alternative lists than slots");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  Tracker tr(r, static_cast<long double>(os.scale));
  for (std::size_t t = 0; t < alternatives.size(); ++t) {
    const auto& rec = traj.records[t];
    const auto& q = traj.queue_at(t);
    i128 mine = slot_objective(os, traj.spec, rec.prices, q, rec.decision);
    for (const auto& alt : alternatives[t]) {
      auto f = validate_decision(traj.spec, rec.prices, q, alt, ValidateOptions{true, true});
      if (!f.ok()) {
        throw StructuralError("alternative at slot " + std::to_string(t) + " violates " + describe(f));
      }
      tr.note(slot_objective(os, traj.spec, rec.prices, q, alt) - mine, static_cast<std::int64_t>(t));
    }
  }
  return r;
}

BoundReport verify_slot_optimality_exhaustive(const Trajectory& traj) {
  std::vector<std::vector<TradeDecision>> alts(traj.size());
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& q = traj.queue_at(t);
    auto set = enumerate_actions(traj.spec, traj.records[t].prices);
    for (auto& d : set.actions) {
      bool owned = true;
      for (std::size_t n = 0; n < q.size(); ++n) owned = owned && d.sells[n] <= q[n];
      if (owned) alts[t].push_back(std::move(d));
    }
  }
  return verify_slot_optimality(traj, alts);
}

BoundReport verify_one_slot_drift(const Trajectory& traj) {
  BoundReport r = named("one_slot_drift");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  const long double S = static_cast<long double>(os.scale);
  Tracker tr(r, 2 * S * S);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& q = traj.queue_at(t);
    const auto& d = traj.records[t].decision;
    i128 lhs = lyapunov_scaled(os, traj.queue_at(t + 1)) - lyapunov_scaled(os, q);
    i128 sq = 0, cross = 0;
    for (std::size_t n = 0; n < q.size(); ++n) {
      i128 net = d.sells[n] - d.buys[n];
      sq += net * net;
      cross += gap(os, n, q[n]) * net;
    }
    i128 rhs = static_cast<i128>(os.scale) * os.scale * sq - 2 * static_cast<i128>(os.scale) * cross;
    tr.note(rhs - lhs, static_cast<std::int64_t>(t));
  }
  return r;
}

BoundReport verify_tslot_drift(const Trajectory& traj, std::int64_t T, std::int64_t stride) {
  if (T < 1 || stride < 1) throw RangeError("T and stride must be positive");
  BoundReport r = named("tslot_drift");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  const i128 S = os.scale;
  Tracker tr(r, 2 * static_cast<long double>(S) * static_cast<long double>(S));
  const i128 musq = sum_mu_sq(traj.spec);
  const std::int64_t len = static_cast<std::int64_t>(traj.size());
  for (std::int64_t t0 = 0; t0 + T <= len; t0 += stride) {
    const auto& q = traj.queue_at(t0);
    i128 lhs = lyapunov_scaled(os, traj.queue_at(t0 + T)) - lyapunov_scaled(os, q);
    i128 cross = 0;
    for (std::size_t n = 0; n < q.size(); ++n) {
      i128 net = 0;
      for (std::int64_t tau = t0; tau < t0 + T; ++tau) {
        net += traj.records[tau].decision.sells[n] - traj.records[tau].decision.buys[n];
      }
      cross += gap(os, n, q[n]) * net;
    }
    i128 rhs = static_cast<i128>(T * T + 1) * S * S * musq - 2 * S * cross;
    tr.note(rhs - lhs, t0);
  }
  return r;
}

BoundReport verify_frame_inequality(const Trajectory& traj, const std::vector<TradeDecision>& alt,
                               std::int64_t t0, std::int64_t T) {
  check_frame(traj, t0, T);
  if (static_cast<std::int64_t>(alt.size()) != T) throw StructuralError("alternative sequence length is not T");
  BoundReport r = named("frame_inequality");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  const i128 S = os.scale;
  const i128 vc = os.v_per_cent;
  Tracker tr(r, 2 * static_cast<long double>(S) * static_cast<long double>(S));
  const auto& q = traj.queue_at(t0);
  i128 profit = 0, alt_profit = 0;
  std::vector<i128> alt_net(q.size(), 0);
  for (std::int64_t k = 0; k < T; ++k) {
    const auto& rec = traj.records[t0 + k];
    auto f = validate_decision(traj.spec, rec.prices, traj.queue_at(t0 + k), alt[k], ValidateOptions{false, true});
    if (!f.ok()) {
      throw StructuralError("alternative at slot " + std::to_string(t0 + k) + " violates " + describe(f));
    }
    profit += rec.profit;
    alt_profit += slot_profit(traj.spec, rec.prices, alt[k]);
    for (std::size_t n = 0; n < q.size(); ++n) alt_net[n] += alt[k].sells[n] - alt[k].buys[n];
  }
  i128 lhs = lyapunov_scaled(os, traj.queue_at(t0 + T)) - lyapunov_scaled(os, q) - 2 * S * vc * profit;
  i128 abs_cross = 0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    i128 g = gap(os, n, q[n]);
    abs_cross += (g < 0 ? -g : g) * alt_net[n];
  }
  const i128 t = T;
  i128 rhs = (3 * t * t + 1 + 2 * t) * S * S * sum_mu_sq(traj.spec) - 2 * S * vc * alt_profit + 2 * S * abs_cross;
  tr.note(rhs - lhs, t0);
  return r;
}

BoundReport verify_shifted_queue(const Trajectory& traj, std::int64_t t0, std::int64_t tau,
                                 const TradeDecision& alt) {
  if (t0 < 0 || tau < t0 || tau >= static_cast<std::int64_t>(traj.size())) {
    throw RangeError("need 0 <= t0 <= tau < trajectory length");
  }
  BoundReport r = named("shifted_queue");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  const i128 S = os.scale;
  Tracker tr(r, static_cast<long double>(S));
  const auto& rec = traj.records[tau];
  auto f = validate_decision(traj.spec, rec.prices, traj.queue_at(tau), alt, ValidateOptions{false, true});
  if (!f.ok()) throw StructuralError("alternative at slot " + std::to_string(tau) + " violates " + describe(f));
  const auto& q0 = traj.queue_at(t0);
  auto side = [&](const TradeDecision& d, Money profit) {
    i128 v = -static_cast<i128>(os.v_per_cent) * profit;
    for (std::size_t n = 0; n < q0.size(); ++n) v -= gap(os, n, q0[n]) * (d.sells[n] - d.buys[n]);
    return v;
  };
  i128 lhs = side(rec.decision, rec.profit);
  i128 rhs = 2 * static_cast<i128>(tau - t0) * S * sum_mu_sq(traj.spec) +
             side(alt, slot_profit(traj.spec, rec.prices, alt));
  tr.note(rhs - lhs, tau);
  return r;
}

BoundReport verify_frame_bound(const Trajectory& traj, const std::vector<Money>& psi, std::int64_t M, std::int64_t T) {
  if (M < 1 || T < 1) throw RangeError("M and T must be positive");
  if (static_cast<std::int64_t>(traj.size()) < M * T) throw RangeError("trajectory shorter than M * T");
  if (static_cast<std::int64_t>(psi.size()) != M) throw StructuralError("need one lookahead value per frame");
  BoundReport r = named("frame_lookahead_bound");
  const auto os = ObjectiveScale::make(traj.spec, traj.params);
  const i128 S = os.scale;
  const i128 vc = os.v_per_cent;
  const long double unit = 2.0L * static_cast<long double>(S) * static_cast<long double>(S) *
                           static_cast<long double>(traj.params.V.to_double()) * static_cast<long double>(M * T);
  Tracker tr(r, unit);
  i128 profit = 0, psi_sum = 0;
  for (std::int64_t t = 0; t < M * T; ++t) profit += traj.records[t].profit;
  for (Money p : psi) psi_sum += p;
  const i128 t = T;
  i128 lhs = 2 * S * vc * profit;
  i128 rhs = 2 * S * vc * psi_sum - static_cast<i128>(M) * (3 * t * t + 1 + 2 * t) * S * S * sum_mu_sq(traj.spec) -
             lyapunov_scaled(os, traj.queue_at(0));
  tr.note(lhs - rhs, 0);
  r.estimate = to_dollars(static_cast<Money>(profit)) / static_cast<double>(M * T);
  r.bound = r.estimate - r.slack;
  return r;
}

double time_avg_profit(const Trajectory& traj, std::int64_t t) {
  if (t < 1 || t > static_cast<std::int64_t>(traj.size())) throw RangeError("t outside the trajectory");
  Money total = 0;
  for (std::int64_t k = 0; k < t; ++k) total += traj.records[k].profit;
  return to_dollars(total) / static_cast<double>(t);
}

TimeAverage time_avg_profit(const std::vector<double>& per_run) {
  TimeAverage a;
  a.samples = per_run.size();
  if (per_run.empty()) return a;
  a.mean = std::accumulate(per_run.begin(), per_run.end(), 0.0) / static_cast<double>(a.samples);
  if (a.samples > 1) {
    double ss = 0.0;
    for (double x : per_run) ss += (x - a.mean) * (x - a.mean);
    a.sigma_mean = std::sqrt(ss / static_cast<double>(a.samples - 1) / static_cast<double>(a.samples));
  }
  a.ci_low = a.mean - 3.0 * a.sigma_mean;
  a.ci_high = a.mean + 3.0 * a.sigma_mean;
  return a;
}

TimeAverage time_avg_profit(const std::vector<Trajectory>& runs, std::int64_t t) {
  std::vector<double> per_run;
  per_run.reserve(runs.size());
  for (const auto& r : runs) per_run.push_back(time_avg_profit(r, t));
  return time_avg_profit(per_run);
}

namespace {

BoundReport statistical_check(const std::string& name, const TimeAverage& avg, double bound) {
  if (avg.samples < 30) {
    throw StatisticalPowerError(name + " needs at least 30 replications, got " + std::to_string(avg.samples));
  }
  BoundReport r = named(name);
  r.statistical = true;
  r.estimate = avg.mean;
  r.bound = bound;
  r.sigma = avg.sigma_mean;
  r.samples = static_cast<std::int64_t>(avg.samples);
  r.checked = 1;
  r.locus = 0;
  r.slack = avg.mean - (bound - 3.0 * avg.sigma_mean);
  if (r.slack < 0) {
    r.verdict = Verdict::kFail;
  } else if (bound < 0) {
    r.verdict = Verdict::kVacuousPass;
    r.detail = "bound is below zero, which any idle policy meets";
  }
  return r;
}

}  // namespace

BoundReport verify_iid_profit(const TimeAverage& avg, double phi_opt, const BoundConstants& c, const Rational& V,
                               double L0, std::int64_t t) {
  if (t < 1) throw RangeError("t must be positive");
  double v = V.to_double();
  return statistical_check("iid_profit_bound", avg, phi_opt - c.B / v - L0 / (v * static_cast<double>(t)));
}

BoundReport verify_markov_profit(const TimeAverage& avg, double phi_opt, const BoundConstants& c, const Rational& V,
                               double L0, std::int64_t M) {
  if (M < 1) throw RangeError("M must be positive");
  double v = V.to_double();
  double T = static_cast<double>(c.T);
  double bound = phi_opt - c.C2 * c.epsilon - c.C1 * T / v - L0 / (v * static_cast<double>(M) * T);
  return statistical_check("markov_profit_bound", avg, bound);
}

MemoryEstimate estimate_memory(const MarkovPriceModel& model, const PonlySolution& policy, std::int64_t T,
                               std::int64_t paths_per_state, std::uint64_t seed) {
  if (T < 1 || paths_per_state < 2) throw RangeError("need T >= 1 and at least two paths per state");
  const auto& acts = policy.policy.actions;
  const std::size_t N = acts.empty() ? 0 : acts[0].price.size();
  // Expected drift and profit of the policy at each merged price.
  std::vector<std::vector<double>> drift(acts.size(), std::vector<double>(N, 0.0));
  std::vector<double> profit(acts.size(), 0.0);
  for (std::size_t k = 0; k < acts.size(); ++k) {
    for (std::size_t a = 0; a < acts[k].size(); ++a) {
      double w = policy.policy.q[k][a];
      profit[k] += w * to_dollars(acts[k].profit[a]);
      for (std::size_t n = 0; n < N; ++n) {
        drift[k][n] += w * static_cast<double>(acts[k].actions[a].buys[n] - acts[k].actions[a].sells[n]);
      }
    }
  }
  std::vector<std::size_t> slot_of(model.num_states());
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    auto it = std::find_if(acts.begin(), acts.end(), [&](const ActionSet& a) { return a.price == model.price(s); });
    if (it == acts.end()) throw StructuralError("policy has no entry for the price of state " + std::to_string(s));
    slot_of[s] = static_cast<std::size_t>(it - acts.begin());
  }

  MemoryEstimate est;
  est.T = T;
  est.paths = paths_per_state * static_cast<std::int64_t>(model.num_states());
  const double R = static_cast<double>(paths_per_state);
  for (std::size_t start = 0; start < model.num_states(); ++start) {
    CounterRng rng(seed, start);
    std::vector<double> sum_d(N, 0.0), sq_d(N, 0.0);
    double sum_p = 0.0, sq_p = 0.0;
    for (std::int64_t path = 0; path < paths_per_state; ++path) {
      std::size_t state = start;
      std::vector<double> d(N, 0.0);
      double p = 0.0;
      for (std::int64_t k = 0; k < T; ++k) {
        state = model.next_state(state, rng);
        std::size_t idx = slot_of[state];
        p += profit[idx];
        for (std::size_t n = 0; n < N; ++n) d[n] += drift[idx][n];
      }
      p /= static_cast<double>(T);
      sum_p += p;
      sq_p += p * p;
      for (std::size_t n = 0; n < N; ++n) {
        d[n] /= static_cast<double>(T);
        sum_d[n] += d[n];
        sq_d[n] += d[n] * d[n];
      }
    }
    auto se = [&](double sum, double sq) {
      double mean = sum / R;
      double var = std::max(0.0, (sq - R * mean * mean) / (R - 1.0));
      return std::sqrt(var / R);
    };
    for (std::size_t n = 0; n < N; ++n) {
      double dev = std::abs(sum_d[n] / R) + 3.0 * se(sum_d[n], sq_d[n]);
      est.drift_dev = std::max(est.drift_dev, dev);
    }
    double pdev = std::abs(policy.phi_opt - sum_p / R) + 3.0 * se(sum_p, sq_p);
    est.profit_dev = std::max(est.profit_dev, pdev);
  }
  est.epsilon = std::max(est.drift_dev, est.profit_dev);
  return est;
}

}  // namespace lyaptrade
