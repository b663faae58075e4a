#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyaptrade/dynamic_trader.hpp"
#include "lyaptrade/oracles.hpp"

namespace lyaptrade {

/// 1/2 sum (Q_n - theta_n)^2.
double lyapunov(const std::vector<Shares>& queue, const std::vector<Rational>& theta);

/// L(Q(t0 + T)) - L(Q(t0)) along a trajectory.
double sample_path_drift(const Trajectory& traj, std::int64_t t0, std::int64_t T);

struct BoundConstants {
  std::int64_t T = 1;
  double epsilon = 0.0;
  double sum_mu_sq = 0.0;
  double B = 0.0;
  double B_tilde = 0.0;
  double D = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
};

BoundConstants compute_constants(const MarketSpec& spec, std::int64_t T, double epsilon);

enum class Verdict { kPass, kVacuousPass, kFail };
const char* verdict_name(Verdict v);

struct BoundReport {
  std::string check;
  Verdict verdict = Verdict::kPass;
  /// Smallest (right side - left side) seen, in the inequality's own units.
  double slack = 0.0;
  /// Slot (or frame start) of the smallest slack; -1 when nothing was checked.
  std::int64_t locus = -1;
  std::int64_t checked = 0;
  std::string detail;

  bool statistical = false;
  double estimate = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  std::int64_t samples = 0;

  bool ok() const { return verdict != Verdict::kFail; }
};

nlohmann::json report_to_json(const BoundReport& r);

/// Keeps the worst verdict and smallest slack; `check` names are joined.
BoundReport merge_reports(const std::vector<BoundReport>& reports, const std::string& check);

/// Queue stays in [mu_max, V p_max + 3 mu_max]; no sale while the queue is
/// below theta - V p_max; no purchase while it is above theta.
BoundReport verify_queue_band(const Trajectory& traj);

/// Each recorded queue equals max(Q - mu + A, 0) of the previous one.
BoundReport verify_queue_dynamics(const Trajectory& traj);

/// With place-holder shares: real holdings never negative and every sale
/// covered by real holdings.
BoundReport verify_real_holdings(const Trajectory& traj);

/// Per-slot drift-plus-penalty optimality against the given alternatives
/// (alternatives[t] for slot t). Throws StructuralError naming the broken
/// constraint when an alternative is infeasible.
BoundReport verify_slot_optimality(const Trajectory& traj,
                                   const std::vector<std::vector<TradeDecision>>& alternatives);

/// Same check against every feasible decision of every slot.
BoundReport verify_slot_optimality_exhaustive(const Trajectory& traj);

/// One-slot drift bound L(Q(t+1)) - L(Q(t)) <= 1/2 sum (mu-A)^2 - sum (Q-theta)(mu-A)
/// at every slot.
BoundReport verify_one_slot_drift(const Trajectory& traj);

/// T-slot drift bound T^2 B~ - sum (Q(t0)-theta) sum (mu-A) on frames
/// starting at every multiple of `stride`.
BoundReport verify_tslot_drift(const Trajectory& traj, std::int64_t T, std::int64_t stride = 1);

/// Inequality over a frame [t0, t0+T): drift minus V times profit against an
/// alternative decision sequence (length T, feasible without ownership).
BoundReport verify_frame_inequality(const Trajectory& traj, const std::vector<TradeDecision>& alt,
                               std::int64_t t0, std::int64_t T);

/// Shifted-queue bound between slots t0 <= tau with an alternative decision
/// for slot tau.
BoundReport verify_shifted_queue(const Trajectory& traj, std::int64_t t0, std::int64_t tau,
                                 const TradeDecision& alt);

/// Deterministic frame bound: average profit over M frames of T slots is at
/// least the average lookahead profit minus D T / V minus L(Q(0)) / (M T V).
/// `psi` holds one lookahead profit (cents) per frame.
BoundReport verify_frame_bound(const Trajectory& traj, const std::vector<Money>& psi, std::int64_t M,
                        std::int64_t T);

struct TimeAverage {
  double mean = 0.0;
  double sigma_mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
};

/// (1/t) sum of the first t slot profits, dollars per slot.
double time_avg_profit(const Trajectory& traj, std::int64_t t);
/// Mean over runs with a normal-approximation interval of +-3 standard errors.
TimeAverage time_avg_profit(const std::vector<double>& per_run);
TimeAverage time_avg_profit(const std::vector<Trajectory>& runs, std::int64_t t);

/// Statistical check of mean >= phi_opt - B/V - L0/(V t) with a 3-sigma margin.
BoundReport verify_iid_profit(const TimeAverage& avg, double phi_opt, const BoundConstants& c,
                               const Rational& V, double L0, std::int64_t t);

/// Statistical check of mean >= phi_opt - C2 eps - C1 T / V - L0 / (V M T).
BoundReport verify_markov_profit(const TimeAverage& avg, double phi_opt, const BoundConstants& c,
                               const Rational& V, double L0, std::int64_t M);

struct MemoryEstimate {
  std::int64_t T = 1;
  /// Worst deviation including a 3-sigma Monte Carlo allowance.
  double epsilon = 0.0;
  double drift_dev = 0.0;
  double profit_dev = 0.0;
  std::int64_t paths = 0;
};

/// Monte Carlo estimate of how far T-slot window averages of the given
/// price-only policy stray from their steady-state values, over every
/// possible state preceding the window.
MemoryEstimate estimate_memory(const MarkovPriceModel& model, const PonlySolution& policy,
                               std::int64_t T, std::int64_t paths_per_state, std::uint64_t seed);

}  // namespace lyaptrade
