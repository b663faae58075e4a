#pragma once

#include <cstdint>
#include <vector>

#include "lyaptrade/dynamic_trader.hpp"
#include "lyaptrade/market_model.hpp"
#include "lyaptrade/price_processes.hpp"

namespace lyaptrade {

/// Every (A, mu) pair allowed at price p by the per-slot trade limits, the
/// sale-covers-fee rule and the budget. Ownership is not applied. The zero
/// action is always first.
struct ActionSet {
  PriceVector price;
  std::vector<TradeDecision> actions;
  /// slot_profit of each action at `price`, in cents.
  std::vector<Money> profit;

  std::size_t size() const { return actions.size(); }
  /// Index of `d` in `actions`, or size() if absent.
  std::size_t find(const TradeDecision& d) const;
};

ActionSet enumerate_actions(const MarketSpec& spec, const PriceVector& p);

/// Randomized rule that picks an action from Omega(p) based only on p.
struct PonlyPolicy {
  std::vector<ActionSet> actions;
  std::vector<double> price_probs;
  /// q[k][a]: probability of actions[k].actions[a] when price k is seen.
  std::vector<std::vector<double>> q;
};

struct PonlySolution {
  PonlyPolicy policy;
  /// Optimal expected profit per slot, dollars.
  double phi_opt = 0.0;
  /// Expected profit per slot of `policy`, dollars (equals phi_opt for the
  /// LP optimum; may exceed it only through rounding).
  double phi = 0.0;
  /// Expected buys minus sells per slot for each stock.
  std::vector<double> drifts;
  /// Optimum as an exact fraction when solved in rational mode, else empty.
  std::string phi_opt_exact;
  bool exact = false;
};

struct LpOptions {
  /// Variable count at or above which the LP runs in double precision.
  std::size_t exact_threshold = 10'000;
};

/// Maximizes expected profit over randomized price-only rules whose
/// expected buys cover expected sells for every stock.
PonlySolution solve_phi_opt(const MarketSpec& spec, const PriceDistribution& dist,
                            const LpOptions& options = {});

/// Recomputes phi and drifts of a policy from its probabilities.
void evaluate_policy(PonlySolution& solution);

/// Thins the buys of every stock with positive drift so that all drifts
/// become zero; expected profit does not decrease.
PonlySolution drift_rebalance(const PonlySolution& solution);

struct LookaheadResult {
  /// Best frame profit in cents.
  Money psi = 0;
  std::vector<TradeDecision> decisions;
  std::int64_t nodes = 0;
};

/// Best profit over a window of known prices when total buys must cover
/// total sells per stock by the end of the window (short sales allowed in
/// between). Exact; throws CapacityError past the node cap.
LookaheadResult lookahead_psi(const MarketSpec& spec, const std::vector<PriceVector>& window);

/// psi for consecutive frames [mT, mT+T) of `prices`, m = 0..M-1.
std::vector<LookaheadResult> lookahead_frames(const MarketSpec& spec,
                                              const std::vector<PriceVector>& prices,
                                              std::int64_t T, std::int64_t M);

/// Exhaustive minimizer of the per-slot drift-plus-penalty objective over
/// every decision meeting all constraints, ownership included. Ties go to
/// fewer shares sold, then fewer bought, then larger buys on lower indices.
TradeDecision brute_force_slot_min(const TraderParams& params, const MarketSpec& spec,
                                   const PriceVector& prices, const std::vector<Shares>& queue);

}  // namespace lyaptrade
