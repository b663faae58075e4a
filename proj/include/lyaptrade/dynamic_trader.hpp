#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lyaptrade/market_model.hpp"
#include "lyaptrade/price_processes.hpp"
#include "lyaptrade/rational.hpp"

namespace lyaptrade {

enum class BuySolver { kAuto, kExact, kGreedy, kShareBudget };

const char* buy_solver_name(BuySolver s);
BuySolver buy_solver_from_name(const std::string& name);

struct TraderParams {
  Rational V{1};
  /// Per-stock queue targets. Empty means V * p_max + 2 * mu_max.
  std::vector<Rational> theta;
  /// Starting queue. Empty means mu_max per stock (or zero real shares when
  /// `placeholder` is set and the wrap has not run yet).
  std::vector<Shares> initial_queue;
  bool placeholder = false;
  /// Fake shares added by placeholder_wrap; zero-length when not wrapped.
  std::vector<Shares> placeholder_offset;
  BuySolver buy_solver = BuySolver::kAuto;

  friend bool operator==(const TraderParams&, const TraderParams&) = default;
};

/// theta_n = V * p_max_n + 2 * mu_max_n, with p_max in dollars.
std::vector<Rational> compute_theta(const MarketSpec& spec, const Rational& V);

/// Fills in default theta, initial queue and solver. Throws StructuralError
/// on dimension mismatches or a non-positive V.
TraderParams resolve_params(const MarketSpec& spec, TraderParams params);

/// True when theta follows the default rule exactly.
bool theta_conforms(const MarketSpec& spec, const TraderParams& params);
/// True when mu_max <= Q(0) <= V p_max + 3 mu_max for every stock.
bool initial_queue_conforms(const MarketSpec& spec, const TraderParams& params);

/// Integer form of the per-slot objectives. With S = scale, every quantity
/// below is the real-valued quantity multiplied by S:
///   theta_scaled[n] = theta_n * S,   v_per_cent = V * S / 100
/// so that V * (amount in cents / 100) * S = v_per_cent * amount.
struct ObjectiveScale {
  std::int64_t scale = 1;
  std::int64_t v_per_cent = 0;
  std::vector<std::int64_t> theta_scaled;

  static ObjectiveScale make(const MarketSpec& spec, const TraderParams& resolved);
};

/// Scaled drift-plus-penalty value of a whole decision:
///   S * ( -V phi - sum_n (Q_n - theta_n)(mu_n - A_n) ).
__int128 slot_objective(const ObjectiveScale& os, const MarketSpec& spec, const PriceVector& prices,
                        const std::vector<Shares>& queue, const TradeDecision& d);

/// Scaled buying objective  S * sum_n [(Q_n - theta_n + V p_n) A_n + V b_n(A_n)].
__int128 buy_objective(const ObjectiveScale& os, const MarketSpec& spec, const PriceVector& prices,
                       const std::vector<Shares>& queue, const std::vector<Shares>& buys);

/// Per-slot trading rule bound to one market and parameter set.
class Trader {
 public:
  Trader(MarketSpec spec, TraderParams params);

  const MarketSpec& spec() const { return spec_; }
  const TraderParams& params() const { return params_; }
  const ObjectiveScale& scale() const { return scale_; }

  std::vector<Shares> sell(const PriceVector& prices, const std::vector<Shares>& queue) const;
  std::vector<Shares> buy_exact(const PriceVector& prices, const std::vector<Shares>& queue) const;
  std::vector<Shares> buy_greedy(const PriceVector& prices, const std::vector<Shares>& queue) const;
  std::vector<Shares> buy_share_budget(const PriceVector& prices,
                                       const std::vector<Shares>& queue) const;
  std::vector<Shares> buy(const PriceVector& prices, const std::vector<Shares>& queue) const;

  TradeDecision decide(const PriceVector& prices, const std::vector<Shares>& queue) const;

 private:
  MarketSpec spec_;
  TraderParams params_;
  ObjectiveScale scale_;
  std::int64_t dp_cap_;
};

std::vector<Shares> sell_decision(const TraderParams& params, const MarketSpec& spec,
                                  const PriceVector& prices, const std::vector<Shares>& queue);
std::vector<Shares> buy_decision_exact(const TraderParams& params, const MarketSpec& spec,
                                       const PriceVector& prices, const std::vector<Shares>& queue);
std::vector<Shares> buy_decision_greedy(const TraderParams& params, const MarketSpec& spec,
                                        const PriceVector& prices, const std::vector<Shares>& queue);
std::vector<Shares> buy_decision_share_budget(const TraderParams& params, const MarketSpec& spec,
                                              const PriceVector& prices,
                                              const std::vector<Shares>& queue);

struct StepResult {
  TradeDecision decision;
  Money profit = 0;
  PortfolioState next;
};

/// One slot: sell rule, configured buy rule, profit posting, queue update.
StepResult trader_step(const TraderParams& params, const MarketSpec& spec,
                       const PortfolioState& state, const PriceVector& prices);

struct SlotRecord {
  std::int64_t slot = 0;
  PriceVector prices;
  TradeDecision decision;
  std::vector<Shares> queue_after;
  Money profit = 0;

  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct Trajectory {
  MarketSpec spec;
  TraderParams params;
  std::vector<Shares> initial_queue;
  std::vector<SlotRecord> records;
  /// Cost of buying the initial shares before slot 0 (zero with place-holders).
  Money startup_cost = 0;

  std::size_t size() const { return records.size(); }
  /// Queue seen by the trader at slot t (t = size() gives the final queue).
  const std::vector<Shares>& queue_at(std::size_t t) const;
  /// Shares actually owned at slot t: queue minus place-holder shares.
  std::vector<Shares> real_queue_at(std::size_t t) const;
  Money trading_profit() const;
  /// trading_profit() - startup_cost.
  Money cumulative_profit() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct BacktestOptions {
  /// Stream id for the counter RNG (replication index).
  std::uint64_t stream = 0;
  std::optional<std::size_t> markov_initial_state;
  /// Charge the initial queue as a purchase at the first slot's prices.
  bool charge_startup = false;
};

Trajectory run_backtest(const MarketSpec& spec, const TraderParams& params,
                        const PriceSource& source, std::int64_t horizon, std::uint64_t seed,
                        const BacktestOptions& options = {});

/// Runs on an existing stream; used by windowed runs that share one price path.
Trajectory run_on_stream(const MarketSpec& spec, const TraderParams& params, PriceStream& stream,
                         std::int64_t horizon, bool charge_startup = false);

/// Interprets params.initial_queue as real holdings (default zero) and adds
/// mu_max fake shares so the trader starts inside its operating band.
TraderParams placeholder_wrap(const TraderParams& params, const MarketSpec& spec);

struct WindowStats {
  std::int64_t window = 0;
  double scale = 1.0;
  Rational V;
  std::vector<Shares> mu_max;
  Money profit = 0;
  /// Time-average profit over the window, dollars per slot.
  double q = 0.0;
  double alpha = 0.0;
  std::vector<Shares> real_shares_end;
};

struct ScaledRunResult {
  std::vector<WindowStats> windows;
  std::vector<Trajectory> trajectories;
};

/// Consecutive windows of W = M*T slots, each started from zero real shares
/// with place-holders; window w uses mu_max and V multiplied by
/// prod_{i<w} (1 + beta * max(q_i, 0)).
ScaledRunResult scaled_windows_run(const MarketSpec& spec, const TraderParams& params, double beta,
                                   std::int64_t T, std::int64_t M, std::int64_t num_windows,
                                   const PriceSource& source, std::uint64_t seed,
                                   bool keep_trajectories = false);

/// Market with every mu_max multiplied by `factor` and floored (at least 1);
/// cost tables are extended by repeating their last entry.
MarketSpec scale_market(const MarketSpec& spec, double factor);

}  // namespace lyaptrade
