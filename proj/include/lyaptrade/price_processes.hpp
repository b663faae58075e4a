#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "lyaptrade/market_model.hpp"
#include "lyaptrade/rng.hpp"

namespace lyaptrade {

/// Finite-support price law. Probabilities are normalized on construction.
class PriceDistribution {
 public:
  PriceDistribution() = default;
  PriceDistribution(std::vector<PriceVector> support, std::vector<double> probs);

  const std::vector<PriceVector>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }

  /// Throws StructuralError when a support vector breaks the caps of `spec`.
  void check_against(const MarketSpec& spec) const;

  std::size_t sample_index(CounterRng& rng) const;

 private:
  std::vector<PriceVector> support_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

PriceVector sample_iid(const PriceDistribution& dist, CounterRng& rng);

/// Markov-modulated prices: each state carries a price vector and the chain
/// moves by a row-stochastic transition matrix. Must be irreducible.
class MarkovPriceModel {
 public:
  MarkovPriceModel() = default;
  MarkovPriceModel(std::vector<PriceVector> state_prices,
                   std::vector<std::vector<double>> transition);

  std::size_t num_states() const { return prices_.size(); }
  const PriceVector& price(std::size_t state) const;
  const std::vector<PriceVector>& state_prices() const { return prices_; }
  const std::vector<std::vector<double>>& transition() const { return transition_; }

  void check_against(const MarketSpec& spec) const;

  std::size_t next_state(std::size_t state, CounterRng& rng) const;

 private:
  std::vector<PriceVector> prices_;
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<double>> cdf_;
};

struct MarkovStep {
  std::size_t state;
  PriceVector prices;
};

MarkovStep step_markov(const MarkovPriceModel& model, std::size_t state, CounterRng& rng);

/// Unique stationary law of the chain, states with equal prices merged.
/// Also returns per-state probabilities through `per_state` when non-null.
PriceDistribution stationary_distribution(const MarkovPriceModel& model,
                                          std::vector<double>* per_state = nullptr);

struct PriceTrace {
  std::vector<PriceVector> sequence;
  std::string source;

  std::size_t size() const { return sequence.size(); }
  friend bool operator==(const PriceTrace&, const PriceTrace&) = default;
};

enum class CapPolicy { kReject, kAutoExpand };

struct LoadedTrace {
  PriceTrace trace;
  /// Per-stock price caps after the policy ran (raised under auto-expand).
  std::vector<Money> caps;
};

/// Reads `slot,p_1,...,p_N` CSV. Slots must start at 0 and increase by one.
LoadedTrace load_trace(std::istream& in, const MarketSpec& spec, CapPolicy policy,
                       const std::string& source = "stream");
LoadedTrace load_trace_file(const std::string& path, const MarketSpec& spec, CapPolicy policy);

void write_trace(std::ostream& out, const PriceTrace& trace);

/// User-supplied decaying-memory pair (epsilon, T).
struct MemoryParams {
  double epsilon = 0.0;
  std::int64_t T = 1;
};

/// Any of the three sources a backtest can draw from.
using PriceSource = std::variant<PriceDistribution, MarkovPriceModel, PriceTrace>;

/// Stateful cursor over a PriceSource.
class PriceStream {
 public:
  /// `initial_state` only applies to Markov sources; by default the
  /// initial state is drawn from the stationary law.
  PriceStream(const PriceSource& source, CounterRng rng,
              std::optional<std::size_t> initial_state = std::nullopt);

  PriceVector next();
  /// Remaining slots for traces, unbounded otherwise.
  std::optional<std::size_t> remaining() const;
  std::size_t markov_state() const { return state_; }

 private:
  const PriceSource* source_;
  CounterRng rng_;
  std::size_t state_ = 0;
  std::size_t position_ = 0;
  bool started_ = false;
};

}  // namespace lyaptrade
