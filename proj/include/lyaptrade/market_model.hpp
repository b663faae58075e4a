#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lyaptrade/money.hpp"

namespace lyaptrade {

using Shares = std::int64_t;

/// Transaction cost as a function of the number of shares traded in a slot.
class CostFunction {
 public:
  enum class Kind { kZero, kLinear, kFixed, kTable };

  static CostFunction zero();
  static CostFunction linear(Money rate_per_share);
  static CostFunction fixed(Money fee);
  /// `values[k]` is the cost of trading k shares; must cover 0..mu_max.
  static CostFunction table(std::vector<Money> values);

  Kind kind() const { return kind_; }
  Money rate() const { return rate_; }
  Money fee() const { return fee_; }
  const std::vector<Money>& values() const { return values_; }

  /// Cost of trading `shares` shares (0 <= shares <= mu_max).
  Money operator()(Shares shares) const;

  /// The declared bound b^max / s^max. Defaults to the largest value on
  /// 0..mu_max once `validate` has run.
  Money declared_max() const { return declared_max_; }
  void set_declared_max(Money m) { declared_max_ = m; has_declared_max_ = true; }
  bool has_declared_max() const { return has_declared_max_; }

  /// Checks f(0)=0, non-negativity, monotonicity and the declared bound over
  /// 0..mu_max; fills in the declared bound when none was given.
  void validate(Shares mu_max);

  /// Non-decreasing increments test: f(k+1)-f(k) is non-increasing.
  bool is_concave(Shares mu_max) const;

  friend bool operator==(const CostFunction&, const CostFunction&) = default;

 private:
  Kind kind_ = Kind::kZero;
  Money rate_ = 0;
  Money fee_ = 0;
  std::vector<Money> values_;
  Money declared_max_ = 0;
  bool has_declared_max_ = false;
};

struct StockSpec {
  std::size_t index = 0;
  Shares mu_max = 1;
  Money p_max = 1;
  CostFunction buy_cost;
  CostFunction sell_cost;

  friend bool operator==(const StockSpec&, const StockSpec&) = default;
};

struct MoneyBudget {
  Money x = 0;
  friend bool operator==(const MoneyBudget&, const MoneyBudget&) = default;
};
struct ShareBudget {
  Shares a_tot = 1;
  friend bool operator==(const ShareBudget&, const ShareBudget&) = default;
};
struct Unconstrained {
  friend bool operator==(const Unconstrained&, const Unconstrained&) = default;
};
using BudgetMode = std::variant<Unconstrained, MoneyBudget, ShareBudget>;

struct MarketSpec {
  std::vector<StockSpec> stocks;
  BudgetMode budget = Unconstrained{};

  std::size_t size() const { return stocks.size(); }
  const StockSpec& stock(std::size_t n) const { return stocks.at(n); }

  /// Validates every stock and cost function; throws StructuralError.
  void validate();

  friend bool operator==(const MarketSpec&, const MarketSpec&) = default;
};

struct PriceVector {
  std::vector<Money> prices;

  std::size_t size() const { return prices.size(); }
  Money operator[](std::size_t n) const { return prices[n]; }
  friend bool operator==(const PriceVector&, const PriceVector&) = default;
  friend auto operator<=>(const PriceVector&, const PriceVector&) = default;
};

struct TradeDecision {
  std::vector<Shares> buys;
  std::vector<Shares> sells;

  static TradeDecision zero(std::size_t n) {
    return {std::vector<Shares>(n, 0), std::vector<Shares>(n, 0)};
  }
  std::size_t size() const { return buys.size(); }
  friend bool operator==(const TradeDecision&, const TradeDecision&) = default;
  friend auto operator<=>(const TradeDecision&, const TradeDecision&) = default;
};

struct PortfolioState {
  std::vector<Shares> queue;
  Money cumulative_profit = 0;
  std::int64_t slot = 0;

  friend bool operator==(const PortfolioState&, const PortfolioState&) = default;
};

/// Labels follow the constraint numbering used throughout the docs:
/// sell range, sale covers fee, ownership, buy range, money budget,
/// share budget.
enum class Constraint {
  kSellRange,
  kSaleCoversFee,
  kOwnership,
  kBuyRange,
  kMoneyBudget,
  kShareBudget,
};

const char* constraint_name(Constraint c);

struct Violation {
  Constraint constraint;
  /// Stock index, or -1 for the portfolio-wide budget constraints.
  std::int64_t stock = -1;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct Feasibility {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool violates(Constraint c) const;
};

struct ValidateOptions {
  bool enforce_ownership = true;
  bool enforce_budget = true;
};

void check_price_vector(const MarketSpec& spec, const PriceVector& prices);

Feasibility validate_decision(const MarketSpec& spec, const PriceVector& prices,
                              const PortfolioState& state, const TradeDecision& d,
                              bool enforce_ownership);
Feasibility validate_decision(const MarketSpec& spec, const PriceVector& prices,
                              const std::vector<Shares>& queue, const TradeDecision& d,
                              ValidateOptions options);

/// Net profit of one slot: sale proceeds minus sell fees minus purchase
/// outlay minus buy fees.
Money slot_profit(const MarketSpec& spec, const PriceVector& prices, const TradeDecision& d);

/// Per-stock contribution to slot_profit.
Money stock_profit(const StockSpec& stock, Money price, Shares buys, Shares sells);

/// Queue update Q <- max(Q - mu + A, 0), slot + 1. Profit is not posted.
PortfolioState apply_decision(const PortfolioState& state, const TradeDecision& d);

// JSON (see README for the schema). Money values accept numbers or strings.
Money money_from_json(const nlohmann::json& j, const std::string& pointer);
CostFunction cost_from_json(const nlohmann::json& j, const std::string& pointer);
MarketSpec market_from_json(const nlohmann::json& j, const std::string& pointer = "");
nlohmann::json cost_to_json(const CostFunction& c);
nlohmann::json market_to_json(const MarketSpec& spec);

}  // namespace lyaptrade
