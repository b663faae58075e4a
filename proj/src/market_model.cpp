#include "lyaptrade/market_model.hpp"

#include <algorithm>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

CostFunction CostFunction::zero() { return CostFunction{}; }

CostFunction CostFunction::linear(Money rate_per_share) {
  if (rate_per_share < 0) throw StructuralError("linear cost rate must be non-negative");
  CostFunction c;
  c.kind_ = Kind::kLinear;
  c.rate_ = rate_per_share;
  return c;
}

CostFunction CostFunction::fixed(Money fee) {
  if (fee < 0) throw StructuralError("fixed cost fee must be non-negative");
  CostFunction c;
  c.kind_ = Kind::kFixed;
  c.fee_ = fee;
  return c;
}

CostFunction CostFunction::table(std::vector<Money> values) {
  CostFunction c;
  c.kind_ = Kind::kTable;
  c.values_ = std::move(values);
  return c;
}

Money CostFunction::operator()(Shares shares) const {
  switch (kind_) {
    case Kind::kZero:
      return 0;
    case Kind::kLinear:
      return rate_ * shares;
    case Kind::kFixed:
      return shares > 0 ? fee_ : 0;
    case Kind::kTable:
      return values_[static_cast<std::size_t>(shares)];
  }
  return 0;
}

void CostFunction::validate(Shares mu_max) {
  if (kind_ == Kind::kTable && values_.size() != static_cast<std::size_t>(mu_max) + 1) {
    throw StructuralError("cost table needs exactly mu_max+1 = " +
                          std::to_string(mu_max + 1) + " entries, got " +
                          std::to_string(values_.size()));
  }
  if ((*this)(0) != 0) throw StructuralError("cost function must vanish at 0 shares");
  Money prev = 0;
  for (Shares k = 1; k <= mu_max; ++k) {
    const Money v = (*this)(k);
    if (v < prev) throw StructuralError("cost function must be non-decreasing");
    prev = v;
  }
  if (has_declared_max_) {
    if (prev > declared_max_) {
      throw StructuralError("cost function exceeds its declared maximum");
    }
  } else {
    declared_max_ = prev;
  }
}

bool CostFunction::is_concave(Shares mu_max) const {
  for (Shares k = 1; k < mu_max; ++k) {
    if ((*this)(k + 1) - (*this)(k) > (*this)(k) - (*this)(k - 1)) return false;
  }
  return true;
}

void MarketSpec::validate() {
  if (stocks.empty()) throw StructuralError("market needs at least one stock");
  for (std::size_t n = 0; n < stocks.size(); ++n) {
    StockSpec& s = stocks[n];
    if (s.index != n) throw StructuralError("stock indices must be contiguous from 0");
    if (s.mu_max < 1) throw StructuralError("mu_max must be >= 1");
    if (s.p_max <= 0) throw StructuralError("p_max must be positive");
    s.buy_cost.validate(s.mu_max);
    s.sell_cost.validate(s.mu_max);
  }
  if (const auto* m = std::get_if<MoneyBudget>(&budget); m && m->x <= 0) {
    throw StructuralError("money budget must be positive");
  }
  if (const auto* a = std::get_if<ShareBudget>(&budget); a && a->a_tot < 1) {
    throw StructuralError("share budget must be >= 1");
  }
}

const char* constraint_name(Constraint c) {
  switch (c) {
    case Constraint::kSellRange:
      return "sell_range";
    case Constraint::kSaleCoversFee:
      return "sale_covers_fee";
    case Constraint::kOwnership:
      return "ownership";
    case Constraint::kBuyRange:
      return "buy_range";
    case Constraint::kMoneyBudget:
      return "money_budget";
    case Constraint::kShareBudget:
      return "share_budget";
  }
  return "?";
}

bool Feasibility::violates(Constraint c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const Violation& v) { return v.constraint == c; });
}

void check_price_vector(const MarketSpec& spec, const PriceVector& prices) {
  if (prices.size() != spec.size()) {
    throw StructuralError("price vector has " + std::to_string(prices.size()) +
                          " entries, market has " + std::to_string(spec.size()));
  }
  for (std::size_t n = 0; n < prices.size(); ++n) {
    if (prices[n] < 0 || prices[n] > spec.stocks[n].p_max) {
      throw StructuralError("price " + format_money(prices[n]) + " of stock " + std::to_string(n) +
                            " outside [0, " + format_money(spec.stocks[n].p_max) + "]");
    }
  }
}

Feasibility validate_decision(const MarketSpec& spec, const PriceVector& prices,
                              const PortfolioState& state, const TradeDecision& d,
                              bool enforce_ownership) {
  return validate_decision(spec, prices, state.queue, d,
                           ValidateOptions{enforce_ownership, true});
}

Feasibility validate_decision(const MarketSpec& spec, const PriceVector& prices,
                              const std::vector<Shares>& queue, const TradeDecision& d,
                              ValidateOptions options) {
  const std::size_t n_stocks = spec.size();
  check_price_vector(spec, prices);
  if (d.buys.size() != n_stocks || d.sells.size() != n_stocks) {
    throw StructuralError("decision dimension does not match market");
  }
  if (options.enforce_ownership && queue.size() != n_stocks) {
    throw StructuralError("queue dimension does not match market");
  }
  Feasibility out;
  Money spend = 0;
  Shares bought = 0;
  for (std::size_t n = 0; n < n_stocks; ++n) {
    const StockSpec& s = spec.stocks[n];
    const auto idx = static_cast<std::int64_t>(n);
    const Shares mu = d.sells[n];
    const Shares a = d.buys[n];
    const bool mu_in_range = mu >= 0 && mu <= s.mu_max;
    if (!mu_in_range) out.violations.push_back({Constraint::kSellRange, idx});
    if (mu_in_range && mu * prices[n] < s.sell_cost(mu)) {
      out.violations.push_back({Constraint::kSaleCoversFee, idx});
    }
    if (options.enforce_ownership && mu > queue[n]) {
      out.violations.push_back({Constraint::kOwnership, idx});
    }
    if (a < 0 || a > s.mu_max) out.violations.push_back({Constraint::kBuyRange, idx});
    spend += a * prices[n];
    bought += a;
  }
  if (options.enforce_budget) {
    if (const auto* m = std::get_if<MoneyBudget>(&spec.budget); m && spend > m->x) {
      out.violations.push_back({Constraint::kMoneyBudget, -1});
    }
    if (const auto* sb = std::get_if<ShareBudget>(&spec.budget); sb && bought > sb->a_tot) {
      out.violations.push_back({Constraint::kShareBudget, -1});
    }
  }
  return out;
}

Money stock_profit(const StockSpec& stock, Money price, Shares buys, Shares sells) {
  return sells * price - stock.sell_cost(sells) - (buys * price + stock.buy_cost(buys));
}

Money slot_profit(const MarketSpec& spec, const PriceVector& prices, const TradeDecision& d) {
  check_price_vector(spec, prices);
  if (d.buys.size() != spec.size() || d.sells.size() != spec.size()) {
    throw StructuralError("decision dimension does not match market");
  }
  Money total = 0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    total += stock_profit(spec.stocks[n], prices[n], d.buys[n], d.sells[n]);
  }
  return total;
}

PortfolioState apply_decision(const PortfolioState& state, const TradeDecision& d) {
  if (d.buys.size() != state.queue.size() || d.sells.size() != state.queue.size()) {
    throw StructuralError("decision dimension does not match queue");
  }
  PortfolioState next = state;
  for (std::size_t n = 0; n < next.queue.size(); ++n) {
    next.queue[n] = std::max<Shares>(state.queue[n] - d.sells[n] + d.buys[n], 0);
  }
  next.slot += 1;
  return next;
}

// ---------------------------------------------------------------- JSON

Money money_from_json(const nlohmann::json& j, const std::string& pointer) {
  try {
    if (j.is_string()) return parse_money(j.get<std::string>());
    if (j.is_number_integer()) return j.get<std::int64_t>() * kCentsPerDollar;
    if (j.is_number()) return money_from_double(j.get<double>());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(pointer, e.what());
  }
  throw ConfigError(pointer, "expected a money value (number or decimal string)");
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& pointer) {
  if (!j.is_object()) throw ConfigError(pointer, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(pointer + "/" + key, "missing required field");
  return *it;
}

std::int64_t int_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_number_integer()) throw ConfigError(pointer, "expected an integer");
  return j.get<std::int64_t>();
}

}  // namespace

CostFunction cost_from_json(const nlohmann::json& j, const std::string& pointer) {
  const std::string kind = require(j, "kind", pointer).get<std::string>();
  CostFunction c;
  if (kind == "zero") {
    c = CostFunction::zero();
  } else if (kind == "linear") {
    c = CostFunction::linear(money_from_json(require(j, "rate", pointer), pointer + "/rate"));
  } else if (kind == "fixed") {
    c = CostFunction::fixed(money_from_json(require(j, "fee", pointer), pointer + "/fee"));
  } else if (kind == "table") {
    const auto& vals = require(j, "values", pointer);
    if (!vals.is_array()) throw ConfigError(pointer + "/values", "expected an array");
    std::vector<Money> v;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      v.push_back(money_from_json(vals[i], pointer + "/values/" + std::to_string(i)));
    }
    c = CostFunction::table(std::move(v));
  } else {
    throw ConfigError(pointer + "/kind", "unknown cost kind '" + kind + "'");
  }
  if (auto it = j.find("declared_max"); it != j.end()) {
    c.set_declared_max(money_from_json(*it, pointer + "/declared_max"));
  }
  return c;
}

MarketSpec market_from_json(const nlohmann::json& j, const std::string& pointer) {
  MarketSpec spec;
  const auto& stocks = require(j, "stocks", pointer);
  if (!stocks.is_array() || stocks.empty()) {
    throw ConfigError(pointer + "/stocks", "expected a non-empty array");
  }
  for (std::size_t n = 0; n < stocks.size(); ++n) {
    const std::string p = pointer + "/stocks/" + std::to_string(n);
    const auto& s = stocks[n];
    StockSpec st;
    st.index = n;
    st.mu_max = int_from_json(require(s, "mu_max", p), p + "/mu_max");
    if (st.mu_max < 1) throw ConfigError(p + "/mu_max", "must be a positive integer");
    st.p_max = money_from_json(require(s, "p_max", p), p + "/p_max");
    if (st.p_max <= 0) throw ConfigError(p + "/p_max", "must be positive");
    st.buy_cost = s.contains("buy_cost") ? cost_from_json(s["buy_cost"], p + "/buy_cost")
                                         : CostFunction::zero();
    st.sell_cost = s.contains("sell_cost") ? cost_from_json(s["sell_cost"], p + "/sell_cost")
                                           : CostFunction::zero();
    try {
      st.buy_cost.validate(st.mu_max);
    } catch (const StructuralError& e) {
      throw ConfigError(p + "/buy_cost", e.what());
    }
    try {
      st.sell_cost.validate(st.mu_max);
    } catch (const StructuralError& e) {
      throw ConfigError(p + "/sell_cost", e.what());
    }
    spec.stocks.push_back(std::move(st));
  }
  if (auto it = j.find("budget"); it != j.end()) {
    const std::string p = pointer + "/budget";
    const std::string mode = require(*it, "mode", p).get<std::string>();
    if (mode == "money") {
      const Money x = money_from_json(require(*it, "value", p), p + "/value");
      if (x <= 0) throw ConfigError(p + "/value", "money budget must be positive");
      spec.budget = MoneyBudget{x};
    } else if (mode == "shares") {
      const auto a = int_from_json(require(*it, "value", p), p + "/value");
      if (a < 1) throw ConfigError(p + "/value", "share budget must be >= 1");
      spec.budget = ShareBudget{a};
    } else if (mode == "none") {
      spec.budget = Unconstrained{};
    } else {
      throw ConfigError(p + "/mode", "unknown budget mode '" + mode + "'");
    }
  }
  return spec;
}

nlohmann::json cost_to_json(const CostFunction& c) {
  nlohmann::json j;
  switch (c.kind()) {
    case CostFunction::Kind::kZero:
      j["kind"] = "zero";
      break;
    case CostFunction::Kind::kLinear:
      j["kind"] = "linear";
      j["rate"] = format_money(c.rate());
      break;
    case CostFunction::Kind::kFixed:
      j["kind"] = "fixed";
      j["fee"] = format_money(c.fee());
      break;
    case CostFunction::Kind::kTable: {
      j["kind"] = "table";
      auto arr = nlohmann::json::array();
      for (Money v : c.values()) arr.push_back(format_money(v));
      j["values"] = arr;
      break;
    }
  }
  if (c.has_declared_max()) j["declared_max"] = format_money(c.declared_max());
  return j;
}

nlohmann::json market_to_json(const MarketSpec& spec) {
  nlohmann::json j;
  auto stocks = nlohmann::json::array();
  for (const auto& s : spec.stocks) {
    stocks.push_back({{"mu_max", s.mu_max},
                      {"p_max", format_money(s.p_max)},
                      {"buy_cost", cost_to_json(s.buy_cost)},
                      {"sell_cost", cost_to_json(s.sell_cost)}});
  }
  j["stocks"] = stocks;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, MoneyBudget>) {
          j["budget"] = {{"mode", "money"}, {"value", format_money(b.x)}};
        } else if constexpr (std::is_same_v<B, ShareBudget>) {
          j["budget"] = {{"mode", "shares"}, {"value", b.a_tot}};
        } else {
          j["budget"] = {{"mode", "none"}};
        }
      },
      spec.budget);
  return j;
}

}  // namespace lyaptrade
