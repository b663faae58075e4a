#include <gtest/gtest.h>

#include "lyaptrade/error.hpp"
#include "lyaptrade/market_model.hpp"
#include "lyaptrade/money.hpp"
#include "lyaptrade/rational.hpp"

using namespace lyaptrade;

namespace {

MarketSpec one_stock(Shares mu, Money p_max, CostFunction buy = CostFunction::zero(),
                     CostFunction sell = CostFunction::zero()) {
  MarketSpec spec;
  StockSpec s;
  s.mu_max = mu;
  s.p_max = p_max;
  s.buy_cost = buy;
  s.sell_cost = sell;
  spec.stocks.push_back(s);
  spec.validate();
  return spec;
}

}  // namespace

TEST(Money, ParseAndFormat) {
  EXPECT_EQ(parse_money("12"), 1200);
  EXPECT_EQ(parse_money("12.5"), 1250);
  EXPECT_EQ(parse_money("-0.07"), -7);
  EXPECT_THROW(parse_money("1.005"), Error);
  EXPECT_THROW(parse_money("abc"), Error);
  EXPECT_EQ(format_money(-150), "-1.50");
  EXPECT_EQ(format_money(7), "0.07");
  EXPECT_EQ(money_from_double(2.01), 201);
  EXPECT_THROW(money_from_double(0.001), Error);
}

TEST(RationalValue, ParseArithmeticAndScale) {
  EXPECT_EQ(Rational::parse("2.01"), Rational(201, 100));
  EXPECT_EQ(Rational::parse("7/3").den(), 3);
  EXPECT_EQ(Rational::parse("-0.125"), Rational(-1, 8));
  EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
  EXPECT_EQ(Rational(3, 4) * Rational(2, 3), Rational(1, 2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(3, 4).scaled_exact(8), 6);
  EXPECT_THROW(Rational(1, 3).scaled_exact(2), Error);
  EXPECT_EQ(Rational::approximate(0.3333333, 1000), Rational(333, 1000));
}

TEST(CostFunctionTest, ShapesAndValidation) {
  auto lin = CostFunction::linear(50);
  EXPECT_EQ(lin(0), 0);
  EXPECT_EQ(lin(3), 150);
  auto fee = CostFunction::fixed(25);
  EXPECT_EQ(fee(0), 0);
  EXPECT_EQ(fee(2), 25);
  EXPECT_TRUE(lin.is_concave(5));
  EXPECT_TRUE(fee.is_concave(5));

  auto tab = CostFunction::table({0, 10, 30});
  EXPECT_NO_THROW(tab.validate(2));
  EXPECT_EQ(tab.declared_max(), 30);
  EXPECT_FALSE(tab.is_concave(2));

  EXPECT_THROW(CostFunction::table({5, 10}).validate(1), StructuralError);
  EXPECT_THROW(CostFunction::table({0, 10, 5}).validate(2), StructuralError);
  EXPECT_THROW(CostFunction::table({0, 10}).validate(2), StructuralError);

  auto capped = CostFunction::linear(10);
  capped.set_declared_max(15);
  EXPECT_THROW(capped.validate(2), StructuralError);
}

TEST(MarketSpecTest, RejectsBadStocks) {
  MarketSpec spec;
  StockSpec s;
  s.mu_max = 0;
  s.p_max = 100;
  spec.stocks.push_back(s);
  EXPECT_THROW(spec.validate(), StructuralError);
  spec.stocks[0].mu_max = 1;
  spec.stocks[0].p_max = 0;
  EXPECT_THROW(spec.validate(), StructuralError);
}

TEST(ValidateDecision, ZeroDecisionAlwaysFeasible) {
  auto spec = one_stock(2, 500);
  auto f = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{0}, TradeDecision::zero(1),
                             ValidateOptions{});
  EXPECT_TRUE(f.ok());
}

TEST(ValidateDecision, SellingMoreThanHeldBreaksOwnership) {
  auto spec = one_stock(2, 500);
  TradeDecision d{{0}, {2}};
  auto f = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{1}, d, ValidateOptions{});
  EXPECT_TRUE(f.violates(Constraint::kOwnership));
  auto relaxed = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{1}, d,
                                   ValidateOptions{false, true});
  EXPECT_TRUE(relaxed.ok());
}

TEST(ValidateDecision, SaleMustCoverFee) {
  auto spec = one_stock(1, 100, CostFunction::zero(), CostFunction::fixed(50));
  TradeDecision d{{0}, {1}};
  auto f = validate_decision(spec, PriceVector{{40}}, std::vector<Shares>{1}, d, ValidateOptions{});
  EXPECT_TRUE(f.violates(Constraint::kSaleCoversFee));
  EXPECT_EQ(f.violations.size(), 1u);
}

TEST(ValidateDecision, BudgetsAndRanges) {
  auto spec = one_stock(3, 500);
  spec.budget = MoneyBudget{500};
  TradeDecision d{{2}, {0}};
  auto f = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{3}, d, ValidateOptions{});
  EXPECT_TRUE(f.violates(Constraint::kMoneyBudget));
  spec.budget = ShareBudget{1};
  f = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{3}, d, ValidateOptions{});
  EXPECT_TRUE(f.violates(Constraint::kShareBudget));
  TradeDecision big{{4}, {4}};
  f = validate_decision(spec, PriceVector{{300}}, std::vector<Shares>{9}, big, ValidateOptions{});
  EXPECT_TRUE(f.violates(Constraint::kBuyRange));
  EXPECT_TRUE(f.violates(Constraint::kSellRange));
}

TEST(ValidateDecision, PriceAboveCapIsStructural) {
  auto spec = one_stock(1, 100);
  EXPECT_THROW(check_price_vector(spec, PriceVector{{101}}), StructuralError);
  EXPECT_THROW(check_price_vector(spec, PriceVector{{-1}}), StructuralError);
  EXPECT_THROW(check_price_vector(spec, PriceVector{{1, 1}}), StructuralError);
}

TEST(SlotProfit, Examples) {
  MarketSpec two;
  for (int i = 0; i < 2; ++i) {
    StockSpec s;
    s.index = static_cast<std::size_t>(i);
    s.mu_max = 1;
    s.p_max = 500;
    two.stocks.push_back(s);
  }
  two.validate();
  EXPECT_EQ(slot_profit(two, PriceVector{{200, 100}}, TradeDecision{{0, 1}, {1, 0}}), 100);
  EXPECT_EQ(slot_profit(two, PriceVector{{200, 100}}, TradeDecision::zero(2)), 0);

  auto lin = one_stock(1, 500, CostFunction::linear(50));
  EXPECT_EQ(slot_profit(lin, PriceVector{{100}}, TradeDecision{{1}, {0}}), -150);
}

TEST(ApplyDecision, QueueUpdate) {
  PortfolioState s{{5}, 0, 0};
  EXPECT_EQ(apply_decision(s, TradeDecision{{1}, {2}}).queue, std::vector<Shares>{4});
  PortfolioState empty{{0}, 0, 0};
  EXPECT_EQ(apply_decision(empty, TradeDecision{{0}, {1}}).queue, std::vector<Shares>{0});
  PortfolioState two{{1, 1}, 0, 3};
  auto next = apply_decision(two, TradeDecision{{0, 1}, {1, 0}});
  EXPECT_EQ(next.queue, (std::vector<Shares>{0, 2}));
  EXPECT_EQ(next.slot, 4);
}

TEST(MarketJson, RoundTripAndPointers) {
  nlohmann::json j = {
      {"stocks",
       {{{"mu_max", 2}, {"p_max", "3.50"}, {"buy_cost", {{"kind", "linear"}, {"rate", "0.05"}}},
         {"sell_cost", {{"kind", "table"}, {"values", {"0", "0.10", "0.15"}}}}},
        {{"mu_max", 1}, {"p_max", 2}, {"sell_cost", {{"kind", "fixed"}, {"fee", 0.5}}}}}},
      {"budget", {{"mode", "money"}, {"value", "10.00"}}}};
  MarketSpec spec = market_from_json(j);
  EXPECT_EQ(spec.stocks[0].p_max, 350);
  EXPECT_EQ(spec.stocks[1].sell_cost.fee(), 50);
  EXPECT_EQ(market_from_json(market_to_json(spec)), spec);

  j["stocks"][1]["mu_max"] = 0;
  try {
    market_from_json(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.pointer(), "/stocks/1/mu_max");
  }
}
