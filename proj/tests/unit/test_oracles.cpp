#include <gtest/gtest.h>

#include <cmath>

#include "lyaptrade/capacity.hpp"
#include "lyaptrade/error.hpp"
#include "lyaptrade/oracles.hpp"
#include "reference.hpp"

using namespace lyaptrade;
using boost::multiprecision::cpp_rational;

namespace {

MarketSpec one_stock(Shares mu, Money p_max, CostFunction buy = CostFunction::zero(),
                     CostFunction sell = CostFunction::zero(), BudgetMode budget = Unconstrained{}) {
  MarketSpec spec;
  StockSpec s;
  s.mu_max = mu;
  s.p_max = p_max;
  s.buy_cost = buy;
  s.sell_cost = sell;
  spec.stocks.push_back(s);
  spec.budget = budget;
  spec.validate();
  return spec;
}

std::vector<PriceVector> prices1(std::initializer_list<Money> v) {
  std::vector<PriceVector> out;
  for (Money m : v) out.push_back(PriceVector{{m}});
  return out;
}

}  // namespace

TEST(Actions, FullGridAndFilters) {
  auto spec = one_stock(1, 200);
  auto set = enumerate_actions(spec, PriceVector{{100}});
  EXPECT_EQ(set.size(), 4u);
  EXPECT_EQ(set.actions[0], TradeDecision::zero(1));
  EXPECT_EQ(set.find(TradeDecision{{1}, {1}}) < set.size(), true);

  auto fee = one_stock(2, 100, CostFunction::zero(), CostFunction::fixed(300));
  for (const auto& a : enumerate_actions(fee, PriceVector{{100}}).actions) EXPECT_EQ(a.sells[0], 0);

  auto broke = one_stock(2, 100, CostFunction::zero(), CostFunction::zero(), MoneyBudget{1});
  broke.budget = MoneyBudget{0};
  for (const auto& a : enumerate_actions(broke, PriceVector{{50}}).actions) EXPECT_EQ(a.buys[0], 0);
}

TEST(PhiOpt, Examples) {
  auto spec = one_stock(1, 200);
  auto sol = solve_phi_opt(spec, PriceDistribution(prices1({100, 200}), {0.5, 0.5}));
  EXPECT_NEAR(sol.phi_opt, 0.5, 1e-12);
  EXPECT_EQ(sol.phi_opt_exact, "1/2");
  EXPECT_NEAR(sol.drifts[0], 0.0, 1e-12);

  auto flat = solve_phi_opt(spec, PriceDistribution(prices1({150}), {1.0}));
  EXPECT_NEAR(flat.phi_opt, 0.0, 1e-12);

  auto fees = one_stock(1, 300, CostFunction::linear(50), CostFunction::linear(50));
  auto f = solve_phi_opt(fees, PriceDistribution(prices1({100, 300}), {0.5, 0.5}));
  EXPECT_NEAR(f.phi_opt, 0.5, 1e-12);
}

TEST(PhiOpt, RandomizationForcedByDrift) {
  // One share a slot, cheap price 70% of the time: the best rule must sell
  // at $2 only part of the time it could, which no deterministic rule does.
  auto spec = one_stock(1, 200);
  auto sol = solve_phi_opt(spec, PriceDistribution(prices1({100, 200}), {0.7, 0.3}));
  auto ref = ref::phi_opt_vertices(spec, prices1({100, 200}), {cpp_rational(7, 10), cpp_rational(3, 10)});
  EXPECT_EQ(sol.phi_opt_exact, ref.value.str());
  EXPECT_NEAR(sol.phi_opt, 0.3, 1e-12);
  EXPECT_EQ(ref.deterministic_value, 0);
}

TEST(PhiOpt, MatchesVertexEnumerationOnRandomInstances) {
  CounterRng rng(31);
  for (int i = 0; i < 40; ++i) {
    ref::SpecOptions opt;
    opt.max_stocks = i % 4 == 0 ? 2 : 1;
    opt.max_mu = opt.max_stocks == 2 ? 1 : 3;
    opt.max_price = 300;
    auto spec = ref::random_spec(rng, opt);
    const int K = static_cast<int>(ref::uniform(rng, 1, opt.max_stocks == 2 ? 2 : 3));
    std::vector<PriceVector> support;
    std::vector<cpp_rational> probs;
    std::vector<double> dprobs;
    std::int64_t left = 10;
    for (int k = 0; k < K; ++k) {
      support.push_back(ref::random_prices(spec, rng));
      std::int64_t w = k + 1 == K ? left : ref::uniform(rng, 1, left - (K - k - 1));
      left -= w;
      probs.emplace_back(w, 10);
      dprobs.push_back(static_cast<double>(w) / 10.0);
    }
    PriceDistribution dist(support, dprobs);
    if (dist.size() != support.size()) continue;
    auto sol = solve_phi_opt(spec, dist);
    auto ref = ref::phi_opt_vertices(spec, support, probs);
    EXPECT_NEAR(sol.phi_opt, ref.value.convert_to<double>(), 1e-9) << "instance " << i;
    EXPECT_GE(sol.phi_opt, -1e-12);
    for (double d : sol.drifts) EXPECT_GE(d, -1e-9);
  }
}

TEST(PhiOpt, DoublePrecisionPathAgrees) {
  auto spec = one_stock(3, 300, CostFunction::linear(10), CostFunction::fixed(20));
  PriceDistribution dist(prices1({50, 120, 300}), {0.3, 0.3, 0.4});
  auto exact = solve_phi_opt(spec, dist);
  auto fast = solve_phi_opt(spec, dist, LpOptions{1});
  EXPECT_TRUE(exact.exact);
  EXPECT_FALSE(fast.exact);
  EXPECT_NEAR(exact.phi_opt, fast.phi_opt, 1e-9);
}

TEST(Rebalance, Examples) {
  auto spec = one_stock(1, 200);
  auto sol = solve_phi_opt(spec, PriceDistribution(prices1({100, 200}), {0.5, 0.5}));
  auto same = drift_rebalance(sol);
  EXPECT_EQ(same.policy.q, sol.policy.q);

  // Always buy one share, never sell.
  PonlySolution always;
  always.policy.actions.push_back(enumerate_actions(spec, PriceVector{{100}}));
  always.policy.price_probs = {1.0};
  std::vector<double> q(always.policy.actions[0].size(), 0.0);
  q[always.policy.actions[0].find(TradeDecision{{1}, {0}})] = 1.0;
  always.policy.q = {q};
  evaluate_policy(always);
  EXPECT_EQ(always.drifts[0], 1.0);
  auto never = drift_rebalance(always);
  EXPECT_NEAR(never.drifts[0], 0.0, 1e-12);
  EXPECT_GE(never.phi, always.phi);

  // Buy 60% of the time, sell 30%: buys kept with probability 1/2.
  PonlySolution mix;
  mix.policy.actions.push_back(enumerate_actions(spec, PriceVector{{100}}));
  mix.policy.actions.push_back(enumerate_actions(spec, PriceVector{{200}}));
  mix.policy.price_probs = {0.6, 0.4};
  std::vector<double> q0(mix.policy.actions[0].size(), 0.0), q1(mix.policy.actions[1].size(), 0.0);
  q0[mix.policy.actions[0].find(TradeDecision{{1}, {0}})] = 1.0;
  q1[mix.policy.actions[1].find(TradeDecision{{0}, {1}})] = 0.75;
  q1[0] = 0.25;
  mix.policy.q = {q0, q1};
  evaluate_policy(mix);
  EXPECT_NEAR(mix.drifts[0], 0.3, 1e-12);
  auto thin = drift_rebalance(mix);
  EXPECT_NEAR(thin.drifts[0], 0.0, 1e-12);
  EXPECT_NEAR(thin.policy.q[0][mix.policy.actions[0].find(TradeDecision{{1}, {0}})], 0.5, 1e-12);
  EXPECT_GE(thin.phi, mix.phi - 1e-12);
}

TEST(Rebalance, ZeroesDriftsOnRandomSolutions) {
  CounterRng rng(12);
  for (int i = 0; i < 30; ++i) {
    ref::SpecOptions opt;
    opt.max_stocks = 2;
    opt.max_mu = 2;
    auto spec = ref::random_spec(rng, opt);
    std::vector<PriceVector> support{ref::random_prices(spec, rng), ref::random_prices(spec, rng)};
    PriceDistribution dist(support, {0.4, 0.6});
    auto sol = solve_phi_opt(spec, dist);
    auto flat = drift_rebalance(sol);
    for (double d : flat.drifts) EXPECT_NEAR(d, 0.0, 1e-9);
    EXPECT_GE(flat.phi, sol.phi - 1e-9);
  }
}

TEST(Lookahead, Examples) {
  auto spec = one_stock(1, 200);
  EXPECT_EQ(lookahead_psi(spec, prices1({100, 200})).psi, 100);
  EXPECT_EQ(lookahead_psi(spec, prices1({200, 100})).psi, 100);
  auto fees = one_stock(2, 200, CostFunction::linear(3), CostFunction::fixed(7));
  EXPECT_EQ(lookahead_psi(fees, prices1({150, 150, 150})).psi, 0);
}

TEST(Lookahead, MatchesPlainEnumeration) {
  CounterRng rng(77);
  for (int i = 0; i < 60; ++i) {
    ref::SpecOptions opt;
    opt.max_stocks = 2;
    opt.max_mu = 2;
    auto spec = ref::random_spec(rng, opt);
    const auto T = ref::uniform(rng, 1, spec.size() == 1 ? 4 : 2);
    std::vector<PriceVector> w;
    for (std::int64_t t = 0; t < T; ++t) w.push_back(ref::random_prices(spec, rng));
    auto r = lookahead_psi(spec, w);
    EXPECT_EQ(r.psi, ref::lookahead_exhaustive(spec, w)) << "instance " << i;
    EXPECT_GE(r.psi, 0);
    ASSERT_EQ(r.decisions.size(), w.size());
    Money total = 0;
    std::vector<Shares> net(spec.size(), 0);
    for (std::size_t t = 0; t < w.size(); ++t) {
      EXPECT_TRUE(ref::feasible(spec, w[t], r.decisions[t], nullptr));
      total += ref::profit(spec, w[t], r.decisions[t]);
      for (std::size_t n = 0; n < spec.size(); ++n) net[n] += r.decisions[t].buys[n] - r.decisions[t].sells[n];
    }
    EXPECT_EQ(total, r.psi);
    for (Shares v : net) EXPECT_GE(v, 0);
  }
}

TEST(Lookahead, LongerFrameIsSuperAdditive) {
  CounterRng rng(4);
  for (int i = 0; i < 40; ++i) {
    auto spec = ref::random_spec(rng, ref::SpecOptions{1, 2, 300, true, true, true});
    std::vector<PriceVector> w;
    for (int t = 0; t < 6; ++t) w.push_back(ref::random_prices(spec, rng));
    auto frames = lookahead_frames(spec, w, 3, 2);
    EXPECT_GE(lookahead_psi(spec, w).psi, frames[0].psi + frames[1].psi);
  }
}

TEST(Lookahead, CapacityCap) {
  auto spec = one_stock(3, 200);
  std::vector<PriceVector> w;
  for (int t = 0; t < 12; ++t) w.push_back(PriceVector{{t % 2 == 0 ? 100 : 200}});
  setenv("LYAPTRADE_CAPACITY_CELLS", "50", 1);
  EXPECT_THROW(lookahead_psi(spec, w), CapacityError);
  unsetenv("LYAPTRADE_CAPACITY_CELLS");
  EXPECT_EQ(capacity_limit(123), 123);
}

TEST(BruteForce, Examples) {
  TraderParams params;
  params.V = Rational(10);
  auto fee = one_stock(2, 200, CostFunction::fixed(10), CostFunction::fixed(10));
  // theta = 24; at the target a free share still costs its fee.
  EXPECT_EQ(brute_force_slot_min(params, fee, PriceVector{{0}}, {24}), TradeDecision::zero(1));
  // Fee above any sale and no room to buy: only the zero action is feasible.
  auto only = one_stock(1, 100, CostFunction::zero(), CostFunction::fixed(500), MoneyBudget{1});
  only.budget = MoneyBudget{0};
  EXPECT_EQ(brute_force_slot_min(params, only, PriceVector{{100}}, {1}), TradeDecision::zero(1));
}
