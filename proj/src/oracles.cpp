#include "lyaptrade/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "lyaptrade/capacity.hpp"
#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

using boost::multiprecision::cpp_rational;

struct StockOption {
  Shares buy;
  Shares sell;
};

// Per-stock (A, mu) pairs meeting the trade limits and the fee rule. When
// `queue` is given, sales are also limited by holdings.
std::vector<std::vector<StockOption>> stock_options(const MarketSpec& spec, const PriceVector& p,
                                                    const std::vector<Shares>* queue) {
  std::vector<std::vector<StockOption>> opts(spec.size());
  for (std::size_t n = 0; n < spec.size(); ++n) {
    const auto& s = spec.stock(n);
    Shares sell_cap = queue ? std::min(s.mu_max, (*queue)[n]) : s.mu_max;
    for (Shares a = 0; a <= s.mu_max; ++a) {
      for (Shares m = 0; m <= sell_cap; ++m) {
        if (m > 0 && m * p[n] < s.sell_cost(m)) continue;
        opts[n].push_back({a, m});
      }
    }
  }
  return opts;
}

bool within_budget(const MarketSpec& spec, const PriceVector& p, const std::vector<Shares>& buys) {
  if (const auto* mb = std::get_if<MoneyBudget>(&spec.budget)) {
    Money spent = 0;
    for (std::size_t n = 0; n < buys.size(); ++n) spent += buys[n] * p[n];
    return spent <= mb->x;
  }
  if (const auto* sb = std::get_if<ShareBudget>(&spec.budget)) {
    Shares total = std::accumulate(buys.begin(), buys.end(), Shares{0});
    return total <= sb->a_tot;
  }
  return true;
}

// Calls `fn` with every joint decision built from per-stock options, in
// lexicographic order of option indices.
template <class Fn>
void for_each_joint(const std::vector<std::vector<StockOption>>& opts, std::int64_t cap, Fn&& fn) {
  const std::size_t N = opts.size();
  double product = 1.0;
  for (const auto& o : opts) product *= static_cast<double>(o.size());
  if (product > static_cast<double>(cap)) {
    throw CapacityError("action enumeration needs " + std::to_string(static_cast<long long>(product)) +
                        " candidates, above the cap of " + std::to_string(cap));
  }
  std::vector<std::size_t> idx(N, 0);
  TradeDecision d = TradeDecision::zero(N);
  while (true) {
    for (std::size_t n = 0; n < N; ++n) {
      d.buys[n] = opts[n][idx[n]].buy;
      d.sells[n] = opts[n][idx[n]].sell;
    }
    fn(d);
    std::size_t n = N;
    while (true) {
      if (n == 0) return;
      --n;
      if (++idx[n] < opts[n].size()) break;
      idx[n] = 0;
    }
  }
}

// Dense simplex on an equality-form problem with a known identity starting
// basis; Bland's rule for entering and leaving variables.
template <class T>
struct Simplex {
  std::size_t m = 0, n = 0;
  std::vector<T> a;  // m rows of n + 1 entries, last is the right-hand side
  std::vector<T> z;  // reduced costs, last entry is the objective value
  std::vector<std::size_t> basis;
  T eps{};

  T& at(std::size_t i, std::size_t j) { return a[i * (n + 1) + j]; }

  void pivot(std::size_t r, std::size_t c) {
    T inv = T(1) / at(r, c);
    for (std::size_t j = 0; j <= n; ++j) at(r, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      T f = at(i, c);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j <= n; ++j) {
        if (at(r, j) != T(0)) at(i, j) -= f * at(r, j);
      }
    }
    T f = z[c];
    if (f != T(0)) {
      for (std::size_t j = 0; j <= n; ++j) {
        if (at(r, j) != T(0)) z[j] -= f * at(r, j);
      }
    }
    basis[r] = c;
  }

  void solve() {
    while (true) {
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (z[j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == n) return;
      std::size_t leave = m;
      T best{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!(at(i, enter) > eps)) continue;
        T ratio = at(i, n) / at(i, enter);
        if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) throw NumericalError("profit LP reported unbounded", 0.0);
      pivot(leave, enter);
    }
  }
};

template <class T>
T from_double(double x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    // Probabilities come from decimal configs or small-integer weights; take
    // the simplest fraction that rounds to the same double before falling
    // back to the exact binary value.
    double a = x;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int i = 0; i < 40; ++i) {
      const double fl = std::floor(a);
      if (fl > 1e12) break;
      const auto c = static_cast<std::int64_t>(fl);
      const std::int64_t h = c * h1 + h0, k = c * k1 + k0;
      if (k > 1'000'000'000) break;
      h0 = h1;
      h1 = h;
      k0 = k1;
      k1 = k;
      if (static_cast<double>(h) / static_cast<double>(k) == x) return T(h) / T(k);
      if (a == fl) break;
      a = 1.0 / (a - fl);
    }
    return T(x);
  }
}

template <class T>
double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

template <class T>
void run_lp(PonlySolution& sol, std::size_t N) {
  const auto& acts = sol.policy.actions;
  const auto& pi = sol.policy.price_probs;
  const std::size_t P = acts.size();
  std::vector<std::size_t> offset(P + 1, 0);
  for (std::size_t k = 0; k < P; ++k) offset[k + 1] = offset[k] + acts[k].size();
  const std::size_t nq = offset[P];

  Simplex<T> lp;
  lp.m = P + N;
  lp.n = nq + N;
  if constexpr (std::is_same_v<T, double>) lp.eps = 1e-9;
  lp.a.assign(lp.m * (lp.n + 1), T(0));
  lp.z.assign(lp.n + 1, T(0));
  lp.basis.resize(lp.m);
  for (std::size_t k = 0; k < P; ++k) {
    T w = from_double<T>(pi[k]);
    for (std::size_t j = 0; j < acts[k].size(); ++j) {
      std::size_t col = offset[k] + j;
      lp.at(k, col) = T(1);
      const auto& d = acts[k].actions[j];
      for (std::size_t n = 0; n < N; ++n) {
        Shares net = d.sells[n] - d.buys[n];
        if (net != 0) lp.at(P + n, col) = w * T(net);
      }
      lp.z[col] = -(w * T(acts[k].profit[j]));
    }
    lp.at(k, lp.n) = T(1);
    lp.basis[k] = offset[k];
  }
  for (std::size_t n = 0; n < N; ++n) {
    lp.at(P + n, nq + n) = T(1);
    lp.basis[P + n] = nq + n;
  }
  lp.solve();

  sol.policy.q.assign(P, {});
  for (std::size_t k = 0; k < P; ++k) sol.policy.q[k].assign(acts[k].size(), 0.0);
  for (std::size_t i = 0; i < lp.m; ++i) {
    std::size_t col = lp.basis[i];
    if (col >= nq) continue;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), col) - offset.begin()) - 1;
    sol.policy.q[k][col - offset[k]] = to_double(lp.at(i, lp.n));
  }
  T value = lp.z[lp.n] / T(kCentsPerDollar);
  sol.phi_opt = to_double(value);
  if constexpr (!std::is_same_v<T, double>) sol.phi_opt_exact = value.str();
}

}  // namespace

std::size_t ActionSet::find(const TradeDecision& d) const {
  auto it = std::find(actions.begin(), actions.end(), d);
  return static_cast<std::size_t>(it - actions.begin());
}

ActionSet enumerate_actions(const MarketSpec& spec, const PriceVector& p) {
  check_price_vector(spec, p);
  const std::int64_t cap = capacity_limit(kDefaultActionCap);
  ActionSet set;
  set.price = p;
  auto opts = stock_options(spec, p, nullptr);
  for_each_joint(opts, cap, [&](const TradeDecision& d) {
    if (!within_budget(spec, p, d.buys)) return;
    set.actions.push_back(d);
    set.profit.push_back(slot_profit(spec, p, d));
  });
  return set;
}

void evaluate_policy(PonlySolution& sol) {
  const auto& pol = sol.policy;
  const std::size_t N = pol.actions.empty() ? 0 : pol.actions[0].price.size();
  sol.phi = 0.0;
  sol.drifts.assign(N, 0.0);
  for (std::size_t k = 0; k < pol.actions.size(); ++k) {
    for (std::size_t a = 0; a < pol.actions[k].size(); ++a) {
      double w = pol.price_probs[k] * pol.q[k][a];
      if (w == 0.0) continue;
      const auto& d = pol.actions[k].actions[a];
      sol.phi += w * to_dollars(pol.actions[k].profit[a]);
      for (std::size_t n = 0; n < N; ++n) sol.drifts[n] += w * static_cast<double>(d.buys[n] - d.sells[n]);
    }
  }
}

PonlySolution solve_phi_opt(const MarketSpec& spec, const PriceDistribution& dist, const LpOptions& options) {
  dist.check_against(spec);
  PonlySolution sol;
  sol.policy.price_probs = dist.probs();
  std::size_t vars = spec.size();
  for (const auto& p : dist.support()) {
    sol.policy.actions.push_back(enumerate_actions(spec, p));
    vars += sol.policy.actions.back().size();
  }
  sol.exact = vars < options.exact_threshold;
  if (sol.exact) {
    run_lp<cpp_rational>(sol, spec.size());
  } else {
    run_lp<double>(sol, spec.size());
  }
  evaluate_policy(sol);
  if (sol.phi_opt < -1e-9) throw NumericalError("negative optimal profit", sol.phi_opt);
  for (double d : sol.drifts) {
    if (d < -1e-9) throw NumericalError("optimal policy has negative drift", d);
  }
  return sol;
}

PonlySolution drift_rebalance(const PonlySolution& solution) {
  PonlySolution out = solution;
  evaluate_policy(out);
  auto& pol = out.policy;
  const std::size_t N = out.drifts.size();
  for (std::size_t n = 0; n < N; ++n) {
    if (out.drifts[n] <= 0.0) continue;
    double alpha = 0.0, beta = 0.0;
    for (std::size_t k = 0; k < pol.actions.size(); ++k) {
      for (std::size_t a = 0; a < pol.actions[k].size(); ++a) {
        double w = pol.price_probs[k] * pol.q[k][a];
        alpha += w * static_cast<double>(pol.actions[k].actions[a].buys[n]);
        beta += w * static_cast<double>(pol.actions[k].actions[a].sells[n]);
      }
    }
    if (!(alpha > 0.0)) throw NumericalError("positive drift with no buying", out.drifts[n]);
    double keep = beta / alpha;
    for (std::size_t k = 0; k < pol.actions.size(); ++k) {
      auto& set = pol.actions[k];
      std::vector<double> q = pol.q[k];
      for (std::size_t a = 0; a < set.size(); ++a) {
        if (pol.q[k][a] == 0.0 || set.actions[a].buys[n] == 0) continue;
        TradeDecision thin = set.actions[a];
        thin.buys[n] = 0;
        std::size_t b = set.find(thin);
        if (b == set.size()) throw StructuralError("thinned action missing from the action set");
        double moved = pol.q[k][a] * (1.0 - keep);
        q[a] -= moved;
        q[b] += moved;
      }
      pol.q[k] = std::move(q);
    }
    evaluate_policy(out);
  }
  return out;
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

constexpr Money kInfeasible = std::numeric_limits<Money>::min();

struct LookaheadSearch {
  const MarketSpec& spec;
  std::int64_t T;
  std::vector<ActionSet> acts;
  std::vector<std::vector<std::size_t>> order;  // by profit, best first
  std::vector<Money> suffix_best;
  std::unordered_map<std::vector<std::int64_t>, std::pair<Money, std::size_t>, VecHash> memo;
  std::int64_t nodes = 0;
  std::int64_t cap = 0;

  Money visit(std::int64_t depth, std::vector<std::int64_t>& net) {
    const std::size_t N = spec.size();
    for (std::size_t n = 0; n < N; ++n) {
      if (net[n] + (T - depth) * spec.stock(n).mu_max < 0) return kInfeasible;
    }
    if (depth == T) return 0;
    net.push_back(depth);
    auto it = memo.find(net);
    net.pop_back();
    if (it != memo.end()) return it->second.first;
    if (++nodes > cap) {
      throw CapacityError("lookahead search passed " + std::to_string(cap) + " nodes; use a smaller T");
    }
    Money best = kInfeasible;
    std::size_t best_a = 0;
    const auto& set = acts[depth];
    for (std::size_t a : order[depth]) {
      Money here = set.profit[a];
      if (best != kInfeasible && here + suffix_best[depth + 1] <= best) break;
      const auto& d = set.actions[a];
      for (std::size_t n = 0; n < N; ++n) net[n] += d.buys[n] - d.sells[n];
      Money rest = visit(depth + 1, net);
      for (std::size_t n = 0; n < N; ++n) net[n] -= d.buys[n] - d.sells[n];
      if (rest != kInfeasible && here + rest > best) {
        best = here + rest;
        best_a = a;
      }
    }
    net.push_back(depth);
    memo.emplace(net, std::make_pair(best, best_a));
    net.pop_back();
    return best;
  }
};

}  // namespace

LookaheadResult lookahead_psi(const MarketSpec& spec, const std::vector<PriceVector>& window) {
  if (window.empty()) throw RangeError("lookahead window must hold at least one slot");
  LookaheadSearch s{spec, static_cast<std::int64_t>(window.size()), {}, {}, {}, {}, 0,
                    capacity_limit(kDefaultSearchNodes)};
  for (const auto& p : window) {
    s.acts.push_back(enumerate_actions(spec, p));
    const auto& set = s.acts.back();
    std::vector<std::size_t> ord(set.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t x, std::size_t y) { return set.profit[x] > set.profit[y]; });
    s.order.push_back(std::move(ord));
  }
  s.suffix_best.assign(window.size() + 1, 0);
  for (std::size_t t = window.size(); t-- > 0;) {
    s.suffix_best[t] = s.suffix_best[t + 1] + s.acts[t].profit[s.order[t][0]];
  }
  std::vector<std::int64_t> net(spec.size(), 0);
  LookaheadResult r;
  r.psi = s.visit(0, net);
  if (r.psi == kInfeasible) throw NumericalError("lookahead found no feasible sequence", 0.0);
  for (std::int64_t t = 0; t < s.T; ++t) {
    net.push_back(t);
    std::size_t a = s.memo.at(net).second;
    net.pop_back();
    const auto& d = s.acts[t].actions[a];
    r.decisions.push_back(d);
    for (std::size_t n = 0; n < spec.size(); ++n) net[n] += d.buys[n] - d.sells[n];
  }
  r.nodes = s.nodes;
  return r;
}

std::vector<LookaheadResult> lookahead_frames(const MarketSpec& spec, const std::vector<PriceVector>& prices,
                                              std::int64_t T, std::int64_t M) {
  if (T < 1 || M < 1) throw RangeError("T and M must be positive");
  if (static_cast<std::int64_t>(prices.size()) < T * M) {
    throw RangeError("price sequence shorter than M * T");
  }
  std::vector<LookaheadResult> out;
  for (std::int64_t m = 0; m < M; ++m) {
    std::vector<PriceVector> window(prices.begin() + m * T, prices.begin() + (m + 1) * T);
    out.push_back(lookahead_psi(spec, window));
  }
  return out;
}

TradeDecision brute_force_slot_min(const TraderParams& params, const MarketSpec& spec, const PriceVector& prices,
                                   const std::vector<Shares>& queue) {
  check_price_vector(spec, prices);
  if (queue.size() != spec.size()) throw StructuralError("queue length does not match the market");
  TraderParams resolved = resolve_params(spec, params);
  ObjectiveScale os = ObjectiveScale::make(spec, resolved);
  auto opts = stock_options(spec, prices, &queue);

  TradeDecision best;
  __int128 best_obj = 0;
  Shares best_sold = 0, best_bought = 0;
  bool have = false;
  for_each_joint(opts, capacity_limit(kDefaultActionCap), [&](const TradeDecision& d) {
    if (!within_budget(spec, prices, d.buys)) return;
    __int128 obj = slot_objective(os, spec, prices, queue, d);
    Shares sold = std::accumulate(d.sells.begin(), d.sells.end(), Shares{0});
    Shares bought = std::accumulate(d.buys.begin(), d.buys.end(), Shares{0});
    bool better = !have || obj < best_obj ||
                  (obj == best_obj && (sold < best_sold || (sold == best_sold &&
                   (bought < best_bought || (bought == best_bought && d.buys > best.buys)))));
    if (better) {
      best = d;
      best_obj = obj;
      best_sold = sold;
      best_bought = bought;
      have = true;
    }
  });
  return best;
}

}  // namespace lyaptrade
