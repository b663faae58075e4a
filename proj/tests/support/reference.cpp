#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ref {

using lyaptrade::CostFunction;
using lyaptrade::MoneyBudget;
using lyaptrade::ShareBudget;

namespace {

Money cost(const CostFunction& c, Shares k) {
  if (k == 0) return 0;
  switch (c.kind()) {
    case CostFunction::Kind::kZero:
      return 0;
    case CostFunction::Kind::kLinear:
      return c.rate() * k;
    case CostFunction::Kind::kFixed:
      return c.fee();
    case CostFunction::Kind::kTable:
      return c.values().at(static_cast<std::size_t>(k));
  }
  return 0;
}

// Odometer over [0, hi_i] for each digit.
bool advance(std::vector<Shares>& digits, const std::vector<Shares>& hi) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < hi[i]) {
      ++digits[i];
      return true;
    }
    digits[i] = 0;
  }
  return false;
}

}  // namespace

bool feasible(const MarketSpec& spec, const PriceVector& p, const TradeDecision& d,
              const std::vector<Shares>* queue) {
  Money spend = 0;
  Shares bought = 0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    const auto& s = spec.stocks[n];
    if (d.sells[n] < 0 || d.sells[n] > s.mu_max) return false;
    if (d.buys[n] < 0 || d.buys[n] > s.mu_max) return false;
    if (d.sells[n] * p.prices[n] < cost(s.sell_cost, d.sells[n])) return false;
    if (queue && d.sells[n] > (*queue)[n]) return false;
    spend += d.buys[n] * p.prices[n];
    bought += d.buys[n];
  }
  if (auto* m = std::get_if<MoneyBudget>(&spec.budget); m && spend > m->x) return false;
  if (auto* b = std::get_if<ShareBudget>(&spec.budget); b && bought > b->a_tot) return false;
  return true;
}

std::vector<TradeDecision> all_decisions(const MarketSpec& spec, const PriceVector& p,
                                         const std::vector<Shares>* queue) {
  const std::size_t N = spec.size();
  std::vector<Shares> hi(2 * N), digits(2 * N, 0);
  for (std::size_t n = 0; n < N; ++n) hi[n] = hi[N + n] = spec.stocks[n].mu_max;
  std::vector<TradeDecision> out;
  do {
    TradeDecision d{std::vector<Shares>(digits.begin(), digits.begin() + N),
                    std::vector<Shares>(digits.begin() + N, digits.end())};
    if (feasible(spec, p, d, queue)) out.push_back(std::move(d));
  } while (advance(digits, hi));
  return out;
}

Money profit(const MarketSpec& spec, const PriceVector& p, const TradeDecision& d) {
  Money total = 0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    const auto& s = spec.stocks[n];
    total += d.sells[n] * p.prices[n] - cost(s.sell_cost, d.sells[n]);
    total -= d.buys[n] * p.prices[n] + cost(s.buy_cost, d.buys[n]);
  }
  return total;
}

std::vector<cpp_rational> theta(const MarketSpec& spec, const TraderParams& params) {
  const cpp_rational V(params.V.num(), params.V.den());
  std::vector<cpp_rational> out;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    if (!params.theta.empty()) {
      out.emplace_back(params.theta[n].num(), params.theta[n].den());
    } else {
      out.push_back(V * cpp_rational(spec.stocks[n].p_max, 100) + 2 * spec.stocks[n].mu_max);
    }
  }
  return out;
}

cpp_rational objective(const MarketSpec& spec, const TraderParams& params, const PriceVector& p,
                       const std::vector<Shares>& queue, const TradeDecision& d) {
  const cpp_rational V(params.V.num(), params.V.den());
  auto th = theta(spec, params);
  cpp_rational v = -V * cpp_rational(profit(spec, p, d), 100);
  for (std::size_t n = 0; n < spec.size(); ++n) {
    v -= (cpp_rational(queue[n]) - th[n]) * (d.sells[n] - d.buys[n]);
  }
  return v;
}

FastObjective::FastObjective(const MarketSpec& s, const TraderParams& params) : spec(s) {
  auto th = theta(s, params);
  std::int64_t l = 100 * params.V.den();
  for (const auto& t : th) {
    l = std::lcm(l, static_cast<std::int64_t>(boost::multiprecision::denominator(t)));
  }
  k = l;
  // scale * V / 100 per cent
  k_v = static_cast<__int128>(l / 100) / params.V.den() * params.V.num();
  for (const auto& t : th) {
    cpp_rational scaled = t * l;
    k_theta.push_back(static_cast<__int128>(static_cast<long long>(boost::multiprecision::numerator(scaled))));
  }
}

__int128 FastObjective::operator()(const PriceVector& p, const std::vector<Shares>& queue,
                                   const TradeDecision& d) const {
  __int128 v = -k_v * profit(spec, p, d);
  for (std::size_t n = 0; n < spec.size(); ++n) {
    v -= (k * queue[n] - k_theta[n]) * (d.sells[n] - d.buys[n]);
  }
  return v;
}

__int128 min_objective(const FastObjective& f, const PriceVector& p, const std::vector<Shares>& queue) {
  auto all = all_decisions(f.spec, p, &queue);
  __int128 best = f(p, queue, all.front());
  for (const auto& d : all) best = std::min(best, f(p, queue, d));
  return best;
}

// ---------------------------------------------------------------- LP

namespace {

// Solves a small dense system exactly; returns false when singular.
bool solve(std::vector<std::vector<cpp_rational>> a, std::vector<cpp_rational> b,
           std::vector<cpp_rational>& x) {
  const std::size_t m = b.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    while (piv < m && a[piv][c] == 0) ++piv;
    if (piv == m) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      cpp_rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < m; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = b[i] / a[i][i];
  return true;
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (cur.size() == k) {
    fn(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, fn);
    cur.pop_back();
  }
}

}  // namespace

LpReference phi_opt_vertices(const MarketSpec& spec, const std::vector<PriceVector>& support,
                             const std::vector<cpp_rational>& probs) {
  const std::size_t N = spec.size();
  const std::size_t K = support.size();
  // Integer weights over a common denominator.
  std::int64_t den = 1;
  for (const auto& q : probs) den = std::lcm(den, static_cast<std::int64_t>(boost::multiprecision::denominator(q)));
  std::vector<std::int64_t> w;
  for (const auto& q : probs) w.push_back(static_cast<std::int64_t>(boost::multiprecision::numerator(cpp_rational(q * den))));

  std::vector<std::vector<TradeDecision>> omega;
  for (const auto& p : support) omega.push_back(all_decisions(spec, p, nullptr));

  // Best scaled profit for each scaled drift vector.
  std::map<std::vector<std::int64_t>, std::int64_t> best;
  std::vector<Shares> idx(K, 0), hi(K);
  for (std::size_t k = 0; k < K; ++k) hi[k] = static_cast<Shares>(omega[k].size()) - 1;
  LpReference out;
  do {
    std::vector<std::int64_t> d(N, 0);
    std::int64_t phi = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& a = omega[k][static_cast<std::size_t>(idx[k])];
      phi += w[k] * profit(spec, support[k], a);
      for (std::size_t n = 0; n < N; ++n) d[n] += w[k] * (a.buys[n] - a.sells[n]);
    }
    ++out.assignments;
    auto [it, fresh] = best.emplace(d, phi);
    if (!fresh) it->second = std::max(it->second, phi);
  } while (advance(idx, hi));

  // Drop points dominated in every drift and in profit.
  std::vector<std::pair<std::vector<std::int64_t>, std::int64_t>> pts(best.begin(), best.end());
  std::vector<std::pair<std::vector<std::int64_t>, std::int64_t>> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j || pts[j].second < pts[i].second) continue;
      bool ge = true;
      for (std::size_t n = 0; n < N; ++n) ge = ge && pts[j].first[n] >= pts[i].first[n];
      dominated = ge && (pts[j].second > pts[i].second || pts[j].first != pts[i].first);
    }
    if (!dominated) keep.push_back(pts[i]);
  }

  const cpp_rational scale(den * 100);
  cpp_rational top = -1;
  cpp_rational det = -1;
  for (const auto& [d, phi] : keep) {
    if (std::all_of(d.begin(), d.end(), [](std::int64_t v) { return v >= 0; })) {
      det = std::max(det, cpp_rational(phi) / scale);
    }
  }
  for (std::size_t m = 1; m <= N + 1 && m <= keep.size(); ++m) {
    std::vector<std::size_t> cur;
    subsets(keep.size(), m, 0, cur, [&](const std::vector<std::size_t>& S) {
      std::vector<std::size_t> cc;
      subsets(N, m - 1, 0, cc, [&](const std::vector<std::size_t>& C) {
        std::vector<std::vector<cpp_rational>> a(m, std::vector<cpp_rational>(m));
        std::vector<cpp_rational> b(m, 0);
        for (std::size_t j = 0; j < m; ++j) a[0][j] = 1;
        b[0] = 1;
        for (std::size_t r = 0; r < C.size(); ++r) {
          for (std::size_t j = 0; j < m; ++j) a[r + 1][j] = keep[S[j]].first[C[r]];
        }
        std::vector<cpp_rational> x;
        if (!solve(a, b, x)) return;
        cpp_rational value = 0;
        std::vector<cpp_rational> drift(N, 0);
        for (std::size_t j = 0; j < m; ++j) {
          if (x[j] < 0) return;
          value += x[j] * keep[S[j]].second;
          for (std::size_t n = 0; n < N; ++n) drift[n] += x[j] * keep[S[j]].first[n];
        }
        for (const auto& dn : drift) {
          if (dn < 0) return;
        }
        top = std::max(top, cpp_rational(value / scale));
      });
    });
  }
  out.value = top;
  out.deterministic_value = det;
  return out;
}

// ---------------------------------------------------------------- lookahead

Money lookahead_exhaustive(const MarketSpec& spec, const std::vector<PriceVector>& window,
                           std::int64_t limit) {
  const std::size_t N = spec.size();
  std::vector<std::vector<TradeDecision>> omega;
  double count = 1;
  for (const auto& p : window) {
    omega.push_back(all_decisions(spec, p, nullptr));
    count *= static_cast<double>(omega.back().size());
  }
  if (count > static_cast<double>(limit)) throw std::length_error("too many sequences");
  std::vector<Shares> idx(window.size(), 0), hi(window.size());
  for (std::size_t k = 0; k < window.size(); ++k) hi[k] = static_cast<Shares>(omega[k].size()) - 1;
  Money best = 0;
  do {
    std::vector<Shares> net(N, 0);
    Money total = 0;
    for (std::size_t k = 0; k < window.size(); ++k) {
      const auto& a = omega[k][static_cast<std::size_t>(idx[k])];
      total += profit(spec, window[k], a);
      for (std::size_t n = 0; n < N; ++n) net[n] += a.buys[n] - a.sells[n];
    }
    if (std::all_of(net.begin(), net.end(), [](Shares v) { return v >= 0; })) best = std::max(best, total);
  } while (advance(idx, hi));
  return best;
}

// ---------------------------------------------------------------- Markov

double window_deviation(const std::vector<std::vector<double>>& P, const std::vector<double>& f,
                        double target, std::int64_t T) {
  const std::size_t S = f.size();
  std::vector<double> v = f, acc(S, 0.0);
  for (std::int64_t k = 1; k <= T; ++k) {
    std::vector<double> next(S, 0.0);
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t j = 0; j < S; ++j) next[i] += P[i][j] * v[j];
    }
    v = next;
    for (std::size_t i = 0; i < S; ++i) acc[i] += v[i];
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < S; ++i) dev = std::max(dev, std::abs(acc[i] / static_cast<double>(T) - target));
  return dev;
}

// ---------------------------------------------------------------- random

std::int64_t uniform(lyaptrade::CounterRng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng.next_u64() % span);
}

MarketSpec random_spec(lyaptrade::CounterRng& rng, const SpecOptions& opt) {
  MarketSpec spec;
  const auto N = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(opt.max_stocks)));
  Money spend_cap = 0;
  Shares share_cap = 0;
  for (std::size_t n = 0; n < N; ++n) {
    lyaptrade::StockSpec s;
    s.index = n;
    s.mu_max = uniform(rng, 1, opt.max_mu);
    s.p_max = uniform(rng, 1, opt.max_price);
    auto make_cost = [&]() {
      const int kinds = opt.allow_table ? 4 : (opt.allow_fixed ? 3 : 2);
      switch (uniform(rng, 0, kinds - 1)) {
        case 0:
          return CostFunction::zero();
        case 1:
          return CostFunction::linear(uniform(rng, 0, 50));
        case 2:
          if (opt.allow_fixed) return CostFunction::fixed(uniform(rng, 0, 100));
          [[fallthrough]];
        default: {
          std::vector<Money> v{0};
          for (Shares k = 1; k <= s.mu_max; ++k) v.push_back(v.back() + uniform(rng, 0, 60));
          return CostFunction::table(v);
        }
      }
    };
    s.buy_cost = make_cost();
    s.sell_cost = make_cost();
    spend_cap += s.mu_max * s.p_max;
    share_cap += s.mu_max;
    spec.stocks.push_back(std::move(s));
  }
  if (opt.allow_budget) {
    switch (uniform(rng, 0, 2)) {
      case 1:
        spec.budget = MoneyBudget{uniform(rng, 1, spend_cap)};
        break;
      case 2:
        spec.budget = ShareBudget{uniform(rng, 1, share_cap)};
        break;
      default:
        break;
    }
  }
  spec.validate();
  return spec;
}

PriceVector random_prices(const MarketSpec& spec, lyaptrade::CounterRng& rng) {
  PriceVector p;
  for (const auto& s : spec.stocks) p.prices.push_back(uniform(rng, 0, s.p_max));
  return p;
}

}  // namespace ref
