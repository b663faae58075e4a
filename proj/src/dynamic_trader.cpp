#include "lyaptrade/dynamic_trader.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lyaptrade/capacity.hpp"
#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw NumericalError(std::string("integer overflow in ") + what, 0.0);
  }
  return static_cast<std::int64_t>(v);
}

void check_dims(const MarketSpec& spec, const PriceVector& prices, const std::vector<Shares>& queue) {
  if (prices.size() != spec.size() || queue.size() != spec.size()) {
    throw StructuralError("price/queue length does not match the market");
  }
}

Rational p_max_dollars(const StockSpec& s) { return Rational(s.p_max, kCentsPerDollar); }

// Lexicographic key used by every buy solver: objective, then total shares.
struct Key {
  std::int64_t obj = 0;
  std::int64_t shares = 0;
  friend bool operator==(const Key&, const Key&) = default;
  friend auto operator<=>(const Key&, const Key&) = default;
};

Key add(Key a, std::int64_t obj, std::int64_t shares) {
  return {narrow(static_cast<i128>(a.obj) + obj, "buy objective"), a.shares + shares};
}

}  // namespace

const char* buy_solver_name(BuySolver s) {
  switch (s) {
    case BuySolver::kAuto: return "auto";
    case BuySolver::kExact: return "exact";
    case BuySolver::kGreedy: return "greedy";
    case BuySolver::kShareBudget: return "share_budget";
  }
  return "?";
}

BuySolver buy_solver_from_name(const std::string& name) {
  if (name == "auto") return BuySolver::kAuto;
  if (name == "exact") return BuySolver::kExact;
  if (name == "greedy") return BuySolver::kGreedy;
  if (name == "share_budget") return BuySolver::kShareBudget;
  throw StructuralError("unknown buy solver '" + name + "'");
}

std::vector<Rational> compute_theta(const MarketSpec& spec, const Rational& V) {
  if (V <= Rational(0)) throw StructuralError("V must be positive");
  std::vector<Rational> theta;
  theta.reserve(spec.size());
  for (const auto& s : spec.stocks) {
    theta.push_back(V * p_max_dollars(s) + Rational(2 * s.mu_max));
  }
  return theta;
}

TraderParams placeholder_wrap(const TraderParams& params, const MarketSpec& spec) {
  if (!params.placeholder_offset.empty()) throw StructuralError("params already carry place-holder shares");
  const std::size_t n = spec.size();
  std::vector<Shares> real = params.initial_queue.empty() ? std::vector<Shares>(n, 0) : params.initial_queue;
  if (real.size() != n) throw StructuralError("initial_queue length does not match the market");
  TraderParams out = params;
  out.placeholder = true;
  out.placeholder_offset.assign(n, 0);
  out.initial_queue.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = spec.stock(i);
    Rational hi = params.V * p_max_dollars(s) + Rational(2 * s.mu_max);
    if (real[i] < 0 || Rational(real[i]) > hi) {
      throw StructuralError("real holdings of stock " + std::to_string(i) + " outside [0, V p_max + 2 mu_max]");
    }
    out.placeholder_offset[i] = s.mu_max;
    out.initial_queue[i] = real[i] + s.mu_max;
  }
  return out;
}

TraderParams resolve_params(const MarketSpec& spec, TraderParams params) {
  const std::size_t n = spec.size();
  if (params.V <= Rational(0)) throw StructuralError("V must be positive");
  if (params.theta.empty()) {
    params.theta = compute_theta(spec, params.V);
  } else if (params.theta.size() != n) {
    throw StructuralError("theta length does not match the market");
  }
  if (params.placeholder && params.placeholder_offset.empty()) {
    params = placeholder_wrap(params, spec);
  }
  if (params.initial_queue.empty()) {
    params.initial_queue.resize(n);
    for (std::size_t i = 0; i < n; ++i) params.initial_queue[i] = spec.stock(i).mu_max;
  } else if (params.initial_queue.size() != n) {
    throw StructuralError("initial_queue length does not match the market");
  }
  for (Shares q : params.initial_queue) {
    if (q < 0) throw StructuralError("initial_queue entries must be non-negative");
  }
  if (params.buy_solver == BuySolver::kAuto) {
    params.buy_solver = std::holds_alternative<ShareBudget>(spec.budget) ? BuySolver::kShareBudget
                                                                        : BuySolver::kExact;
  }
  return params;
}

bool theta_conforms(const MarketSpec& spec, const TraderParams& params) {
  return params.theta.empty() || params.theta == compute_theta(spec, params.V);
}

bool initial_queue_conforms(const MarketSpec& spec, const TraderParams& params) {
  TraderParams r = resolve_params(spec, params);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& s = spec.stock(i);
    Rational hi = r.V * p_max_dollars(s) + Rational(3 * s.mu_max);
    if (r.initial_queue[i] < s.mu_max || Rational(r.initial_queue[i]) > hi) return false;
  }
  return true;
}

ObjectiveScale ObjectiveScale::make(const MarketSpec& spec, const TraderParams& resolved) {
  ObjectiveScale os;
  std::int64_t S = lcm_checked(kCentsPerDollar, resolved.V.den() * kCentsPerDollar);
  for (const auto& t : resolved.theta) S = lcm_checked(S, t.den());
  os.scale = S;
  os.v_per_cent = resolved.V.scaled_exact(S / kCentsPerDollar);
  os.theta_scaled.reserve(spec.size());
  for (const auto& t : resolved.theta) os.theta_scaled.push_back(t.scaled_exact(S));
  return os;
}

__int128 slot_objective(const ObjectiveScale& os, const MarketSpec& spec, const PriceVector& prices,
                        const std::vector<Shares>& queue, const TradeDecision& d) {
  check_dims(spec, prices, queue);
  i128 v = -static_cast<i128>(os.v_per_cent) * slot_profit(spec, prices, d);
  for (std::size_t n = 0; n < spec.size(); ++n) {
    i128 gap = static_cast<i128>(queue[n]) * os.scale - os.theta_scaled[n];
    v -= gap * (d.sells[n] - d.buys[n]);
  }
  return v;
}

__int128 buy_objective(const ObjectiveScale& os, const MarketSpec& spec, const PriceVector& prices,
                       const std::vector<Shares>& queue, const std::vector<Shares>& buys) {
  check_dims(spec, prices, queue);
  i128 v = 0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    i128 coef = static_cast<i128>(queue[n]) * os.scale - os.theta_scaled[n] +
                static_cast<i128>(os.v_per_cent) * prices[n];
    v += coef * buys[n] + static_cast<i128>(os.v_per_cent) * spec.stock(n).buy_cost(buys[n]);
  }
  return v;
}

Trader::Trader(MarketSpec spec, TraderParams params)
    : spec_(std::move(spec)),
      params_(resolve_params(spec_, std::move(params))),
      scale_(ObjectiveScale::make(spec_, params_)),
      dp_cap_(capacity_limit(kDefaultDpCells)) {}

std::vector<Shares> Trader::sell(const PriceVector& prices, const std::vector<Shares>& queue) const {
  check_dims(spec_, prices, queue);
  std::vector<Shares> mu(spec_.size(), 0);
  for (std::size_t n = 0; n < spec_.size(); ++n) {
    const auto& s = spec_.stock(n);
    i128 coef = static_cast<i128>(scale_.theta_scaled[n]) - static_cast<i128>(queue[n]) * scale_.scale -
                static_cast<i128>(scale_.v_per_cent) * prices[n];
    Shares limit = std::min(s.mu_max, queue[n]);
    i128 best = 0;
    for (Shares m = 1; m <= limit; ++m) {
      Money fee = s.sell_cost(m);
      if (m * prices[n] < fee) continue;
      i128 obj = coef * m + static_cast<i128>(scale_.v_per_cent) * fee;
      if (obj < best) {
        best = obj;
        mu[n] = m;
      }
    }
  }
  return mu;
}

namespace {

// Scaled per-stock buying objective for a = 0..mu_max.
std::vector<std::int64_t> stock_buy_values(const ObjectiveScale& os, const StockSpec& s, Money price,
                                           Shares queue, std::size_t n) {
  i128 coef = static_cast<i128>(queue) * os.scale - os.theta_scaled[n] +
              static_cast<i128>(os.v_per_cent) * price;
  std::vector<std::int64_t> out(static_cast<std::size_t>(s.mu_max) + 1, 0);
  for (Shares a = 1; a <= s.mu_max; ++a) {
    out[a] = narrow(coef * a + static_cast<i128>(os.v_per_cent) * s.buy_cost(a), "buy objective");
  }
  return out;
}

// Smallest-objective count for one stock in isolation, up to `limit` shares.
Shares best_single(const std::vector<std::int64_t>& vals, Shares limit) {
  Shares best_a = 0;
  for (Shares a = 1; a <= limit; ++a) {
    if (vals[a] < vals[best_a]) best_a = a;
  }
  return best_a;
}

// Bounded knapsack over candidate stocks with integer weights; picks the
// (objective, shares)-minimal vector, preferring larger buys on lower
// indices among equal keys.
std::vector<Shares> knapsack(const std::vector<std::vector<std::int64_t>>& vals,
                             const std::vector<std::int64_t>& weight, std::int64_t cap,
                             std::int64_t cell_cap) {
  const std::size_t k = vals.size();
  std::vector<Shares> pick(k, 0);
  if (k == 0) return pick;

  // Few combinations: enumerate directly.
  std::int64_t combos = 1;
  for (const auto& v : vals) {
    combos *= static_cast<std::int64_t>(v.size());
    if (combos > 4096) break;
  }
  if (combos <= 4096) {
    std::vector<Shares> cur(k, 0);
    Key best{0, 0};
    bool have = false;
    while (true) {
      std::int64_t used = 0;
      Key key{0, 0};
      for (std::size_t i = 0; i < k; ++i) {
        used += cur[i] * weight[i];
        key = add(key, vals[i][cur[i]], cur[i]);
      }
      if (used <= cap) {
        if (!have || key < best || (key == best && cur > pick)) {
          best = key;
          pick = cur;
          have = true;
        }
      }
      std::size_t i = k;
      while (i > 0) {
        --i;
        if (cur[i] + 1 < static_cast<Shares>(vals[i].size())) {
          ++cur[i];
          break;
        }
        cur[i] = 0;
        if (i == 0) return pick;
      }
    }
  }

  const std::int64_t width = cap + 1;
  if (width > cell_cap / static_cast<std::int64_t>(k + 1)) {
    throw CapacityError("budget table needs " + std::to_string((k + 1)) + " x " + std::to_string(width) +
                        " cells, above the cap of " + std::to_string(cell_cap) +
                        "; use the greedy buy solver or raise LYAPTRADE_CAPACITY_CELLS");
  }
  // f[i][b]: best key for stocks i..k-1 within budget b.
  std::vector<Key> f(static_cast<std::size_t>((k + 1) * width));
  auto at = [&](std::size_t i, std::int64_t b) -> Key& { return f[i * width + b]; };
  for (std::size_t i = k; i-- > 0;) {
    for (std::int64_t b = 0; b <= cap; ++b) {
      Key best = at(i + 1, b);
      const auto& v = vals[i];
      for (Shares a = 1; a < static_cast<Shares>(v.size()); ++a) {
        std::int64_t w = a * weight[i];
        if (w > b) break;
        Key cand = add(at(i + 1, b - w), v[a], a);
        if (cand < best) best = cand;
      }
      at(i, b) = best;
    }
  }
  std::int64_t b = cap;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& v = vals[i];
    Key target = at(i, b);
    for (Shares a = static_cast<Shares>(v.size()) - 1; a >= 0; --a) {
      std::int64_t w = a * weight[i];
      if (w > b) continue;
      if (add(at(i + 1, b - w), v[a], a) == target) {
        pick[i] = a;
        b -= w;
        break;
      }
    }
  }
  return pick;
}

}  // namespace

std::vector<Shares> Trader::buy_exact(const PriceVector& prices, const std::vector<Shares>& queue) const {
  check_dims(spec_, prices, queue);
  if (std::holds_alternative<ShareBudget>(spec_.budget)) return buy_share_budget(prices, queue);
  const std::size_t N = spec_.size();
  std::vector<Shares> A(N, 0);

  std::vector<std::size_t> cand;
  std::vector<std::vector<std::int64_t>> vals;
  for (std::size_t n = 0; n < N; ++n) {
    auto v = stock_buy_values(scale_, spec_.stock(n), prices[n], queue[n], n);
    if (*std::min_element(v.begin() + 1, v.end()) < 0) {
      cand.push_back(n);
      vals.push_back(std::move(v));
    }
  }
  const auto* money = std::get_if<MoneyBudget>(&spec_.budget);
  i128 full_cost = 0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    full_cost += static_cast<i128>(spec_.stock(cand[i]).mu_max) * prices[cand[i]];
  }
  if (money == nullptr || full_cost <= money->x) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      A[cand[i]] = best_single(vals[i], spec_.stock(cand[i]).mu_max);
    }
    return A;
  }
  std::int64_t g = 0;
  for (std::size_t n : cand) g = std::gcd(g, prices[n]);
  std::vector<std::int64_t> weight;
  for (std::size_t n : cand) weight.push_back(prices[n] / g);
  auto pick = knapsack(vals, weight, money->x / g, dp_cap_);
  for (std::size_t i = 0; i < cand.size(); ++i) A[cand[i]] = pick[i];
  return A;
}

std::vector<Shares> Trader::buy_greedy(const PriceVector& prices, const std::vector<Shares>& queue) const {
  check_dims(spec_, prices, queue);
  const std::size_t N = spec_.size();
  std::vector<Shares> A(N, 0);
  std::vector<i128> coef(N);
  for (std::size_t n = 0; n < N; ++n) {
    coef[n] = static_cast<i128>(queue[n]) * scale_.scale - scale_.theta_scaled[n] +
              static_cast<i128>(scale_.v_per_cent) * prices[n];
  }
  const auto* money = std::get_if<MoneyBudget>(&spec_.budget);
  const auto* shares = std::get_if<ShareBudget>(&spec_.budget);
  i128 spent = 0;
  Shares count = 0;
  while (true) {
    if (shares != nullptr && count >= shares->a_tot) break;
    // Ratio numerator / price; a zero price with a negative numerator ranks
    // below every finite ratio.
    std::size_t best = N;
    i128 best_num = 0;
    Money best_price = 0;
    for (std::size_t n = 0; n < N; ++n) {
      const auto& s = spec_.stock(n);
      if (A[n] >= s.mu_max) continue;
      i128 num = coef[n] + static_cast<i128>(scale_.v_per_cent) * (s.buy_cost(A[n] + 1) - s.buy_cost(A[n]));
      if (num >= 0) continue;
      Money p = prices[n];
      if (best == N) {
        best = n;
      } else if (p == 0) {
        if (best_price != 0) best = n;
      } else if (best_price != 0 && num * best_price < best_num * p) {
        best = n;
      }
      if (best == n) {
        best_num = num;
        best_price = p;
      }
    }
    if (best == N) break;
    ++A[best];
    ++count;
    spent += prices[best];
    if (money != nullptr && spent >= money->x) break;
  }
  return A;
}

std::vector<Shares> Trader::buy_share_budget(const PriceVector& prices,
                                             const std::vector<Shares>& queue) const {
  check_dims(spec_, prices, queue);
  const auto* budget = std::get_if<ShareBudget>(&spec_.budget);
  if (budget == nullptr) throw StructuralError("share-budget solver needs a share budget");
  const std::size_t N = spec_.size();
  std::vector<Shares> A(N, 0);

  bool linear = true;
  for (const auto& s : spec_.stocks) {
    auto k = s.buy_cost.kind();
    if (k != CostFunction::Kind::kZero && k != CostFunction::Kind::kLinear) linear = false;
  }
  if (linear) {
    std::vector<std::pair<i128, std::size_t>> order;
    for (std::size_t n = 0; n < N; ++n) {
      const auto& s = spec_.stock(n);
      i128 c = static_cast<i128>(queue[n]) * scale_.scale - scale_.theta_scaled[n] +
               static_cast<i128>(scale_.v_per_cent) * (prices[n] + s.buy_cost.rate());
      if (c < 0) order.emplace_back(c, n);
    }
    std::sort(order.begin(), order.end());
    Shares left = budget->a_tot;
    for (const auto& [c, n] : order) {
      if (left <= 0) break;
      A[n] = std::min(spec_.stock(n).mu_max, left);
      left -= A[n];
    }
    return A;
  }

  std::vector<std::size_t> cand;
  std::vector<std::vector<std::int64_t>> vals;
  std::int64_t total = 0;
  for (std::size_t n = 0; n < N; ++n) {
    auto v = stock_buy_values(scale_, spec_.stock(n), prices[n], queue[n], n);
    if (*std::min_element(v.begin() + 1, v.end()) < 0) {
      cand.push_back(n);
      total += spec_.stock(n).mu_max;
      vals.push_back(std::move(v));
    }
  }
  std::vector<std::int64_t> weight(cand.size(), 1);
  auto pick = knapsack(vals, weight, std::min(total, budget->a_tot), dp_cap_);
  for (std::size_t i = 0; i < cand.size(); ++i) A[cand[i]] = pick[i];
  return A;
}

std::vector<Shares> Trader::buy(const PriceVector& prices, const std::vector<Shares>& queue) const {
  switch (params_.buy_solver) {
    case BuySolver::kGreedy: return buy_greedy(prices, queue);
    case BuySolver::kShareBudget: return buy_share_budget(prices, queue);
    default: return buy_exact(prices, queue);
  }
}

TradeDecision Trader::decide(const PriceVector& prices, const std::vector<Shares>& queue) const {
  TradeDecision d;
  d.sells = sell(prices, queue);
  d.buys = buy(prices, queue);
  return d;
}

std::vector<Shares> sell_decision(const TraderParams& params, const MarketSpec& spec,
                                  const PriceVector& prices, const std::vector<Shares>& queue) {
  return Trader(spec, params).sell(prices, queue);
}

std::vector<Shares> buy_decision_exact(const TraderParams& params, const MarketSpec& spec,
                                       const PriceVector& prices, const std::vector<Shares>& queue) {
  return Trader(spec, params).buy_exact(prices, queue);
}

std::vector<Shares> buy_decision_greedy(const TraderParams& params, const MarketSpec& spec,
                                        const PriceVector& prices, const std::vector<Shares>& queue) {
  return Trader(spec, params).buy_greedy(prices, queue);
}

std::vector<Shares> buy_decision_share_budget(const TraderParams& params, const MarketSpec& spec,
                                              const PriceVector& prices,
                                              const std::vector<Shares>& queue) {
  return Trader(spec, params).buy_share_budget(prices, queue);
}

StepResult trader_step(const TraderParams& params, const MarketSpec& spec, const PortfolioState& state,
                       const PriceVector& prices) {
  check_price_vector(spec, prices);
  Trader trader(spec, params);
  StepResult r;
  r.decision = trader.decide(prices, state.queue);
  r.profit = slot_profit(spec, prices, r.decision);
  r.next = apply_decision(state, r.decision);
  r.next.cumulative_profit = state.cumulative_profit + r.profit;
  return r;
}

const std::vector<Shares>& Trajectory::queue_at(std::size_t t) const {
  if (t > records.size()) throw RangeError("slot " + std::to_string(t) + " beyond trajectory");
  return t == 0 ? initial_queue : records[t - 1].queue_after;
}

std::vector<Shares> Trajectory::real_queue_at(std::size_t t) const {
  std::vector<Shares> q = queue_at(t);
  for (std::size_t n = 0; n < params.placeholder_offset.size() && n < q.size(); ++n) {
    q[n] -= params.placeholder_offset[n];
  }
  return q;
}

Money Trajectory::trading_profit() const {
  Money total = 0;
  for (const auto& r : records) total += r.profit;
  return total;
}

Money Trajectory::cumulative_profit() const { return trading_profit() - startup_cost; }

Trajectory run_on_stream(const MarketSpec& spec, const TraderParams& params, PriceStream& stream,
                         std::int64_t horizon, bool charge_startup) {
  if (horizon < 1) throw StructuralError("horizon must be at least 1");
  if (auto left = stream.remaining(); left && static_cast<std::int64_t>(*left) < horizon) {
    throw StructuralError("trace has " + std::to_string(*left) + " slots left, horizon is " +
                          std::to_string(horizon));
  }
  Trader trader(spec, params);
  Trajectory traj;
  traj.spec = spec;
  traj.params = trader.params();
  traj.initial_queue = traj.params.initial_queue;
  traj.records.reserve(static_cast<std::size_t>(horizon));

  std::vector<Shares> queue = traj.initial_queue;
  for (std::int64_t t = 0; t < horizon; ++t) {
    PriceVector prices = stream.next();
    check_price_vector(spec, prices);
    if (t == 0 && charge_startup) {
      for (std::size_t n = 0; n < spec.size(); ++n) {
        const auto& s = spec.stock(n);
        if (queue[n] > s.mu_max) {
          throw StructuralError("startup purchase above mu_max is not priced by the cost function");
        }
        traj.startup_cost += queue[n] * prices[n] + s.buy_cost(queue[n]);
      }
    }
    SlotRecord rec;
    rec.slot = t;
    rec.decision = trader.decide(prices, queue);
    rec.profit = slot_profit(spec, prices, rec.decision);
    for (std::size_t n = 0; n < spec.size(); ++n) {
      queue[n] = std::max<Shares>(queue[n] - rec.decision.sells[n] + rec.decision.buys[n], 0);
    }
    rec.queue_after = queue;
    rec.prices = std::move(prices);
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

Trajectory run_backtest(const MarketSpec& spec, const TraderParams& params, const PriceSource& source,
                        std::int64_t horizon, std::uint64_t seed, const BacktestOptions& options) {
  PriceStream stream(source, CounterRng(seed, options.stream), options.markov_initial_state);
  return run_on_stream(spec, params, stream, horizon, options.charge_startup);
}

MarketSpec scale_market(const MarketSpec& spec, double factor) {
  MarketSpec out = spec;
  for (auto& s : out.stocks) {
    Shares mu = std::max<Shares>(1, static_cast<Shares>(std::floor(static_cast<double>(s.mu_max) * factor)));
    for (CostFunction* c : {&s.buy_cost, &s.sell_cost}) {
      if (c->kind() != CostFunction::Kind::kTable) continue;
      std::vector<Money> v = c->values();
      v.resize(static_cast<std::size_t>(mu) + 1, v.back());
      Money declared = c->declared_max();
      bool had = c->has_declared_max();
      *c = CostFunction::table(std::move(v));
      if (had) c->set_declared_max(declared);
    }
    s.mu_max = mu;
  }
  out.validate();
  return out;
}

ScaledRunResult scaled_windows_run(const MarketSpec& spec, const TraderParams& params, double beta,
                                   std::int64_t T, std::int64_t M, std::int64_t num_windows,
                                   const PriceSource& source, std::uint64_t seed,
                                   bool keep_trajectories) {
  if (beta < 0) throw StructuralError("beta must be non-negative");
  if (T < 1 || M < 1 || num_windows < 1) throw StructuralError("T, M and windows must be positive");
  const std::int64_t W = M * T;
  PriceStream stream(source, CounterRng(seed, 0));
  ScaledRunResult result;
  double scale = 1.0;
  for (std::int64_t w = 0; w < num_windows; ++w) {
    MarketSpec spec_w = scale == 1.0 ? spec : scale_market(spec, scale);
    TraderParams p = params;
    if (scale != 1.0) {
      p.V = Rational::approximate(params.V.to_double() * scale, 1'000'000);
      if (!p.theta.empty()) {
        for (auto& t : p.theta) t = Rational::approximate(t.to_double() * scale, 1'000'000);
      }
    }
    p.initial_queue.clear();
    p.placeholder = true;
    p.placeholder_offset.clear();

    Trajectory traj = run_on_stream(spec_w, p, stream, W);
    WindowStats ws;
    ws.window = w;
    ws.scale = scale;
    ws.V = traj.params.V;
    for (const auto& s : spec_w.stocks) ws.mu_max.push_back(s.mu_max);
    ws.profit = traj.trading_profit();
    ws.q = to_dollars(ws.profit) / static_cast<double>(W);
    ws.alpha = beta * std::max(ws.q, 0.0);
    ws.real_shares_end = traj.real_queue_at(traj.size());
    result.windows.push_back(ws);
    if (keep_trajectories) result.trajectories.push_back(std::move(traj));
    scale *= 1.0 + ws.alpha;
  }
  return result;
}

}  // namespace lyaptrade
