#include "lyaptrade/price_processes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

constexpr double kProbTolerance = 1e-12;

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  // Guard against rounding so the last positive-mass entry catches u -> 1.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) {
      for (std::size_t k = i; k < probs.size(); ++k) cdf[k] = 1.0;
      break;
    }
  }
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                            static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

void check_caps(const MarketSpec& spec, const PriceVector& p, const std::string& what) {
  if (p.size() != spec.size()) check_price_vector(spec, p);
  for (std::size_t n = 0; n < p.size(); ++n) {
    if (p[n] < 0 || p[n] > spec.stocks[n].p_max) {
      throw StructuralError(what + ": price " + format_money(p[n]) + " of stock " +
                            std::to_string(n) + " outside [0, " +
                            format_money(spec.stocks[n].p_max) + "]");
    }
  }
}

}  // namespace

// ------------------------------------------------------------ i.i.d.

PriceDistribution::PriceDistribution(std::vector<PriceVector> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty()) throw StructuralError("price distribution needs a non-empty support");
  if (support_.size() != probs_.size()) {
    throw StructuralError("support and probability lists differ in length");
  }
  const std::size_t dim = support_.front().size();
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (support_[i].size() != dim) throw StructuralError("support vectors differ in dimension");
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw StructuralError("probabilities must be non-negative");
    }
    total += probs_[i];
  }
  if (total <= 0.0) throw StructuralError("probabilities sum to zero");
  if (std::abs(total - 1.0) > 1e-12) {
    for (double& p : probs_) p /= total;
  }
  cdf_ = cumulative(probs_);
}

void PriceDistribution::check_against(const MarketSpec& spec) const {
  for (const auto& p : support_) check_caps(spec, p, "price distribution");
}

std::size_t PriceDistribution::sample_index(CounterRng& rng) const {
  return draw(cdf_, rng.next_double());
}

PriceVector sample_iid(const PriceDistribution& dist, CounterRng& rng) {
  return dist.support()[dist.sample_index(rng)];
}

// ------------------------------------------------------------ Markov

MarkovPriceModel::MarkovPriceModel(std::vector<PriceVector> state_prices,
                                   std::vector<std::vector<double>> transition)
    : prices_(std::move(state_prices)), transition_(std::move(transition)) {
  const std::size_t k = prices_.size();
  if (k == 0) throw StructuralError("Markov model needs at least one state");
  if (transition_.size() != k) throw StructuralError("transition matrix must be square");
  for (std::size_t i = 0; i < k; ++i) {
    if (prices_[i].size() != prices_.front().size()) {
      throw StructuralError("state price vectors differ in dimension");
    }
    if (transition_[i].size() != k) throw StructuralError("transition matrix must be square");
    double row = 0.0;
    for (double p : transition_[i]) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw StructuralError("transition probabilities must be non-negative");
      }
      row += p;
    }
    if (std::fabs(row - 1.0) > kProbTolerance) {
      throw StructuralError("transition row " + std::to_string(i) + " sums to " +
                            std::to_string(row) + ", not 1");
    }
  }
  // Irreducibility: every state reaches every other (forward and backward
  // closure from state 0).
  auto closure = [&](bool forward) {
    std::vector<char> seen(k, 0);
    std::queue<std::size_t> todo;
    seen[0] = 1;
    todo.push(0);
    while (!todo.empty()) {
      const std::size_t i = todo.front();
      todo.pop();
      for (std::size_t j = 0; j < k; ++j) {
        const double w = forward ? transition_[i][j] : transition_[j][i];
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          todo.push(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!closure(true) || !closure(false)) {
    throw StructuralError("Markov price chain is not irreducible");
  }
  cdf_.reserve(k);
  for (const auto& row : transition_) cdf_.push_back(cumulative(row));
}

const PriceVector& MarkovPriceModel::price(std::size_t state) const {
  if (state >= prices_.size()) {
    throw StructuralError("unknown Markov state " + std::to_string(state));
  }
  return prices_[state];
}

void MarkovPriceModel::check_against(const MarketSpec& spec) const {
  for (const auto& p : prices_) check_caps(spec, p, "Markov state");
}

std::size_t MarkovPriceModel::next_state(std::size_t state, CounterRng& rng) const {
  if (state >= prices_.size()) {
    throw StructuralError("unknown Markov state " + std::to_string(state));
  }
  return draw(cdf_[state], rng.next_double());
}

MarkovStep step_markov(const MarkovPriceModel& model, std::size_t state, CounterRng& rng) {
  const std::size_t next = model.next_state(state, rng);
  return {next, model.price(next)};
}

PriceDistribution stationary_distribution(const MarkovPriceModel& model,
                                          std::vector<double>* per_state) {
  const auto k = static_cast<Eigen::Index>(model.num_states());
  // Solve pi (P - I) = 0 with one balance equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      a(j, i) = model.transition()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                (i == j ? 1.0 : 0.0);
    }
  }
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < k) {
    throw NumericalError("stationary system is singular", std::nan(""));
  }
  Eigen::VectorXd pi = lu.solve(rhs);
  const double residual = (a * pi - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-10)) {
    throw NumericalError("stationary system is ill-conditioned", residual);
  }
  std::vector<double> probs(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    probs[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
  }
  if (per_state) *per_state = probs;
  std::map<PriceVector, double> merged;
  for (std::size_t i = 0; i < probs.size(); ++i) merged[model.state_prices()[i]] += probs[i];
  // Keep the order in which prices first appear among the states.
  std::vector<PriceVector> support;
  std::vector<double> weights;
  for (const auto& p : model.state_prices()) {
    auto it = merged.find(p);
    if (it == merged.end()) continue;
    support.push_back(p);
    weights.push_back(it->second);
    merged.erase(it);
  }
  return PriceDistribution(std::move(support), std::move(weights));
}

// ------------------------------------------------------------ traces

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

LoadedTrace load_trace(std::istream& in, const MarketSpec& spec, CapPolicy policy,
                       const std::string& source) {
  const std::size_t n_stocks = spec.size();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "empty trace (missing header)");
  line = strip_cr(line);
  std::string expected = "slot";
  for (std::size_t n = 1; n <= n_stocks; ++n) expected += ",p_" + std::to_string(n);
  if (line != expected) {
    throw ParseError(0, "header must be '" + expected + "', got '" + line + "'");
  }
  LoadedTrace out;
  out.trace.source = source;
  for (const auto& s : spec.stocks) out.caps.push_back(s.p_max);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != n_stocks + 1) {
      throw ParseError(row, "expected " + std::to_string(n_stocks + 1) + " columns, got " +
                                std::to_string(cells.size()));
    }
    std::int64_t slot = -1;
    try {
      std::size_t used = 0;
      slot = std::stoll(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(row, "malformed slot '" + cells[0] + "'");
    }
    if (slot != static_cast<std::int64_t>(row - 1)) {
      throw ParseError(row, "slots must start at 0 and increase by one (got " +
                                std::to_string(slot) + ")");
    }
    PriceVector p;
    p.prices.reserve(n_stocks);
    for (std::size_t n = 0; n < n_stocks; ++n) {
      Money v = 0;
      try {
        v = parse_money(cells[n + 1]);
      } catch (const Error& e) {
        throw ParseError(row, e.what());
      }
      if (v < 0) throw ParseError(row, "negative price in column p_" + std::to_string(n + 1));
      if (v > out.caps[n]) {
        if (policy == CapPolicy::kReject) {
          throw ParseError(row, "price " + format_money(v) + " of p_" + std::to_string(n + 1) +
                                    " exceeds p_max " + format_money(out.caps[n]));
        }
        out.caps[n] = v;
      }
      p.prices.push_back(v);
    }
    out.trace.sequence.push_back(std::move(p));
  }
  return out;
}

LoadedTrace load_trace_file(const std::string& path, const MarketSpec& spec, CapPolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return load_trace(in, spec, policy, path);
}

void write_trace(std::ostream& out, const PriceTrace& trace) {
  const std::size_t n_stocks = trace.sequence.empty() ? 0 : trace.sequence.front().size();
  out << "slot";
  for (std::size_t n = 1; n <= n_stocks; ++n) out << ",p_" << n;
  out << '\n';
  for (std::size_t t = 0; t < trace.sequence.size(); ++t) {
    out << t;
    for (Money v : trace.sequence[t].prices) out << ',' << format_money(v);
    out << '\n';
  }
}

// ------------------------------------------------------------ stream

PriceStream::PriceStream(const PriceSource& source, CounterRng rng,
                         std::optional<std::size_t> initial_state)
    : source_(&source), rng_(rng) {
  if (const auto* m = std::get_if<MarkovPriceModel>(source_)) {
    if (initial_state) {
      state_ = *initial_state;
      m->price(state_);
    } else {
      std::vector<double> per_state;
      stationary_distribution(*m, &per_state);
      PriceDistribution start(std::vector<PriceVector>(per_state.size(), m->price(0)), per_state);
      state_ = start.sample_index(rng_);
    }
  }
}

PriceVector PriceStream::next() {
  if (const auto* d = std::get_if<PriceDistribution>(source_)) {
    return sample_iid(*d, rng_);
  }
  if (const auto* m = std::get_if<MarkovPriceModel>(source_)) {
    if (started_) state_ = m->next_state(state_, rng_);
    started_ = true;
    return m->price(state_);
  }
  const auto& tr = std::get<PriceTrace>(*source_);
  if (position_ >= tr.sequence.size()) throw StructuralError("price trace exhausted");
  return tr.sequence[position_++];
}

std::optional<std::size_t> PriceStream::remaining() const {
  if (const auto* tr = std::get_if<PriceTrace>(source_)) return tr->sequence.size() - position_;
  return std::nullopt;
}

}  // namespace lyaptrade
