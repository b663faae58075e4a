#include "lyaptrade/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& pointer) {
  if (!j.is_object()) throw ConfigError(pointer.empty() ? "/" : pointer, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(pointer + "/" + key, "missing required field");
  return *it;
}

std::int64_t get_int(const json& j, const std::string& pointer, std::int64_t min_value) {
  if (!j.is_number_integer()) throw ConfigError(pointer, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < min_value) throw ConfigError(pointer, "must be at least " + std::to_string(min_value));
  return v;
}

double get_double(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw ConfigError(pointer, "expected a number");
  return j.get<double>();
}

std::string get_string(const json& j, const std::string& pointer) {
  if (!j.is_string()) throw ConfigError(pointer, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& pointer) {
  if (!j.is_boolean()) throw ConfigError(pointer, "expected true or false");
  return j.get<bool>();
}

Rational rational_from_json(const json& j, const std::string& pointer) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return Rational::from_double(j.get<double>());
  } catch (const Error& e) {
    throw ConfigError(pointer, e.what());
  }
  throw ConfigError(pointer, "expected a number or a decimal/fraction string");
}

PriceVector price_from_json(const json& j, std::size_t n, const std::string& pointer) {
  PriceVector p;
  if (!j.is_array()) {
    if (n != 1) throw ConfigError(pointer, "expected an array of " + std::to_string(n) + " prices");
    p.prices.push_back(money_from_json(j, pointer));
    return p;
  }
  if (j.size() != n) throw ConfigError(pointer, "expected " + std::to_string(n) + " prices");
  for (std::size_t i = 0; i < n; ++i) p.prices.push_back(money_from_json(j[i], pointer + "/" + std::to_string(i)));
  return p;
}

json price_to_json(const PriceVector& p) {
  json a = json::array();
  for (Money m : p.prices) a.push_back(format_money(m));
  return a;
}

std::vector<double> probs_from_json(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw ConfigError(pointer, "expected an array of probabilities");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    double x = get_double(j[i], pointer + "/" + std::to_string(i));
    if (!(x >= 0.0)) throw ConfigError(pointer + "/" + std::to_string(i), "probability must be non-negative");
    v.push_back(x);
  }
  return v;
}

SourceConfig source_from_json(const json& j, MarketSpec& market, const std::string& base_dir) {
  const std::string ptr = "/source";
  SourceConfig s;
  s.kind = get_string(require(j, "kind", ptr), ptr + "/kind");
  const std::size_t n = market.size();
  try {
    if (s.kind == "iid") {
      const auto& sup = require(j, "support", ptr);
      if (!sup.is_array() || sup.empty()) throw ConfigError(ptr + "/support", "expected a non-empty array");
      std::vector<PriceVector> support;
      for (std::size_t i = 0; i < sup.size(); ++i) {
        support.push_back(price_from_json(sup[i], n, ptr + "/support/" + std::to_string(i)));
      }
      std::vector<double> probs = j.contains("probs") ? probs_from_json(j["probs"], ptr + "/probs")
                                                      : std::vector<double>(support.size(), 1.0);
      if (probs.size() != support.size()) throw ConfigError(ptr + "/probs", "length differs from support");
      PriceDistribution dist(std::move(support), std::move(probs));
      dist.check_against(market);
      s.source = std::move(dist);
    } else if (s.kind == "markov") {
      const auto& st = require(j, "states", ptr);
      if (!st.is_array() || st.empty()) throw ConfigError(ptr + "/states", "expected a non-empty array");
      std::vector<PriceVector> prices;
      for (std::size_t i = 0; i < st.size(); ++i) {
        prices.push_back(price_from_json(st[i], n, ptr + "/states/" + std::to_string(i)));
      }
      const auto& tr = require(j, "transition", ptr);
      if (!tr.is_array() || tr.size() != prices.size()) {
        throw ConfigError(ptr + "/transition", "expected one row per state");
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        rows.push_back(probs_from_json(tr[i], ptr + "/transition/" + std::to_string(i)));
      }
      MarkovPriceModel model(std::move(prices), std::move(rows));
      model.check_against(market);
      if (j.contains("initial_state")) {
        auto v = get_int(j["initial_state"], ptr + "/initial_state", 0);
        if (static_cast<std::size_t>(v) >= model.num_states()) {
          throw ConfigError(ptr + "/initial_state", "unknown state");
        }
        s.initial_state = static_cast<std::size_t>(v);
      }
      s.source = std::move(model);
    } else if (s.kind == "trace") {
      std::filesystem::path p = get_string(require(j, "path", ptr), ptr + "/path");
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      s.trace_path = p.lexically_normal().string();
      if (j.contains("cap_policy")) {
        auto pol = get_string(j["cap_policy"], ptr + "/cap_policy");
        if (pol == "reject") {
          s.cap_policy = CapPolicy::kReject;
        } else if (pol == "auto_expand") {
          s.cap_policy = CapPolicy::kAutoExpand;
        } else {
          throw ConfigError(ptr + "/cap_policy", "expected reject or auto_expand");
        }
      }
      auto loaded = load_trace_file(s.trace_path, market, s.cap_policy);
      for (std::size_t i = 0; i < n; ++i) market.stocks[i].p_max = loaded.caps[i];
      s.source = std::move(loaded.trace);
    } else {
      throw ConfigError(ptr + "/kind", "expected iid, markov or trace");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ParseError& e) {
    throw ConfigError(ptr + "/path", e.what());
  } catch (const Error& e) {
    throw ConfigError(ptr, e.what());
  }
  return s;
}

TraderParams trader_from_json(const json& j, const MarketSpec& market) {
  const std::string ptr = "/trader";
  TraderParams p;
  p.V = rational_from_json(require(j, "V", ptr), ptr + "/V");
  if (p.V <= Rational(0)) throw ConfigError(ptr + "/V", "V must be positive");
  const std::size_t n = market.size();
  if (j.contains("theta")) {
    const auto& t = j["theta"];
    if (!t.is_array() || t.size() != n) throw ConfigError(ptr + "/theta", "expected one value per stock");
    for (std::size_t i = 0; i < n; ++i) p.theta.push_back(rational_from_json(t[i], ptr + "/theta/" + std::to_string(i)));
  }
  if (j.contains("initial_queue")) {
    const auto& q = j["initial_queue"];
    if (!q.is_array() || q.size() != n) throw ConfigError(ptr + "/initial_queue", "expected one value per stock");
    for (std::size_t i = 0; i < n; ++i) {
      p.initial_queue.push_back(get_int(q[i], ptr + "/initial_queue/" + std::to_string(i), 0));
    }
  }
  if (j.contains("placeholder")) p.placeholder = get_bool(j["placeholder"], ptr + "/placeholder");
  if (j.contains("buy_solver")) {
    try {
      p.buy_solver = buy_solver_from_name(get_string(j["buy_solver"], ptr + "/buy_solver"));
    } catch (const StructuralError& e) {
      throw ConfigError(ptr + "/buy_solver", e.what());
    }
  }
  if (p.buy_solver == BuySolver::kShareBudget && !std::holds_alternative<ShareBudget>(market.budget)) {
    throw ConfigError(ptr + "/buy_solver", "share_budget solver needs budget mode 'shares'");
  }
  try {
    resolve_params(market, p);
  } catch (const StructuralError& e) {
    throw ConfigError(ptr, e.what());
  }
  return p;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "queue_band",   "queue_dynamics", "real_holdings",   "slot_optimality", "one_slot_drift",
      "tslot_drift",  "frame_lookahead", "iid_profit",     "markov_profit"};
  return names;
}

bool is_statistical_check(const std::string& name) { return name == "iid_profit" || name == "markov_profit"; }

ExperimentConfig parse_config(const json& j, const std::string& base_dir, std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) throw ConfigError("/", "expected a JSON object");
  ExperimentConfig c;
  try {
    c.market = market_from_json(j, "");
    c.market.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("/stocks", e.what());
  }
  c.source = source_from_json(require(j, "source", ""), c.market, base_dir);
  c.trader = trader_from_json(require(j, "trader", ""), c.market);
  c.horizon = get_int(require(j, "horizon", ""), "/horizon", 1);
  if (j.contains("replications")) c.replications = get_int(j["replications"], "/replications", 1);
  if (seed_override) {
    c.seed = *seed_override;
  } else {
    const auto& s = require(j, "seed", "");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) throw ConfigError("/seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    if (!v.is_array()) throw ConfigError("/verify", "expected an array of check names");
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto name = get_string(v[i], "/verify/" + std::to_string(i));
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError("/verify/" + std::to_string(i), "unknown check '" + name + "'");
      }
      c.verify.push_back(name);
    }
  } else {
    c.verify = {"queue_band", "queue_dynamics"};
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("dir")) c.output.dir = get_string(o["dir"], "/output/dir");
    if (o.contains("trajectories")) c.output.trajectories = get_bool(o["trajectories"], "/output/trajectories");
  }
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (o.contains("mode")) {
      c.oracle.mode = get_string(o["mode"], "/oracle/mode");
      if (c.oracle.mode != "phi_opt" && c.oracle.mode != "lookahead") {
        throw ConfigError("/oracle/mode", "expected phi_opt or lookahead");
      }
    }
    if (o.contains("T")) c.oracle.T = get_int(o["T"], "/oracle/T", 1);
    if (o.contains("M")) c.oracle.M = get_int(o["M"], "/oracle/M", 0);
  }
  if (j.contains("scaled")) {
    const auto& s = j["scaled"];
    if (s.contains("beta")) {
      c.scaled.beta = get_double(s["beta"], "/scaled/beta");
      if (c.scaled.beta < 0) throw ConfigError("/scaled/beta", "must be non-negative");
    }
    if (s.contains("T")) c.scaled.T = get_int(s["T"], "/scaled/T", 1);
    if (s.contains("M")) c.scaled.M = get_int(s["M"], "/scaled/M", 1);
    if (s.contains("windows")) c.scaled.windows = get_int(s["windows"], "/scaled/windows", 1);
  }
  if (j.contains("memory")) {
    const auto& m = j["memory"];
    if (m.contains("epsilon")) {
      c.memory.epsilon = get_double(m["epsilon"], "/memory/epsilon");
      if (c.memory.epsilon < 0) throw ConfigError("/memory/epsilon", "must be non-negative");
    }
    if (m.contains("T")) c.memory.T = get_int(m["T"], "/memory/T", 1);
    if (m.contains("estimate")) c.memory.estimate = get_bool(m["estimate"], "/memory/estimate");
    if (m.contains("paths")) c.memory.paths = get_int(m["paths"], "/memory/paths", 2);
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("invalid JSON: ") + e.what());
  }
  auto base = std::filesystem::path(path).parent_path().string();
  return parse_config(j, base.empty() ? "." : base, seed_override);
}

json source_to_json(const SourceConfig& s) {
  json j;
  j["kind"] = s.kind;
  if (const auto* d = std::get_if<PriceDistribution>(&s.source)) {
    json sup = json::array();
    for (const auto& p : d->support()) sup.push_back(price_to_json(p));
    j["support"] = sup;
    j["probs"] = d->probs();
  } else if (const auto* m = std::get_if<MarkovPriceModel>(&s.source)) {
    json st = json::array();
    for (const auto& p : m->state_prices()) st.push_back(price_to_json(p));
    j["states"] = st;
    j["transition"] = m->transition();
    if (s.initial_state) j["initial_state"] = *s.initial_state;
  } else {
    j["path"] = s.trace_path;
    j["cap_policy"] = s.cap_policy == CapPolicy::kReject ? "reject" : "auto_expand";
  }
  return j;
}

json trader_to_json(const TraderParams& p) {
  json j;
  j["V"] = p.V.to_string();
  if (!p.theta.empty()) {
    json t = json::array();
    for (const auto& x : p.theta) t.push_back(x.to_string());
    j["theta"] = t;
  }
  if (!p.initial_queue.empty()) j["initial_queue"] = p.initial_queue;
  j["placeholder"] = p.placeholder;
  j["buy_solver"] = buy_solver_name(p.buy_solver);
  return j;
}

json config_to_json(const ExperimentConfig& c) {
  json j = market_to_json(c.market);
  j["trader"] = trader_to_json(c.trader);
  j["source"] = source_to_json(c.source);
  j["horizon"] = c.horizon;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["verify"] = c.verify;
  j["output"] = {{"dir", c.output.dir}, {"trajectories", c.output.trajectories}};
  j["oracle"] = {{"mode", c.oracle.mode}, {"T", c.oracle.T}, {"M", c.oracle.M}};
  j["scaled"] = {{"beta", c.scaled.beta}, {"T", c.scaled.T}, {"M", c.scaled.M}, {"windows", c.scaled.windows}};
  j["memory"] = {{"epsilon", c.memory.epsilon}, {"T", c.memory.T}, {"estimate", c.memory.estimate},
                 {"paths", c.memory.paths}};
  return j;
}

}  // namespace lyaptrade
