#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lyaptrade/analysis.hpp"
#include "lyaptrade/dynamic_trader.hpp"
#include "lyaptrade/error.hpp"
#include "lyaptrade/harness.hpp"
#include "lyaptrade/oracles.hpp"

namespace py = pybind11;
using namespace lyaptrade;
using nlohmann::json;

namespace {

json to_json(const py::object& obj) {
  auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const json& j) {
  auto loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

PriceVector prices_from(const std::vector<double>& dollars) {
  PriceVector p;
  for (double d : dollars) p.prices.push_back(money_from_double(d));
  return p;
}

Rational rational_from(const py::object& v) {
  if (py::isinstance<py::str>(v)) return Rational::parse(v.cast<std::string>());
  if (py::isinstance<py::int_>(v)) return Rational(v.cast<std::int64_t>());
  return Rational::from_double(v.cast<double>());
}

TraderParams params_from(const py::dict& d) {
  TraderParams p;
  p.V = rational_from(d["V"]);
  if (d.contains("theta")) {
    for (auto t : d["theta"]) p.theta.push_back(rational_from(py::reinterpret_borrow<py::object>(t)));
  }
  if (d.contains("initial_queue")) p.initial_queue = d["initial_queue"].cast<std::vector<Shares>>();
  if (d.contains("placeholder")) p.placeholder = d["placeholder"].cast<bool>();
  if (d.contains("buy_solver")) p.buy_solver = buy_solver_from_name(d["buy_solver"].cast<std::string>());
  return p;
}

py::dict decision_dict(const TradeDecision& d) {
  py::dict out;
  out["buys"] = d.buys;
  out["sells"] = d.sells;
  return out;
}

}  // namespace

PYBIND11_MODULE(lyaptrade, m) {
  m.doc() = "Queue-based trading engine with exact profit oracles and bound checks";
  m.attr("__version__") = LYAPTRADE_VERSION;

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception<StatisticalPowerError>(m, "StatisticalPowerError", PyExc_ValueError);

  py::class_<MarketSpec>(m, "Market")
      .def_static("from_dict", [](const py::dict& d) {
        MarketSpec s = market_from_json(to_json(d));
        s.validate();
        return s;
      })
      .def("to_dict", [](const MarketSpec& s) { return from_json(market_to_json(s)); })
      .def("__len__", &MarketSpec::size);

  m.def("compute_theta", [](const MarketSpec& s, const py::object& V) {
    std::vector<std::string> out;
    for (const auto& t : compute_theta(s, rational_from(V))) out.push_back(t.to_string());
    return out;
  }, py::arg("market"), py::arg("V"), "Queue targets V p_max + 2 mu_max as exact fraction strings.");

  m.def("slot_profit", [](const MarketSpec& s, const std::vector<double>& prices, const std::vector<Shares>& buys,
                          const std::vector<Shares>& sells) {
    return to_dollars(slot_profit(s, prices_from(prices), TradeDecision{buys, sells}));
  }, py::arg("market"), py::arg("prices"), py::arg("buys"), py::arg("sells"));

  m.def("trader_step", [](const py::dict& params, const MarketSpec& s, const std::vector<Shares>& queue,
                          const std::vector<double>& prices) {
    PortfolioState st;
    st.queue = queue;
    auto r = trader_step(params_from(params), s, st, prices_from(prices));
    py::dict out = decision_dict(r.decision);
    out["profit"] = to_dollars(r.profit);
    out["queue"] = r.next.queue;
    return out;
  }, py::arg("params"), py::arg("market"), py::arg("queue"), py::arg("prices"));

  m.def("backtest", [](const py::dict& params, const MarketSpec& s, const std::vector<std::vector<double>>& support,
                       const std::vector<double>& probs, std::int64_t horizon, std::uint64_t seed) {
    std::vector<PriceVector> sup;
    for (const auto& p : support) sup.push_back(prices_from(p));
    PriceSource src = PriceDistribution(std::move(sup), probs);
    const TraderParams tp = params_from(params);
    Trajectory traj;
    {
      py::gil_scoped_release nogil;
      traj = run_backtest(s, tp, src, horizon, seed);
    }
    py::list queues, profits;
    for (std::size_t t = 0; t <= traj.size(); ++t) queues.append(py::cast(traj.queue_at(t)));
    for (const auto& r : traj.records) profits.append(to_dollars(r.profit));
    py::dict out;
    out["queues"] = queues;
    out["profits"] = profits;
    out["cumulative_profit"] = to_dollars(traj.cumulative_profit());
    out["queue_band"] = verify_queue_band(traj).ok();
    return out;
  }, py::arg("params"), py::arg("market"), py::arg("support"), py::arg("probs"), py::arg("horizon"),
     py::arg("seed"), "i.i.d. backtest; returns queues, slot profits and the queue-band verdict.");

  m.def("phi_opt", [](const MarketSpec& s, const std::vector<std::vector<double>>& support,
                      const std::vector<double>& probs) {
    std::vector<PriceVector> sup;
    for (const auto& p : support) sup.push_back(prices_from(p));
    auto sol = solve_phi_opt(s, PriceDistribution(std::move(sup), probs));
    auto flat = drift_rebalance(sol);
    py::dict out;
    out["phi_opt"] = sol.phi_opt;
    out["exact"] = sol.phi_opt_exact;
    out["drifts"] = sol.drifts;
    out["rebalanced_drifts"] = flat.drifts;
    out["rebalanced_phi"] = flat.phi;
    return out;
  }, py::arg("market"), py::arg("support"), py::arg("probs"));

  m.def("lookahead_psi", [](const MarketSpec& s, const std::vector<std::vector<double>>& window) {
    std::vector<PriceVector> w;
    for (const auto& p : window) w.push_back(prices_from(p));
    auto r = lookahead_psi(s, w);
    py::list decisions;
    for (const auto& d : r.decisions) decisions.append(decision_dict(d));
    py::dict out;
    out["psi"] = to_dollars(r.psi);
    out["decisions"] = decisions;
    return out;
  }, py::arg("market"), py::arg("window"));

  m.def("compute_constants", [](const MarketSpec& s, std::int64_t T, double eps) {
    auto c = compute_constants(s, T, eps);
    py::dict out;
    out["B"] = c.B;
    out["B_tilde"] = c.B_tilde;
    out["D"] = c.D;
    out["C1"] = c.C1;
    out["C2"] = c.C2;
    return out;
  }, py::arg("market"), py::arg("T"), py::arg("epsilon") = 0.0);

  m.def("run", [](const py::dict& config, int jobs) {
    ExperimentConfig cfg = parse_config(to_json(config));
    CommandResult res;
    {
      py::gil_scoped_release nogil;
      res = cmd_run(cfg, jobs, "");
    }
    return from_json(res.summary);
  }, py::arg("config"), py::arg("jobs") = 1, "Runs the `run` command on a config dict; returns the summary.");
}
