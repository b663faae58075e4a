#include "lyaptrade/trajectory_io.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t parse_int(const std::string& s, std::size_t row, const char* what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(row, std::string("bad ") + what + " '" + s + "'");
  }
}

std::string header(std::size_t n) {
  std::string h = "slot";
  for (const char* col : {"p", "A", "mu", "Q"}) {
    for (std::size_t i = 1; i <= n; ++i) h += std::string(",") + col + "_" + std::to_string(i);
  }
  return h + ",profit";
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.spec.size();
  out << header(n) << '\n';
  for (const auto& r : traj.records) {
    out << r.slot;
    for (Money p : r.prices.prices) out << ',' << format_money(p);
    for (Shares a : r.decision.buys) out << ',' << a;
    for (Shares m : r.decision.sells) out << ',' << m;
    for (Shares q : r.queue_after) out << ',' << q;
    out << ',' << format_money(r.profit) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, const MarketSpec& spec, const TraderParams& params) {
  const std::size_t n = spec.size();
  Trajectory traj;
  traj.spec = spec;
  traj.params = resolve_params(spec, params);
  traj.initial_queue = traj.params.initial_queue;

  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header(n)) throw ParseError(0, "expected header '" + header(n) + "'");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto cells = split_csv(line);
    if (cells.size() != 4 * n + 2) throw ParseError(row, "wrong column count");
    SlotRecord r;
    r.slot = parse_int(cells[0], row, "slot");
    if (r.slot != static_cast<std::int64_t>(row - 1)) throw ParseError(row, "slots must count up from 0");
    r.prices.prices.resize(n);
    r.decision = TradeDecision::zero(n);
    r.queue_after.resize(n);
    try {
      for (std::size_t i = 0; i < n; ++i) r.prices.prices[i] = parse_money(cells[1 + i]);
      r.profit = parse_money(cells[4 * n + 1]);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(row, e.what());
    }
    for (std::size_t i = 0; i < n; ++i) {
      r.decision.buys[i] = parse_int(cells[1 + n + i], row, "buy count");
      r.decision.sells[i] = parse_int(cells[1 + 2 * n + i], row, "sell count");
      r.queue_after[i] = parse_int(cells[1 + 3 * n + i], row, "queue");
    }
    traj.records.push_back(std::move(r));
  }
  return traj;
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
  using nlohmann::json;
  const std::size_t n = traj.spec.size();
  std::vector<Shares> qmin = traj.initial_queue, qmax = traj.initial_queue;
  std::vector<Shares> rmin = traj.real_queue_at(0);
  for (const auto& r : traj.records) {
    for (std::size_t i = 0; i < n; ++i) {
      qmin[i] = std::min(qmin[i], r.queue_after[i]);
      qmax[i] = std::max(qmax[i], r.queue_after[i]);
    }
  }
  for (std::size_t t = 1; t <= traj.size(); ++t) {
    auto real = traj.real_queue_at(t);
    for (std::size_t i = 0; i < n; ++i) rmin[i] = std::min(rmin[i], real[i]);
  }
  json j;
  j["slots"] = traj.size();
  j["trading_profit"] = format_money(traj.trading_profit());
  j["startup_cost"] = format_money(traj.startup_cost);
  j["cumulative_profit"] = format_money(traj.cumulative_profit());
  j["time_average_profit"] =
      traj.size() == 0 ? 0.0 : to_dollars(traj.cumulative_profit()) / static_cast<double>(traj.size());
  j["queue_min"] = qmin;
  j["queue_max"] = qmax;
  j["final_queue"] = traj.queue_at(traj.size());
  if (!traj.params.placeholder_offset.empty()) j["real_shares_min"] = rmin;
  return j;
}

nlohmann::json window_stats_to_json(const WindowStats& w) {
  return {{"window", w.window},   {"scale", w.scale},       {"V", w.V.to_string()},
          {"mu_max", w.mu_max},   {"profit", format_money(w.profit)},
          {"q", w.q},             {"alpha", w.alpha},       {"real_shares_end", w.real_shares_end}};
}

}  // namespace lyaptrade
