#pragma once

#include <istream>
#include <ostream>

#include "json.hpp"
#include "lyaptrade/dynamic_trader.hpp"

namespace lyaptrade {

/// CSV with header `slot,p_1..p_N,A_1..A_N,mu_1..mu_N,Q_1..Q_N,profit`, where
/// Q is the queue after the slot's decision.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Reads a trajectory written by write_trajectory_csv. The initial queue and
/// parameters come from `params` (resolved against `spec`); queue columns are
/// taken as written so that verifiers can catch edited files.
Trajectory read_trajectory_csv(std::istream& in, const MarketSpec& spec, const TraderParams& params);

/// Cumulative profit, min/max queue per stock (trader queue and real shares).
nlohmann::json trajectory_summary(const Trajectory& traj);

nlohmann::json window_stats_to_json(const WindowStats& w);

}  // namespace lyaptrade
