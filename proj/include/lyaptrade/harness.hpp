#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "lyaptrade/config.hpp"
#include "lyaptrade/oracles.hpp"

namespace lyaptrade {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDeterministic = 2;
inline constexpr int kExitStatistical = 3;
inline constexpr int kExitCapacity = 4;
inline constexpr int kExitConfig = 5;

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json summary;
};

struct RunHooks {
  /// Test hook: zero out stock 0's queue after this slot of replication 0
  /// before the checks run, so that a deterministic check must fail.
  std::optional<std::int64_t> corrupt_slot;
};

/// Files are written under `out_dir` unless it is empty.
CommandResult cmd_run(const ExperimentConfig& cfg, int jobs, const std::string& out_dir,
                      const RunHooks& hooks = {});
CommandResult cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir);
CommandResult cmd_verify(const ExperimentConfig& cfg, const std::string& trajectory_csv,
                         const std::string& out_dir);
CommandResult cmd_scaled(const ExperimentConfig& cfg, const std::string& out_dir);
/// Writes the configured source as a canonical trace CSV: a trace source is
/// validated and normalized, a random source is sampled for `horizon` slots.
CommandResult cmd_trace_convert(const ExperimentConfig& cfg, const std::string& out_dir);

/// Maps library exceptions to the exit-code contract (1 for anything else).
int exit_code_for(const std::exception& e);

/// phi_opt of the source's steady-state law (iid or Markov stationary).
PonlySolution source_phi_opt(const ExperimentConfig& cfg);

}  // namespace lyaptrade
