#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyaptrade/dynamic_trader.hpp"
#include "lyaptrade/price_processes.hpp"

namespace lyaptrade {

struct SourceConfig {
  std::string kind;  // iid | markov | trace
  PriceSource source;
  std::string trace_path;
  CapPolicy cap_policy = CapPolicy::kReject;
  std::optional<std::size_t> initial_state;
};

struct OracleConfig {
  std::string mode = "phi_opt";  // phi_opt | lookahead
  std::int64_t T = 1;
  /// Frames for lookahead; 0 means as many as the horizon allows.
  std::int64_t M = 0;
};

struct ScaledConfig {
  double beta = 0.0;
  std::int64_t T = 1;
  std::int64_t M = 1;
  std::int64_t windows = 1;
};

struct MemoryConfig {
  /// Decaying-memory pair; when `estimate` is set, epsilon is measured by
  /// Monte Carlo for the given T instead of taken from the file.
  double epsilon = 0.0;
  std::int64_t T = 1;
  bool estimate = false;
  std::int64_t paths = 2000;
};

struct OutputConfig {
  std::string dir = "out";
  bool trajectories = false;
};

struct ExperimentConfig {
  MarketSpec market;
  TraderParams trader;
  SourceConfig source;
  std::int64_t horizon = 1;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> verify;
  OutputConfig output;
  OracleConfig oracle;
  ScaledConfig scaled;
  MemoryConfig memory;
};

/// Check names accepted under "verify".
const std::vector<std::string>& known_checks();
bool is_statistical_check(const std::string& name);

/// Parses a config document. `seed_override` stands in for a missing seed.
/// Relative trace paths resolve against `base_dir`. Errors are ConfigError
/// with a JSON pointer to the offending field.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".",
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config_file(const std::string& path,
                                  std::optional<std::uint64_t> seed_override = std::nullopt);

/// Canonical echo; parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& c);

nlohmann::json source_to_json(const SourceConfig& s);
nlohmann::json trader_to_json(const TraderParams& p);

}  // namespace lyaptrade
