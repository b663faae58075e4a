#pragma once

#include <cstdint>

namespace lyaptrade {

inline constexpr std::int64_t kDefaultDpCells = 100'000'000;
inline constexpr std::int64_t kDefaultActionCap = 1'000'000;
inline constexpr std::int64_t kDefaultSearchNodes = 100'000'000;

/// Returns `fallback`, or the value of LYAPTRADE_CAPACITY_CELLS when set to a
/// positive integer. The variable overrides every cap in the library.
std::int64_t capacity_limit(std::int64_t fallback);

}  // namespace lyaptrade
