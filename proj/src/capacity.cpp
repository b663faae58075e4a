#include "lyaptrade/capacity.hpp"

#include <cstdlib>
#include <string>

namespace lyaptrade {

std::int64_t capacity_limit(std::int64_t fallback) {
  const char* env = std::getenv("LYAPTRADE_CAPACITY_CELLS");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    std::size_t used = 0;
    long long v = std::stoll(env, &used);
    if (used == std::string(env).size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  return fallback;
}

}  // namespace lyaptrade
