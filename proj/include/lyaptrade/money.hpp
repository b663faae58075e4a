#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lyaptrade {

/// Amounts of money in integer minor units (cents).
using Money = std::int64_t;

inline constexpr Money kCentsPerDollar = 100;

/// Parses "12", "12.5", "-0.07" into cents. Rejects more than two fraction
/// digits and anything that is not a plain decimal.
Money parse_money(std::string_view text);

/// Converts a floating dollar amount to cents, rejecting sub-cent values.
Money money_from_double(double dollars);

/// Canonical "d.cc" rendering ("-1.50", "0.07", "12.00").
std::string format_money(Money cents);

inline double to_dollars(Money cents) {
  return static_cast<double>(cents) / static_cast<double>(kCentsPerDollar);
}

}  // namespace lyaptrade
