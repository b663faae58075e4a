#include "lyaptrade/money.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Money parse_money(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view whole = s;
  std::string_view frac;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    whole = s.substr(0, dot);
    frac = s.substr(dot + 1);
    if (!all_digits(frac)) {
      throw Error("invalid money value '" + std::string(text) + "'");
    }
    if (frac.size() > 2) {
      throw Error("sub-cent money value '" + std::string(text) + "'");
    }
  }
  if (!all_digits(whole)) {
    throw Error("invalid money value '" + std::string(text) + "'");
  }
  Money dollars = 0;
  auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), dollars);
  if (ec != std::errc() || dollars > std::numeric_limits<Money>::max() / 200) {
    throw Error("money value out of range '" + std::string(text) + "'");
  }
  Money cents = 0;
  if (!frac.empty()) {
    cents = (frac[0] - '0') * 10;
    if (frac.size() == 2) cents += frac[1] - '0';
  }
  Money total = dollars * kCentsPerDollar + cents;
  return negative ? -total : total;
}

Money money_from_double(double dollars) {
  if (!std::isfinite(dollars)) throw Error("non-finite money value");
  const double scaled = dollars * static_cast<double>(kCentsPerDollar);
  const double rounded = std::round(scaled);
  if (std::fabs(scaled - rounded) > 1e-6 * std::max(1.0, std::fabs(scaled))) {
    throw Error("sub-cent money value " + std::to_string(dollars));
  }
  if (std::fabs(rounded) > 9e15) throw Error("money value out of range");
  return static_cast<Money>(rounded);
}

std::string format_money(Money cents) {
  const bool negative = cents < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(cents + 1)) + 1
                                     : static_cast<std::uint64_t>(cents);
  const std::uint64_t whole = mag / 100;
  const std::uint64_t frac = mag % 100;
  std::string out = negative ? "-" : "";
  out += std::to_string(whole);
  out += '.';
  out += static_cast<char>('0' + frac / 10);
  out += static_cast<char>('0' + frac % 10);
  return out;
}

}  // namespace lyaptrade
