#include "lyaptrade/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "lyaptrade/error.hpp"

namespace lyaptrade {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw Error("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(narrow(num), narrow(den));
}

std::int64_t parse_int(std::string_view s, std::string_view whole_text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("invalid rational '" + std::string(whole_text) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), text),
                    parse_int(text.substr(slash + 1), text));
  }
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  std::int64_t den = 1;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    const std::size_t frac = s.size() - dot - 1;
    if (frac > 15) throw Error("too many decimals in '" + std::string(text) + "'");
    for (std::size_t i = 0; i < frac; ++i) den *= 10;
  } else {
    digits = std::string(s);
  }
  if (digits.empty()) throw Error("invalid rational '" + std::string(text) + "'");
  for (char c : digits) {
    if (c < '0' || c > '9') throw Error("invalid rational '" + std::string(text) + "'");
  }
  std::int64_t num = parse_int(digits, text);
  return Rational(negative ? -num : num, den);
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw Error("non-finite rational");
  std::int64_t den = 1;
  for (int k = 0; k <= 9; ++k, den *= 10) {
    const double scaled = x * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (std::fabs(rounded) > 9e17) break;
    if (std::fabs(scaled - rounded) <= 1e-9 * std::max(1.0, std::fabs(scaled))) {
      return Rational(static_cast<std::int64_t>(rounded), den);
    }
  }
  throw Error("value " + std::to_string(x) + " has no short decimal form");
}

Rational Rational::approximate(double x, std::int64_t den) {
  if (!std::isfinite(x) || den <= 0) throw Error("bad rational approximation");
  const double scaled = std::round(x * static_cast<double>(den));
  if (std::fabs(scaled) > 9e17) throw Error("rational overflow");
  return Rational(static_cast<std::int64_t>(scaled), den);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::int64_t Rational::scaled_exact(std::int64_t k) const {
  const i128 p = static_cast<i128>(num_) * k;
  if (p % den_ != 0) throw Error("rational " + to_string() + " is not a multiple of 1/" + std::to_string(k));
  return narrow(p / den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
              static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return make(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
              static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const i128 l = static_cast<i128>(a.num_) * b.den_;
  const i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const std::int64_t g = std::gcd(a, b);
  return narrow(static_cast<i128>(a / g) * b);
}

}  // namespace lyaptrade
