#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lyaptrade {

/// Small exact fraction with a positive 64-bit denominator, always reduced.
/// Used for the control parameter V and the queue targets so that the
/// per-slot objectives can be evaluated in scaled integers.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Exact decimal parse: "50", "2.01", "-0.125", "7/3".
  static Rational parse(std::string_view text);
  /// Exact when x has at most 9 decimal digits, otherwise throws.
  static Rational from_double(double x);
  /// Nearest fraction with denominator `den` (round half away from zero).
  static Rational approximate(double x, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  /// Returns num * k / den; throws unless that is an integer.
  std::int64_t scaled_exact(std::int64_t k) const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

}  // namespace lyaptrade
