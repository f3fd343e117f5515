#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "rcm/error.hpp"

namespace rcm {

/// Exact ratios for participation ratios, indices, p-values and thresholds.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "0.05", "1/20", "3" or "1e-2" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    fail(ErrorKind::parameter, "not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) bad();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t num = 0, den = 0;
    auto lhs = text.substr(0, slash), rhs = text.substr(slash + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), num);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() ||
        r2.ec != std::errc{} || r2.ptr != rhs.data() + rhs.size() || den == 0) {
      bad();
    }
    return Rational(num, den);
  }

  std::int64_t exponent = 0;
  auto mantissa = text;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto r = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (r.ec != std::errc{} || r.ptr != exp_text.data() + exp_text.size()) bad();
    mantissa = text.substr(0, e);
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_dot) bad();
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') bad();
    seen_digit = true;
    if (num > (INT64_MAX - 9) / 10) bad();
    num = num * 10 + (c - '0');
    if (seen_dot) {
      if (den > INT64_MAX / 10) bad();
      den *= 10;
    }
  }
  if (!seen_digit) bad();
  for (; exponent > 0; --exponent) {
    if (num > INT64_MAX / 10) bad();
    num *= 10;
  }
  for (; exponent < 0; ++exponent) {
    if (den > INT64_MAX / 10) bad();
    den *= 10;
  }
  return Rational(negative ? -num : num, den);
}

/// Nearest rational with denominator 10^9; used only for values that arrive
/// as doubles (config structs built in code).
inline Rational rational_from_double(double value) {
  if (!std::isfinite(value)) fail(ErrorKind::parameter, "non-finite value");
  constexpr std::int64_t scale = 1'000'000'000;
  return Rational(static_cast<std::int64_t>(std::llround(value * scale)), scale);
}

/// Smallest integer >= r.
inline std::int64_t ceil(const Rational& r) {
  auto q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

}  // namespace rcm
