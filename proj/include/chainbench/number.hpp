#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainbench {

// Exact rational value. Answers and graded model output are compared with
// exact equality after normalization, so binary floating point is never used
// to carry them. Covers plain integers, terminating decimals ("226.50") and
// simple fractions ("3/4"); equal values compare equal regardless of the
// spelling they were parsed from.
class Number {
 public:
  Number() = default;

  static Number from_int(std::int64_t v) { return Number(v, 1); }

  static Number from_ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("Number: zero denominator");
    return Number(num, den);
  }

  // Accepts [+|-] digits [. digits] | [+|-] . digits | [+|-] digits / digits.
  // No separators or symbols; callers strip those first (see extraction.hpp).
  static std::optional<Number> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
      negative = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) return std::nullopt;

    std::int64_t int_part = 0;
    bool any_int_digits = false;
    while (pos < text.size() && is_digit(text[pos])) {
      if (!accumulate_digit(int_part, text[pos])) return std::nullopt;
      any_int_digits = true;
      ++pos;
    }

    if (pos < text.size() && text[pos] == '/') {
      if (!any_int_digits) return std::nullopt;
      ++pos;
      std::int64_t den = 0;
      bool any_den_digits = false;
      while (pos < text.size() && is_digit(text[pos])) {
        if (!accumulate_digit(den, text[pos])) return std::nullopt;
        any_den_digits = true;
        ++pos;
      }
      if (!any_den_digits || den == 0 || pos != text.size()) return std::nullopt;
      return Number(negative ? -int_part : int_part, den);
    }

    std::int64_t num = int_part;
    std::int64_t den = 1;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      bool any_frac_digits = false;
      while (pos < text.size() && is_digit(text[pos])) {
        if (!accumulate_digit(num, text[pos])) return std::nullopt;
        if (den > kInt64Max / 10) return std::nullopt;
        den *= 10;
        any_frac_digits = true;
        ++pos;
      }
      if (!any_frac_digits && !any_int_digits) return std::nullopt;
    } else if (!any_int_digits) {
      return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
    return Number(negative ? -num : num, den);
  }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }

  // Canonical rendering: integer when possible, else the shortest exact
  // decimal, else "a/b". Re-parsing the result yields an equal Number.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    std::int64_t d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) {
      d /= 2;
      ++twos;
    }
    while (d % 5 == 0) {
      d /= 5;
      ++fives;
    }
    if (d != 1) {
      return std::to_string(num_) + "/" + std::to_string(den_);
    }
    int digits = twos > fives ? twos : fives;
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const std::int64_t scaled = num_ * (scale / den_);
    const bool neg = scaled < 0;
    std::string body = std::to_string(neg ? -scaled : scaled);
    if (static_cast<int>(body.size()) <= digits) {
      body.insert(body.begin(), digits + 1 - body.size(), '0');
    }
    body.insert(body.size() - digits, 1, '.');
    return (neg ? "-" : "") + body;
  }

  friend bool operator==(const Number& a, const Number& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Number& a, const Number& b) { return !(a == b); }

 private:
  static constexpr std::int64_t kInt64Max = INT64_MAX;

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  static bool accumulate_digit(std::int64_t& value, char c) {
    const std::int64_t digit = c - '0';
    if (value > (kInt64Max - digit) / 10) return false;
    value = value * 10 + digit;
    return true;
  }

  Number(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace chainbench
