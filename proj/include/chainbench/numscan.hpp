#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "chainbench/number.hpp"

namespace chainbench {

struct NumberToken {
  Number value;
  std::size_t begin = 0;  // index of the first character of the token
  std::size_t end = 0;    // one past the last character
};

namespace numscan_detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Currency prefixes tolerated directly before the digits: $ plus the UTF-8
// encodings of € and £.
inline std::size_t currency_prefix_len(std::string_view s, std::size_t i) {
  if (i < s.size() && s[i] == '$') return 1;
  if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
      static_cast<unsigned char>(s[i + 1]) == 0x82 &&
      static_cast<unsigned char>(s[i + 2]) == 0xAC)
    return 3;  // €
  if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC2 &&
      static_cast<unsigned char>(s[i + 1]) == 0xA3)
    return 2;  // £
  return 0;
}

}  // namespace numscan_detail

// Scans for the first number token at or after `from`. Tolerates a currency
// prefix, thousands separators in groups of three ("1,200.50"), a decimal
// part, a bare leading dot (".75"), and integer fractions ("3/4"). A leading
// '-' counts as a sign only at the start of a line or after whitespace, ':',
// '=', '(' or '['; anywhere else it reads as punctuation, so "16-3" yields
// 16 and 3, not -3.
inline std::optional<NumberToken> find_number_token(std::string_view text,
                                                    std::size_t from = 0) {
  using namespace numscan_detail;
  for (std::size_t i = from; i < text.size(); ++i) {
    const std::size_t start = i;
    std::size_t p = i;

    p += currency_prefix_len(text, p);

    bool negative = false;
    if (p < text.size() && text[p] == '-') {
      const char prev = start == 0 ? ' ' : text[start - 1];
      if (prev == ' ' || prev == '\t' || prev == '\n' || prev == '\r' ||
          prev == ':' || prev == '=' || prev == '(' || prev == '[') {
        negative = true;
        ++p;
      } else {
        continue;
      }
    }

    if (p >= text.size() || (!is_digit(text[p]) && text[p] != '.')) continue;
    // Reject digits glued to an identifier ("v2"): the character before the
    // token must not be alphanumeric.
    if (start > 0 && (std::isalnum(static_cast<unsigned char>(text[start - 1])) ||
                      text[start - 1] == '_'))
      continue;

    std::string digits;
    const bool leading_dot = text[p] == '.';
    if (!leading_dot) {
      while (p < text.size() && is_digit(text[p])) digits += text[p++];
      // ",ddd" groups; a fourth trailing digit means a list comma instead.
      while (p < text.size() && text[p] == ',') {
        if (p + 3 >= text.size()) break;
        if (!is_digit(text[p + 1]) || !is_digit(text[p + 2]) || !is_digit(text[p + 3]))
          break;
        if (p + 4 < text.size() && is_digit(text[p + 4])) break;
        digits.append(text.substr(p + 1, 3));
        p += 4;
      }
    }

    // Fraction: digits '/' digits, both plain integers.
    if (!leading_dot && !digits.empty() && p < text.size() && text[p] == '/' &&
        p + 1 < text.size() && is_digit(text[p + 1])) {
      std::size_t q = p + 1;
      std::string den_digits;
      while (q < text.size() && is_digit(text[q])) den_digits += text[q++];
      // "40/1.25" is not a fraction; fall through to the decimal reading.
      if (q >= text.size() || text[q] != '.') {
        auto value = Number::parse((negative ? "-" : "") + digits + "/" + den_digits);
        if (value) return NumberToken{*value, start, q};
      }
    }

    std::string frac;
    if (p < text.size() && text[p] == '.') {
      std::size_t q = p + 1;
      while (q < text.size() && is_digit(text[q])) frac += text[q++];
      if (!frac.empty()) p = q;
    }

    if (digits.empty() && frac.empty()) continue;
    std::string canonical = negative ? "-" : "";
    canonical += digits.empty() ? "0" : digits;
    if (!frac.empty()) canonical += "." + frac;
    auto value = Number::parse(canonical);
    if (!value) continue;
    return NumberToken{*value, start, p};
  }
  return std::nullopt;
}

inline std::optional<Number> first_number_in(std::string_view text) {
  auto tok = find_number_token(text);
  if (!tok) return std::nullopt;
  return tok->value;
}

inline std::optional<Number> last_number_in(std::string_view text) {
  std::optional<Number> result;
  std::size_t from = 0;
  while (auto tok = find_number_token(text, from)) {
    result = tok->value;
    from = tok->end;
  }
  return result;
}

}  // namespace chainbench
