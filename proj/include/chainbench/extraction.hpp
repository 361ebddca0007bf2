#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainbench/number.hpp"
#include "chainbench/numscan.hpp"

namespace chainbench {

namespace extraction_detail {

inline bool ci_equal(char a, char b) {
  return std::tolower(static_cast<unsigned char>(a)) ==
         std::tolower(static_cast<unsigned char>(b));
}

inline bool ci_match_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!ci_equal(text[pos + i], word[i])) return false;
  }
  return true;
}

// Parses the number following a marker: skips decoration ("**", spaces),
// requires a colon, then reads the first number token on the same line.
inline std::optional<Number> number_after_marker(std::string_view text, std::size_t pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '*' || text[pos] == '_'))
    ++pos;
  if (pos >= text.size() || text[pos] != ':') return std::nullopt;
  ++pos;
  std::size_t line_end = pos;
  while (line_end < text.size() && text[line_end] != '\n') ++line_end;
  auto token = find_number_token(text.substr(0, line_end), pos);
  if (!token) return std::nullopt;
  return token->value;
}

}  // namespace extraction_detail

// Pulls the per-step answers out of a model response. The primary pass reads
// "ANSWER <k>: <number>" and "FINAL ANSWER: <number>" markers (case-
// insensitive, later occurrences win, the final marker owns the last slot).
// Only when no marker parses at all does the fallback take the last number in
// the response as the final answer, leaving intermediates missing. Absent
// values are nullopt, never zero.
inline std::vector<std::optional<Number>> extract_answers(std::string_view response,
                                                          std::size_t expected_count) {
  using namespace extraction_detail;
  if (expected_count < 1) {
    throw std::invalid_argument("extract_answers: expected_count must be >= 1");
  }
  std::vector<std::optional<Number>> slots(expected_count);
  bool any_marker = false;
  std::optional<Number> final_marker_value;

  static constexpr std::string_view kAnswer = "answer";
  static constexpr std::string_view kFinal = "final";

  for (std::size_t i = 0; i + kAnswer.size() <= response.size(); ++i) {
    if (!ci_match_at(response, i, kAnswer)) continue;
    // Word boundary on the left; also detect a preceding "final".
    bool preceded_by_final = false;
    if (i > 0) {
      std::size_t j = i;
      while (j > 0 && (response[j - 1] == ' ' || response[j - 1] == '*' ||
                       response[j - 1] == '_'))
        --j;
      if (j >= kFinal.size() && ci_match_at(response, j - kFinal.size(), kFinal)) {
        const std::size_t f = j - kFinal.size();
        if (f == 0 || !std::isalnum(static_cast<unsigned char>(response[f - 1]))) {
          preceded_by_final = true;
        }
      }
      if (!preceded_by_final &&
          std::isalnum(static_cast<unsigned char>(response[i - 1]))) {
        continue;  // inside another word
      }
    }

    std::size_t pos = i + kAnswer.size();
    if (preceded_by_final) {
      if (auto value = number_after_marker(response, pos)) {
        final_marker_value = value;
        any_marker = true;
      }
      continue;
    }

    // "ANSWER <k>:" needs an index.
    std::size_t p = pos;
    while (p < response.size() && (response[p] == ' ' || response[p] == '*')) ++p;
    std::size_t k = 0;
    bool any_digit = false;
    while (p < response.size() && response[p] >= '0' && response[p] <= '9') {
      k = k * 10 + static_cast<std::size_t>(response[p] - '0');
      any_digit = true;
      ++p;
      if (k > expected_count + 1000) break;  // runaway index, not a marker
    }
    if (!any_digit) continue;
    if (auto value = number_after_marker(response, p)) {
      if (k >= 1 && k <= expected_count) {
        slots[k - 1] = value;
        any_marker = true;
      }
    }
  }

  if (final_marker_value) slots[expected_count - 1] = final_marker_value;

  if (!any_marker) {
    if (auto last = last_number_in(response)) {
      slots[expected_count - 1] = last;
    }
  }
  return slots;
}

}  // namespace chainbench
