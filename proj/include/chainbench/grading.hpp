#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbench/chaining.hpp"
#include "chainbench/corpus.hpp"
#include "chainbench/number.hpp"

namespace chainbench {

enum class GradeFlag { WrongPathSuspected, FalseNegativeSuspected, LoopSuspected };

inline std::string_view to_string(GradeFlag f) {
  switch (f) {
    case GradeFlag::WrongPathSuspected: return "wrong_path_suspected";
    case GradeFlag::FalseNegativeSuspected: return "false_negative_suspected";
    case GradeFlag::LoopSuspected: return "loop_suspected";
  }
  return "";
}

inline GradeFlag parse_grade_flag(std::string_view s) {
  if (s == "wrong_path_suspected") return GradeFlag::WrongPathSuspected;
  if (s == "false_negative_suspected") return GradeFlag::FalseNegativeSuspected;
  if (s == "loop_suspected") return GradeFlag::LoopSuspected;
  throw std::invalid_argument("unknown grade flag '" + std::string(s) + "'");
}

struct GradeRecord {
  std::string benchmark_id;
  std::vector<std::optional<Number>> extracted;  // solve order, size = chain length
  bool final_correct = false;
  std::vector<bool> intermediate_matches;  // positional against solutions
  std::set<GradeFlag> flags;
};

// Correctness is exact numeric equality, no epsilon. WrongPathSuspected fires
// when any extracted value equals the alternate answer of the problem at that
// solve position; that is the signature of taking the untruthful branch.
// `truncated` carries the transcript's loop-guard verdict into the flags.
inline GradeRecord grade(const ChainedProblem& chained, const Corpus& corpus,
                         const std::vector<std::optional<Number>>& extracted,
                         bool truncated = false) {
  const std::size_t l = chained.solutions.size();
  if (extracted.size() != l) {
    throw std::invalid_argument("grade: extracted " + std::to_string(extracted.size()) +
                                " values for a chain of length " + std::to_string(l));
  }
  const auto problems = resolve_problems(corpus, chained.spec.problem_ids);

  GradeRecord record;
  record.extracted = extracted;
  record.final_correct =
      extracted[l - 1].has_value() && *extracted[l - 1] == chained.final_answer;
  record.intermediate_matches.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    record.intermediate_matches[i] =
        extracted[i].has_value() && *extracted[i] == chained.solutions[i];
  }

  const bool forward = chained.spec.technique == Technique::Forward;
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t chain_idx = forward ? i : l - 1 - i;  // solve pos -> chain pos
    if (extracted[i].has_value() && *extracted[i] == problems[chain_idx]->alt_answer) {
      record.flags.insert(GradeFlag::WrongPathSuspected);
      break;
    }
  }
  if (!extracted[l - 1].has_value()) {
    record.flags.insert(GradeFlag::FalseNegativeSuspected);
  }
  if (truncated) {
    record.flags.insert(GradeFlag::LoopSuspected);
  }
  return record;
}

inline bool graded_correct(const GradeRecord& record, bool strict) {
  if (!record.final_correct) return false;
  if (!strict) return true;
  for (bool m : record.intermediate_matches) {
    if (!m) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Aggregation

// A grade with the grouping keys it aggregates under; what the grade store
// persists per line.
struct GradeRow {
  Technique technique = Technique::Forward;
  unsigned length = 1;
  GradeRecord record;
};

struct AccuracyCell {
  std::size_t n = 0;
  double raw = 0.0;
  std::optional<double> normalized;  // absent when no length-1 baseline exists
};

struct AccuracyTable {
  std::map<std::pair<Technique, unsigned>, AccuracyCell> cells;
};

// Raw accuracy per (technique, length); normalized accuracy divides by the
// run's length-1 raw accuracy (length-1 items are plain unchained problems,
// so there is a single baseline cell). Normalized values are absent when the
// baseline is missing or zero.
inline AccuracyTable aggregate(const std::vector<GradeRow>& rows, bool strict = false) {
  AccuracyTable table;
  std::map<std::pair<Technique, unsigned>, std::size_t> correct;
  for (const auto& row : rows) {
    auto key = std::make_pair(row.technique, row.length);
    auto& cell = table.cells[key];
    ++cell.n;
    if (graded_correct(row.record, strict)) ++correct[key];
  }
  std::optional<double> baseline;
  for (auto& [key, cell] : table.cells) {
    cell.raw = static_cast<double>(correct[key]) / static_cast<double>(cell.n);
    if (key.second == 1) baseline = cell.raw;
  }
  if (baseline && *baseline > 0.0) {
    for (auto& [key, cell] : table.cells) {
      cell.normalized = cell.raw / *baseline;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Error annotation

enum class ErrorCategory { SemanticMisunderstanding, WrongPath, FalseNegative, Other };

inline std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::SemanticMisunderstanding: return "semantic_misunderstanding";
    case ErrorCategory::WrongPath: return "wrong_path";
    case ErrorCategory::FalseNegative: return "false_negative";
    case ErrorCategory::Other: return "other";
  }
  return "";
}

inline ErrorCategory parse_error_category(std::string_view s) {
  if (s == "semantic_misunderstanding") return ErrorCategory::SemanticMisunderstanding;
  if (s == "wrong_path") return ErrorCategory::WrongPath;
  if (s == "false_negative") return ErrorCategory::FalseNegative;
  if (s == "other") return ErrorCategory::Other;
  throw std::invalid_argument("unknown error category '" + std::string(s) + "'");
}

struct AnnotationLabel {
  std::string benchmark_id;
  ErrorCategory category = ErrorCategory::Other;
};

struct AnnotatedRecord {
  std::string benchmark_id;
  Technique technique = Technique::Forward;
  ErrorCategory category = ErrorCategory::Other;
  std::set<GradeFlag> machine_flags;
  bool machine_agrees = false;
};

struct AnnotationSummary {
  std::vector<AnnotatedRecord> records;
  std::map<Technique, std::map<ErrorCategory, std::size_t>> counts;
  std::map<ErrorCategory, std::size_t> agreements;  // wrong_path / false_negative only
  std::size_t total = 0;
};

// Joins human labels onto graded records. Machine agreement is only defined
// for the two categories grading can suspect on its own.
inline AnnotationSummary annotate(const std::vector<GradeRow>& rows,
                                  const std::vector<AnnotationLabel>& labels) {
  std::map<std::string, const GradeRow*> by_id;
  for (const auto& row : rows) by_id[row.record.benchmark_id] = &row;

  AnnotationSummary summary;
  for (const auto& label : labels) {
    auto it = by_id.find(label.benchmark_id);
    if (it == by_id.end()) {
      throw std::runtime_error("annotate: unknown benchmark id '" +
                               label.benchmark_id + "'");
    }
    const GradeRow& row = *it->second;
    AnnotatedRecord record;
    record.benchmark_id = label.benchmark_id;
    record.technique = row.technique;
    record.category = label.category;
    record.machine_flags = row.record.flags;
    if (label.category == ErrorCategory::WrongPath &&
        row.record.flags.count(GradeFlag::WrongPathSuspected)) {
      record.machine_agrees = true;
    }
    if (label.category == ErrorCategory::FalseNegative &&
        row.record.flags.count(GradeFlag::FalseNegativeSuspected)) {
      record.machine_agrees = true;
    }
    ++summary.counts[row.technique][label.category];
    if (record.machine_agrees) ++summary.agreements[label.category];
    ++summary.total;
    summary.records.push_back(std::move(record));
  }
  return summary;
}

}  // namespace chainbench
