#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainbench/chaining.hpp"
#include "chainbench/client.hpp"
#include "chainbench/corpus.hpp"
#include "chainbench/grading.hpp"
#include "chainbench/oracle.hpp"
#include "chainbench/rng.hpp"
#include "chainbench/version.hpp"

namespace chainbench {

struct SuiteHeader {
  std::string suite_name;
  std::string corpus_name;
  std::string corpus_version;
  std::uint64_t seed = 0;
  std::string tool_version = std::string(kToolVersion);
};

struct SuiteEntry {
  std::string id;
  ChainedProblem problem;
};

struct Suite {
  SuiteHeader header;
  std::vector<SuiteEntry> entries;
};

// ---------------------------------------------------------------------------
// Suite generation

struct SuiteConfig {
  std::vector<Technique> techniques = {Technique::Forward, Technique::Backward};
  std::vector<unsigned> lengths;
  unsigned chains_per_length = 1;
  std::uint64_t seed = 0;
  LinkTemplate link_template = LinkTemplate::Bracketed;
  std::string suite_name = "suite";
};

namespace suite_detail {

inline std::string zero_pad(unsigned value, int width) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "%0*u", width, value);
  return buffer;
}

inline std::string hex64(std::uint64_t v) {
  char buffer[19];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buffer;
}

}  // namespace suite_detail

// Deterministic: every chain draws from its own stream derived from
// (seed, technique, length, index), so the suite is identical however the
// cells are ordered or parallelized.
inline Suite generate_suite(const Corpus& corpus, const SuiteConfig& config) {
  if (config.chains_per_length < 1) {
    throw std::invalid_argument("generate: chains_per_length must be >= 1");
  }
  for (Technique t : config.techniques) {
    for (unsigned l : config.lengths) {
      if (l < 1 || (t == Technique::Backward && l < 2)) {
        throw std::invalid_argument("generate: length " + std::to_string(l) +
                                    " is invalid for technique " +
                                    std::string(to_string(t)));
      }
      if (l > corpus.problems.size()) {
        throw std::invalid_argument("generate: length " + std::to_string(l) +
                                    " exceeds corpus size " +
                                    std::to_string(corpus.problems.size()));
      }
    }
  }

  Suite suite;
  suite.header.suite_name = config.suite_name;
  suite.header.corpus_name = corpus.name;
  suite.header.corpus_version = corpus.version;
  suite.header.seed = config.seed;

  for (Technique technique : config.techniques) {
    const std::uint64_t technique_tag = technique == Technique::Forward ? 1 : 2;
    for (unsigned length : config.lengths) {
      for (unsigned index = 0; index < config.chains_per_length; ++index) {
        const std::uint64_t stream =
            derive_stream_seed(config.seed, technique_tag, length, index);
        Rng rng(stream);
        ChainSpec spec = sample_chain(corpus, length, technique, rng);
        spec.seed_fingerprint = "seed=" + std::to_string(config.seed) +
                                ";technique=" + std::string(to_string(technique)) +
                                ";length=" + std::to_string(length) +
                                ";index=" + std::to_string(index) +
                                ";stream=" + suite_detail::hex64(stream);
        SuiteEntry entry;
        entry.id = std::string(to_string(technique)) + "-l" + std::to_string(length) +
                   "-" + suite_detail::zero_pad(index, 4);
        entry.problem = build_chain(corpus, spec, config.link_template);
        suite.entries.push_back(std::move(entry));
      }
    }
  }
  return suite;
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace suite_detail {

inline ordered_json number_list(const std::vector<Number>& values) {
  ordered_json arr = ordered_json::array();
  for (const auto& v : values) arr.push_back(v.str());
  return arr;
}

inline Number parse_number_field(const ordered_json& j, const char* context) {
  auto value = Number::parse(j.get<std::string>());
  if (!value) {
    throw std::runtime_error(std::string("suite: invalid number in ") + context);
  }
  return *value;
}

inline std::vector<std::string> read_lines(const std::string& path,
                                           const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(std::string(what) + ": cannot open '" + path + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace suite_detail

// ---------------------------------------------------------------------------
// Suite files: JSON-Lines, one header line then one chained problem per line.

inline ordered_json suite_entry_to_json(const SuiteEntry& entry) {
  const ChainedProblem& p = entry.problem;
  ordered_json line;
  line["id"] = entry.id;
  line["technique"] = std::string(to_string(p.spec.technique));
  line["length"] = p.spec.problem_ids.size();
  line["problem_ids"] = p.spec.problem_ids;
  ordered_json choices = ordered_json::array();
  for (auto c : p.spec.choices) choices.push_back(std::string(to_string(c)));
  line["choices"] = std::move(choices);
  line["seed_fingerprint"] = p.spec.seed_fingerprint;
  line["text"] = p.text;
  line["solutions"] = suite_detail::number_list(p.solutions);
  line["final_answer"] = p.final_answer.str();
  ordered_json links = ordered_json::array();
  for (const auto& link : p.links) {
    links.push_back(ordered_json{{"condition_text", link.condition_text},
                                 {"condition_value", link.condition_value.str()},
                                 {"then_premise", link.then_premise},
                                 {"else_premise", link.else_premise},
                                 {"condition_truth", link.condition_truth}});
  }
  line["links"] = std::move(links);
  return line;
}

inline SuiteEntry suite_entry_from_json(const ordered_json& line) {
  SuiteEntry entry;
  entry.id = line.at("id").get<std::string>();
  ChainedProblem& p = entry.problem;
  p.spec.technique = parse_technique(line.at("technique").get<std::string>());
  p.spec.problem_ids = line.at("problem_ids").get<std::vector<std::string>>();
  for (const auto& c : line.at("choices")) {
    p.spec.choices.push_back(parse_branch_choice(c.get<std::string>()));
  }
  p.spec.seed_fingerprint = line.value("seed_fingerprint", std::string{});
  p.text = line.at("text").get<std::string>();
  for (const auto& s : line.at("solutions")) {
    p.solutions.push_back(suite_detail::parse_number_field(s, "solutions"));
  }
  p.final_answer = suite_detail::parse_number_field(line.at("final_answer"), "final_answer");
  for (const auto& l : line.at("links")) {
    LinkInfo link;
    link.condition_text = l.at("condition_text").get<std::string>();
    link.condition_value =
        suite_detail::parse_number_field(l.at("condition_value"), "condition_value");
    link.then_premise = l.at("then_premise").get<std::string>();
    link.else_premise = l.at("else_premise").get<std::string>();
    link.condition_truth = l.at("condition_truth").get<bool>();
    p.links.push_back(std::move(link));
  }
  return entry;
}

inline std::string write_suite_text(const Suite& suite) {
  ordered_json header;
  header["suite_name"] = suite.header.suite_name;
  header["corpus_name"] = suite.header.corpus_name;
  header["corpus_version"] = suite.header.corpus_version;
  header["seed"] = suite.header.seed;
  header["tool_version"] = suite.header.tool_version;
  std::string out = header.dump() + "\n";
  for (const auto& entry : suite.entries) {
    out += suite_entry_to_json(entry).dump() + "\n";
  }
  return out;
}

inline void write_suite(const Suite& suite, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("suite: cannot write '" + path + "'");
  out << write_suite_text(suite);
}

inline Suite read_suite(const std::string& path) {
  const auto lines = suite_detail::read_lines(path, "suite");
  if (lines.empty()) throw std::runtime_error("suite: '" + path + "' is empty");
  Suite suite;
  try {
    const ordered_json header = ordered_json::parse(lines[0]);
    suite.header.suite_name = header.value("suite_name", std::string{});
    suite.header.corpus_name = header.value("corpus_name", std::string{});
    suite.header.corpus_version = header.value("corpus_version", std::string{});
    suite.header.seed = header.value("seed", std::uint64_t{0});
    suite.header.tool_version = header.value("tool_version", std::string{});
    for (std::size_t i = 1; i < lines.size(); ++i) {
      suite.entries.push_back(suite_entry_from_json(ordered_json::parse(lines[i])));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("suite: malformed line in '" + path + "': " + e.what());
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Transcript store

inline ordered_json transcript_to_json(const TranscriptRecord& r) {
  ordered_json line;
  line["benchmark_id"] = r.benchmark_id;
  line["prompt"] = r.prompt;
  line["raw_response"] = r.raw_response;
  line["latency_seconds"] = r.latency_seconds;
  line["attempt_count"] = r.attempt_count;
  line["truncated"] = r.truncated;
  line["error"] = r.error;
  return line;
}

inline TranscriptRecord transcript_from_json(const ordered_json& line) {
  TranscriptRecord r;
  r.benchmark_id = line.at("benchmark_id").get<std::string>();
  r.prompt = line.value("prompt", std::string{});
  r.raw_response = line.value("raw_response", std::string{});
  r.latency_seconds = line.value("latency_seconds", 0.0);
  r.attempt_count = line.value("attempt_count", 0);
  r.truncated = line.value("truncated", false);
  r.error = line.value("error", std::string{});
  return r;
}

inline void write_transcripts(const std::vector<TranscriptRecord>& records,
                              const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("transcripts: cannot write '" + path + "'");
  for (const auto& r : records) out << transcript_to_json(r).dump() << "\n";
}

inline std::vector<TranscriptRecord> read_transcripts(const std::string& path) {
  std::vector<TranscriptRecord> records;
  for (const auto& line : suite_detail::read_lines(path, "transcripts")) {
    try {
      records.push_back(transcript_from_json(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("transcripts: malformed line in '" + path + "': " +
                               e.what());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Grade store

inline ordered_json grade_row_to_json(const GradeRow& row) {
  ordered_json line;
  line["benchmark_id"] = row.record.benchmark_id;
  line["technique"] = std::string(to_string(row.technique));
  line["length"] = row.length;
  ordered_json extracted = ordered_json::array();
  for (const auto& v : row.record.extracted) {
    if (v) extracted.push_back(v->str());
    else extracted.push_back(nullptr);
  }
  line["extracted"] = std::move(extracted);
  line["final_correct"] = row.record.final_correct;
  line["intermediate_matches"] = row.record.intermediate_matches;
  ordered_json flags = ordered_json::array();
  for (auto f : row.record.flags) flags.push_back(std::string(to_string(f)));
  line["flags"] = std::move(flags);
  return line;
}

inline GradeRow grade_row_from_json(const ordered_json& line) {
  GradeRow row;
  row.record.benchmark_id = line.at("benchmark_id").get<std::string>();
  row.technique = parse_technique(line.at("technique").get<std::string>());
  row.length = line.at("length").get<unsigned>();
  for (const auto& v : line.at("extracted")) {
    if (v.is_null()) row.record.extracted.push_back(std::nullopt);
    else row.record.extracted.push_back(suite_detail::parse_number_field(v, "extracted"));
  }
  row.record.final_correct = line.at("final_correct").get<bool>();
  row.record.intermediate_matches = line.at("intermediate_matches").get<std::vector<bool>>();
  for (const auto& f : line.at("flags")) {
    row.record.flags.insert(parse_grade_flag(f.get<std::string>()));
  }
  return row;
}

inline void write_grades(const std::vector<GradeRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("grades: cannot write '" + path + "'");
  for (const auto& row : rows) out << grade_row_to_json(row).dump() << "\n";
}

inline std::vector<GradeRow> read_grades(const std::string& path) {
  std::vector<GradeRow> rows;
  for (const auto& line : suite_detail::read_lines(path, "grades")) {
    try {
      rows.push_back(grade_row_from_json(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("grades: malformed line in '" + path + "': " + e.what());
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Annotation labels

inline std::vector<AnnotationLabel> read_labels(const std::string& path) {
  std::vector<AnnotationLabel> labels;
  for (const auto& line : suite_detail::read_lines(path, "labels")) {
    try {
      const ordered_json j = ordered_json::parse(line);
      labels.push_back({j.at("benchmark_id").get<std::string>(),
                        parse_error_category(j.at("category").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("labels: malformed line in '" + path + "': " + e.what());
    }
  }
  return labels;
}

inline ordered_json annotation_summary_to_json(const AnnotationSummary& summary) {
  ordered_json doc;
  doc["total"] = summary.total;
  ordered_json per_technique;
  for (Technique t : {Technique::Forward, Technique::Backward}) {
    ordered_json counts;
    std::size_t technique_total = 0;
    for (ErrorCategory c :
         {ErrorCategory::SemanticMisunderstanding, ErrorCategory::WrongPath,
          ErrorCategory::FalseNegative, ErrorCategory::Other}) {
      auto it_t = summary.counts.find(t);
      const std::size_t n =
          it_t == summary.counts.end()
              ? 0
              : (it_t->second.count(c) ? it_t->second.at(c) : 0);
      counts[std::string(to_string(c))] = n;
      technique_total += n;
    }
    counts["total"] = technique_total;
    per_technique[std::string(to_string(t))] = std::move(counts);
  }
  doc["per_technique"] = std::move(per_technique);
  ordered_json agreements;
  for (ErrorCategory c : {ErrorCategory::WrongPath, ErrorCategory::FalseNegative}) {
    agreements[std::string(to_string(c))] =
        summary.agreements.count(c) ? summary.agreements.at(c) : 0;
  }
  doc["machine_agreements"] = std::move(agreements);
  ordered_json records = ordered_json::array();
  for (const auto& r : summary.records) {
    ordered_json flags = ordered_json::array();
    for (auto f : r.machine_flags) flags.push_back(std::string(to_string(f)));
    records.push_back(ordered_json{{"benchmark_id", r.benchmark_id},
                                   {"technique", std::string(to_string(r.technique))},
                                   {"category", std::string(to_string(r.category))},
                                   {"machine_flags", std::move(flags)},
                                   {"machine_agrees", r.machine_agrees}});
  }
  doc["records"] = std::move(records);
  return doc;
}

// ---------------------------------------------------------------------------
// Oracle traces

inline ordered_json trace_to_json(const std::string& benchmark_id,
                                  const OracleTrace& trace) {
  ordered_json line;
  line["benchmark_id"] = benchmark_id;
  ordered_json problems = ordered_json::array();
  for (const auto& step : trace.problems) {
    problems.push_back(ordered_json{
        {"problem_id", step.problem_id},
        {"premise_used",
         step.premise_used == ProblemStep::Premise::True ? "true" : "alt"},
        {"computed_answer", step.computed_answer.str()}});
  }
  line["problems"] = std::move(problems);
  ordered_json links = ordered_json::array();
  for (const auto& step : trace.links) {
    links.push_back(ordered_json{
        {"condition_value_stated", step.condition_value_stated.str()},
        {"condition_value_computed", step.condition_value_computed.str()},
        {"truth_taken", step.truth_taken}});
  }
  line["links"] = std::move(links);
  line["final_answer"] = trace.final_answer.str();
  return line;
}

// ---------------------------------------------------------------------------
// Accuracy reports

namespace suite_detail {

inline std::string format_fixed(double value, int decimals) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

}  // namespace suite_detail

inline std::string accuracy_table_csv(const AccuracyTable& table) {
  std::string out = "technique,length,n,raw_accuracy,normalized_accuracy\n";
  for (const auto& [key, cell] : table.cells) {
    out += std::string(to_string(key.first)) + "," + std::to_string(key.second) + "," +
           std::to_string(cell.n) + "," + suite_detail::format_fixed(cell.raw, 6) + ",";
    if (cell.normalized) out += suite_detail::format_fixed(*cell.normalized, 6);
    out += "\n";
  }
  return out;
}

// Lengths across the columns, one row per technique, raw accuracy in the
// cells; the layout mirrors the usual accuracy-by-length presentation.
inline std::string accuracy_table_markdown(const AccuracyTable& table) {
  std::vector<unsigned> lengths;
  for (const auto& [key, cell] : table.cells) {
    if (lengths.empty() || lengths.back() != key.second) {
      bool seen = false;
      for (unsigned l : lengths) seen = seen || l == key.second;
      if (!seen) lengths.push_back(key.second);
    }
  }
  std::sort(lengths.begin(), lengths.end());

  std::string out = "| Technique |";
  for (unsigned l : lengths) out += " " + std::to_string(l) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < lengths.size(); ++i) out += "---|";
  out += "\n";
  for (Technique t : {Technique::Forward, Technique::Backward}) {
    bool has_any = false;
    for (const auto& [key, cell] : table.cells) has_any = has_any || key.first == t;
    if (!has_any) continue;
    std::string label(to_string(t));
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    out += "| " + label + " |";
    for (unsigned l : lengths) {
      auto it = table.cells.find({t, l});
      out += it == table.cells.end() ? " - |"
                                     : " " + suite_detail::format_fixed(it->second.raw, 3) + " |";
    }
    out += "\n";
  }
  return out;
}

inline void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace chainbench
