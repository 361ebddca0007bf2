#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainbench/chaining.hpp"
#include "chainbench/client.hpp"
#include "chainbench/combinatorics.hpp"
#include "chainbench/corpus.hpp"
#include "chainbench/extraction.hpp"
#include "chainbench/grading.hpp"
#include "chainbench/oracle.hpp"
#include "chainbench/prompts.hpp"
#include "chainbench/suite_io.hpp"
#include "chainbench/version.hpp"

namespace chainbench {

namespace cli_detail {

// "2-4,6" -> {2,3,4,6}
inline std::vector<unsigned> parse_lengths(const std::string& text) {
  std::vector<unsigned> lengths;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string part = text.substr(pos, comma - pos);
    const std::size_t dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        lengths.push_back(static_cast<unsigned>(std::stoul(part)));
      } else {
        const unsigned lo = static_cast<unsigned>(std::stoul(part.substr(0, dash)));
        const unsigned hi = static_cast<unsigned>(std::stoul(part.substr(dash + 1)));
        if (hi < lo) throw std::invalid_argument("descending range");
        for (unsigned l = lo; l <= hi; ++l) lengths.push_back(l);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse lengths '" + text + "'");
    }
    pos = comma + 1;
  }
  if (lengths.empty()) throw std::invalid_argument("no lengths given");
  return lengths;
}

inline void print_validation_report(const ValidationReport& report, std::ostream& out) {
  for (const auto& issue : report.issues) {
    if (issue.problem_id.empty()) {
      out << "corpus: " << issue.rule << ": " << issue.detail << "\n";
    } else {
      out << "problem '" << issue.problem_id << "': " << issue.rule << ": "
          << issue.detail << "\n";
    }
  }
}

inline std::vector<GradeRow> grade_transcripts(const Suite& suite, const Corpus& corpus,
                                               const std::vector<TranscriptRecord>& transcripts) {
  std::map<std::string, const TranscriptRecord*> by_id;
  for (const auto& t : transcripts) by_id[t.benchmark_id] = &t;
  std::vector<GradeRow> rows;
  for (const auto& entry : suite.entries) {
    auto it = by_id.find(entry.id);
    if (it == by_id.end()) continue;
    const TranscriptRecord& t = *it->second;
    const std::size_t l = entry.problem.solutions.size();
    const auto extracted = extract_answers(t.raw_response, l);
    GradeRow row;
    row.technique = entry.problem.spec.technique;
    row.length = static_cast<unsigned>(l);
    row.record = grade(entry.problem, corpus, extracted, t.truncated);
    row.record.benchmark_id = entry.id;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Chained math-benchmark generator and model evaluator"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  bool quiet = false;
  std::uint64_t seed = 0;
  std::string output;
  app.add_flag("--quiet", quiet, "Suppress informational output");
  app.add_option("--seed", seed, "Random seed for generation");
  app.add_option("--output", output, "Output path (meaning depends on subcommand)");
  app.set_config("--config", "", "Read default option values from a key=value file");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a corpus against all invariants");
  std::string validate_corpus_path;
  std::string blocklist_path;
  validate_cmd->add_option("corpus", validate_corpus_path, "Corpus JSON file")->required();
  validate_cmd->add_option("--blocklist", blocklist_path,
                           "Pronoun blocklist file (defaults to the built-in list)");

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "Generate a benchmark suite");
  std::string generate_corpus_path;
  std::string lengths_text = "2";
  unsigned per_length = 1;
  std::vector<std::string> technique_names = {"forward", "backward"};
  std::string template_name = "bracketed";
  std::string suite_name = "suite";
  generate_cmd->add_option("--corpus", generate_corpus_path, "Corpus JSON file")->required();
  generate_cmd->add_option("--lengths", lengths_text, "Chain lengths, e.g. 2-4 or 2,3,5");
  generate_cmd->add_option("--per-length", per_length, "Chains per (technique, length)")
      ->check(CLI::PositiveNumber);
  generate_cmd->add_option("--techniques", technique_names, "forward and/or backward")
      ->delimiter(',');
  generate_cmd->add_option("--template", template_name, "Link template: bracketed or inline");
  generate_cmd->add_option("--suite-name", suite_name, "Name recorded in the suite header");

  // count
  auto* count_cmd = app.add_subcommand("count", "Count the generation space exactly");
  unsigned corpus_size = 0;
  std::optional<unsigned> count_length;
  int sig_digits = 3;
  count_cmd->add_option("--corpus-size", corpus_size, "Number of seed problems (N)")
      ->required()
      ->check(CLI::PositiveNumber);
  count_cmd->add_option("--length", count_length, "Restrict to chains of exactly this length");
  count_cmd->add_option("--digits", sig_digits, "Significant digits for the scientific form")
      ->check(CLI::PositiveNumber);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Walk suite chains with the reference solver");
  std::string solve_suite_path;
  std::string solve_corpus_path;
  std::vector<std::size_t> flips;
  solve_cmd->add_option("--suite", solve_suite_path, "Suite JSONL file")->required();
  solve_cmd->add_option("--corpus", solve_corpus_path, "Corpus JSON file")->required();
  solve_cmd->add_option("--flip", flips, "Link indices to take the wrong branch at")
      ->delimiter(',');

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Query a model endpoint over a suite and grade it");
  std::string eval_suite_path;
  std::string eval_corpus_path;
  std::string endpoint_path;
  std::string output_dir = "eval_out";
  eval_cmd->add_option("--suite", eval_suite_path, "Suite JSONL file")->required();
  eval_cmd->add_option("--corpus", eval_corpus_path, "Corpus JSON file")->required();
  eval_cmd->add_option("--endpoint", endpoint_path, "Endpoint config file")->required();
  eval_cmd->add_option("--output-dir", output_dir,
                       "Directory for transcripts.jsonl and grades.jsonl");

  // report
  auto* report_cmd = app.add_subcommand("report", "Aggregate grades into accuracy tables");
  std::string grades_path;
  std::string csv_path = "report.csv";
  std::string md_path = "report.md";
  bool strict = false;
  report_cmd->add_option("--grades", grades_path, "Grades JSONL file")->required();
  report_cmd->add_option("--output-csv", csv_path, "CSV output path");
  report_cmd->add_option("--output-md", md_path, "Markdown output path");
  report_cmd->add_flag("--strict", strict,
                       "Count an item correct only if every intermediate matches");

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Attach human error labels to grades");
  std::string annotate_grades_path;
  std::string labels_path;
  annotate_cmd->add_option("--grades", annotate_grades_path, "Grades JSONL file")->required();
  annotate_cmd->add_option("--labels", labels_path, "Labels JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate_cmd->parsed()) {
      const Corpus corpus = load_corpus(validate_corpus_path);
      const auto blocklist = blocklist_path.empty() ? default_pronoun_blocklist()
                                                    : load_blocklist(blocklist_path);
      const ValidationReport report = validate_corpus(corpus, blocklist);
      cli_detail::print_validation_report(report, std::cout);
      if (!quiet) {
        if (report.clean()) {
          std::cout << "OK: corpus '" << corpus.name << "' is valid ("
                    << corpus.problems.size() << " problems)\n";
        } else {
          std::cout << "FAIL: " << report.issues.size() << " issue(s)\n";
        }
      }
      return report.clean() ? 0 : 1;
    }

    if (generate_cmd->parsed()) {
      const Corpus corpus = load_corpus(generate_corpus_path);
      const ValidationReport report = validate_corpus(corpus);
      if (!report.clean()) {
        cli_detail::print_validation_report(report, std::cerr);
        std::cerr << "generate: corpus failed validation\n";
        return 1;
      }
      SuiteConfig config;
      config.techniques.clear();
      for (const auto& name : technique_names) {
        config.techniques.push_back(parse_technique(name));
      }
      config.lengths = cli_detail::parse_lengths(lengths_text);
      config.chains_per_length = per_length;
      config.seed = seed;
      config.link_template = parse_link_template(template_name);
      config.suite_name = suite_name;
      const Suite suite = generate_suite(corpus, config);
      const std::string path = output.empty() ? "suite.jsonl" : output;
      write_suite(suite, path);
      if (!quiet) {
        std::cout << "wrote " << suite.entries.size() << " chained problems to "
                  << path << "\n";
      }
      return 0;
    }

    if (count_cmd->parsed()) {
      if (count_length) {
        const BigInt orderings = count_orderings(corpus_size, *count_length);
        const BigInt per = (BigInt(1) << (*count_length - 1)) * orderings;
        std::cout << "chains of length " << *count_length << " per technique: " << per
                  << " (" << to_scientific(per, sig_digits) << ")\n";
      } else {
        const GenerationCount count = count_total(corpus_size);
        std::cout << "total distinct chained problems: " << count.total << " ("
                  << to_scientific(count.total, sig_digits) << ")\n";
      }
      return 0;
    }

    if (solve_cmd->parsed()) {
      const Suite suite = read_suite(solve_suite_path);
      const Corpus corpus = load_corpus(solve_corpus_path);
      std::string text;
      for (const auto& entry : suite.entries) {
        SolverPolicy policy;
        for (std::size_t k : flips) {
          if (k + 1 < entry.problem.spec.problem_ids.size()) {
            policy.flipped_links.insert(k);
          }
        }
        const OracleTrace trace = solve_chain(entry.problem, corpus, policy);
        text += trace_to_json(entry.id, trace).dump() + "\n";
      }
      if (output.empty()) {
        std::cout << text;
      } else {
        write_text_file(text, output);
        if (!quiet) {
          std::cout << "wrote " << suite.entries.size() << " traces to " << output << "\n";
        }
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      const Suite suite = read_suite(eval_suite_path);
      const Corpus corpus = load_corpus(eval_corpus_path);
      const ModelEndpointConfig config = load_endpoint_config(endpoint_path);

      std::filesystem::create_directories(output_dir);
      const std::string transcripts_path =
          (std::filesystem::path(output_dir) / "transcripts.jsonl").string();
      const std::string grades_path_out =
          (std::filesystem::path(output_dir) / "grades.jsonl").string();

      // Resume: anything already in the store is kept as-is, keyed by id.
      std::map<std::string, TranscriptRecord> existing;
      if (std::filesystem::exists(transcripts_path)) {
        for (auto& t : read_transcripts(transcripts_path)) {
          existing.emplace(t.benchmark_id, std::move(t));
        }
      }

      std::vector<std::pair<std::string, std::string>> id_and_prompt;
      for (const auto& entry : suite.entries) {
        id_and_prompt.emplace_back(entry.id,
                                   render_prompt(entry.problem, config.prompt_template_id));
      }
      const auto transcripts = run_queries(config, id_and_prompt, existing);
      write_transcripts(transcripts, transcripts_path);

      const auto rows = cli_detail::grade_transcripts(suite, corpus, transcripts);
      write_grades(rows, grades_path_out);

      std::size_t errors = 0;
      for (const auto& t : transcripts) {
        if (!t.ok()) ++errors;
      }
      if (!quiet) {
        std::cout << "evaluated " << transcripts.size() << " items ("
                  << existing.size() << " reused from store, " << errors
                  << " errors)\n";
        std::cout << "transcripts: " << transcripts_path << "\n";
        std::cout << "grades: " << grades_path_out << "\n";
      }
      return errors == 0 ? 0 : 1;
    }

    if (report_cmd->parsed()) {
      const auto rows = read_grades(grades_path);
      if (rows.empty()) {
        std::cerr << "report: no grades in '" << grades_path << "'\n";
        return 1;
      }
      const AccuracyTable table = aggregate(rows, strict);
      write_text_file(accuracy_table_csv(table), csv_path);
      write_text_file(accuracy_table_markdown(table), md_path);
      if (!quiet) std::cout << accuracy_table_markdown(table);
      return 0;
    }

    if (annotate_cmd->parsed()) {
      const auto rows = read_grades(annotate_grades_path);
      const auto labels = read_labels(labels_path);
      const AnnotationSummary summary = annotate(rows, labels);
      const std::string path = output.empty() ? "annotations.json" : output;
      write_text_file(annotation_summary_to_json(summary).dump(2) + "\n", path);
      if (!quiet) {
        std::cout << "annotated " << summary.total << " records -> " << path << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

inline int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("chainbench");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& a : full) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace chainbench
