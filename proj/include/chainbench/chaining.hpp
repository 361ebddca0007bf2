#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chainbench/corpus.hpp"
#include "chainbench/number.hpp"
#include "chainbench/numscan.hpp"
#include "chainbench/rng.hpp"

namespace chainbench {

enum class Technique { Forward, Backward };

// Which conclusion a link's condition cites. A TrueConclusion link puts the
// target's true first premise in the then-slot; a WrongConclusion link cites
// the wrong conclusion and swaps the slots, so evaluating the condition
// truthfully always lands on the true premise.
enum class BranchChoice { TrueConclusion, WrongConclusion };

enum class LinkTemplate { Bracketed, Inline };

inline std::string_view to_string(Technique t) {
  return t == Technique::Forward ? "forward" : "backward";
}

inline Technique parse_technique(std::string_view s) {
  if (s == "forward") return Technique::Forward;
  if (s == "backward") return Technique::Backward;
  throw std::invalid_argument("unknown technique '" + std::string(s) + "'");
}

inline std::string_view to_string(BranchChoice c) {
  return c == BranchChoice::TrueConclusion ? "true_conclusion" : "wrong_conclusion";
}

inline BranchChoice parse_branch_choice(std::string_view s) {
  if (s == "true_conclusion") return BranchChoice::TrueConclusion;
  if (s == "wrong_conclusion") return BranchChoice::WrongConclusion;
  throw std::invalid_argument("unknown branch choice '" + std::string(s) + "'");
}

inline std::string_view to_string(LinkTemplate t) {
  return t == LinkTemplate::Bracketed ? "bracketed" : "inline";
}

inline LinkTemplate parse_link_template(std::string_view s) {
  if (s == "bracketed") return LinkTemplate::Bracketed;
  if (s == "inline") return LinkTemplate::Inline;
  throw std::invalid_argument("unknown link template '" + std::string(s) + "'");
}

struct ChainSpec {
  Technique technique = Technique::Forward;
  std::vector<std::string> problem_ids;   // chain order, length l >= 1
  std::vector<BranchChoice> choices;      // length l - 1
  std::string seed_fingerprint;           // provenance of the random draw
};

struct LinkInfo {
  std::string condition_text;
  Number condition_value;
  std::string then_premise;
  std::string else_premise;
  bool condition_truth = false;  // true iff the condition cites the true conclusion
};

struct ChainedProblem {
  ChainSpec spec;
  std::string text;
  std::vector<Number> solutions;  // solve order; last entry answers the question
  Number final_answer;
  std::vector<LinkInfo> links;    // chain order: links[i] joins problems i and i+1
};

namespace chaining_detail {

inline std::string strip_statement(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '.')) --end;
  std::size_t begin = 0;
  while (begin < end && s[begin] == ' ') ++begin;
  return std::string(s.substr(begin, end - begin));
}

inline void append_segment(std::string& text, std::string_view segment) {
  if (segment.empty()) return;
  if (!text.empty()) text += ' ';
  text += segment;
}

inline void check_distinct_ids(const std::vector<const SeedProblem*>& problems) {
  std::set<std::string_view> ids;
  for (const auto* p : problems) {
    if (!ids.insert(p->id).second) {
      throw std::invalid_argument("chain: problem '" + p->id +
                                  "' appears more than once");
    }
  }
}

inline Number condition_value_of(const SeedProblem& source, BranchChoice choice) {
  const std::string& statement = choice == BranchChoice::TrueConclusion
                                     ? source.conclusion
                                     : source.wrong_conclusion;
  auto value = first_number_in(statement);
  if (!value) {
    throw std::invalid_argument("chain: problem '" + source.id +
                                "': cited conclusion contains no number");
  }
  return *value;
}

}  // namespace chaining_detail

// The branching statement joining two problems. The condition cites the
// source's conclusion (or wrong conclusion); the then/else slots carry the
// target's two first-premise variants, arranged so the truthful branch holds
// the true premise.
inline std::string render_link(const SeedProblem& condition_source,
                               const SeedProblem& target, BranchChoice choice,
                               LinkTemplate tmpl = LinkTemplate::Bracketed) {
  using namespace chaining_detail;
  const std::string condition =
      strip_statement(choice == BranchChoice::TrueConclusion
                          ? condition_source.conclusion
                          : condition_source.wrong_conclusion);
  const std::string& then_slot = choice == BranchChoice::TrueConclusion
                                     ? target.first_premise
                                     : target.alt_first_premise;
  const std::string& else_slot = choice == BranchChoice::TrueConclusion
                                     ? target.alt_first_premise
                                     : target.first_premise;
  if (tmpl == LinkTemplate::Bracketed) {
    return "If it is true that " + condition + ", then the following is true: [" +
           then_slot + "] Otherwise, the following is true: [" + else_slot + "]";
  }
  return "If it is true that " + condition + ", then " + then_slot +
         " Otherwise, " + else_slot;
}

inline LinkInfo make_link_info(const SeedProblem& condition_source,
                               const SeedProblem& target, BranchChoice choice) {
  using namespace chaining_detail;
  LinkInfo info;
  info.condition_text =
      strip_statement(choice == BranchChoice::TrueConclusion
                          ? condition_source.conclusion
                          : condition_source.wrong_conclusion);
  info.condition_value = condition_value_of(condition_source, choice);
  info.then_premise = choice == BranchChoice::TrueConclusion
                          ? target.first_premise
                          : target.alt_first_premise;
  info.else_premise = choice == BranchChoice::TrueConclusion
                          ? target.alt_first_premise
                          : target.first_premise;
  info.condition_truth = choice == BranchChoice::TrueConclusion;
  return info;
}

// Sequential composition: each link's condition cites the previous problem,
// so the chain is solvable in presentation order. A single problem is the
// degenerate chain and reproduces the original text.
inline ChainedProblem forward_chain(const std::vector<const SeedProblem*>& problems,
                                    const std::vector<BranchChoice>& choices,
                                    LinkTemplate tmpl = LinkTemplate::Bracketed) {
  using namespace chaining_detail;
  if (problems.empty()) throw std::invalid_argument("chain: empty problem list");
  if (choices.size() + 1 != problems.size()) {
    throw std::invalid_argument("chain: need exactly one branch choice per link");
  }
  check_distinct_ids(problems);

  ChainedProblem chained;
  chained.spec.technique = Technique::Forward;
  for (const auto* p : problems) chained.spec.problem_ids.push_back(p->id);
  chained.spec.choices = choices;

  std::string text;
  append_segment(text, problems.front()->first_premise);
  append_segment(text, problems.front()->body);
  for (std::size_t i = 1; i < problems.size(); ++i) {
    append_segment(text, render_link(*problems[i - 1], *problems[i], choices[i - 1], tmpl));
    append_segment(text, problems[i]->body);
    chained.links.push_back(make_link_info(*problems[i - 1], *problems[i], choices[i - 1]));
  }
  append_segment(text, problems.back()->question);
  chained.text = std::move(text);

  for (const auto* p : problems) chained.solutions.push_back(p->answer);
  chained.final_answer = chained.solutions.back();
  return chained;
}

// Reverse composition: link i cites problem i+1, so every problem's first
// premise is resolved by a problem presented later. The last problem appears
// with its true premise and the question belongs to the first, which is
// solved last.
inline ChainedProblem backward_chain(const std::vector<const SeedProblem*>& problems,
                                     const std::vector<BranchChoice>& choices,
                                     LinkTemplate tmpl = LinkTemplate::Bracketed) {
  using namespace chaining_detail;
  if (problems.empty()) throw std::invalid_argument("chain: empty problem list");
  if (problems.size() < 2) {
    throw std::invalid_argument("chain: backward chains need at least two problems");
  }
  if (choices.size() + 1 != problems.size()) {
    throw std::invalid_argument("chain: need exactly one branch choice per link");
  }
  check_distinct_ids(problems);

  ChainedProblem chained;
  chained.spec.technique = Technique::Backward;
  for (const auto* p : problems) chained.spec.problem_ids.push_back(p->id);
  chained.spec.choices = choices;

  std::string text;
  for (std::size_t i = 0; i + 1 < problems.size(); ++i) {
    append_segment(text, render_link(*problems[i + 1], *problems[i], choices[i], tmpl));
    append_segment(text, problems[i]->body);
    chained.links.push_back(make_link_info(*problems[i + 1], *problems[i], choices[i]));
  }
  append_segment(text, problems.back()->first_premise);
  append_segment(text, problems.back()->body);
  append_segment(text, problems.front()->question);
  chained.text = std::move(text);

  for (auto it = problems.rbegin(); it != problems.rend(); ++it) {
    chained.solutions.push_back((*it)->answer);
  }
  chained.final_answer = chained.solutions.back();
  return chained;
}

inline std::vector<const SeedProblem*> resolve_problems(
    const Corpus& corpus, const std::vector<std::string>& ids) {
  std::vector<const SeedProblem*> problems;
  problems.reserve(ids.size());
  for (const auto& id : ids) {
    const SeedProblem* p = corpus.find(id);
    if (!p) throw std::invalid_argument("chain: unknown problem id '" + id + "'");
    problems.push_back(p);
  }
  return problems;
}

inline ChainedProblem build_chain(const Corpus& corpus, const ChainSpec& spec,
                                  LinkTemplate tmpl = LinkTemplate::Bracketed) {
  const auto problems = resolve_problems(corpus, spec.problem_ids);
  ChainedProblem chained = spec.technique == Technique::Forward
                               ? forward_chain(problems, spec.choices, tmpl)
                               : backward_chain(problems, spec.choices, tmpl);
  chained.spec.seed_fingerprint = spec.seed_fingerprint;
  return chained;
}

// Uniform draw over chain specs: ids sampled without replacement via a
// partial Fisher-Yates pass (uniform over ordered l-tuples), then one
// independent coin per link.
inline ChainSpec sample_chain(const Corpus& corpus, std::size_t length,
                              Technique technique, Rng& rng) {
  if (length < 1) throw std::invalid_argument("sample: length must be at least 1");
  if (length > corpus.problems.size()) {
    throw std::invalid_argument("sample: length " + std::to_string(length) +
                                " exceeds corpus size " +
                                std::to_string(corpus.problems.size()));
  }
  if (technique == Technique::Backward && length < 2) {
    throw std::invalid_argument("sample: backward chains need length >= 2");
  }

  std::vector<std::size_t> indices(corpus.problems.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t j = i + rng.below(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }

  ChainSpec spec;
  spec.technique = technique;
  for (std::size_t i = 0; i < length; ++i) {
    spec.problem_ids.push_back(corpus.problems[indices[i]].id);
  }
  for (std::size_t i = 0; i + 1 < length; ++i) {
    spec.choices.push_back(rng.coin() ? BranchChoice::WrongConclusion
                                      : BranchChoice::TrueConclusion);
  }
  return spec;
}

}  // namespace chainbench
