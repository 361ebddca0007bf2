#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbench/chaining.hpp"
#include "chainbench/corpus.hpp"
#include "chainbench/number.hpp"

namespace chainbench {

// Fault model: at each listed link index the simulated solver takes the
// branch opposite to the truthful one.
struct SolverPolicy {
  std::set<std::size_t> flipped_links;  // chain-order link indices, in [0, l-2]
};

struct ProblemStep {
  std::string problem_id;
  enum class Premise { True, Alt } premise_used = Premise::True;
  Number computed_answer;
};

struct LinkStep {
  Number condition_value_stated;    // the number cited by the link's condition
  Number condition_value_computed;  // the source problem's computed answer
  bool truth_taken = false;         // branch actually taken, after any flip
};

struct OracleTrace {
  std::vector<ProblemStep> problems;  // solve order
  std::vector<LinkStep> links;        // chain order, matching chained.links
  Number final_answer;
};

// Walks the chain's branch logic exactly. Conditions are decided by comparing
// the cited number against the source problem's computed answer, never by
// text, so the walk is template-independent. With an empty policy the trace
// reproduces the chain's ground truth. A flipped early link can self-correct
// downstream: a wrong-conclusion link whose condition no longer matches the
// corrupted value routes back to the true premise.
inline OracleTrace solve_chain(const ChainedProblem& chained, const Corpus& corpus,
                               const SolverPolicy& policy = {}) {
  const std::size_t l = chained.spec.problem_ids.size();
  const auto problems = resolve_problems(corpus, chained.spec.problem_ids);
  if (chained.links.size() + 1 != l) {
    throw std::invalid_argument("oracle: chain has " + std::to_string(chained.links.size()) +
                                " links for " + std::to_string(l) + " problems");
  }
  for (std::size_t k : policy.flipped_links) {
    if (k + 1 >= l) {
      throw std::invalid_argument("oracle: flipped link " + std::to_string(k) +
                                  " out of range");
    }
  }

  const bool forward = chained.spec.technique == Technique::Forward;
  OracleTrace trace;
  trace.links.resize(chained.links.size());
  std::vector<Number> computed(l);

  auto solve_position = [&](std::size_t chain_idx, ProblemStep::Premise premise) {
    const SeedProblem& p = *problems[chain_idx];
    const Number answer = premise == ProblemStep::Premise::True ? p.answer : p.alt_answer;
    computed[chain_idx] = answer;
    trace.problems.push_back({p.id, premise, answer});
  };

  auto premise_from_link = [&](std::size_t link_idx, std::size_t source_idx,
                               std::size_t target_idx) {
    const LinkInfo& link = chained.links[link_idx];
    bool truth = link.condition_value == computed[source_idx];
    if (policy.flipped_links.count(link_idx)) truth = !truth;
    trace.links[link_idx] = {link.condition_value, computed[source_idx], truth};

    const std::string& premise_text = truth ? link.then_premise : link.else_premise;
    const SeedProblem& target = *problems[target_idx];
    if (premise_text == target.first_premise) return ProblemStep::Premise::True;
    if (premise_text == target.alt_first_premise) return ProblemStep::Premise::Alt;
    throw std::invalid_argument("oracle: link " + std::to_string(link_idx) +
                                " premise does not match problem '" + target.id +
                                "' (chain and corpus disagree)");
  };

  if (forward) {
    solve_position(0, ProblemStep::Premise::True);
    for (std::size_t i = 1; i < l; ++i) {
      solve_position(i, premise_from_link(i - 1, i - 1, i));
    }
    trace.final_answer = computed[l - 1];
  } else {
    solve_position(l - 1, ProblemStep::Premise::True);
    for (std::size_t i = l - 1; i-- > 0;) {
      solve_position(i, premise_from_link(i, i + 1, i));
    }
    trace.final_answer = computed[0];
  }
  return trace;
}

struct FaultSensitivityEntry {
  std::size_t link_index = 0;
  bool immediate_changed = false;  // the problem fed by this link computes differently
  bool final_changed = false;      // the chain's final answer differs from ground truth
};

// Single-link flip sweep. The immediately fed problem always changes (the two
// slots hold different premises with different answers); the final answer is
// only guaranteed to change when the flipped link is the last one in solve
// order, since later wrong-conclusion links can route a corrupted value back
// onto the true premise.
inline std::vector<FaultSensitivityEntry> fault_sensitivity(
    const ChainedProblem& chained, const Corpus& corpus) {
  const std::size_t l = chained.spec.problem_ids.size();
  if (l < 2) {
    throw std::invalid_argument("fault_sensitivity: need a chain of length >= 2");
  }
  const bool forward = chained.spec.technique == Technique::Forward;
  const OracleTrace base = solve_chain(chained, corpus);

  auto answer_at_chain_idx = [&](const OracleTrace& t, std::size_t chain_idx) {
    const std::size_t pos = forward ? chain_idx : l - 1 - chain_idx;
    return t.problems[pos].computed_answer;
  };

  std::vector<FaultSensitivityEntry> entries;
  for (std::size_t k = 0; k + 1 < l; ++k) {
    SolverPolicy policy;
    policy.flipped_links.insert(k);
    const OracleTrace faulted = solve_chain(chained, corpus, policy);
    const std::size_t fed_idx = forward ? k + 1 : k;
    entries.push_back({k,
                       answer_at_chain_idx(faulted, fed_idx) !=
                           answer_at_chain_idx(base, fed_idx),
                       faulted.final_answer != base.final_answer});
  }
  return entries;
}

// Chain-order index of the link feeding the problem that answers the final
// question: the last link for forward chains, the first for backward.
inline std::size_t final_solve_link(Technique technique, std::size_t length) {
  if (length < 2) throw std::invalid_argument("final_solve_link: no links");
  return technique == Technique::Forward ? length - 2 : 0;
}

}  // namespace chainbench
