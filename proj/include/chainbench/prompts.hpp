#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chainbench/chaining.hpp"

namespace chainbench {

// Prompt templates use {text} for the chained problem statement and {count}
// for its length. {text} is mandatory; a template that never embeds the
// problem cannot produce an answerable prompt.
inline const std::map<std::string, std::string, std::less<>>& prompt_templates() {
  static const std::map<std::string, std::string, std::less<>> templates = {
      {"default",
       "Solve the following math problem. It contains {count} linked "
       "question(s); work through every one of them in the order they must be "
       "solved.\n"
       "Report the result of each solved part on its own line in the form "
       "\"ANSWER <k>: <number>\" (k counted in solve order), and end with a "
       "line \"FINAL ANSWER: <number>\" giving the answer to the question "
       "asked.\n\n"
       "{text}"},
      {"bare", "{text}"},
  };
  return templates;
}

inline std::string render_template(std::string_view template_body,
                                   std::string_view text, std::size_t count) {
  std::string body(template_body);
  if (body.find("{text}") == std::string::npos) {
    throw std::invalid_argument("prompt template has no {text} placeholder");
  }
  auto replace_all = [&](std::string_view from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = body.find(from, pos)) != std::string::npos) {
      body.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("{count}", std::to_string(count));
  replace_all("{text}", std::string(text));
  return body;
}

inline std::string render_prompt(const ChainedProblem& chained,
                                 std::string_view template_id = "default") {
  const auto& templates = prompt_templates();
  auto it = templates.find(template_id);
  if (it == templates.end()) {
    throw std::invalid_argument("unknown prompt template '" +
                                std::string(template_id) + "'");
  }
  return render_template(it->second, chained.text, chained.spec.problem_ids.size());
}

}  // namespace chainbench
