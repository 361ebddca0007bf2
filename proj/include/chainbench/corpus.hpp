#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainbench/number.hpp"
#include "chainbench/numscan.hpp"

namespace chainbench {

using ordered_json = nlohmann::ordered_json;

// One decomposed word problem. The first premise is interchangeable with the
// alternate first premise, and the two must lead to different answers; the
// conclusion/wrong-conclusion statements embed their numeric value verbatim
// so they can serve as link conditions.
struct SeedProblem {
  std::string id;
  std::string first_premise;
  std::string alt_first_premise;
  std::string body;  // may be empty: some problems carry everything in the first premise
  std::string question;
  std::string conclusion;
  std::string wrong_conclusion;
  Number answer;
  Number alt_answer;
  std::vector<std::string> entities;
};

struct Corpus {
  std::string name;
  std::string version;
  std::string source;  // optional free-form provenance note
  std::vector<SeedProblem> problems;

  const SeedProblem* find(std::string_view id) const {
    for (const auto& p : problems) {
      if (p.id == id) return &p;
    }
    return nullptr;
  }
};

struct ValidationIssue {
  std::string problem_id;  // empty for corpus-level issues
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool clean() const { return issues.empty(); }
};

// ---------------------------------------------------------------------------
// Pronoun blocklist

struct BlocklistEntry {
  std::string stem;
  bool prefix = false;  // entries written "their*" match any word starting with the stem
};

// Matches data/pronoun_blocklist.txt. Seed problems must avoid pronouns
// entirely; once problems are interleaved into a chain, a pronoun's referent
// becomes ambiguous.
inline const std::vector<BlocklistEntry>& default_pronoun_blocklist() {
  static const std::vector<BlocklistEntry> list = {
      {"he", false},    {"she", false},  {"his", false},   {"her", false},
      {"him", false},   {"hers", false}, {"they", true},   {"them", false},
      {"their", true},  {"it", false},   {"its", false},
  };
  return list;
}

inline std::vector<BlocklistEntry> load_blocklist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("blocklist: cannot open '" + path + "'");
  std::vector<BlocklistEntry> list;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    std::string word = line.substr(start);
    bool prefix = false;
    if (!word.empty() && word.back() == '*') {
      prefix = true;
      word.pop_back();
    }
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (!word.empty()) list.push_back({word, prefix});
  }
  return list;
}

// Returns the first blocklisted word in `text`, if any. Words are maximal
// ASCII-letter runs, so apostrophes are boundaries and "it's" trips on "it".
inline std::optional<std::string> find_blocked_word(
    std::string_view text, const std::vector<BlocklistEntry>& blocklist) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string word;
    while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(text[j])));
      ++j;
    }
    for (const auto& entry : blocklist) {
      const bool hit = entry.prefix ? word.rfind(entry.stem, 0) == 0
                                    : word == entry.stem;
      if (hit) return std::string(text.substr(i, j - i));
    }
    i = j;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Load / save

namespace corpus_detail {

inline std::string require_string(const ordered_json& obj, const char* key,
                                  const std::string& problem_label) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw std::runtime_error("corpus: problem '" + problem_label +
                             "': missing required field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

inline Number require_number(const ordered_json& obj, const char* key,
                             const std::string& problem_label) {
  const std::string text = require_string(obj, key, problem_label);
  auto value = Number::parse(text);
  if (!value) {
    throw std::runtime_error("corpus: problem '" + problem_label +
                             "': field '" + key + "' is not a valid number: '" +
                             text + "'");
  }
  return *value;
}

}  // namespace corpus_detail

inline Corpus parse_corpus(const std::string& document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corpus: malformed document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("problems") || !doc["problems"].is_array()) {
    throw std::runtime_error("corpus: malformed document: expected top-level "
                             "object with a 'problems' array");
  }
  Corpus corpus;
  corpus.name = doc.value("name", std::string{});
  corpus.version = doc.value("version", std::string{});
  corpus.source = doc.value("source", std::string{});
  std::size_t index = 0;
  for (const auto& item : doc["problems"]) {
    using namespace corpus_detail;
    std::string label = item.is_object() && item.contains("id") && item["id"].is_string()
                            ? item["id"].get<std::string>()
                            : "#" + std::to_string(index);
    if (!item.is_object()) {
      throw std::runtime_error("corpus: problem '" + label + "': not an object");
    }
    SeedProblem p;
    p.id = require_string(item, "id", label);
    p.first_premise = require_string(item, "first_premise", label);
    p.alt_first_premise = require_string(item, "alt_first_premise", label);
    p.body = require_string(item, "body", label);
    p.question = require_string(item, "question", label);
    p.conclusion = require_string(item, "conclusion", label);
    p.wrong_conclusion = require_string(item, "wrong_conclusion", label);
    p.answer = require_number(item, "answer", label);
    p.alt_answer = require_number(item, "alt_answer", label);
    if (!item.contains("entities") || !item["entities"].is_array()) {
      throw std::runtime_error("corpus: problem '" + label +
                               "': missing required field 'entities'");
    }
    for (const auto& e : item["entities"]) {
      if (!e.is_string()) {
        throw std::runtime_error("corpus: problem '" + label +
                                 "': entities must be strings");
      }
      p.entities.push_back(e.get<std::string>());
    }
    corpus.problems.push_back(std::move(p));
    ++index;
  }
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("corpus: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str());
}

// Canonical writer: fixed key order, numbers rendered canonically, two-space
// indent, trailing newline. load(write(c)) == c and write is byte-stable.
inline std::string write_corpus(const Corpus& corpus) {
  ordered_json doc;
  doc["name"] = corpus.name;
  doc["version"] = corpus.version;
  if (!corpus.source.empty()) doc["source"] = corpus.source;
  doc["problems"] = ordered_json::array();
  for (const auto& p : corpus.problems) {
    ordered_json item;
    item["id"] = p.id;
    item["first_premise"] = p.first_premise;
    item["alt_first_premise"] = p.alt_first_premise;
    item["body"] = p.body;
    item["question"] = p.question;
    item["conclusion"] = p.conclusion;
    item["wrong_conclusion"] = p.wrong_conclusion;
    item["answer"] = p.answer.str();
    item["alt_answer"] = p.alt_answer.str();
    item["entities"] = p.entities;
    doc["problems"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("corpus: cannot write '" + path + "'");
  out << write_corpus(corpus);
}

// ---------------------------------------------------------------------------
// Validation

inline ValidationReport validate_corpus(
    const Corpus& corpus,
    const std::vector<BlocklistEntry>& blocklist = default_pronoun_blocklist()) {
  ValidationReport report;
  auto add = [&](const std::string& id, const char* rule, std::string detail) {
    report.issues.push_back({id, rule, std::move(detail)});
  };

  std::set<std::string> seen_ids;
  for (const auto& p : corpus.problems) {
    if (!seen_ids.insert(p.id).second) {
      add(p.id, "duplicate-id", "problem id appears more than once");
    }
  }

  for (const auto& p : corpus.problems) {
    const std::pair<const char*, const std::string*> required[] = {
        {"first_premise", &p.first_premise},
        {"alt_first_premise", &p.alt_first_premise},
        {"question", &p.question},
        {"conclusion", &p.conclusion},
        {"wrong_conclusion", &p.wrong_conclusion},
    };
    for (const auto& [name, value] : required) {
      if (value->empty()) {
        add(p.id, "empty-field", std::string("field '") + name + "' is empty");
      }
    }

    if (p.answer == p.alt_answer) {
      add(p.id, "answer-collision",
          "answer and alt_answer are both " + p.answer.str());
    }

    const auto conclusion_value = first_number_in(p.conclusion);
    if (!conclusion_value) {
      add(p.id, "conclusion-value-mismatch", "conclusion contains no number");
    } else if (*conclusion_value != p.answer) {
      add(p.id, "conclusion-value-mismatch",
          "conclusion states " + conclusion_value->str() + " but answer is " +
              p.answer.str());
    }

    const auto wrong_value = first_number_in(p.wrong_conclusion);
    if (!wrong_value) {
      add(p.id, "wrong-conclusion-collision", "wrong_conclusion contains no number");
    } else if (*wrong_value == p.answer || *wrong_value == p.alt_answer) {
      add(p.id, "wrong-conclusion-collision",
          "wrong_conclusion states " + wrong_value->str() +
              ", which collides with answer or alt_answer");
    }

    const std::pair<const char*, const std::string*> text_fields[] = {
        {"first_premise", &p.first_premise},
        {"alt_first_premise", &p.alt_first_premise},
        {"body", &p.body},
        {"question", &p.question},
        {"conclusion", &p.conclusion},
        {"wrong_conclusion", &p.wrong_conclusion},
    };
    for (const auto& [name, value] : text_fields) {
      if (auto word = find_blocked_word(*value, blocklist)) {
        add(p.id, "pronoun",
            std::string("field '") + name + "' contains blocked word '" + *word + "'");
      }
    }
  }

  // Entity disjointness, case-insensitive.
  std::map<std::string, std::string> entity_owner;  // lowercased entity -> problem id
  for (const auto& p : corpus.problems) {
    for (const auto& entity : p.entities) {
      std::string key = entity;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      auto [it, inserted] = entity_owner.emplace(key, p.id);
      if (!inserted && it->second != p.id) {
        add(p.id, "entity-collision",
            "entity '" + entity + "' also appears in problem '" + it->second + "'");
      }
    }
  }

  return report;
}

}  // namespace chainbench
