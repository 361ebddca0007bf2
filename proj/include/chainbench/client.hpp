#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "chainbench/version.hpp"

namespace chainbench {

struct RetryPolicy {
  int max_attempts = 3;
  double backoff_base_seconds = 1.0;  // sleep base * 2^(attempt-1) between tries
};

struct ModelEndpointConfig {
  std::string base_url;           // e.g. https://api.example.com/v1
  std::string model_name;
  std::string auth_token_env;     // name of the env var holding the bearer token
  std::string prompt_template_id = "default";
  int max_concurrency = 4;
  double request_timeout_seconds = 120.0;
  RetryPolicy retry;
  std::size_t max_response_chars = 100000;  // loop guard
  std::string response_text_path = "choices.0.message.content";
};

struct TranscriptRecord {
  std::string benchmark_id;
  std::string prompt;
  std::string raw_response;  // model text; empty when error is set
  double latency_seconds = 0.0;
  int attempt_count = 0;
  bool truncated = false;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// ---------------------------------------------------------------------------
// Endpoint config files: "key = value" lines, # comments, ${VAR} interpolation
// so tokens and hosts never need to live in the file itself.

namespace client_detail {

inline std::string interpolate_env(const std::string& value, const std::string& path) {
  std::string out;
  std::size_t pos = 0;
  while (pos < value.size()) {
    if (value[pos] == '$' && pos + 1 < value.size() && value[pos + 1] == '{') {
      const std::size_t close = value.find('}', pos + 2);
      if (close == std::string::npos) {
        throw std::runtime_error("endpoint config '" + path + "': unterminated ${");
      }
      const std::string name = value.substr(pos + 2, close - pos - 2);
      const char* env = std::getenv(name.c_str());
      if (!env) {
        throw std::runtime_error("endpoint config '" + path +
                                 "': environment variable '" + name + "' is not set");
      }
      out += env;
      pos = close + 1;
    } else {
      out += value[pos++];
    }
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits "https://host:port/v1" into the client target and the path prefix.
inline std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = base_url.find('/', host_start);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

}  // namespace client_detail

inline ModelEndpointConfig load_endpoint_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("endpoint config: cannot open '" + path + "'");
  ModelEndpointConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = client_detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("endpoint config '" + path + "': line " +
                               std::to_string(line_no) + " is not key = value");
    }
    const std::string key = client_detail::trim(stripped.substr(0, eq));
    const std::string value =
        client_detail::interpolate_env(client_detail::trim(stripped.substr(eq + 1)), path);
    if (key == "base_url") config.base_url = value;
    else if (key == "model_name") config.model_name = value;
    else if (key == "auth_token_env") config.auth_token_env = value;
    else if (key == "prompt_template_id") config.prompt_template_id = value;
    else if (key == "max_concurrency") config.max_concurrency = std::stoi(value);
    else if (key == "request_timeout_seconds") config.request_timeout_seconds = std::stod(value);
    else if (key == "retry_max_attempts") config.retry.max_attempts = std::stoi(value);
    else if (key == "retry_backoff_base_seconds") config.retry.backoff_base_seconds = std::stod(value);
    else if (key == "max_response_chars") config.max_response_chars = std::stoul(value);
    else if (key == "response_text_path") config.response_text_path = value;
    else {
      throw std::runtime_error("endpoint config '" + path + "': unknown key '" + key + "'");
    }
  }
  if (config.base_url.empty()) {
    throw std::runtime_error("endpoint config '" + path + "': base_url is required");
  }
  if (config.max_concurrency < 1) {
    throw std::runtime_error("endpoint config '" + path + "': max_concurrency must be >= 1");
  }
  if (config.max_response_chars == 0) {
    throw std::runtime_error("endpoint config '" + path + "': max_response_chars must be > 0");
  }
  return config;
}

// Walks a dotted path ("choices.0.message.content") through a JSON document;
// integer components index arrays.
inline const nlohmann::json* json_at_path(const nlohmann::json& doc,
                                          const std::string& path) {
  const nlohmann::json* node = &doc;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t dot = path.find('.', pos);
    const std::string part =
        path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) return nullptr;
    if (!part.empty() && part.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t idx = std::stoul(part);
      if (!node->is_array() || idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else {
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return node;
}

// One chat-completion request with retries. Transport failures, 429 and 5xx
// are retried with exponential backoff; auth failures and malformed bodies
// are terminal. Every failure mode lands in record.error, never in an
// exception, so a suite run can continue past individual items.
inline TranscriptRecord query_model(const ModelEndpointConfig& config,
                                    const std::string& prompt,
                                    const std::string& benchmark_id = {}) {
  TranscriptRecord record;
  record.benchmark_id = benchmark_id;
  record.prompt = prompt;

  std::string token;
  if (!config.auth_token_env.empty()) {
    const char* env = std::getenv(config.auth_token_env.c_str());
    if (!env) {
      record.error = "auth: environment variable '" + config.auth_token_env +
                     "' is not set";
      return record;
    }
    token = env;
  }

  const auto [host, path_prefix] = client_detail::split_base_url(config.base_url);
  const std::string path = path_prefix + "/chat/completions";

  nlohmann::json body = {
      {"model", config.model_name},
      {"messages", nlohmann::json::array({nlohmann::json{
                       {"role", "user"}, {"content", prompt}}})},
  };
  const std::string payload = body.dump();

  const auto start = std::chrono::steady_clock::now();
  auto finish = [&]() {
    record.latency_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  for (int attempt = 1; attempt <= config.retry.max_attempts; ++attempt) {
    record.attempt_count = attempt;
    httplib::Client client(host);
    const auto timeout = std::chrono::duration<double>(config.request_timeout_seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto result = client.Post(path, headers, payload, "application/json");

    std::string retry_reason;
    if (!result) {
      retry_reason = "transport: " + httplib::to_string(result.error());
    } else if (result->status == 429 || result->status >= 500) {
      retry_reason = "http status " + std::to_string(result->status);
    } else if (result->status == 401 || result->status == 403) {
      record.error = "auth failure (http status " + std::to_string(result->status) + ")";
      finish();
      return record;
    } else if (result->status != 200) {
      record.error = "http status " + std::to_string(result->status);
      finish();
      return record;
    } else {
      nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
      if (doc.is_discarded()) {
        record.error = "malformed response body: not JSON";
        finish();
        return record;
      }
      const nlohmann::json* text = json_at_path(doc, config.response_text_path);
      if (!text || !text->is_string()) {
        record.error = "malformed response body: no text at '" +
                       config.response_text_path + "'";
        finish();
        return record;
      }
      record.raw_response = text->get<std::string>();
      record.truncated = record.raw_response.size() >= config.max_response_chars;
      finish();
      return record;
    }

    if (attempt == config.retry.max_attempts) {
      record.error = "retries exhausted after " + std::to_string(attempt) +
                     " attempt(s): " + retry_reason;
      finish();
      return record;
    }
    const double sleep_s =
        config.retry.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
    std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
  }
  finish();
  return record;  // unreachable
}

// Runs prompts through the endpoint with up to max_concurrency in-flight
// requests. `existing` entries (a resumed store) are passed through untouched
// and never re-queried. Output order follows input order regardless of
// completion order.
inline std::vector<TranscriptRecord> run_queries(
    const ModelEndpointConfig& config,
    const std::vector<std::pair<std::string, std::string>>& id_and_prompt,
    const std::map<std::string, TranscriptRecord>& existing = {}) {
  std::vector<TranscriptRecord> records(id_and_prompt.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < id_and_prompt.size(); ++i) {
    auto it = existing.find(id_and_prompt[i].first);
    if (it != existing.end()) {
      records[i] = it->second;
    } else {
      todo.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const std::size_t i = todo[t];
      records[i] = query_model(config, id_and_prompt[i].second, id_and_prompt[i].first);
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrency),
                            std::max<std::size_t>(todo.size(), 1));
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return records;
}

}  // namespace chainbench
