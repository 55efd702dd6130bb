#include "perfix/generation.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"
#include "perfix/util.hpp"

namespace perfix {
namespace {

using json = nlohmann::json;

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::string extract_balanced(std::string_view text, std::size_t from, std::string_view what) {
  const auto end = find_balanced_end(text, from);
  if (!end) throw UnbalancedCompletion(std::string(what) + ": braces never balance");
  return std::string(text.substr(from, *end - from));
}

}  // namespace

// --- HTTP ----------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (!config_.api_key) {
    if (const char* key = std::getenv("PERFIX_API_KEY"); key != nullptr && *key != '\0') {
      config_.api_key = key;
    }
  }
  auto url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  scheme_host_ = path_begin == std::string::npos ? url : url.substr(0, path_begin);
  path_prefix_ = path_begin == std::string::npos ? "" : url.substr(path_begin);
}

BackendResponse HttpBackend::send(const BackendRequest& request) {
  json body;
  body["model"] = request.model;
  if (config_.api == HttpApi::kChat) {
    body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  } else {
    body["prompt"] = request.prompt;
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  body["n"] = request.n;

  httplib::Client client(scheme_host_);
  const auto timeout = std::chrono::duration<double>(request.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);
  const auto path = path_prefix_ + (config_.api == HttpApi::kChat ? "/chat/completions" : "/completions");

  BackendResponse out;
  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    out.status = 0;
    out.error = "transport error: " + httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  if (res->status != 200) {
    out.error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
    return out;
  }
  try {
    const auto reply = json::parse(res->body);
    for (const auto& choice : reply.at("choices")) {
      BackendChoice c;
      if (config_.api == HttpApi::kChat) {
        c.text = choice.at("message").value("content", std::string());
      } else {
        c.text = choice.value("text", std::string());
      }
      c.truncated = choice.value("finish_reason", std::string()) == "length";
      out.choices.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    out.status = 502;
    out.error = std::string("malformed response: ") + e.what();
  }
  return out;
}

// --- mock ----------------------------------------------------------------

MockBackend::MockBackend(const std::filesystem::path& path) { load(read_file(path)); }

void MockBackend::load(std::string_view text) {
  std::uint64_t offset = 0;
  for (const auto line : split(text, '\n')) {
    if (!trim(line).empty()) {
      try {
        const auto j = json::parse(line);
        Script s;
        s.completions = j.at("completions").get<std::vector<std::string>>();
        if (j.contains("failures")) s.failures = j["failures"].get<std::vector<int>>();
        if (j.contains("truncated")) s.truncated = j["truncated"].get<std::vector<bool>>();
        add(j.at("prompt_sha256").get<std::string>(), std::move(s));
      } catch (const json::exception& e) {
        throw IoError(std::string("malformed mock script: ") + e.what(), offset);
      }
    }
    offset += line.size() + 1;
  }
}

void MockBackend::add(std::string prompt_sha256, Script script) {
  std::lock_guard lock(mutex_);
  scripts_[std::move(prompt_sha256)] = std::move(script);
}

std::size_t MockBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

BackendResponse MockBackend::send(const BackendRequest& request) {
  std::lock_guard lock(mutex_);
  ++calls_;
  const auto key = sha256_hex(request.prompt);
  auto it = scripts_.find(key);
  if (it == scripts_.end()) it = scripts_.find("*");
  BackendResponse out;
  if (it == scripts_.end() || it->second.completions.empty()) {
    out.status = 404;
    out.error = "no scripted completion for prompt " + key;
    return out;
  }
  const auto& script = it->second;
  auto& served = failures_served_[it->first];
  if (served < script.failures.size()) {
    out.status = script.failures[served++];
    out.error = "scripted failure";
    return out;
  }
  for (int i = 0; i < request.n; ++i) {
    const auto idx = (request.first_sample_index + static_cast<std::size_t>(i)) % script.completions.size();
    const bool truncated = idx < script.truncated.size() && script.truncated[idx];
    out.choices.push_back({script.completions[idx], truncated});
  }
  return out;
}

// --- sampling ------------------------------------------------------------

CompletionBatch complete(const Prompt& prompt, const SamplingConfig& config, Backend& backend) {
  const int total = std::max(0, config.num_samples);
  const int per_request = std::max(1, config.samples_per_request);
  const int requests = (total + per_request - 1) / per_request;

  CompletionBatch batch;
  batch.samples.resize(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) batch.samples[static_cast<std::size_t>(i)].index = static_cast<std::size_t>(i);
  if (total == 0) return batch;

  std::atomic<int> next{0};
  std::atomic<int> retries{0};
  std::atomic<int> failed{0};
  std::atomic<bool> any_success{false};
  std::string last_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (int r = next++; r < requests; r = next++) {
      const auto first = static_cast<std::size_t>(r) * static_cast<std::size_t>(per_request);
      const int n = std::min(per_request, total - r * per_request);
      BackendRequest req{prompt.text, n, first, config.temperature, config.max_tokens,
                         config.model_name, config.timeout_s};
      BackendResponse res;
      int delay = config.backoff_initial_ms;
      for (int attempt = 1;; ++attempt) {
        res = backend.send(req);
        if (res.status == 200) break;
        if (!retryable(res.status) || attempt >= config.max_attempts) break;
        ++retries;
        spdlog::warn("{} request {} attempt {} failed ({}); retrying in {} ms", backend.name(), r,
                     attempt, res.error, delay);
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        delay = std::min(delay * 2, config.backoff_max_ms);
      }
      if (res.status != 200) {
        ++failed;
        {
          std::lock_guard lock(error_mutex);
          last_error = res.error;
        }
        for (int i = 0; i < n; ++i) batch.samples[first + static_cast<std::size_t>(i)].error = res.error;
        continue;
      }
      any_success = true;
      for (int i = 0; i < n; ++i) {
        auto& sample = batch.samples[first + static_cast<std::size_t>(i)];
        if (static_cast<std::size_t>(i) >= res.choices.size()) {
          sample.error = "backend returned fewer choices than requested";
          continue;
        }
        sample.text = res.choices[static_cast<std::size_t>(i)].text;
        sample.truncated = res.choices[static_cast<std::size_t>(i)].truncated;
        if (sample.truncated) sample.error = "TokenLimitExceeded: completion stopped at max_tokens";
      }
    }
  };

  const int threads = std::clamp(config.max_parallel, 1, requests);
  std::vector<std::jthread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  batch.retries = retries;
  batch.failed_requests = failed;
  if (!any_success) {
    throw BackendUnavailable(backend.name() + " backend failed after " +
                             std::to_string(config.max_attempts) + " attempt(s): " + last_error);
  }
  if (batch.retries > 0) spdlog::info("{} backend: {} retries", backend.name(), batch.retries);
  return batch;
}

// --- extraction ----------------------------------------------------------

FixSuggestion extract_fix(const Prompt& prompt, std::string_view completion, std::size_t sample_index) {
  const auto text = normalize_line_endings(prompt.expected_signature + " {\n" + std::string(completion));
  FixSuggestion s;
  s.method_text = extract_balanced(text, 0, "completion");
  s.sample_index = sample_index;
  s.raw_completion = std::string(completion);
  s.prompt_variant = prompt.variant;
  return s;
}

FixSuggestion extract_reasoning_fix(const Prompt& prompt, std::string_view completion,
                                    std::size_t sample_index) {
  const auto text = normalize_line_endings(completion);
  const auto close = text.find("*/");
  if (close == std::string::npos) throw NoCommentClose("completion never closes the instruction comment");
  const std::string_view rest = std::string_view(text).substr(close + 2);

  std::optional<std::size_t> start;
  bool saw_paren = false;
  bool found = false;
  for (const auto& t : lex_csharp(rest).tokens) {
    if (t.kind == LexKind::kComment || t.kind == LexKind::kDirective) continue;
    if (!start) start = t.begin;
    if (t.kind == LexKind::kPunct && t.text == "(") saw_paren = true;
    if (t.kind == LexKind::kPunct && t.text == "{") {
      found = saw_paren;
      break;
    }
  }
  if (!start || !found) throw NoMethodFound("no method declaration after the comment");

  FixSuggestion s;
  s.reasoning_text = std::string(trim(std::string_view(text).substr(0, close)));
  s.method_text = extract_balanced(rest, *start, "reasoning completion");
  s.sample_index = sample_index;
  s.raw_completion = std::string(completion);
  s.prompt_variant = prompt.variant;
  return s;
}

FixSuggestion extract_suggestion(const Prompt& prompt, std::string_view completion,
                                 std::size_t sample_index) {
  if (prompt.variant == PromptVariant::kReasoning) {
    return extract_reasoning_fix(prompt, completion, sample_index);
  }
  return extract_fix(prompt, completion, sample_index);
}

std::vector<FixSuggestion> dedupe_suggestions(const std::vector<FixSuggestion>& suggestions) {
  std::vector<const FixSuggestion*> ordered;
  for (const auto& s : suggestions) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const FixSuggestion* a, const FixSuggestion* b) {
    return a->sample_index < b->sample_index;
  });
  std::vector<FixSuggestion> out;
  std::map<std::string, std::size_t> by_key;
  for (const auto* s : ordered) {
    auto key = normalize_code(s->method_text);
    const auto it = by_key.find(key);
    if (it != by_key.end()) {
      out[it->second].multiplicity += s->multiplicity;
      continue;
    }
    by_key.emplace(std::move(key), out.size());
    out.push_back(*s);
  }
  return out;
}

GenerationResult generate(const Prompt& prompt, const SamplingConfig& config, Backend& backend) {
  const auto batch = complete(prompt, config, backend);
  GenerationResult result;
  result.retries = batch.retries;
  for (const auto& sample : batch.samples) {
    if (!sample.text) {
      result.failures.push_back({sample.index, sample.error.value_or("no completion")});
      continue;
    }
    try {
      result.suggestions.push_back(extract_suggestion(prompt, *sample.text, sample.index));
    } catch (const Error& e) {
      result.failures.push_back({sample.index, e.what()});
    }
  }
  return result;
}

}  // namespace perfix
