#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perfix/prompting.hpp"

namespace perfix {

struct SamplingConfig {
  double temperature = 0.7;
  int max_tokens = 1024;
  int num_samples = 100;
  std::string model_name = "gpt-3.5-turbo";
  double timeout_s = 60.0;
  int max_parallel = 8;
  /// Samples requested per call (the `n` parameter).
  int samples_per_request = 10;
  int max_attempts = 4;
  int backoff_initial_ms = 500;
  int backoff_max_ms = 16000;
};

struct BackendRequest {
  std::string prompt;
  int n = 1;
  std::size_t first_sample_index = 0;
  double temperature = 0.7;
  int max_tokens = 1024;
  std::string model;
  double timeout_s = 60.0;
};

struct BackendChoice {
  std::string text;
  /// The model stopped at max_tokens.
  bool truncated = false;
};

struct BackendResponse {
  /// HTTP-style status; 0 for transport failures.
  int status = 200;
  std::vector<BackendChoice> choices;
  std::string error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse send(const BackendRequest& request) = 0;
  virtual std::string name() const = 0;
};

enum class HttpApi { kChat, kCompletions };

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  HttpApi api = HttpApi::kChat;
  /// Defaults to the PERFIX_API_KEY environment variable.
  std::optional<std::string> api_key;
};

/// OpenAI-compatible endpoint.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  BackendResponse send(const BackendRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendConfig config_;
  std::string scheme_host_;
  std::string path_prefix_;
};

/// Scripted completions keyed by the sha256 of the prompt text. File format:
/// JSON Lines of {"prompt_sha256": hex or "*", "completions": [...],
/// "failures": [status, ...]}. Sample i receives completions[i % size]; the
/// first calls for a prompt fail with the listed statuses.
class MockBackend : public Backend {
 public:
  struct Script {
    std::vector<std::string> completions;
    std::vector<int> failures;
    std::vector<bool> truncated;
  };

  MockBackend() = default;
  explicit MockBackend(const std::filesystem::path& path);
  /// Adds the scripts of a JSON Lines document. Throws IoError.
  void load(std::string_view jsonl);

  void add(std::string prompt_sha256, Script script);
  BackendResponse send(const BackendRequest& request) override;
  std::string name() const override { return "mock"; }
  std::size_t calls() const;

 private:
  std::map<std::string, Script> scripts_;
  std::map<std::string, std::size_t> failures_served_;
  std::size_t calls_ = 0;
  mutable std::mutex mutex_;
};

struct SampleResult {
  std::size_t index = 0;
  std::optional<std::string> text;
  bool truncated = false;
  std::optional<std::string> error;
};

struct CompletionBatch {
  std::vector<SampleResult> samples;
  int retries = 0;
  int failed_requests = 0;
};

/// Issues ceil(num_samples / samples_per_request) requests, at most
/// max_parallel at a time, retrying 429, 5xx and transport failures with
/// exponential backoff. Throws BackendUnavailable when every request fails.
CompletionBatch complete(const Prompt& prompt, const SamplingConfig& config, Backend& backend);

struct FixSuggestion {
  std::string method_text;
  std::size_t sample_index = 0;
  std::string raw_completion;
  std::optional<std::string> reasoning_text;
  PromptVariant prompt_variant = PromptVariant::kRapGen;
  /// Number of samples collapsed into this one by dedupe_suggestions.
  std::size_t multiplicity = 1;
};

/// Appends the completion to `signature {\n` and cuts where the braces
/// balance. Throws UnbalancedCompletion.
FixSuggestion extract_fix(const Prompt& prompt, std::string_view completion,
                          std::size_t sample_index = 0);

/// Splits at the first `*/`, then extracts the first method after it. Throws
/// NoCommentClose, NoMethodFound or UnbalancedCompletion.
FixSuggestion extract_reasoning_fix(const Prompt& prompt, std::string_view completion,
                                    std::size_t sample_index = 0);

/// Dispatches on the prompt variant.
FixSuggestion extract_suggestion(const Prompt& prompt, std::string_view completion,
                                 std::size_t sample_index = 0);

/// Collapses suggestions equal up to whitespace and comments, keeping the
/// lowest sample_index. Output is ordered by sample_index.
std::vector<FixSuggestion> dedupe_suggestions(const std::vector<FixSuggestion>& suggestions);

struct ExtractionFailure {
  std::size_t sample_index = 0;
  std::string error;
};

struct GenerationResult {
  /// One per successfully extracted sample, ordered by sample_index.
  std::vector<FixSuggestion> suggestions;
  std::vector<ExtractionFailure> failures;
  int retries = 0;
};

GenerationResult generate(const Prompt& prompt, const SamplingConfig& config, Backend& backend);

}  // namespace perfix
