#pragma once

// Buggy method in, fix suggestions out: localize, retrieve, prompt, generate.

#include <optional>

#include "perfix/generation.hpp"
#include "perfix/knowledge_base.hpp"
#include "perfix/retrieval.hpp"

namespace perfix {

/// Either a 1-based line of the method's file or a statement index. When
/// neither is set, `after` (if given) localizes the line by diff.
struct LineSelector {
  std::optional<int> source_line;
  std::optional<int> statement_index;
};

/// Throws UsageError when the selection does not name a statement, and
/// NoDifference when localization by diff fails.
std::size_t select_statement(const SourceMethod& method, const LineSelector& selector,
                             const SourceMethod* after = nullptr);

struct PromptOptions {
  PromptVariant variant = PromptVariant::kRapGen;
  /// Use the static prompt when retrieval finds no pattern.
  bool fallback_static = false;
};

struct PreparedPrompt {
  Prompt prompt;
  std::size_t statement_index = 0;
  Statement line;
  std::string pattern;
  std::optional<RetrievalResult> retrieval;
  bool fell_back = false;
};

/// Throws PatternNotFound (when not falling back), NoHotspotIdentifier or
/// CommentCollision.
PreparedPrompt prepare_prompt(const SourceMethod& method, std::size_t statement_index,
                              const KnowledgeBase& kb, const CommonVocabulary& vocab,
                              const PromptOptions& options);

struct SuggestResult {
  PreparedPrompt prepared;
  GenerationResult generation;
  /// generation.suggestions after dedupe_suggestions.
  std::vector<FixSuggestion> suggestions;
};

SuggestResult suggest(const SourceMethod& method, std::size_t statement_index,
                      const KnowledgeBase& kb, const CommonVocabulary& vocab,
                      const PromptOptions& options, const SamplingConfig& sampling,
                      Backend& backend);

}  // namespace perfix
