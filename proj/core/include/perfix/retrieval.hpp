#pragma once

#include <map>
#include <string>
#include <vector>

#include "perfix/knowledge_base.hpp"

namespace perfix {

/// Multiset of structural features. Feature families are prefixed:
/// `T:` tokens, `P:` token-to-parent, `S:` token-to-next-token, `V:` variable use.
struct FeatureBag {
  std::map<std::string, int> features;

  std::size_t total() const;
  bool contains(const std::string& feature) const { return features.contains(feature); }
  bool operator==(const FeatureBag&) const = default;
};

FeatureBag featurize(const SourceFile& file, const SyntaxNode& root, const CommonVocabulary& vocab);
FeatureBag featurize(const SourceMethod& method, const CommonVocabulary& vocab);

/// Multiset Jaccard: sum of minimum counts over sum of maximum counts. Two
/// empty bags score 1.
double similarity(const FeatureBag& a, const FeatureBag& b);

struct RetrievalResult {
  KbEntry entry;
  double score = 0.0;
  int rank = 1;
  std::size_t candidates_considered = 0;
  BugPattern pattern;
};

struct ScoredEntry {
  const KbEntry* entry = nullptr;
  double score = 0.0;
};

/// Entries under `pattern` ordered by descending score, ties by (repo_id, commit_id).
std::vector<ScoredEntry> rank_entries(const KnowledgeBase& kb, const BugPattern& pattern,
                                      const SourceMethod& query, const CommonVocabulary& vocab);

/// Throws PatternNotFound when the buggy line's pattern has no entries.
RetrievalResult retrieve(const KnowledgeBase& kb, const SourceMethod& buggy_method,
                         const Statement& buggy_line, const CommonVocabulary& vocab);

}  // namespace perfix
