#include "perfix/retrieval.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "perfix/errors.hpp"

namespace perfix {
namespace {

struct Featurizer {
  const SourceFile& file;
  const CommonVocabulary& vocab;
  FeatureBag bag;
  std::unordered_map<std::string, int> var_index;

  void add(std::string feature) { ++bag.features[std::move(feature)]; }

  void run(const SyntaxNode& root) {
    std::string previous;
    for (const auto& token : leaf_tokens(file, root)) {
      const auto cls = classify_token(token, vocab);
      const auto parent = token.node.parent();
      const std::string parent_kind = parent.is_null() ? "" : std::string(parent.kind());
      switch (cls) {
        case TokenClass::kKeyword:
        case TokenClass::kCommonIdentifier: {
          add("T:" + token.text);
          add("P:" + token.text + "\xe2\x86\x91" + parent_kind);
          if (!previous.empty()) add("S:" + previous + "\xe2\x86\x92" + token.text);
          previous = token.text;
          break;
        }
        case TokenClass::kCommonLiteral:
          add("P:" + token.text + "\xe2\x86\x91" + parent_kind);
          break;
        case TokenClass::kProjectIdentifier: {
          const auto [it, inserted] =
              var_index.emplace(token.text, static_cast<int>(var_index.size()));
          add("P:#VAR\xe2\x86\x91" + parent_kind);
          add("V:#VAR_" + std::to_string(it->second) + "@" + parent_kind);
          break;
        }
        case TokenClass::kProjectLiteral:
          add("P:#LIT\xe2\x86\x91" + parent_kind);
          break;
        default:
          break;
      }
    }
  }
};

}  // namespace

std::size_t FeatureBag::total() const {
  std::size_t n = 0;
  for (const auto& [f, c] : features) n += static_cast<std::size_t>(c);
  return n;
}

FeatureBag featurize(const SourceFile& file, const SyntaxNode& root, const CommonVocabulary& vocab) {
  Featurizer f{file, vocab, {}, {}};
  f.run(root);
  return std::move(f.bag);
}

FeatureBag featurize(const SourceMethod& method, const CommonVocabulary& vocab) {
  return featurize(*method.file, method.tree, vocab);
}

double similarity(const FeatureBag& a, const FeatureBag& b) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto ia = a.features.begin();
  auto ib = b.features.begin();
  while (ia != a.features.end() || ib != b.features.end()) {
    if (ib == b.features.end() || (ia != a.features.end() && ia->first < ib->first)) {
      uni += static_cast<std::size_t>(ia->second);
      ++ia;
    } else if (ia == a.features.end() || ib->first < ia->first) {
      uni += static_cast<std::size_t>(ib->second);
      ++ib;
    } else {
      inter += static_cast<std::size_t>(std::min(ia->second, ib->second));
      uni += static_cast<std::size_t>(std::max(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<ScoredEntry> rank_entries(const KnowledgeBase& kb, const BugPattern& pattern,
                                      const SourceMethod& query, const CommonVocabulary& vocab) {
  const auto& candidates = kb.lookup(pattern);
  const auto query_bag = featurize(query, vocab);
  std::vector<ScoredEntry> scored;
  scored.reserve(candidates.size());
  for (const auto& entry : candidates) {
    double score = 0.0;
    try {
      score = similarity(query_bag, featurize(parse_method_text(entry.before), vocab));
    } catch (const ParseError&) {
      score = 0.0;
    }
    scored.push_back({&entry, score});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.entry->repo_id, a.entry->commit_id) < std::tie(b.entry->repo_id, b.entry->commit_id);
  });
  return scored;
}

RetrievalResult retrieve(const KnowledgeBase& kb, const SourceMethod& buggy_method,
                         const Statement& buggy_line, const CommonVocabulary& vocab) {
  auto pattern = abstract_line(*buggy_method.file, buggy_line, vocab);
  const auto ranked = rank_entries(kb, pattern, buggy_method, vocab);
  if (ranked.empty()) throw PatternNotFound("no knowledge-base entry for pattern '" + pattern.raw + "'");
  RetrievalResult result;
  result.entry = *ranked.front().entry;
  result.score = ranked.front().score;
  result.rank = 1;
  result.candidates_considered = ranked.size();
  result.pattern = std::move(pattern);
  return result;
}

}  // namespace perfix
