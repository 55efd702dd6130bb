#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "perfix/abstraction.hpp"
#include "perfix/mining.hpp"
#include "perfix/vocabulary.hpp"

namespace perfix {

enum class InstructionCategory { kAddition, kRemoval, kSwap };

std::string_view to_string(InstructionCategory category);
InstructionCategory category_from_string(std::string_view text);

/// Identifiers shown per list in instruction text.
inline constexpr std::size_t kMaxListedIdentifiers = 6;

struct TransformInstruction {
  InstructionCategory category = InstructionCategory::kRemoval;
  /// I_m' : common identifiers only in after-side diff statements.
  std::vector<std::string> added;
  /// I_m : common identifiers only in before-side diff statements.
  std::vector<std::string> removed;
  std::string text;

  bool operator==(const TransformInstruction&) const = default;
};

struct IdentifierSets {
  /// I_m, first-occurrence order.
  std::vector<std::string> removed;
  /// I_m', first-occurrence order.
  std::vector<std::string> added;
  /// Occurrence counts over the diff statements, used when capping lists.
  std::map<std::string, int> removed_counts;
  std::map<std::string, int> added_counts;
};

IdentifierSets derive_identifier_sets(const MethodPair& pair, const CommonVocabulary& vocab);

/// Throws EmptyChange when both lists are empty.
TransformInstruction derive_instruction(const IdentifierSets& sets);
TransformInstruction derive_instruction(const std::vector<std::string>& removed,
                                        const std::vector<std::string>& added);

/// Keeps at most `limit` identifiers, preferring higher counts and earlier
/// occurrence, and returns them in their original order.
std::vector<std::string> cap_identifiers(const std::vector<std::string>& ids,
                                         const std::map<std::string, int>& counts,
                                         std::size_t limit = kMaxListedIdentifiers);

struct KbEntry {
  BugPattern pattern;
  std::string before;
  std::string after;
  TransformInstruction instruction;
  std::string repo_id;
  std::string commit_id;
  /// The removed statement the pattern was abstracted from.
  std::string statement;
  std::size_t statement_index = 0;

  bool operator==(const KbEntry& o) const {
    return pattern.raw == o.pattern.raw && before == o.before && after == o.after &&
           instruction == o.instruction && repo_id == o.repo_id && commit_id == o.commit_id &&
           statement == o.statement && statement_index == o.statement_index;
  }
};

inline constexpr int kKbVersion = 1;

class KnowledgeBase {
 public:
  using Map = std::map<std::string, std::vector<KbEntry>>;

  KnowledgeBase() = default;
  KnowledgeBase(Map entries, std::string vocab_hash);

  /// Exact match on the rendered pattern.
  const std::vector<KbEntry>& lookup(const BugPattern& pattern) const;
  const std::vector<KbEntry>& lookup(std::string_view raw) const;

  const Map& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  const std::string& vocab_hash() const noexcept { return vocab_hash_; }

  /// Extra JSON object (as text) echoed into the file header under "config".
  const std::string& config_json() const noexcept { return config_json_; }
  void set_config_json(std::string json) { config_json_ = std::move(json); }

  bool operator==(const KnowledgeBase& o) const {
    return entries_ == o.entries_ && vocab_hash_ == o.vocab_hash_;
  }

 private:
  Map entries_;
  std::string vocab_hash_;
  std::string config_json_;
  std::size_t count_ = 0;
};

struct KbBuildStats {
  std::size_t pairs = 0;
  std::size_t pairs_without_change = 0;
  std::size_t bare_patterns = 0;
  std::size_t patterns_kept = 0;
  std::size_t patterns_below_threshold = 0;
};

KnowledgeBase build_kb(const std::vector<MethodPair>& pairs, const CommonVocabulary& vocab,
                       int min_projects = 2, KbBuildStats* stats = nullptr);

std::string serialize_kb(const KnowledgeBase& kb);
/// Throws VersionMismatch or IoError (with the byte offset of the bad line).
KnowledgeBase parse_kb(std::string_view text);

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_kb(const std::filesystem::path& path);

/// Re-derives every key from its stored statement. Returns one message per
/// inconsistent entry.
std::vector<std::string> verify_kb(const KnowledgeBase& kb, const CommonVocabulary& vocab);

}  // namespace perfix
