#include "perfix/knowledge_base.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <tuple>

#include "perfix/errors.hpp"
#include "perfix/util.hpp"

namespace perfix {
namespace {

using json = nlohmann::ordered_json;

struct OrderedIds {
  std::vector<std::string> order;
  std::map<std::string, int> counts;

  void add(const std::string& id) {
    if (counts[id]++ == 0) order.push_back(id);
  }
};

void harvest(const SourceMethod& method, const std::set<std::string_view>& other_side,
             const CommonVocabulary& vocab, OrderedIds& out) {
  for (const auto& stmt : method.statements) {
    if (other_side.contains(stmt.text)) continue;
    for (const auto& token : statement_tokens(*method.file, stmt)) {
      if (token.kind == LeafKind::kIdentifier && vocab.has_identifier(token.text)) out.add(token.text);
    }
  }
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

TransformInstruction make_instruction(std::vector<std::string> removed, std::vector<std::string> added,
                                      const std::vector<std::string>& removed_shown,
                                      const std::vector<std::string>& added_shown) {
  TransformInstruction t;
  if (removed.empty() && added.empty()) {
    throw EmptyChange("no common identifier was added or removed");
  }
  if (removed.empty()) {
    t.category = InstructionCategory::kAddition;
    t.text = "PERF: Rewrite the above method with " + join_ids(added_shown) + ".";
  } else if (added.empty()) {
    t.category = InstructionCategory::kRemoval;
    t.text = "PERF: Rewrite the above method without " + join_ids(removed_shown) + ".";
  } else {
    t.category = InstructionCategory::kSwap;
    t.text = "PERF: Use " + join_ids(added_shown) + " instead of " + join_ids(removed_shown) +
             " in the above method.";
  }
  t.added = std::move(added);
  t.removed = std::move(removed);
  return t;
}

json entry_to_json(const KbEntry& e) {
  json j;
  j["pattern"] = e.pattern.raw;
  j["before"] = e.before;
  j["after"] = e.after;
  j["instruction"] = {{"category", std::string(to_string(e.instruction.category))},
                      {"added", e.instruction.added},
                      {"removed", e.instruction.removed},
                      {"text", e.instruction.text}};
  j["repo_id"] = e.repo_id;
  j["commit_id"] = e.commit_id;
  j["statement"] = e.statement;
  j["statement_index"] = e.statement_index;
  return j;
}

KbEntry entry_from_json(const json& j) {
  KbEntry e;
  e.pattern.raw = j.at("pattern").get<std::string>();
  e.before = j.at("before").get<std::string>();
  e.after = j.at("after").get<std::string>();
  const auto& t = j.at("instruction");
  e.instruction.category = category_from_string(t.at("category").get<std::string>());
  e.instruction.added = t.at("added").get<std::vector<std::string>>();
  e.instruction.removed = t.at("removed").get<std::vector<std::string>>();
  e.instruction.text = t.at("text").get<std::string>();
  e.repo_id = j.at("repo_id").get<std::string>();
  e.commit_id = j.at("commit_id").get<std::string>();
  e.statement = j.value("statement", std::string());
  e.statement_index = j.value("statement_index", std::size_t{0});
  return e;
}

bool entry_less(const KbEntry& a, const KbEntry& b) {
  return std::tie(a.repo_id, a.commit_id, a.before, a.after, a.statement_index) <
         std::tie(b.repo_id, b.commit_id, b.before, b.after, b.statement_index);
}

}  // namespace

std::string_view to_string(InstructionCategory category) {
  switch (category) {
    case InstructionCategory::kAddition: return "Addition";
    case InstructionCategory::kRemoval: return "Removal";
    case InstructionCategory::kSwap: return "Swap";
  }
  return "Removal";
}

InstructionCategory category_from_string(std::string_view text) {
  if (text == "Addition") return InstructionCategory::kAddition;
  if (text == "Removal") return InstructionCategory::kRemoval;
  if (text == "Swap") return InstructionCategory::kSwap;
  throw IoError("unknown instruction category '" + std::string(text) + "'");
}

IdentifierSets derive_identifier_sets(const MethodPair& pair, const CommonVocabulary& vocab) {
  std::set<std::string_view> before_texts;
  std::set<std::string_view> after_texts;
  for (const auto& s : pair.before.statements) before_texts.insert(s.text);
  for (const auto& s : pair.after.statements) after_texts.insert(s.text);

  OrderedIds removed;
  OrderedIds added;
  harvest(pair.before, after_texts, vocab, removed);
  harvest(pair.after, before_texts, vocab, added);

  IdentifierSets sets;
  for (const auto& id : removed.order) {
    if (!added.counts.contains(id)) {
      sets.removed.push_back(id);
      sets.removed_counts[id] = removed.counts[id];
    }
  }
  for (const auto& id : added.order) {
    if (!removed.counts.contains(id)) {
      sets.added.push_back(id);
      sets.added_counts[id] = added.counts[id];
    }
  }
  return sets;
}

std::vector<std::string> cap_identifiers(const std::vector<std::string>& ids,
                                         const std::map<std::string, int>& counts,
                                         std::size_t limit) {
  if (ids.size() <= limit) return ids;
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto count = [&](std::size_t i) {
    const auto it = counts.find(ids[i]);
    return it == counts.end() ? 0 : it->second;
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return count(a) > count(b); });
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (const auto i : idx) out.push_back(ids[i]);
  return out;
}

TransformInstruction derive_instruction(const IdentifierSets& sets) {
  return make_instruction(sets.removed, sets.added, cap_identifiers(sets.removed, sets.removed_counts),
                          cap_identifiers(sets.added, sets.added_counts));
}

TransformInstruction derive_instruction(const std::vector<std::string>& removed,
                                        const std::vector<std::string>& added) {
  return make_instruction(removed, added, cap_identifiers(removed, {}), cap_identifiers(added, {}));
}

KnowledgeBase::KnowledgeBase(Map entries, std::string vocab_hash)
    : entries_(std::move(entries)), vocab_hash_(std::move(vocab_hash)) {
  for (const auto& [key, list] : entries_) count_ += list.size();
}

const std::vector<KbEntry>& KnowledgeBase::lookup(const BugPattern& pattern) const {
  return lookup(pattern.raw);
}

const std::vector<KbEntry>& KnowledgeBase::lookup(std::string_view raw) const {
  static const std::vector<KbEntry> kEmpty;
  const auto it = entries_.find(std::string(raw));
  return it == entries_.end() ? kEmpty : it->second;
}

KnowledgeBase build_kb(const std::vector<MethodPair>& pairs, const CommonVocabulary& vocab,
                       int min_projects, KbBuildStats* stats) {
  KbBuildStats local;
  KnowledgeBase::Map grouped;
  for (const auto& pair : pairs) {
    ++local.pairs;
    TransformInstruction instruction;
    try {
      instruction = derive_instruction(derive_identifier_sets(pair, vocab));
    } catch (const EmptyChange&) {
      ++local.pairs_without_change;
      continue;
    }
    std::set<std::string> seen;
    for (const auto& stmt : diff_removed_statements(pair)) {
      auto pattern = abstract_line(*pair.before.file, stmt, vocab);
      if (pattern.is_bare()) {
        ++local.bare_patterns;
        continue;
      }
      if (!seen.insert(pattern.raw).second) continue;
      const auto& stmts = pair.before.statements;
      const auto index = static_cast<std::size_t>(
          std::find_if(stmts.begin(), stmts.end(),
                       [&](const Statement& s) { return s.span == stmt.span; }) -
          stmts.begin());
      auto key = pattern.raw;
      grouped[key].push_back(KbEntry{std::move(pattern), std::string(pair.before.text()),
                                     std::string(pair.after.text()), instruction, pair.repo_id,
                                     pair.commit_id, stmt.text, index});
    }
  }

  for (auto it = grouped.begin(); it != grouped.end();) {
    std::set<std::string_view> repos;
    for (const auto& e : it->second) repos.insert(e.repo_id);
    if (static_cast<int>(repos.size()) < min_projects) {
      ++local.patterns_below_threshold;
      it = grouped.erase(it);
      continue;
    }
    std::stable_sort(it->second.begin(), it->second.end(), entry_less);
    ++local.patterns_kept;
    ++it;
  }
  spdlog::info("kb: {} pairs, {} without identifier change, {} bare patterns, {} patterns kept, {} below {} projects",
               local.pairs, local.pairs_without_change, local.bare_patterns, local.patterns_kept,
               local.patterns_below_threshold, min_projects);
  if (stats) *stats = local;
  return KnowledgeBase(std::move(grouped), vocab.hash());
}

std::string serialize_kb(const KnowledgeBase& kb) {
  json header;
  header["kb_version"] = kKbVersion;
  header["vocab_hash"] = kb.vocab_hash();
  header["entries"] = kb.size();
  if (!kb.config_json().empty()) header["config"] = json::parse(kb.config_json());
  std::string out = header.dump();
  out += '\n';
  for (const auto& [key, list] : kb.entries()) {
    for (const auto& e : list) {
      out += entry_to_json(e).dump();
      out += '\n';
    }
  }
  return out;
}

KnowledgeBase parse_kb(std::string_view text) {
  std::uint64_t offset = 0;
  auto next_line = [&](std::string_view& line) {
    if (offset >= text.size()) return false;
    const auto nl = text.find('\n', offset);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    line = text.substr(offset, end - offset);
    return true;
  };
  auto advance = [&](std::string_view line) { offset += line.size() + 1; };

  std::string_view line;
  if (!next_line(line)) throw IoError("empty knowledge-base file", 0);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception&) {
    throw IoError("unreadable knowledge-base header", 0);
  }
  if (!header.is_object() || !header.contains("kb_version")) {
    throw VersionMismatch("knowledge-base header has no kb_version");
  }
  if (header["kb_version"] != kKbVersion) {
    throw VersionMismatch("knowledge-base version " + header["kb_version"].dump() +
                          " is not supported (expected " + std::to_string(kKbVersion) + ")");
  }
  const auto expected = header.value("entries", std::size_t{0});
  advance(line);

  KnowledgeBase::Map map;
  std::size_t count = 0;
  while (next_line(line)) {
    const auto line_offset = offset;
    const bool terminated = line_offset + line.size() < text.size();
    if (trim(line).empty()) {
      advance(line);
      continue;
    }
    if (!terminated) throw IoError("truncated knowledge-base entry", line_offset);
    try {
      auto e = entry_from_json(json::parse(line));
      map[e.pattern.raw].push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw IoError(std::string("malformed knowledge-base entry: ") + ex.what(), line_offset);
    }
    ++count;
    advance(line);
  }
  if (count != expected) {
    throw IoError("knowledge-base holds " + std::to_string(count) + " of " +
                      std::to_string(expected) + " entries (truncated)",
                  text.size());
  }
  KnowledgeBase kb(std::move(map), header.value("vocab_hash", std::string()));
  if (header.contains("config")) kb.set_config_json(header["config"].dump());
  return kb;
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  write_file(path, serialize_kb(kb));
}

KnowledgeBase load_kb(const std::filesystem::path& path) { return parse_kb(read_file(path)); }

std::vector<std::string> verify_kb(const KnowledgeBase& kb, const CommonVocabulary& vocab) {
  std::vector<std::string> problems;
  for (const auto& [key, list] : kb.entries()) {
    for (const auto& e : list) {
      const auto where = e.repo_id + "@" + e.commit_id.substr(0, 12);
      try {
        const auto before = parse_method_text(e.before);
        if (e.statement_index >= before.statements.size()) {
          problems.push_back(where + ": statement index out of range");
          continue;
        }
        const auto& stmt = before.statements[e.statement_index];
        if (stmt.text != e.statement) {
          problems.push_back(where + ": stored statement does not match the before method");
          continue;
        }
        const auto pattern = abstract_line(*before.file, stmt, vocab);
        if (pattern.raw != key) {
          problems.push_back(where + ": statement abstracts to '" + pattern.raw + "', key is '" + key + "'");
        }
        const auto after = parse_method_text(e.after);
        for (const auto& s : after.statements) {
          if (s.text == e.statement) {
            problems.push_back(where + ": removed statement still present in the after method");
            break;
          }
        }
      } catch (const ParseError& ex) {
        problems.push_back(where + ": " + ex.what());
      }
    }
  }
  return problems;
}

}  // namespace perfix
