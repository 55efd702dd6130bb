#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "perfix/code_model.hpp"
#include "perfix/vocabulary.hpp"

namespace perfix {

inline constexpr std::string_view kPlaceholder = "<∅>";

struct PatternToken {
  TokenClass cls = TokenClass::kPlaceholder;
  std::string text;

  bool operator==(const PatternToken&) const = default;
};

/// An abstracted statement. Adjacent placeholders never occur.
struct BugPattern {
  std::vector<PatternToken> tokens;
  std::string raw;

  static BugPattern from_tokens(std::vector<PatternToken> tokens);

  /// True when no common identifier survived abstraction.
  bool is_bare() const;

  bool operator==(const BugPattern& other) const { return tokens == other.tokens; }
};

/// Canonical rendering: single spaces, except none before `. , ( ) ; ] >` and
/// none after `( [ < .`.
std::string render_pattern(const std::vector<PatternToken>& tokens);

/// Keeps keywords, syntax and common leaves; replaces project leaves and any
/// subtree without a common identifier by a placeholder.
BugPattern abstract_line(const SourceFile& file, const Statement& stmt,
                         const CommonVocabulary& vocab);

/// Parses `text` as a statement (or as a control-flow header when followed by
/// an empty body) and abstracts the first statement. Throws ParseError.
BugPattern abstract_statement_text(std::string_view text, const CommonVocabulary& vocab);

/// Re-abstracts a rendered pattern, reading each placeholder as a fresh
/// project identifier. Throws ParseError when the pattern does not parse.
BugPattern reabstract(const BugPattern& pattern, const CommonVocabulary& vocab);

}  // namespace perfix
