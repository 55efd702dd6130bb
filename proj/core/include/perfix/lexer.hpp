#pragma once

// Lightweight C# lexer. It never fails: unterminated strings or comments run
// to the end of input and the result is marked incomplete. Used wherever text
// is not (or not yet) a parseable program, such as raw model completions.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace perfix {

enum class LexKind {
  kIdentifier,
  kKeyword,
  kNumber,
  kString,
  kChar,
  kPunct,
  kComment,
  kDirective,
};

struct LexToken {
  LexKind kind;
  std::size_t begin;
  std::size_t end;
  std::string_view text;
};

struct LexResult {
  std::vector<LexToken> tokens;
  /// False when a string, character literal or block comment is unterminated.
  bool complete = true;
};

LexResult lex_csharp(std::string_view source);

bool is_csharp_keyword(std::string_view word);
const std::vector<std::string>& csharp_keywords();

/// Code tokens only (comments and directives dropped).
std::vector<std::string> code_tokens(std::string_view source);

/// Code tokens joined with single spaces.
std::string normalize_code(std::string_view source);

/// Scans from `from` tracking curly-brace depth outside literals and comments.
/// Returns one past the `}` that brings the depth back to zero after the first
/// `{`, or nullopt when that never happens.
std::optional<std::size_t> find_balanced_end(std::string_view source, std::size_t from = 0);

/// Replaces CRLF and lone CR with LF.
std::string normalize_line_endings(std::string_view text);

}  // namespace perfix
