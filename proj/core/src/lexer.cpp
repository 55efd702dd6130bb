#include "perfix/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace perfix {
namespace {

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> set = [] {
    std::unordered_set<std::string_view> s;
    for (const auto& k : csharp_keywords()) s.insert(k);
    return s;
  }();
  return set;
}

bool ident_start(unsigned char c) { return c == '_' || std::isalpha(c) || c >= 0x80; }
bool ident_part(unsigned char c) { return c == '_' || std::isalnum(c) || c >= 0x80; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    LexResult result;
    bool line_start = true;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        line_start = true;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      const std::size_t begin = pos_;
      LexKind kind = lex_one(line_start);
      line_start = false;
      result.tokens.push_back(LexToken{kind, begin, pos_, src_.substr(begin, pos_ - begin)});
    }
    result.complete = complete_;
    return result;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  LexKind lex_one(bool line_start) {
    const char c = peek();
    if (c == '/' && peek(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return LexKind::kComment;
    }
    if (c == '/' && peek(1) == '*') {
      const auto close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        pos_ = src_.size();
        complete_ = false;
      } else {
        pos_ = close + 2;
      }
      return LexKind::kComment;
    }
    if (c == '#' && line_start) {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return LexKind::kDirective;
    }
    if (is_string_start()) {
      scan_string();
      return LexKind::kString;
    }
    if (c == '\'') {
      scan_char();
      return LexKind::kChar;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      scan_number();
      return LexKind::kNumber;
    }
    if (c == '@' && ident_start(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return LexKind::kIdentifier;
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      const std::size_t begin = pos_;
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return is_csharp_keyword(src_.substr(begin, pos_ - begin)) ? LexKind::kKeyword
                                                                 : LexKind::kIdentifier;
    }
    scan_punct();
    return LexKind::kPunct;
  }

  /// String prefixes: `"`, `@"`, `$"`, `$@"`, `@$"`, `$$"""` ...
  bool is_string_start() const {
    std::size_t i = pos_;
    while (i < src_.size() && (src_[i] == '$' || src_[i] == '@')) ++i;
    if (i >= src_.size() || src_[i] != '"') return false;
    const auto prefix = src_.substr(pos_, i - pos_);
    return std::count(prefix.begin(), prefix.end(), '@') <= 1;
  }

  void scan_string() {
    std::size_t dollars = 0;
    bool verbatim = false;
    while (peek() == '$' || peek() == '@') {
      if (peek() == '$') ++dollars;
      if (peek() == '@') verbatim = true;
      ++pos_;
    }
    std::size_t quotes = 0;
    while (peek(quotes) == '"') ++quotes;
    if (quotes >= 3 && !verbatim) {
      scan_raw_string(quotes, dollars);
      return;
    }
    ++pos_;  // opening quote
    scan_string_body(verbatim, dollars > 0);
  }

  void scan_string_body(bool verbatim, bool interpolated) {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (!verbatim && c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '"') {
        if (verbatim && peek(1) == '"') {
          pos_ += 2;
          continue;
        }
        ++pos_;
        return;
      }
      if (!verbatim && c == '\n') {
        // Regular strings cannot span lines; treat as terminated here.
        complete_ = false;
        return;
      }
      if (interpolated && c == '{') {
        if (peek(1) == '{') {
          pos_ += 2;
          continue;
        }
        ++pos_;
        scan_interpolation_hole(1);
        continue;
      }
      ++pos_;
    }
    complete_ = false;
  }

  /// Lexes code inside an interpolation hole until the matching close brace.
  void scan_interpolation_hole(std::size_t close_braces) {
    int depth = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '}' && depth == 0) {
        pos_ += std::min(close_braces, src_.size() - pos_);
        return;
      }
      if (c == '{') {
        ++depth;
        ++pos_;
        continue;
      }
      if (c == '}') {
        --depth;
        ++pos_;
        continue;
      }
      if (c == '/' && (peek(1) == '/' || peek(1) == '*')) {
        lex_one(false);
        continue;
      }
      if (is_string_start()) {
        scan_string();
        continue;
      }
      if (c == '\'') {
        scan_char();
        continue;
      }
      ++pos_;
    }
    complete_ = false;
  }

  void scan_raw_string(std::size_t quotes, std::size_t dollars) {
    pos_ += quotes;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '"') {
        std::size_t run = 0;
        while (peek(run) == '"') ++run;
        if (run >= quotes) {
          pos_ += run;
          return;
        }
        pos_ += run;
        continue;
      }
      if (dollars > 0 && src_[pos_] == '{') {
        std::size_t run = 0;
        while (peek(run) == '{') ++run;
        if (run >= dollars) {
          pos_ += run;
          scan_interpolation_hole(dollars);
          continue;
        }
        pos_ += run;
        continue;
      }
      ++pos_;
    }
    complete_ = false;
  }

  void scan_char() {
    ++pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '\'') {
        ++pos_;
        return;
      }
      if (c == '\n') {
        complete_ = false;
        return;
      }
      ++pos_;
    }
    complete_ = false;
  }

  void scan_number() {
    while (pos_ < src_.size()) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '.') {
        if (c == '.' && !std::isdigit(static_cast<unsigned char>(peek(1)))) break;
        ++pos_;
      } else {
        break;
      }
    }
  }

  void scan_punct() {
    static constexpr std::string_view kMulti[] = {
        ">>>=", "<<=", ">>=", "?\?=", "...", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
        "+=",   "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "<<", "??", "?.", "::", "->", "..",
    };
    for (const auto op : kMulti) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return;
      }
    }
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  bool complete_ = true;
};

}  // namespace

const std::vector<std::string>& csharp_keywords() {
  static const std::vector<std::string> keywords = {
      "abstract",  "as",        "base",     "bool",      "break",     "byte",      "case",
      "catch",     "char",      "checked",  "class",     "const",     "continue",  "decimal",
      "default",   "delegate",  "do",       "double",    "else",      "enum",      "event",
      "explicit",  "extern",    "false",    "finally",   "fixed",     "float",     "for",
      "foreach",   "goto",      "if",       "implicit",  "in",        "int",       "interface",
      "internal",  "is",        "lock",     "long",      "namespace", "new",       "null",
      "object",    "operator",  "out",      "override",  "params",    "private",   "protected",
      "public",    "readonly",  "ref",      "return",    "sbyte",     "sealed",    "short",
      "sizeof",    "stackalloc", "static",  "string",    "struct",    "switch",    "this",
      "throw",     "true",      "try",      "typeof",    "uint",      "ulong",     "unchecked",
      "unsafe",    "ushort",    "using",    "virtual",   "void",      "volatile",  "while",
      // contextual
      "add",       "alias",     "ascending", "async",    "await",     "by",        "descending",
      "dynamic",   "equals",    "from",     "get",       "global",    "group",     "init",
      "into",      "join",      "let",      "nameof",    "nint",      "notnull",   "nuint",
      "on",        "orderby",   "partial",  "record",    "remove",    "required",  "select",
      "set",       "unmanaged", "value",    "var",       "when",      "where",     "with",
      "yield",
  };
  return keywords;
}

bool is_csharp_keyword(std::string_view word) { return keyword_set().contains(word); }

LexResult lex_csharp(std::string_view source) { return Lexer(source).run(); }

std::vector<std::string> code_tokens(std::string_view source) {
  std::vector<std::string> out;
  for (const auto& t : lex_csharp(source).tokens) {
    if (t.kind == LexKind::kComment || t.kind == LexKind::kDirective) continue;
    out.emplace_back(t.text);
  }
  return out;
}

std::string normalize_code(std::string_view source) {
  std::string out;
  for (const auto& t : code_tokens(source)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::optional<std::size_t> find_balanced_end(std::string_view source, std::size_t from) {
  const auto lexed = lex_csharp(source.substr(from));
  int depth = 0;
  bool opened = false;
  for (const auto& t : lexed.tokens) {
    if (t.kind != LexKind::kPunct) continue;
    if (t.text == "{") {
      ++depth;
      opened = true;
    } else if (t.text == "}") {
      --depth;
      if (opened && depth == 0) return from + t.end;
      if (depth < 0) return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string normalize_line_endings(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out += '\n';
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

}  // namespace perfix
