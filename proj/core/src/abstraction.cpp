#include "perfix/abstraction.hpp"

#include <algorithm>

#include "perfix/errors.hpp"

namespace perfix {
namespace {

constexpr std::string_view kForeignIdentifier = "__perfix_placeholder";

bool is_delimited_list(std::string_view kind) {
  return kind == "argument_list" || kind == "bracketed_argument_list" ||
         kind == "parameter_list" || kind == "bracketed_parameter_list" ||
         kind == "type_argument_list" || kind == "type_parameter_list" ||
         kind == "initializer_expression" || kind == "parenthesized_expression" ||
         kind == "tuple_expression" || kind == "attribute_argument_list";
}

bool is_binding(std::string_view kind) {
  return kind == "member_binding_expression" || kind == "element_binding_expression";
}

bool no_space_before(std::string_view t) {
  return t == "." || t == "," || t == "(" || t == ")" || t == ";" || t == "]" || t == ">";
}

bool no_space_after(std::string_view t) { return t == "(" || t == "[" || t == "<" || t == "."; }

class Abstractor {
 public:
  Abstractor(const SourceFile& file, const CommonVocabulary& vocab) : file_(file), vocab_(vocab) {}

  std::vector<PatternToken> run(const Statement& stmt) {
    const auto root = stmt.tree;
    if (is_token_node(root)) {
      leaf(root);
    } else if (stmt.is_header) {
      for (const auto& c : root.children()) {
        if (stmt.span.contains(c.range())) child(c);
      }
    } else {
      recurse(root);
    }
    return std::move(out_);
  }

 private:
  void push(PatternToken token) {
    if (token.cls == TokenClass::kPlaceholder && !out_.empty() &&
        out_.back().cls == TokenClass::kPlaceholder) {
      return;
    }
    out_.push_back(std::move(token));
  }

  void placeholder() { push({TokenClass::kPlaceholder, std::string(kPlaceholder)}); }

  bool skipped(const SyntaxNode& n) const {
    return n.range().size() == 0 || n.kind() == "comment" || n.kind().starts_with("preproc_");
  }

  bool has_common(const SyntaxNode& n) const {
    for (const auto& t : leaf_tokens(file_, n)) {
      if (t.kind == LeafKind::kIdentifier && vocab_.has_identifier(t.text)) return true;
    }
    return false;
  }

  void leaf(const SyntaxNode& n) {
    const Token token{n, leaf_kind(file_, n), std::string(file_.text(n)), n.range()};
    const auto cls = classify_token(token, vocab_);
    if (cls == TokenClass::kProjectIdentifier || cls == TokenClass::kProjectLiteral) {
      placeholder();
    } else {
      push({cls, token.text});
    }
  }

  void child(const SyntaxNode& n) {
    if (skipped(n)) return;
    const auto kind = n.kind();
    if (is_token_node(n)) {
      leaf(n);
    } else if (is_delimited_list(kind)) {
      list(n);
    } else if (is_binding(kind) && !has_common(n)) {
      const auto first = n.child(0);
      if (!first.is_null() && !first.is_named()) leaf(first);
      placeholder();
    } else if (has_common(n)) {
      recurse(n);
    } else {
      placeholder();
    }
  }

  void recurse(const SyntaxNode& n) {
    for (const auto& c : n.children()) child(c);
  }

  void list(const SyntaxNode& n) {
    auto kids = n.children();
    std::erase_if(kids, [this](const SyntaxNode& c) { return skipped(c); });
    if (kids.size() < 2 || kids.front().is_named() || kids.back().is_named()) {
      if (has_common(n)) {
        recurse(n);
      } else {
        placeholder();
      }
      return;
    }
    leaf(kids.front());
    const std::span inner(kids.begin() + 1, kids.end() - 1);
    const bool any_common =
        std::any_of(inner.begin(), inner.end(), [this](const SyntaxNode& c) { return has_common(c); });
    if (any_common) {
      for (const auto& c : inner) child(c);
    } else if (!inner.empty()) {
      placeholder();
    }
    leaf(kids.back());
  }

  const SourceFile& file_;
  const CommonVocabulary& vocab_;
  std::vector<PatternToken> out_;
};

Statement first_statement(std::string_view text, SourceFilePtr& keep) {
  auto stmts = parse_statements_text(text, &keep);
  if (stmts.empty()) throw ParseError("no statement in '" + std::string(text) + "'");
  return stmts.front();
}

}  // namespace

std::string render_pattern(const std::vector<PatternToken>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& text = tokens[i].text;
    if (i > 0 && !no_space_before(text) && !no_space_after(tokens[i - 1].text)) out += ' ';
    out += text;
  }
  return out;
}

BugPattern BugPattern::from_tokens(std::vector<PatternToken> tokens) {
  BugPattern p;
  p.tokens = std::move(tokens);
  p.raw = render_pattern(p.tokens);
  return p;
}

bool BugPattern::is_bare() const {
  return std::none_of(tokens.begin(), tokens.end(), [](const PatternToken& t) {
    return t.cls == TokenClass::kCommonIdentifier;
  });
}

BugPattern abstract_line(const SourceFile& file, const Statement& stmt,
                         const CommonVocabulary& vocab) {
  return BugPattern::from_tokens(Abstractor(file, vocab).run(stmt));
}

BugPattern abstract_statement_text(std::string_view text, const CommonVocabulary& vocab) {
  SourceFilePtr keep;
  Statement stmt;
  try {
    stmt = first_statement(text, keep);
  } catch (const ParseError&) {
    stmt = first_statement(std::string(text) + " { }", keep);
  }
  return abstract_line(*keep, stmt, vocab);
}

BugPattern reabstract(const BugPattern& pattern, const CommonVocabulary& vocab) {
  // A bare identifier is not a valid expression statement, so fall back to a
  // call-shaped stand-in when the identifier form does not parse.
  auto spell = [&pattern](std::string_view stand_in) {
    std::string text;
    for (const auto& t : pattern.tokens) {
      if (!text.empty()) text += ' ';
      text += t.cls == TokenClass::kPlaceholder ? std::string(stand_in) : t.text;
    }
    return text;
  };
  try {
    return abstract_statement_text(spell(kForeignIdentifier), vocab);
  } catch (const ParseError&) {
    return abstract_statement_text(spell(std::string(kForeignIdentifier) + "()"), vocab);
  }
}

}  // namespace perfix
