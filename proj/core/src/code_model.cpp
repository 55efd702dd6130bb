#include "perfix/code_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cstring>

#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"
#include "perfix/vocabulary.hpp"

extern "C" const TSLanguage* tree_sitter_c_sharp(void);

namespace perfix {
namespace {

constexpr std::string_view kWrapperClass = "class __PerfixWrapper {\n";
constexpr std::string_view kWrapperClassEnd = "\n}\n";
constexpr std::string_view kWrapperBody = "class __PerfixWrapper { void __PerfixBody() {\n";
constexpr std::string_view kWrapperBodyEnd = "\n} }\n";
constexpr std::string_view kWrapperAccessor = "class __PerfixWrapper { object __PerfixProperty {\n";
constexpr std::string_view kWrapperAccessorEnd = "\n} }\n";

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_atomic_literal(std::string_view kind) {
  return kind == "string_literal" || kind == "verbatim_string_literal" ||
         kind == "raw_string_literal" || kind == "character_literal" ||
         kind == "interpolated_string_expression" || kind == "integer_literal" ||
         kind == "real_literal" || kind == "boolean_literal" || kind == "null_literal";
}

bool is_identifier_like(std::string_view text) {
  if (text.empty()) return false;
  const auto first = static_cast<unsigned char>(text.front());
  return first == '_' || first == '@' || std::isalpha(first) || first >= 0x80;
}

bool is_statement_kind(std::string_view kind) {
  return ends_with(kind, "_statement") || kind == "block";
}

bool is_preproc(std::string_view kind) { return starts_with(kind, "preproc_"); }

/// Children of a compound statement that hold nested statements rather than
/// header tokens.
bool is_nested_part(std::string_view kind) {
  return is_statement_kind(kind) || kind == "catch_clause" || kind == "finally_clause" ||
         kind == "switch_body" || kind == "switch_section" || is_preproc(kind);
}

bool is_type_declaration(std::string_view kind) {
  return kind == "class_declaration" || kind == "struct_declaration" ||
         kind == "interface_declaration" || kind == "record_declaration" ||
         kind == "record_struct_declaration";
}

bool is_callable_declaration(std::string_view kind) {
  return kind == "method_declaration" || kind == "constructor_declaration" ||
         kind == "destructor_declaration" || kind == "operator_declaration" ||
         kind == "conversion_operator_declaration";
}

bool is_property_like(std::string_view kind) {
  return kind == "property_declaration" || kind == "indexer_declaration" ||
         kind == "event_declaration";
}

LeafKind leaf_kind_of(const SyntaxNode& node, std::string_view text) {
  const auto kind = node.kind();
  if (is_atomic_literal(kind)) return LeafKind::kLiteral;
  if (node.is_named()) {
    if (kind == "identifier") return LeafKind::kIdentifier;
    if (kind == "predefined_type" || kind == "implicit_type") return LeafKind::kKeyword;
    if (is_csharp_keyword(text)) return LeafKind::kKeyword;
    if (is_identifier_like(text)) return LeafKind::kIdentifier;
    return LeafKind::kSyntax;
  }
  return is_identifier_like(text) ? LeafKind::kKeyword : LeafKind::kSyntax;
}

struct TokenWalker {
  const SourceFile& file;
  ByteRange limit;
  std::vector<Token>& out;

  void walk(const SyntaxNode& node) {
    const auto r = node.range();
    if (r.begin == r.end) return;  // missing nodes
    if (r.end <= limit.begin || r.begin >= limit.end) return;
    const auto kind = node.kind();
    if (kind == "comment") return;
    if (is_preproc(kind)) {
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        const auto ck = child.kind();
        if (is_nested_part(ck) || ends_with(ck, "_declaration")) walk(child);
      }
      return;
    }
    if (is_token_node(node)) {
      if (!limit.contains(r)) return;
      const auto text = std::string(file.text(r));
      out.push_back(Token{node, leaf_kind_of(node, text), text, r});
      return;
    }
    for (std::uint32_t i = 0; i < node.child_count(); ++i) walk(node.child(i));
  }
};

struct TreeDeleter {
  void operator()(TSTree* tree) const { ts_tree_delete(tree); }
};

struct ParserDeleter {
  void operator()(TSParser* parser) const { ts_parser_delete(parser); }
};

void count_nodes(TSNode root, std::size_t& errors, std::size_t& total,
                 std::optional<std::uint32_t>& first_error_row) {
  TSTreeCursor cursor = ts_tree_cursor_new(root);
  for (;;) {
    const TSNode node = ts_tree_cursor_current_node(&cursor);
    ++total;
    if (ts_node_is_error(node) || ts_node_is_missing(node)) {
      ++errors;
      if (!first_error_row) first_error_row = ts_node_start_point(node).row;
    }
    if (ts_tree_cursor_goto_first_child(&cursor)) continue;
    bool advanced = false;
    while (!advanced) {
      if (ts_tree_cursor_goto_next_sibling(&cursor)) {
        advanced = true;
      } else if (!ts_tree_cursor_goto_parent(&cursor)) {
        ts_tree_cursor_delete(&cursor);
        return;
      }
    }
  }
}

// --- statements ------------------------------------------------------------

class StatementSplitter {
 public:
  explicit StatementSplitter(const SourceFile& file) : file_(file) {}

  std::vector<Statement> take() { return std::move(out_); }

  void dispatch(const SyntaxNode& node) {
    const auto kind = node.kind();
    if (kind == "block" || is_preproc(kind) || kind == "switch_body") {
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        if (is_nested_part(child.kind())) dispatch(child);
      }
      return;
    }
    segment(node);
  }

  void emit_expression(const SyntaxNode& node) { emit(node, node.range(), false); }

 private:
  void segment(const SyntaxNode& node) {
    bool has_nested = false;
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      if (is_nested_part(node.child(i).kind())) {
        has_nested = true;
        break;
      }
    }
    if (!has_nested) {
      emit(node, node.range(), false);
      return;
    }
    std::optional<ByteRange> run;
    bool run_named = false;
    auto flush = [&] {
      // Keyword-only runs (`else`, `try`, `finally`, `do`, `default:`) are
      // structural and do not form statements.
      if (run && run_named) emit(node, *run, true);
      run.reset();
      run_named = false;
    };
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      const auto child = node.child(i);
      const auto ck = child.kind();
      if (ck == "comment" || child.range().begin == child.range().end) continue;
      if (is_nested_part(ck)) {
        flush();
        dispatch(child);
        continue;
      }
      const auto r = child.range();
      if (!run) {
        run = r;
      } else {
        run->end = r.end;
      }
      run_named = run_named || child.is_named();
    }
    flush();
  }

  void emit(const SyntaxNode& node, ByteRange span, bool header) {
    const auto tokens = leaf_tokens(file_, node, span);
    if (tokens.empty()) return;
    out_.push_back(Statement{join_tokens(tokens), span, node, header});
  }

  const SourceFile& file_;
  std::vector<Statement> out_;
};

// --- methods ---------------------------------------------------------------

struct MethodCollector {
  const SourceFilePtr& file;
  std::vector<SourceMethod> out;
  std::vector<std::string> scope;

  std::string scope_name() const {
    std::string s;
    for (const auto& part : scope) {
      if (!s.empty()) s += '.';
      s += part;
    }
    return s;
  }

  std::string field_text(const SyntaxNode& node, std::string_view field) const {
    const auto child = node.child_by_field(field);
    return child.is_null() ? std::string() : std::string(file->text(child));
  }

  void walk(const SyntaxNode& node) {
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      const auto child = node.child(i);
      const auto kind = child.kind();
      if (kind == "namespace_declaration") {
        scope.push_back(field_text(child, "name"));
        walk(child);
        scope.pop_back();
      } else if (kind == "file_scoped_namespace_declaration") {
        // Members may be children of the declaration or its later siblings.
        scope.push_back(field_text(child, "name"));
        walk(child);
        for (std::uint32_t j = i + 1; j < node.child_count(); ++j) walk_member(node.child(j));
        scope.pop_back();
        return;
      } else {
        walk_member(child);
      }
    }
  }

  void walk_member(const SyntaxNode& node) {
    const auto kind = node.kind();
    if (kind == "declaration_list") {
      walk(node);
    } else if (is_type_declaration(kind)) {
      scope.push_back(field_text(node, "name"));
      walk(node);
      scope.pop_back();
    } else if (is_callable_declaration(kind)) {
      add_callable(node);
    } else if (is_property_like(kind)) {
      add_property(node);
    }
  }

  static int count_parameters(const SyntaxNode& list) {
    if (list.is_null()) return 0;
    int n = 0;
    for (std::uint32_t i = 0; i < list.child_count(); ++i) {
      if (list.child(i).kind() == "parameter") ++n;
    }
    return n;
  }

  static SyntaxNode find_body(const SyntaxNode& node) {
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      const auto child = node.child(i);
      if (child.kind() == "block" || child.kind() == "arrow_expression_clause") return child;
    }
    return {};
  }

  std::string callable_name(const SyntaxNode& node) const {
    const auto kind = node.kind();
    if (kind == "operator_declaration") {
      const auto op = node.child_by_field("operator");
      return "operator" + (op.is_null() ? std::string() : std::string(file->text(op)));
    }
    if (kind == "conversion_operator_declaration") {
      return "operator " + field_text(node, "type");
    }
    if (kind == "destructor_declaration") return "~" + field_text(node, "name");
    return field_text(node, "name");
  }

  void add_callable(const SyntaxNode& node) {
    const auto body = find_body(node);
    if (body.is_null()) return;
    SyntaxNode params = node.child_by_field("parameters");
    add(node, body, callable_name(node), count_parameters(params), std::string(node.kind()));
  }

  void add_property(const SyntaxNode& node) {
    std::string name = node.kind() == "indexer_declaration" ? "this[]" : field_text(node, "name");
    int arity = 0;
    if (node.kind() == "indexer_declaration") {
      arity = count_parameters(node.child_by_field("parameters"));
    }
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      const auto child = node.child(i);
      if (child.kind() == "arrow_expression_clause") {
        add(node, child, name, arity, "property");
      } else if (child.kind() == "accessor_list") {
        for (std::uint32_t j = 0; j < child.child_count(); ++j) {
          const auto accessor = child.child(j);
          if (accessor.kind() != "accessor_declaration") continue;
          const auto body = find_body(accessor);
          if (body.is_null()) continue;
          const auto keyword = field_text(accessor, "name");
          add(accessor, body, name + "." + keyword, arity, "accessor");
        }
      }
    }
  }

  void add(const SyntaxNode& node, const SyntaxNode& body, std::string name, int arity,
           std::string kind) {
    SourceMethod m;
    m.file = file;
    m.name = std::move(name);
    m.containing_type = scope_name();
    m.kind = std::move(kind);
    m.arity = arity;
    m.tree = node;
    m.expression_bodied = body.kind() == "arrow_expression_clause";
    m.body_span = body.range();
    m.span = node.range();
    if (m.expression_bodied) {
      // `=> expr;` : the terminating semicolon belongs to the declaration.
      const auto& content = file->content();
      std::uint32_t end = m.body_span.end;
      std::uint32_t probe = end;
      while (probe < m.span.end && std::isspace(static_cast<unsigned char>(content[probe]))) ++probe;
      if (probe < m.span.end && content[probe] == ';') end = probe + 1;
      m.body_span.end = end;
    }
    // Leading attributes and modifiers are part of the span; leading doc
    // comments are separate nodes and are not.
    auto sig = file->text(ByteRange{m.span.begin, m.body_span.begin});
    while (!sig.empty() && std::isspace(static_cast<unsigned char>(sig.back()))) sig.remove_suffix(1);
    m.signature = std::string(sig);
    m.body = std::string(file->text(m.body_span));
    m.statements = split_statements(m);
    out.push_back(std::move(m));
  }
};

}  // namespace

// --- SyntaxNode ------------------------------------------------------------

SyntaxNode SyntaxNode::child_by_field(std::string_view field) const {
  return SyntaxNode(
      ts_node_child_by_field_name(node_, field.data(), static_cast<std::uint32_t>(field.size())));
}

std::string_view SyntaxNode::field_name_for_child(std::uint32_t i) const {
  const char* name = ts_node_field_name_for_child(node_, i);
  return name ? std::string_view(name) : std::string_view();
}

std::vector<SyntaxNode> SyntaxNode::children() const {
  std::vector<SyntaxNode> out;
  out.reserve(child_count());
  for (std::uint32_t i = 0; i < child_count(); ++i) out.push_back(child(i));
  return out;
}

std::string SyntaxNode::sexp() const {
  char* s = ts_node_string(node_);
  std::string out(s ? s : "");
  std::free(s);
  return out;
}

// --- SourceFile ------------------------------------------------------------

SourceFile::SourceFile(std::string path, std::string content, std::shared_ptr<TSTree> tree,
                       std::size_t error_nodes, std::size_t total_nodes)
    : path_(std::move(path)),
      content_(std::move(content)),
      tree_(std::move(tree)),
      error_nodes_(error_nodes),
      total_nodes_(total_nodes) {}

SyntaxNode SourceFile::root() const { return SyntaxNode(ts_tree_root_node(tree_.get())); }

std::string_view SourceFile::text(ByteRange range) const {
  const auto end = std::min<std::size_t>(range.end, content_.size());
  const auto begin = std::min<std::size_t>(range.begin, end);
  return std::string_view(content_).substr(begin, end - begin);
}

std::string_view to_string(TokenClass cls) {
  switch (cls) {
    case TokenClass::kKeyword: return "Keyword";
    case TokenClass::kSyntax: return "Syntax";
    case TokenClass::kCommonIdentifier: return "CommonIdentifier";
    case TokenClass::kProjectIdentifier: return "ProjectIdentifier";
    case TokenClass::kCommonLiteral: return "CommonLiteral";
    case TokenClass::kProjectLiteral: return "ProjectLiteral";
    case TokenClass::kPlaceholder: return "Placeholder";
  }
  return "?";
}

SourceFilePtr parse_file(std::string path, std::string content, const ParseOptions& options) {
  std::unique_ptr<TSParser, ParserDeleter> parser(ts_parser_new());
  ts_parser_set_language(parser.get(), tree_sitter_c_sharp());
  TSTree* raw = ts_parser_parse_string(parser.get(), nullptr, content.data(),
                                       static_cast<std::uint32_t>(content.size()));
  if (raw == nullptr) throw ParseError(path + ": parser returned no tree");
  std::shared_ptr<TSTree> tree(raw, TreeDeleter{});

  std::size_t errors = 0;
  std::size_t total = 0;
  std::optional<std::uint32_t> first_error_row;
  count_nodes(ts_tree_root_node(raw), errors, total, first_error_row);
  const double ratio = total == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(total);
  if (errors > 0 && ratio > options.max_error_ratio) {
    throw ParseError(path + ": " + std::to_string(errors) + " syntax error(s), first on line " +
                     std::to_string(first_error_row.value_or(0) + 1));
  }
  return std::make_shared<const SourceFile>(std::move(path), std::move(content), std::move(tree),
                                            errors, total);
}

std::vector<SourceMethod> extract_methods(const SourceFilePtr& file) {
  MethodCollector collector{file, {}, {}};
  collector.walk(file->root());
  return std::move(collector.out);
}

std::vector<Statement> split_statements(const SourceMethod& method) {
  StatementSplitter splitter(*method.file);
  // Locate the body node again from the method tree.
  SyntaxNode body;
  for (std::uint32_t i = 0; i < method.tree.child_count(); ++i) {
    const auto child = method.tree.child(i);
    if (child.kind() == "block" || child.kind() == "arrow_expression_clause") {
      body = child;
      break;
    }
  }
  if (body.is_null()) return {};
  if (body.kind() == "block") {
    splitter.dispatch(body);
  } else {
    for (std::uint32_t i = 0; i < body.child_count(); ++i) {
      const auto child = body.child(i);
      if (child.is_named() && child.kind() != "comment") {
        splitter.emit_expression(child);
        break;
      }
    }
  }
  return splitter.take();
}

bool is_token_node(const SyntaxNode& node) {
  const auto kind = node.kind();
  return node.child_count() == 0 || is_atomic_literal(kind) || kind == "implicit_type";
}

LeafKind leaf_kind(const SourceFile& file, const SyntaxNode& node) {
  return leaf_kind_of(node, file.text(node));
}

std::vector<Token> leaf_tokens(const SourceFile& file, const SyntaxNode& node,
                               std::optional<ByteRange> limit) {
  std::vector<Token> out;
  TokenWalker walker{file, limit.value_or(node.range()), out};
  walker.walk(node);
  return out;
}

std::vector<Token> statement_tokens(const SourceFile& file, const Statement& stmt) {
  return leaf_tokens(file, stmt.tree, stmt.span);
}

TokenClass classify_token(const Token& token, const CommonVocabulary& vocab) {
  switch (token.kind) {
    case LeafKind::kKeyword: return TokenClass::kKeyword;
    case LeafKind::kSyntax: return TokenClass::kSyntax;
    case LeafKind::kIdentifier:
      return vocab.has_identifier(token.text) ? TokenClass::kCommonIdentifier
                                              : TokenClass::kProjectIdentifier;
    case LeafKind::kLiteral:
      return vocab.has_literal(token.text) ? TokenClass::kCommonLiteral
                                           : TokenClass::kProjectLiteral;
  }
  return TokenClass::kSyntax;
}

std::string join_tokens(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

SourceMethod parse_method_text(std::string_view text, const ParseOptions& options) {
  auto attempt = [&](std::string_view open, std::string_view close) -> std::optional<SourceMethod> {
    std::string content;
    content.reserve(text.size() + open.size() + close.size());
    content.append(open).append(text).append(close);
    auto file = parse_file("<method>", std::move(content), options);
    auto methods = extract_methods(file);
    if (methods.empty()) return std::nullopt;
    return std::move(methods.front());
  };
  std::optional<ParseError> first_error;
  try {
    if (auto m = attempt(kWrapperClass, kWrapperClassEnd)) return std::move(*m);
  } catch (const ParseError& e) {
    first_error = e;
  }
  // A lone accessor such as `get { ... }` needs a property around it.
  try {
    if (auto m = attempt(kWrapperAccessor, kWrapperAccessorEnd)) return std::move(*m);
  } catch (const ParseError&) {
  }
  if (first_error) throw *first_error;
  throw ParseError("<method>: text contains no method body");
}

std::vector<Statement> parse_statements_text(std::string_view text, SourceFilePtr* keep_alive,
                                             const ParseOptions& options) {
  std::string content;
  content.append(kWrapperBody).append(text).append(kWrapperBodyEnd);
  auto file = parse_file("<statements>", std::move(content), options);
  auto methods = extract_methods(file);
  if (methods.empty()) throw ParseError("<statements>: wrapper did not parse");
  if (keep_alive) *keep_alive = file;
  return std::move(methods.front().statements);
}

Snippet parse_snippet(std::string_view text, const ParseOptions& options) {
  auto try_form = [&](std::string_view open, std::string_view close,
                      bool member_form) -> std::optional<Snippet> {
    std::string content;
    content.append(open).append(text).append(close);
    SourceFilePtr file;
    try {
      file = parse_file("<snippet>", std::move(content), options);
    } catch (const ParseError&) {
      return std::nullopt;
    }
    Snippet s;
    s.file = file;
    s.offset = static_cast<std::uint32_t>(open.size());
    s.length = static_cast<std::uint32_t>(text.size());
    const ByteRange payload{s.offset, s.offset + s.length};
    // Find the innermost container whose named children are the payload.
    SyntaxNode container;
    const auto cls = file->root().child(0);
    if (cls.is_null()) return std::nullopt;
    const auto body = cls.child_by_field("body");
    if (body.is_null()) return std::nullopt;
    if (member_form) {
      container = body;
    } else {
      SyntaxNode method;
      for (std::uint32_t i = 0; i < body.child_count(); ++i) {
        if (body.child(i).kind() == "method_declaration") method = body.child(i);
      }
      if (method.is_null()) return std::nullopt;
      container = method.child_by_field("body");
      if (container.is_null()) return std::nullopt;
    }
    for (std::uint32_t i = 0; i < container.child_count(); ++i) {
      const auto child = container.child(i);
      if (!child.is_named() || child.kind() == "comment") continue;
      if (payload.contains(child.range())) s.roots.push_back(child);
    }
    if (s.roots.empty() && !text.empty()) {
      bool blank = std::all_of(text.begin(), text.end(),
                               [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
      if (!blank) return std::nullopt;
    }
    return s;
  };

  auto member = try_form(kWrapperClass, kWrapperClassEnd, true);
  // Field-only readings (`return b;` parses as a field of type `return`) lose
  // to a statement reading.
  const bool fields_only =
      member && std::all_of(member->roots.begin(), member->roots.end(),
                            [](const SyntaxNode& n) { return n.kind() == "field_declaration"; });
  if (member && !fields_only) return std::move(*member);
  if (auto s = try_form(kWrapperBody, kWrapperBodyEnd, false)) return std::move(*s);
  if (member) return std::move(*member);
  throw ParseError("<snippet>: text parses neither as a member nor as statements");
}

std::uint32_t line_of_offset(std::string_view content, std::uint32_t offset) {
  const auto end = std::min<std::size_t>(offset, content.size());
  return static_cast<std::uint32_t>(std::count(content.begin(), content.begin() + end, '\n')) + 1;
}

}  // namespace perfix
