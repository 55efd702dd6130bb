#pragma once

// C# source model built on tree-sitter: files, methods, statements and the
// leaf-token view that the abstraction, retrieval and evaluation code share.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <tree_sitter/api.h>

namespace perfix {

class CommonVocabulary;
class SourceFile;

struct ByteRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const noexcept { return end - begin; }
  bool contains(const ByteRange& other) const noexcept {
    return begin <= other.begin && other.end <= end;
  }
  bool operator==(const ByteRange&) const = default;
};

/// Value handle to a node of a parsed tree. Only valid while the owning
/// SourceFile is alive.
class SyntaxNode {
 public:
  SyntaxNode() = default;
  explicit SyntaxNode(TSNode node) : node_(node) {}

  bool is_null() const { return node_.id == nullptr || ts_node_is_null(node_); }
  std::string_view kind() const { return ts_node_type(node_); }
  bool is_named() const { return ts_node_is_named(node_); }
  bool is_error() const { return ts_node_is_error(node_) || ts_node_is_missing(node_); }
  bool has_error() const { return ts_node_has_error(node_); }

  std::uint32_t child_count() const { return ts_node_child_count(node_); }
  SyntaxNode child(std::uint32_t i) const { return SyntaxNode(ts_node_child(node_, i)); }
  SyntaxNode child_by_field(std::string_view field) const;
  std::string_view field_name_for_child(std::uint32_t i) const;
  SyntaxNode parent() const { return SyntaxNode(ts_node_parent(node_)); }
  std::vector<SyntaxNode> children() const;

  ByteRange range() const { return {ts_node_start_byte(node_), ts_node_end_byte(node_)}; }
  std::uint32_t start_row() const { return ts_node_start_point(node_).row; }
  std::uint32_t end_row() const { return ts_node_end_point(node_).row; }

  /// S-expression of the named structure (identifier text excluded).
  std::string sexp() const;

  bool operator==(const SyntaxNode& other) const { return ts_node_eq(node_, other.node_); }
  const TSNode& raw() const { return node_; }

 private:
  TSNode node_{};
};

struct ParseOptions {
  /// Maximum fraction of error/missing nodes tolerated. 0 rejects any error.
  double max_error_ratio = 0.0;
};

/// An immutable parsed file.
class SourceFile {
 public:
  SourceFile(std::string path, std::string content, std::shared_ptr<TSTree> tree,
             std::size_t error_nodes, std::size_t total_nodes);

  const std::string& path() const noexcept { return path_; }
  const std::string& content() const noexcept { return content_; }
  SyntaxNode root() const;
  std::string_view text(ByteRange range) const;
  std::string_view text(const SyntaxNode& node) const { return text(node.range()); }
  std::size_t error_nodes() const noexcept { return error_nodes_; }
  std::size_t total_nodes() const noexcept { return total_nodes_; }

 private:
  std::string path_;
  std::string content_;
  std::shared_ptr<TSTree> tree_;
  std::size_t error_nodes_ = 0;
  std::size_t total_nodes_ = 0;
};

using SourceFilePtr = std::shared_ptr<const SourceFile>;

enum class TokenClass {
  kKeyword,
  kSyntax,
  kCommonIdentifier,
  kProjectIdentifier,
  kCommonLiteral,
  kProjectLiteral,
  kPlaceholder,
};

std::string_view to_string(TokenClass cls);

/// Coarse lexical category of a leaf, independent of any vocabulary.
enum class LeafKind { kKeyword, kSyntax, kIdentifier, kLiteral };

/// A leaf of the tree. String, character, numeric and boolean literals are
/// atomic leaves even though tree-sitter gives some of them children.
struct Token {
  SyntaxNode node;
  LeafKind kind = LeafKind::kSyntax;
  std::string text;
  ByteRange span;
};

struct Statement {
  /// Tokens joined by single spaces; comments are never included.
  std::string text;
  ByteRange span;
  /// Statement node. For control-flow headers this is the whole compound
  /// statement; `span` then covers only the header.
  SyntaxNode tree;
  bool is_header = false;
};

struct SourceMethod {
  SourceFilePtr file;
  std::string name;
  /// Dotted path of enclosing namespaces and types.
  std::string containing_type;
  std::string kind;
  int arity = 0;
  /// Declaration text before the body, trailing whitespace removed.
  std::string signature;
  /// `{ ... }` for block bodies, `=> expr;` for expression bodies.
  std::string body;
  bool expression_bodied = false;
  ByteRange span;
  ByteRange body_span;
  SyntaxNode tree;
  std::vector<Statement> statements;

  std::string_view text() const { return file->text(span); }
};

/// Parses C# source. Throws ParseError when the fraction of error nodes exceeds
/// options.max_error_ratio.
SourceFilePtr parse_file(std::string path, std::string content, const ParseOptions& options = {});

/// Methods, constructors, destructors, operators and accessors with a body, in
/// source order. Local functions stay part of their enclosing method.
std::vector<SourceMethod> extract_methods(const SourceFilePtr& file);

/// Statement-level nodes of the body in pre-order with blocks flattened and
/// control-flow headers split from their nested bodies.
std::vector<Statement> split_statements(const SourceMethod& method);

/// True for nodes handled as one token: real leaves, literals (including
/// interpolated strings) and `var`.
bool is_token_node(const SyntaxNode& node);
LeafKind leaf_kind(const SourceFile& file, const SyntaxNode& node);

/// Leaves under `node` restricted to `limit` (whole node if omitted), in
/// source order. Comments and preprocessor directive lines are skipped.
std::vector<Token> leaf_tokens(const SourceFile& file, const SyntaxNode& node,
                               std::optional<ByteRange> limit = std::nullopt);

std::vector<Token> statement_tokens(const SourceFile& file, const Statement& stmt);

TokenClass classify_token(const Token& token, const CommonVocabulary& vocab);

/// Joins token texts with single spaces.
std::string join_tokens(std::span<const Token> tokens);

/// Parses a single member (method, constructor, accessor...) given as text by
/// wrapping it in a synthetic class. Throws ParseError when it does not parse
/// or contains no method.
SourceMethod parse_method_text(std::string_view text, const ParseOptions& options = {});

/// Parses statements given as text by wrapping them in a synthetic method.
std::vector<Statement> parse_statements_text(std::string_view text,
                                             SourceFilePtr* keep_alive = nullptr,
                                             const ParseOptions& options = {});

/// Result of parsing a snippet that may be a member or a statement list.
struct Snippet {
  SourceFilePtr file;
  /// Offset of the snippet inside the wrapped text.
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
  /// Top-level nodes that belong to the snippet (the member, or each statement).
  std::vector<SyntaxNode> roots;
};

/// Tries member form first, then statement-list form. Throws ParseError.
Snippet parse_snippet(std::string_view text, const ParseOptions& options = {});

/// 1-based line of a byte offset.
std::uint32_t line_of_offset(std::string_view content, std::uint32_t offset);

}  // namespace perfix
