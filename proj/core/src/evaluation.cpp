#include "perfix/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"
#include "perfix/mining.hpp"
#include "perfix/retrieval.hpp"
#include "perfix/util.hpp"

namespace perfix {
namespace {

std::string_view field_in_parent(const SyntaxNode& node) {
  const auto parent = node.parent();
  if (parent.is_null()) return {};
  for (std::uint32_t i = 0; i < parent.child_count(); ++i) {
    if (parent.child(i) == node) return parent.field_name_for_child(i);
  }
  return {};
}

void collect_designations(const SourceFile& file, const SyntaxNode& node,
                          std::set<std::string, std::less<>>& out) {
  if (node.kind() == "identifier" || node.kind() == "implicit_parameter") {
    out.emplace(file.text(node));
    return;
  }
  for (std::uint32_t i = 0; i < node.child_count(); ++i) {
    const auto child = node.child(i);
    const auto field = field_in_parent(child);
    if (field == "type") continue;
    collect_designations(file, child, out);
  }
}

/// Names introduced as locals or parameters anywhere under `node`.
void collect_declared(const SourceFile& file, const SyntaxNode& node,
                      std::set<std::string, std::less<>>& out) {
  const auto kind = node.kind();
  auto take = [&](std::string_view field) {
    const auto n = node.child_by_field(field);
    if (!n.is_null()) collect_designations(file, n, out);
  };
  if (kind == "parameter" || kind == "variable_declarator" || kind == "catch_declaration" ||
      kind == "declaration_expression" || kind == "declaration_pattern" ||
      kind == "from_clause" || kind == "let_clause" || kind == "join_clause" ||
      kind == "query_continuation") {
    take("name");
  } else if (kind == "foreach_statement") {
    take("left");
  } else if (kind == "implicit_parameter") {
    out.emplace(file.text(node));
  } else if (kind == "var_pattern" || kind == "parenthesized_variable_designation" ||
             kind == "single_variable_designation") {
    collect_designations(file, node, out);
  } else if (kind == "tuple_element") {
    take("name");
  }
  for (std::uint32_t i = 0; i < node.child_count(); ++i) collect_declared(file, node.child(i), out);
}

/// False where an identifier names a member, argument or type rather than the
/// variable it spells.
bool is_variable_position(const SyntaxNode& leaf) {
  const auto parent = leaf.parent();
  if (parent.is_null()) return true;
  const auto pk = parent.kind();
  const auto field = field_in_parent(leaf);
  if ((pk == "member_access_expression" || pk == "member_binding_expression") && field == "name")
    return false;
  if (pk == "argument" && field == "name") return false;
  if (pk == "name_colon" || pk == "name_equals") return false;
  if (field == "type" || field == "returns") return false;
  if (pk == "generic_name" || pk == "qualified_name" || pk == "attribute") return false;
  if ((pk == "method_declaration" || pk == "local_function_statement" ||
       pk == "constructor_declaration") &&
      field == "name")
    return false;
  if (pk == "assignment_expression" && field == "left") {
    const auto gp = parent.parent();
    if (!gp.is_null() && gp.kind() == "initializer_expression") {
      const auto ggp = gp.parent();
      if (!ggp.is_null() && ggp.kind() == "object_creation_expression") return false;
    }
  }
  return true;
}

struct VariableOccurrence {
  std::size_t token_index;
  Token token;
};

struct SnippetVariables {
  Snippet snippet;
  std::vector<Token> tokens;
  std::set<std::string, std::less<>> declared;
  std::vector<VariableOccurrence> occurrences;
};

SnippetVariables analyze_variables(std::string_view text) {
  SnippetVariables v{parse_snippet(text), {}, {}, {}};
  const auto& file = *v.snippet.file;
  for (const auto& root : v.snippet.roots) {
    collect_declared(file, root, v.declared);
    auto toks = leaf_tokens(file, root);
    v.tokens.insert(v.tokens.end(), toks.begin(), toks.end());
  }
  for (std::size_t i = 0; i < v.tokens.size(); ++i) {
    const auto& t = v.tokens[i];
    const auto kind = t.node.kind();
    if (kind != "identifier" && kind != "implicit_parameter") continue;
    if (!v.declared.contains(t.text)) continue;
    if (!is_variable_position(t.node)) continue;
    v.occurrences.push_back({i, t});
  }
  return v;
}

// --- CodeBLEU --------------------------------------------------------------

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c > r) return 1.0;
  if (c == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

double geometric_mean(const std::vector<double>& precisions) {
  if (precisions.empty()) return 0.0;
  double log_sum = 0.0;
  for (double p : precisions) log_sum += std::log(p);
  return std::exp(log_sum / static_cast<double>(precisions.size()));
}

double token_weight(const std::string& token) {
  return is_csharp_keyword(token) ? kKeywordWeight : kOtherTokenWeight;
}

std::string structural_sexp(const SyntaxNode& node) {
  std::string out = "(";
  out += node.kind();
  for (std::uint32_t i = 0; i < node.child_count(); ++i) {
    const auto child = node.child(i);
    if (!child.is_named() || child.kind() == "comment") continue;
    out += ' ';
    out += structural_sexp(child);
  }
  out += ')';
  return out;
}

void collect_subtrees(const SyntaxNode& node, std::vector<std::string>& out) {
  if (node.kind() == "comment") return;
  out.push_back(structural_sexp(node));
  for (std::uint32_t i = 0; i < node.child_count(); ++i) {
    const auto child = node.child(i);
    if (child.child_count() > 0) collect_subtrees(child, out);
  }
}

struct RawEdge {
  std::string var;
  std::size_t index;
  std::string relation;
  std::vector<std::string> source_names;
  std::vector<std::size_t> source_indices;
};

class DataflowBuilder {
 public:
  explicit DataflowBuilder(const SnippetVariables& vars) : vars_(vars) {
    for (const auto& occ : vars.occurrences) index_of_[occ.token.span.begin] = occ.token_index;
  }

  std::vector<RawEdge> run() {
    for (const auto& root : vars_.snippet.roots) visit(root);
    return std::move(edges_);
  }

 private:
  std::optional<std::size_t> var_index(const SyntaxNode& node) const {
    const auto k = node.kind();
    if (k != "identifier" && k != "implicit_parameter") return std::nullopt;
    const auto it = index_of_.find(node.range().begin);
    if (it == index_of_.end()) return std::nullopt;
    return it->second;
  }

  std::string name_at(std::size_t index) const { return vars_.tokens[index].text; }

  /// Emits use edges for every variable under `node` and returns them.
  std::vector<std::size_t> uses(const SyntaxNode& node) {
    const auto before = used_.size();
    visit(node);
    std::vector<std::size_t> out(used_.begin() + static_cast<std::ptrdiff_t>(before), used_.end());
    return out;
  }

  void define(std::size_t index, const std::vector<std::size_t>& sources) {
    RawEdge e{name_at(index), index, sources.empty() ? "comesFrom" : "computedFrom", {}, {}};
    for (auto s : sources) {
      e.source_names.push_back(name_at(s));
      e.source_indices.push_back(s);
    }
    edges_.push_back(std::move(e));
    defs_[name_at(index)] = {index};
  }

  void define_all(const SyntaxNode& node, const std::vector<std::size_t>& sources) {
    if (auto idx = var_index(node)) {
      define(*idx, sources);
      return;
    }
    for (std::uint32_t i = 0; i < node.child_count(); ++i) {
      const auto child = node.child(i);
      if (field_in_parent(child) == "type") continue;
      define_all(child, sources);
    }
  }

  void visit(const SyntaxNode& node) {
    const auto kind = node.kind();
    if (kind == "comment") return;
    if (auto idx = var_index(node)) {
      use(*idx);
      return;
    }
    if (kind == "parameter" || kind == "catch_declaration" || kind == "declaration_expression" ||
        kind == "declaration_pattern") {
      const auto name = node.child_by_field("name");
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        if (child == name) continue;
        if (field_in_parent(child) == "type") continue;
        visit(child);
      }
      if (!name.is_null()) define_all(name, {});
      return;
    }
    if (kind == "implicit_parameter") return;
    if (kind == "variable_declarator") {
      const auto name = node.child_by_field("name");
      std::vector<std::size_t> sources;
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        if (child == name) continue;
        auto u = uses(child);
        sources.insert(sources.end(), u.begin(), u.end());
      }
      if (!name.is_null()) define_all(name, sources);
      return;
    }
    if (kind == "assignment_expression") {
      const auto left = node.child_by_field("left");
      const auto right = node.child_by_field("right");
      if (!left.is_null() && var_index(left)) {
        const auto sources = right.is_null() ? std::vector<std::size_t>{} : uses(right);
        define(*var_index(left), sources);
        return;
      }
    }
    if (kind == "foreach_statement") {
      const auto left = node.child_by_field("left");
      const auto right = node.child_by_field("right");
      const auto sources = right.is_null() ? std::vector<std::size_t>{} : uses(right);
      if (!left.is_null()) define_all(left, sources);
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        if (child == left || child == right || field_in_parent(child) == "type") continue;
        visit(child);
      }
      return;
    }
    if (kind == "lambda_expression") {
      const auto params = node.child_by_field("parameters");
      if (!params.is_null()) {
        if (auto idx = var_index(params)) {
          define(*idx, {});
        } else {
          visit(params);
        }
      }
      for (std::uint32_t i = 0; i < node.child_count(); ++i) {
        const auto child = node.child(i);
        if (child == params) continue;
        visit(child);
      }
      return;
    }
    for (std::uint32_t i = 0; i < node.child_count(); ++i) visit(node.child(i));
  }

  void use(std::size_t index) {
    RawEdge e{name_at(index), index, "comesFrom", {}, {}};
    if (auto it = defs_.find(name_at(index)); it != defs_.end()) {
      for (auto d : it->second) {
        e.source_names.push_back(name_at(d));
        e.source_indices.push_back(d);
      }
    }
    edges_.push_back(std::move(e));
    used_.push_back(index);
  }

  const SnippetVariables& vars_;
  std::map<std::uint32_t, std::size_t> index_of_;
  std::map<std::string, std::vector<std::size_t>> defs_;
  std::vector<RawEdge> edges_;
  std::vector<std::size_t> used_;
};

std::vector<DataflowEdge> normalize_edges(std::vector<RawEdge> raw) {
  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawEdge& a, const RawEdge& b) { return a.index < b.index; });
  std::set<std::size_t> linked;
  for (const auto& e : raw) {
    if (!e.source_indices.empty()) linked.insert(e.index);
    linked.insert(e.source_indices.begin(), e.source_indices.end());
  }
  std::map<std::string, std::string> names;
  auto norm = [&](const std::string& n) {
    auto [it, inserted] = names.emplace(n, "");
    if (inserted) it->second = "var_" + std::to_string(names.size() - 1);
    return it->second;
  };
  std::vector<DataflowEdge> out;
  for (const auto& e : raw) {
    if (!linked.contains(e.index)) continue;
    DataflowEdge d;
    for (const auto& s : e.source_names) d.sources.push_back(norm(s));
    d.var = norm(e.var);
    d.relation = e.relation;
    out.push_back(std::move(d));
  }
  return out;
}

// --- CSV -------------------------------------------------------------------

std::string csv_field(std::string_view value) {
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field", text.size());
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::kEquivalentOrBetter ? "equivalent_or_better" : "worse";
}

FixSuggestion suggestion_from_json(const nlohmann::json& j, std::size_t position) {
  FixSuggestion s;
  if (j.is_string()) {
    s.method_text = j.get<std::string>();
    s.sample_index = position;
    return s;
  }
  s.method_text = j.at("method_text").get<std::string>();
  s.sample_index = j.value("sample_index", position);
  s.raw_completion = j.value("raw_completion", std::string{});
  if (j.contains("reasoning_text") && j["reasoning_text"].is_string())
    s.reasoning_text = j["reasoning_text"].get<std::string>();
  if (j.contains("prompt_variant"))
    s.prompt_variant = variant_from_string(j["prompt_variant"].get<std::string>());
  s.multiplicity = j.value("multiplicity", std::size_t{1});
  return s;
}

CaseResult evaluate_case(const EvalCase& c, const CommonVocabulary& vocab,
                         const EvalConfig& config) {
  CaseResult r;
  r.id = c.id;
  r.buggy_line_index = c.buggy_line_index;
  r.num_suggestions = c.suggestions.size();
  if (auto it = config.verdicts.find(c.id); it != config.verdicts.end()) r.verdict = it->second;
  for (int k : config.k_values) r.top_k[k] = false;

  if (c.error) {
    r.error = c.error;
    return r;
  }
  std::string reference_abstract;
  try {
    parse_snippet(c.before);
    reference_abstract = abstract_variables(c.reference);
  } catch (const Error& e) {
    r.error = e.what();
    spdlog::warn("case {}: {}", c.id, e.what());
    return r;
  }
  if (!r.buggy_line_index) {
    try {
      const auto before = parse_method_text(c.before);
      const auto after = parse_method_text(c.reference);
      r.buggy_line_index =
          static_cast<int>(localize_index(before.statements, after.statements));
    } catch (const Error& e) {
      spdlog::info("case {}: buggy line not localized: {}", c.id, e.what());
    }
  }

  auto suggestions = c.suggestions;
  std::stable_sort(suggestions.begin(), suggestions.end(),
                   [](const FixSuggestion& a, const FixSuggestion& b) {
                     return a.sample_index < b.sample_index;
                   });
  std::optional<std::size_t> first_abstracted;
  for (const auto& s : suggestions) {
    const bool verbatim = verbatim_match(s.method_text, c.reference);
    if (verbatim) r.verbatim_hit = true;
    bool abstracted = verbatim;
    if (!abstracted) {
      try {
        abstracted = verbatim_match(abstract_variables(s.method_text), reference_abstract);
      } catch (const Error&) {
        abstracted = false;
      }
    }
    if (abstracted) {
      r.abstracted_hit = true;
      if (!first_abstracted) first_abstracted = s.sample_index;
    }
    const auto bleu = codebleu(s.method_text, c.reference, config.weights);
    if (!r.best_codebleu_index || bleu.score > r.best_codebleu) {
      r.best_codebleu = bleu.score;
      r.best_codebleu_index = s.sample_index;
    }
  }
  if (!suggestions.empty()) r.closest = closest_match(suggestions, c.reference, vocab);
  const bool reviewed_ok = r.verdict == Verdict::kEquivalentOrBetter && r.closest.has_value();
  for (int k : config.k_values) {
    const auto limit = static_cast<std::size_t>(k);
    bool hit = first_abstracted && *first_abstracted < limit;
    if (reviewed_ok && r.closest->suggestion.sample_index < limit) hit = true;
    r.top_k[k] = hit;
  }
  return r;
}

std::string fixed(double value, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << value;
  return os.str();
}

}  // namespace

bool verbatim_match(std::string_view suggestion, std::string_view reference, MatchMode mode) {
  if (mode == MatchMode::kRawBytes) return suggestion == reference;
  return code_tokens(suggestion) == code_tokens(reference);
}

std::string abstract_variables(std::string_view method_text) {
  const auto vars = analyze_variables(method_text);
  std::map<std::string, std::string, std::less<>> names;
  const auto& content = vars.snippet.file->content();
  std::string out;
  std::size_t cursor = vars.snippet.offset;
  for (const auto& occ : vars.occurrences) {
    auto [it, inserted] = names.emplace(occ.token.text, "");
    if (inserted) it->second = "VAR_" + std::to_string(names.size() - 1);
    out.append(content, cursor, occ.token.span.begin - cursor);
    out += it->second;
    cursor = occ.token.span.end;
  }
  out.append(content, cursor, vars.snippet.offset + vars.snippet.length - cursor);
  return out;
}

bool abstracted_match(std::string_view suggestion, std::string_view reference) {
  if (verbatim_match(suggestion, reference)) return true;
  try {
    return verbatim_match(abstract_variables(suggestion), abstract_variables(reference));
  } catch (const ParseError& e) {
    spdlog::warn("abstracted match counted as miss: {}", e.what());
    return false;
  }
}

double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::string>& reference) {
  if (candidate.empty()) return reference.empty() ? 1.0 : 0.0;
  std::vector<double> precisions;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (candidate.size() < n) break;
    const auto cand = ngrams(candidate, n);
    const auto ref = ngrams(reference, n);
    int matches = 0;
    for (const auto& [gram, count] : cand) {
      if (auto it = ref.find(gram); it != ref.end()) matches += std::min(count, it->second);
    }
    const auto total = static_cast<double>(candidate.size() - n + 1);
    if (matches == 0) {
      if (n == 1) return 0.0;
      precisions.push_back(kBleuEpsilon / total);
    } else {
      precisions.push_back(matches / total);
    }
  }
  return brevity_penalty(candidate.size(), reference.size()) * geometric_mean(precisions);
}

double weighted_bleu_score(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference) {
  if (reference.empty()) return candidate.empty() ? 1.0 : 0.0;
  if (candidate.empty()) return 0.0;
  std::vector<double> precisions;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (reference.size() < n) break;
    const auto cand = ngrams(candidate, n);
    const auto ref = ngrams(reference, n);
    double matched = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : ref) {
      const double w = n == 1 ? token_weight(gram.front()) : 1.0;
      total += w * count;
      if (auto it = cand.find(gram); it != cand.end()) matched += w * std::min(count, it->second);
    }
    if (matched == 0.0) {
      if (n == 1) return 0.0;
      precisions.push_back(kBleuEpsilon / total);
    } else {
      precisions.push_back(matched / total);
    }
  }
  return brevity_penalty(candidate.size(), reference.size()) * geometric_mean(precisions);
}

std::vector<std::string> subtree_sexps(std::string_view code) {
  const auto snippet = parse_snippet(code);
  std::vector<std::string> out;
  for (const auto& root : snippet.roots) {
    if (root.child_count() > 0) collect_subtrees(root, out);
  }
  return out;
}

double ast_match_score(std::string_view candidate, std::string_view reference) {
  const auto ref = subtree_sexps(reference);
  const auto cand_list = subtree_sexps(candidate);
  if (ref.empty()) return cand_list.empty() ? 1.0 : 0.0;
  const std::set<std::string> cand(cand_list.begin(), cand_list.end());
  std::size_t matched = 0;
  for (const auto& s : ref) matched += cand.contains(s) ? 1 : 0;
  return static_cast<double>(matched) / static_cast<double>(ref.size());
}

std::vector<DataflowEdge> dataflow_edges(std::string_view code) {
  const auto vars = analyze_variables(code);
  return normalize_edges(DataflowBuilder(vars).run());
}

double dataflow_match_score(std::string_view candidate, std::string_view reference) {
  const auto ref = dataflow_edges(reference);
  auto cand = dataflow_edges(candidate);
  if (ref.empty()) return cand.empty() ? 1.0 : 0.0;
  std::size_t matched = 0;
  for (const auto& e : ref) {
    if (auto it = std::find(cand.begin(), cand.end(), e); it != cand.end()) {
      ++matched;
      cand.erase(it);
    }
  }
  return static_cast<double>(matched) / static_cast<double>(ref.size());
}

CodeBleuBreakdown codebleu(std::string_view suggestion, std::string_view reference,
                           const CodeBleuWeights& weights) {
  CodeBleuBreakdown b;
  const auto cand_tokens = code_tokens(suggestion);
  const auto ref_tokens = code_tokens(reference);
  b.bleu = bleu_score(cand_tokens, ref_tokens);
  b.weighted_bleu = weighted_bleu_score(cand_tokens, ref_tokens);
  try {
    b.ast_match = ast_match_score(suggestion, reference);
    b.dataflow_match = dataflow_match_score(suggestion, reference);
  } catch (const ParseError& e) {
    spdlog::warn("codebleu: structural components set to 0: {}", e.what());
    b.ast_match = 0.0;
    b.dataflow_match = 0.0;
    b.parsed = false;
  }
  b.score = 100.0 * (weights.alpha * b.bleu + weights.beta * b.weighted_bleu +
                     weights.gamma * b.ast_match + weights.delta * b.dataflow_match);
  return b;
}

ClosestMatch closest_match(const std::vector<FixSuggestion>& suggestions,
                           std::string_view reference, const CommonVocabulary& vocab) {
  if (suggestions.empty()) throw EmptySuggestionSet("no suggestions to compare");
  auto bag_of = [&](std::string_view text) {
    const auto snippet = parse_snippet(text);
    FeatureBag bag;
    for (const auto& root : snippet.roots) {
      for (const auto& [f, n] : featurize(*snippet.file, root, vocab).features) bag.features[f] += n;
    }
    return bag;
  };
  std::optional<FeatureBag> ref_bag;
  try {
    ref_bag = bag_of(reference);
  } catch (const ParseError& e) {
    spdlog::warn("closest match: reference does not parse: {}", e.what());
  }
  const FixSuggestion* best = nullptr;
  double best_score = -1.0;
  for (const auto& s : suggestions) {
    double score = 0.0;
    if (ref_bag) {
      try {
        score = similarity(bag_of(s.method_text), *ref_bag);
      } catch (const ParseError&) {
        score = 0.0;
      }
    }
    if (!best || score > best_score ||
        (score == best_score && s.sample_index < best->sample_index)) {
      best = &s;
      best_score = score;
    }
  }
  return {*best, best_score};
}

std::vector<EvalCase> parse_dataset(std::string_view jsonl) {
  std::vector<EvalCase> out;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    const auto line_offset = offset;
    offset += line.size() + 1;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EvalCase c;
      c.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                              : std::to_string(line_no);
      c.before = normalize_line_endings(j.at("before").get<std::string>());
      c.reference = normalize_line_endings(j.at("after").get<std::string>());
      if (j.contains("buggy_line_index") && !j["buggy_line_index"].is_null())
        c.buggy_line_index = j["buggy_line_index"].get<int>();
      if (j.contains("suggestions")) {
        c.suggestions_given = true;
        std::size_t pos = 0;
        for (const auto& s : j["suggestions"]) c.suggestions.push_back(suggestion_from_json(s, pos++));
      }
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("bad dataset line ") + std::to_string(line_no) + ": " + e.what(),
                    line_offset);
    }
  }
  return out;
}

std::vector<EvalCase> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

EvalReport evaluate_dataset(const std::vector<EvalCase>& cases, const CommonVocabulary& vocab,
                            const EvalConfig& config) {
  EvalReport report;
  report.cases.resize(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        report.cases[i] = evaluate_case(cases[i], vocab, config);
      } catch (const std::exception& e) {
        CaseResult r;
        r.id = cases[i].id;
        r.error = e.what();
        for (int k : config.k_values) r.top_k[k] = false;
        report.cases[i] = std::move(r);
      }
    }
  };
  const auto threads = std::clamp<std::size_t>(config.max_parallel, 1, std::max<std::size_t>(cases.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (int k : config.k_values) report.top_k_hits[k] = 0;
  int verbatim = 0;
  int abstracted = 0;
  double bleu_sum = 0.0;
  for (const auto& c : report.cases) {
    verbatim += c.verbatim_hit ? 1 : 0;
    abstracted += c.abstracted_hit ? 1 : 0;
    bleu_sum += c.best_codebleu;
    for (const auto& [k, hit] : c.top_k) report.top_k_hits[k] += hit ? 1 : 0;
  }
  const auto n = static_cast<double>(cases.size());
  if (!cases.empty()) {
    report.verbatim_pct = 100.0 * verbatim / n;
    report.abstracted_pct = 100.0 * abstracted / n;
    report.mean_codebleu = bleu_sum / n;
  }
  for (const auto& [k, hits] : report.top_k_hits)
    report.top_k_pct[k] = cases.empty() ? 0.0 : 100.0 * hits / n;
  return report;
}

double round6(double value) {
  const double r = std::round(value * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

nlohmann::ordered_json report_to_json(const EvalReport& report, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json j;
  j["config"] = config;
  auto& agg = j["aggregate"];
  agg["num_cases"] = report.cases.size();
  agg["verbatim_pct"] = round6(report.verbatim_pct);
  agg["abstracted_pct"] = round6(report.abstracted_pct);
  agg["mean_codebleu"] = round6(report.mean_codebleu);
  for (const auto& [k, hits] : report.top_k_hits) agg["top_k_hits"][std::to_string(k)] = hits;
  for (const auto& [k, pct] : report.top_k_pct) agg["top_k_pct"][std::to_string(k)] = round6(pct);
  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : report.cases) {
    nlohmann::ordered_json cj;
    cj["id"] = c.id;
    cj["error"] = c.error ? nlohmann::ordered_json(*c.error) : nlohmann::ordered_json(nullptr);
    cj["buggy_line_index"] = c.buggy_line_index ? nlohmann::ordered_json(*c.buggy_line_index)
                                                : nlohmann::ordered_json(nullptr);
    cj["num_suggestions"] = c.num_suggestions;
    cj["verbatim_hit"] = c.verbatim_hit;
    cj["abstracted_hit"] = c.abstracted_hit;
    cj["best_codebleu"] = round6(c.best_codebleu);
    cj["best_codebleu_index"] = c.best_codebleu_index
                                    ? nlohmann::ordered_json(*c.best_codebleu_index)
                                    : nlohmann::ordered_json(nullptr);
    if (c.closest) {
      cj["closest"] = {{"sample_index", c.closest->suggestion.sample_index},
                       {"score", round6(c.closest->score)},
                       {"method_text", c.closest->suggestion.method_text}};
    } else {
      cj["closest"] = nullptr;
    }
    cj["verdict"] = c.verdict ? nlohmann::ordered_json(std::string(to_string(*c.verdict)))
                              : nlohmann::ordered_json(nullptr);
    for (const auto& [k, hit] : c.top_k) cj["top_k"][std::to_string(k)] = hit;
    j["cases"].push_back(std::move(cj));
  }
  return j;
}

std::string report_to_text(const EvalReport& report, std::string_view label) {
  std::vector<std::string> header{"Model", "Verbatim Match %", "Abstracted Match %", "CodeBLEU"};
  std::vector<std::string> row{std::string(label), fixed(report.verbatim_pct, 1),
                               fixed(report.abstracted_pct, 1), fixed(report.mean_codebleu, 1)};
  for (const auto& [k, pct] : report.top_k_pct) {
    header.push_back("Top-" + std::to_string(k) + " %");
    row.push_back(fixed(pct, 1));
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto width = std::max(header[i].size(), row[i].size());
    os << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width)) << header[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto width = std::max(header[i].size(), row[i].size());
    os << (i ? "  " : "") << (i ? std::right : std::left) << std::setw(static_cast<int>(width))
       << row[i];
  }
  os << '\n' << "cases: " << report.cases.size() << '\n';
  return os.str();
}

std::string review_export_csv(const EvalReport& report, const std::vector<EvalCase>& cases) {
  std::map<std::string, const EvalCase*, std::less<>> by_id;
  for (const auto& c : cases) by_id.emplace(c.id, &c);
  std::string out = "id,sample_index,suggestion_text,reference_text\n";
  for (const auto& r : report.cases) {
    if (!r.closest) continue;
    const auto it = by_id.find(r.id);
    const std::string reference = it == by_id.end() ? std::string{} : it->second->reference;
    out += csv_field(r.id) + ',' + std::to_string(r.closest->suggestion.sample_index) + ',' +
           csv_field(r.closest->suggestion.method_text) + ',' + csv_field(reference) + '\n';
  }
  return out;
}

ReviewVerdicts parse_review_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  ReviewVerdicts out;
  if (rows.empty()) return out;
  std::size_t id_col = 0;
  std::size_t verdict_col = 1;
  std::size_t first = 0;
  if (std::find(rows[0].begin(), rows[0].end(), "verdict") != rows[0].end()) {
    const auto& h = rows[0];
    id_col = static_cast<std::size_t>(std::find(h.begin(), h.end(), "id") - h.begin());
    verdict_col = static_cast<std::size_t>(std::find(h.begin(), h.end(), "verdict") - h.begin());
    if (id_col >= h.size()) throw IoError("review CSV header lacks an id column", 0);
    first = 1;
  }
  for (std::size_t i = first; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() <= std::max(id_col, verdict_col))
      throw IoError("review CSV row " + std::to_string(i + 1) + " has too few columns");
    const auto v = to_lower(trim(row[verdict_col]));
    if (v == "equivalent_or_better") {
      out[row[id_col]] = Verdict::kEquivalentOrBetter;
    } else if (v == "worse") {
      out[row[id_col]] = Verdict::kWorse;
    } else {
      throw IoError("review CSV row " + std::to_string(i + 1) + ": unknown verdict '" + v + "'");
    }
  }
  return out;
}

}  // namespace perfix
