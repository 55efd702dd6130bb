#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "perfix/generation.hpp"
#include "perfix/vocabulary.hpp"

namespace perfix {

enum class MatchMode { kTokens, kRawBytes };

bool verbatim_match(std::string_view suggestion, std::string_view reference,
                    MatchMode mode = MatchMode::kTokens);

/// Renames every local variable and parameter to VAR_i, numbered by first
/// occurrence in source order. Formatting and comments are preserved.
/// Throws ParseError.
std::string abstract_variables(std::string_view method_text);

/// Parse failures on either side count as a non-match.
bool abstracted_match(std::string_view suggestion, std::string_view reference);

struct CodeBleuWeights {
  double alpha = 0.1;
  double beta = 0.1;
  double gamma = 0.4;
  double delta = 0.4;
};

struct CodeBleuBreakdown {
  double bleu = 0.0;
  double weighted_bleu = 0.0;
  double ast_match = 0.0;
  double dataflow_match = 0.0;
  /// Weighted sum scaled to [0, 100].
  double score = 0.0;
  bool parsed = true;
};

inline constexpr double kBleuEpsilon = 0.1;
inline constexpr double kKeywordWeight = 1.0;
inline constexpr double kOtherTokenWeight = 0.2;

/// Sentence BLEU over code tokens with n <= 4, uniform weights, epsilon
/// smoothing for orders with no match, and brevity penalty. Orders for which
/// the candidate has no n-grams are left out of the geometric mean.
double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::string>& reference);

/// Reference-side n-gram recall with unigrams weighted by token kind
/// (keywords 1.0, everything else 0.2). Orders for which the reference has no
/// n-grams are left out.
double weighted_bleu_score(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference);

/// S-expressions of every non-leaf subtree (named structure only, comments
/// dropped), in pre-order.
std::vector<std::string> subtree_sexps(std::string_view code);

/// Fraction of reference subtrees whose S-expression occurs in the candidate.
double ast_match_score(std::string_view candidate, std::string_view reference);

struct DataflowEdge {
  std::string var;
  std::string relation;
  std::vector<std::string> sources;
  bool operator==(const DataflowEdge&) const = default;
};

/// Def-use edges with variables renamed var_i in order of appearance.
std::vector<DataflowEdge> dataflow_edges(std::string_view code);

/// Fraction of reference edges matched one-to-one by candidate edges. Two
/// empty edge sets score 1.
double dataflow_match_score(std::string_view candidate, std::string_view reference);

CodeBleuBreakdown codebleu(std::string_view suggestion, std::string_view reference,
                           const CodeBleuWeights& weights = {});

struct ClosestMatch {
  FixSuggestion suggestion;
  double score = 0.0;
};

/// Most similar suggestion by structural features; ties go to the lowest
/// sample index. Throws EmptySuggestionSet.
ClosestMatch closest_match(const std::vector<FixSuggestion>& suggestions,
                           std::string_view reference, const CommonVocabulary& vocab);

struct EvalCase {
  std::string id;
  std::string before;
  std::string reference;
  std::optional<int> buggy_line_index;
  std::vector<FixSuggestion> suggestions;
  /// False when the dataset line had no `suggestions` key.
  bool suggestions_given = false;
  /// Set when producing the suggestions failed; the case is reported as such.
  std::optional<std::string> error;
};

/// One dataset line: {id, before, after, buggy_line_index?, suggestions?}.
/// `suggestions` may be a list of method texts or of suggestion objects.
std::vector<EvalCase> parse_dataset(std::string_view jsonl);
std::vector<EvalCase> load_dataset(const std::filesystem::path& path);

enum class Verdict { kEquivalentOrBetter, kWorse };

/// Parsed review_import.csv, keyed by case id.
using ReviewVerdicts = std::map<std::string, Verdict, std::less<>>;

struct EvalConfig {
  CodeBleuWeights weights;
  std::vector<int> k_values{1, 10, 100};
  ReviewVerdicts verdicts;
  std::size_t max_parallel = 8;
};

struct CaseResult {
  std::string id;
  std::optional<std::string> error;
  std::optional<int> buggy_line_index;
  std::size_t num_suggestions = 0;
  bool verbatim_hit = false;
  bool abstracted_hit = false;
  double best_codebleu = 0.0;
  std::optional<std::size_t> best_codebleu_index;
  std::optional<ClosestMatch> closest;
  std::optional<Verdict> verdict;
  std::map<int, bool> top_k;
};

struct EvalReport {
  std::vector<CaseResult> cases;
  double verbatim_pct = 0.0;
  double abstracted_pct = 0.0;
  double mean_codebleu = 0.0;
  std::map<int, int> top_k_hits;
  std::map<int, double> top_k_pct;
};

EvalReport evaluate_dataset(const std::vector<EvalCase>& cases, const CommonVocabulary& vocab,
                            const EvalConfig& config = {});

/// `label` names the row of the text table; `config` is echoed verbatim.
nlohmann::ordered_json report_to_json(const EvalReport& report, const nlohmann::ordered_json& config);
std::string report_to_text(const EvalReport& report, std::string_view label);

std::string review_export_csv(const EvalReport& report, const std::vector<EvalCase>& cases);
ReviewVerdicts parse_review_csv(std::string_view csv);

/// Rounds to 6 decimal places for stable serialization.
double round6(double value);

}  // namespace perfix
