#include <gtest/gtest.h>

#include "generators.hpp"
#include "perfix/errors.hpp"
#include "perfix/evaluation.hpp"
#include "perfix/lexer.hpp"
#include "support.hpp"

using namespace perfix;
using namespace perfix::testing;

namespace {

FixSuggestion sug(std::string text, std::size_t index) {
  FixSuggestion s;
  s.method_text = std::move(text);
  s.sample_index = index;
  return s;
}

}  // namespace

TEST(Match, Verbatim) {
  EXPECT_TRUE(verbatim_match("void M() { A(); }", "void M()\n{\n  A(); // c\n}"));
  EXPECT_FALSE(verbatim_match("void M() { A(); }", "void M()\n{\n  A();\n}", MatchMode::kRawBytes));
  EXPECT_FALSE(verbatim_match("void M() { A(); }", "void M() { B(); }"));
}

TEST(Match, AbstractVariables) {
  const std::string m = "int F(int a) { var b = a + 1; return b; }";
  const auto once = abstract_variables(m);
  EXPECT_EQ(once, "int F(int VAR_0) { var VAR_1 = VAR_0 + 1; return VAR_1; }");
  EXPECT_EQ(abstract_variables(once), once);
  EXPECT_TRUE(abstracted_match("int F(int x) { var y = x + 1; return y; }", m));
  EXPECT_FALSE(abstracted_match("not code {", m));
}

TEST(Bleu, Identity) {
  const auto t = code_tokens("var a = b . Where ( x ) ;");
  EXPECT_DOUBLE_EQ(bleu_score(t, t), 1.0);
  EXPECT_DOUBLE_EQ(weighted_bleu_score(t, t), 1.0);
  EXPECT_DOUBLE_EQ(codebleu("int F() { return 1; }", "int F() { return 1; }").score, 100.0);
}

TEST(Bleu, BrevityPenaltyAndBounds) {
  const auto ref = code_tokens("a b c d e f g h");
  const auto cand = code_tokens("a b c d");
  const auto s = bleu_score(cand, ref);
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 1.0);
  EXPECT_NEAR(s, std::exp(1.0 - 8.0 / 4.0), 1e-12);
}

TEST(CodeBleu, RangeOnGeneratedMethods) {
  CodeGenerator gen(4, default_vocabulary());
  for (int i = 0; i < 30; ++i) {
    const auto a = gen.method();
    const auto b = gen.method();
    const auto r = codebleu(render(a, gen.naming(a)), render(b, gen.naming(b)));
    EXPECT_GE(r.score, 0.0);
    EXPECT_LE(r.score, 100.0);
  }
}

TEST(CodeBleu, Dataflow) {
  const auto edges = dataflow_edges("int a = 1; int b = a;");
  ASSERT_FALSE(edges.empty());
  EXPECT_DOUBLE_EQ(dataflow_match_score("", ""), 1.0);
}

TEST(Closest, TiesGoToLowestIndex) {
  const std::vector<FixSuggestion> s = {sug("void M() { B(); }", 3), sug("void M() { B(); }", 1)};
  EXPECT_EQ(closest_match(s, "void M() { B(); }", default_vocabulary()).suggestion.sample_index, 1u);
  EXPECT_THROW(closest_match({}, "void M() { }", default_vocabulary()), EmptySuggestionSet);
}

TEST(Dataset, ParsesAndReportsOffsets) {
  const auto cases = parse_dataset(
      R"({"id": "a", "before": "void M() {\r\n A();\r\n}", "after": "void M() { }", "suggestions": ["void M() { }"]})"
      "\n\n"
      R"({"before": "void N() { X(); }", "after": "void N() { }"})"
      "\n");
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[0].before, "void M() {\n A();\n}");
  EXPECT_TRUE(cases[0].suggestions_given);
  EXPECT_EQ(cases[1].id, "3");
  EXPECT_FALSE(cases[1].suggestions_given);
  const std::string good = R"({"before": "x", "after": "y"})";
  try {
    parse_dataset(good + "\n{oops\n");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.offset(), good.size() + 1);
  }
}

// Top-K hit counts never decrease as K grows.
TEST(Report, TopKMonotoneAndCsvRoundTrip) {
  std::vector<EvalCase> cases;
  for (int i = 0; i < 6; ++i) {
    EvalCase c;
    c.id = "c" + std::to_string(i);
    c.before = "int F(int a) { return a * 2; }";
    c.reference = "int F(int a) { return a << 1; }";
    for (int k = 0; k < 12; ++k)
      c.suggestions.push_back(sug(k == i * 2 ? "int F(int q) { return q << 1; }" : "int F(int a) { return a; }",
                                  static_cast<std::size_t>(k)));
    cases.push_back(c);
  }
  EvalConfig config;
  config.k_values = {1, 5, 10, 100};
  config.max_parallel = 3;
  const auto report = evaluate_dataset(cases, default_vocabulary(), config);
  EXPECT_EQ(report.top_k_hits.at(1), 1);
  EXPECT_EQ(report.top_k_hits.at(5), 3);
  EXPECT_EQ(report.top_k_hits.at(10), 5);
  EXPECT_EQ(report.top_k_hits.at(100), 6);
  EXPECT_DOUBLE_EQ(report.abstracted_pct, 100.0);
  EXPECT_DOUBLE_EQ(report.verbatim_pct, 0.0);

  const auto csv = review_export_csv(report, cases);
  EXPECT_TRUE(csv.starts_with("id,sample_index,suggestion_text,reference_text\n"));
  const auto verdicts = parse_review_csv("id,verdict\nc0,equivalent_or_better\n\"c1\",WORSE\n");
  EXPECT_EQ(verdicts.at("c0"), Verdict::kEquivalentOrBetter);
  EXPECT_EQ(verdicts.at("c1"), Verdict::kWorse);
  EXPECT_THROW(parse_review_csv("c0,maybe\n"), IoError);
}

TEST(Report, ReviewVerdictCountsClosest) {
  EvalCase c;
  c.id = "r";
  c.before = "int F(int a) { return a * 2; }";
  c.reference = "int F(int a) { return a << 1; }";
  c.suggestions = {sug("int F(int a) { return a + a; }", 0)};
  EvalConfig config;
  EXPECT_EQ(evaluate_dataset({c}, default_vocabulary(), config).top_k_hits.at(1), 0);
  config.verdicts["r"] = Verdict::kEquivalentOrBetter;
  EXPECT_EQ(evaluate_dataset({c}, default_vocabulary(), config).top_k_hits.at(1), 1);
}

TEST(Report, Round6) {
  EXPECT_DOUBLE_EQ(round6(1.23456789), 1.234568);
}
