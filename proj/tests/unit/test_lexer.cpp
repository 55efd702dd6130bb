#include <gtest/gtest.h>

#include "perfix/lexer.hpp"

using namespace perfix;

TEST(Lexer, ClassifiesTokens) {
  const auto r = lex_csharp("var x = 42; // done\n");
  ASSERT_TRUE(r.complete);
  ASSERT_EQ(r.tokens.size(), 6u);
  EXPECT_EQ(r.tokens[0].kind, LexKind::kKeyword);
  EXPECT_EQ(r.tokens[1].kind, LexKind::kIdentifier);
  EXPECT_EQ(r.tokens[2].kind, LexKind::kPunct);
  EXPECT_EQ(r.tokens[3].kind, LexKind::kNumber);
  EXPECT_EQ(r.tokens[5].kind, LexKind::kComment);
}

TEST(Lexer, StringsKeepBracesInside) {
  const auto r = lex_csharp(R"(s = "a { b"; t = @"x "" }"; u = $"{n} {{";)");
  int strings = 0;
  for (const auto& t : r.tokens) strings += t.kind == LexKind::kString;
  EXPECT_EQ(strings, 3);
  EXPECT_TRUE(r.complete);
}

TEST(Lexer, UnterminatedInputIsIncomplete) {
  EXPECT_FALSE(lex_csharp("x = \"open").complete);
  EXPECT_FALSE(lex_csharp("/* open").complete);
  EXPECT_TRUE(lex_csharp("x = 'a';").complete);
}

TEST(Lexer, CodeTokensDropComments) {
  EXPECT_EQ(code_tokens("a /* c */ + b // d\n"), (std::vector<std::string>{"a", "+", "b"}));
  EXPECT_EQ(normalize_code("a\n  +\tb"), "a + b");
}

TEST(Lexer, MultiCharacterOperators) {
  EXPECT_EQ(code_tokens("a?.b ?? c => d != e"),
            (std::vector<std::string>{"a", "?.", "b", "??", "c", "=>", "d", "!=", "e"}));
}

TEST(Lexer, Keywords) {
  EXPECT_TRUE(is_csharp_keyword("return"));
  EXPECT_TRUE(is_csharp_keyword("var"));
  EXPECT_FALSE(is_csharp_keyword("Where"));
  EXPECT_FALSE(csharp_keywords().empty());
}

TEST(BalancedEnd, IgnoresBracesInLiterals) {
  const std::string text = "void M() { var s = \"}\"; char c = '{'; /* } */ // }\n}";
  const auto end = find_balanced_end(text);
  ASSERT_TRUE(end);
  EXPECT_EQ(*end, text.size());
}

TEST(BalancedEnd, StopsAtFirstBalance) {
  const std::string text = "{ { } } trailing { }";
  EXPECT_EQ(find_balanced_end(text), std::optional<std::size_t>(7));
}

TEST(BalancedEnd, InterpolationHoles) {
  const std::string text = R"({ var s = $"a {(x ? "}" : "{")} b"; })";
  EXPECT_EQ(find_balanced_end(text), std::optional<std::size_t>(text.size()));
}

TEST(BalancedEnd, UnbalancedIsNullopt) {
  EXPECT_FALSE(find_balanced_end("{ { }"));
  EXPECT_FALSE(find_balanced_end("no braces"));
}

TEST(LineEndings, Normalized) {
  EXPECT_EQ(normalize_line_endings("a\r\nb\rc\n"), "a\nb\nc\n");
}
