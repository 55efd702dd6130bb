#include <gtest/gtest.h>

#include "perfix/errors.hpp"
#include "perfix/prompting.hpp"
#include "support.hpp"

using namespace perfix;
using namespace perfix::testing;

TEST(Prompting, VariantNames) {
  for (auto v : {PromptVariant::kRapGen, PromptVariant::kStatic, PromptVariant::kOneShot, PromptVariant::kReasoning})
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_THROW(variant_from_string("fancy"), UsageError);
}

TEST(Prompting, RapGenShape) {
  const auto m = parse_method_text("public int Size(List<int> xs)\n{\n    return xs.Count();\n}");
  const auto p = render_rapgen(m, derive_instruction({"Count"}, {"Any"}));
  EXPECT_EQ(p.text,
            "/*\npublic int Size(List<int> xs)\n{\n    return xs.Count();\n}\n*/\n"
            "/* PERF: Use Any instead of Count in the above method. */\n"
            "public int Size(List<int> xs) {\n");
  EXPECT_EQ(p.expected_signature, "public int Size(List<int> xs)");
  EXPECT_EQ(p.instruction_text, "PERF: Use Any instead of Count in the above method.");
}

TEST(Prompting, StaticUsesFixedInstruction) {
  const auto m = parse_method_text("void Go() { Run(); }");
  const auto p = render_static(m);
  EXPECT_NE(p.text.find(kStaticInstruction), std::string::npos);
  EXPECT_EQ(p.variant, PromptVariant::kStatic);
}

TEST(Prompting, CommentCollision) {
  const auto m = parse_method_text("void Go() { var s = \"*/\"; }");
  EXPECT_THROW(render_static(m), CommentCollision);
}

TEST(Prompting, OneShotDegenerate) {
  const auto m = parse_method_text("void Go() { Run(); }");
  KbEntry e;
  e.before = m.text();
  e.after = "void Go() { }";
  EXPECT_TRUE(render_one_shot(m, e).degenerate);
  e.before = "void Other() { Run(); }";
  EXPECT_FALSE(render_one_shot(m, e).degenerate);
}

TEST(Prompting, Hotspot) {
  const auto m = parse_method_text("void Go() { var n = items.Where(x => x.Ok).Count(); helper(n); }");
  const auto& vocab = default_vocabulary();
  EXPECT_EQ(select_hotspot(*m.file, m.statements[0], vocab), "Where");
  EXPECT_THROW(select_hotspot(*m.file, m.statements[1], vocab), NoHotspotIdentifier);
  const auto p = render_reasoning(m, "Where");
  EXPECT_EQ(p.hotspot, "Where");
  EXPECT_EQ(p.text.find("*/", p.text.rfind("/*")), std::string::npos);
}

TEST(Prompting, PureFunctions) {
  const auto m = undo_before_method();
  const auto instruction = derive_instruction({"FirstOrDefault"}, {});
  EXPECT_EQ(render_rapgen(m, instruction).text, render_rapgen(m, instruction).text);
}
