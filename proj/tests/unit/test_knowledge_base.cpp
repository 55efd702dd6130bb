#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "generators.hpp"
#include "perfix/errors.hpp"
#include "perfix/knowledge_base.hpp"
#include "support.hpp"

using namespace perfix;
using namespace perfix::testing;

TEST(Instruction, Categories) {
  EXPECT_EQ(derive_instruction({"Count"}, {"Any"}).category, InstructionCategory::kSwap);
  EXPECT_EQ(derive_instruction({"ToList"}, {}).category, InstructionCategory::kRemoval);
  EXPECT_EQ(derive_instruction({}, {"StringBuilder"}).category, InstructionCategory::kAddition);
  EXPECT_THROW(derive_instruction(std::vector<std::string>{}, {}), EmptyChange);
  EXPECT_EQ(derive_instruction({"Count"}, {"Any"}).text, "PERF: Use Any instead of Count in the above method.");
}

TEST(Instruction, CategoryStrings) {
  for (auto c : {InstructionCategory::kAddition, InstructionCategory::kRemoval, InstructionCategory::kSwap})
    EXPECT_EQ(category_from_string(to_string(c)), c);
}

TEST(Instruction, CapKeepsFrequentInOrder) {
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  const std::map<std::string, int> counts = {{"a", 1}, {"b", 5}, {"c", 1}, {"d", 3}};
  EXPECT_EQ(cap_identifiers(ids, counts, 2), (std::vector<std::string>{"b", "d"}));
  EXPECT_EQ(cap_identifiers(ids, counts, 3), (std::vector<std::string>{"a", "b", "d"}));
}

// Every identifier set is disjoint and both lists come from the diff statements.
TEST(Instruction, FixtureSetsDisjoint) {
  for (const auto& stem : instruction_stems()) {
    const auto sets = derive_identifier_sets(instruction_pair(stem), default_vocabulary());
    for (const auto& r : sets.removed)
      EXPECT_EQ(std::count(sets.added.begin(), sets.added.end(), r), 0) << stem;
  }
}

TEST(KnowledgeBase, ThresholdAndOrderIndependence) {
  const auto& vocab = default_vocabulary();
  const auto fixture = kb_fixture(9, 8, {"alpha", "beta"}, vocab);
  auto pairs = fixture.pairs;
  KbBuildStats stats;
  const auto kb = build_kb(pairs, vocab, 2, &stats);
  EXPECT_EQ(kb.size(), 16u);
  EXPECT_EQ(stats.patterns_kept, 8u);
  EXPECT_TRUE(build_kb(pairs, vocab, 3).empty());

  std::mt19937_64 rng(1);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  EXPECT_EQ(serialize_kb(build_kb(pairs, vocab)), serialize_kb(kb));
}

TEST(KnowledgeBase, RoundTripAndVerify) {
  const auto& vocab = default_vocabulary();
  const auto kb = build_kb(kb_fixture(10, 5, {"a", "b"}, vocab).pairs, vocab);
  const auto parsed = parse_kb(serialize_kb(kb));
  EXPECT_EQ(parsed, kb);
  EXPECT_TRUE(verify_kb(parsed, vocab).empty());
  EXPECT_EQ(parsed.vocab_hash(), vocab.hash());

  TempDir dir;
  save_kb(kb, dir / "kb.jsonl");
  EXPECT_EQ(load_kb(dir / "kb.jsonl"), kb);
}

TEST(KnowledgeBase, VerifyDetectsTampering) {
  const auto& vocab = default_vocabulary();
  const auto kb = build_kb(kb_fixture(10, 3, {"a", "b"}, vocab).pairs, vocab);
  auto map = kb.entries();
  auto node = map.extract(map.begin());
  node.key() = "<∅>.Frobnicate();";
  map.insert(std::move(node));
  EXPECT_FALSE(verify_kb(KnowledgeBase(map, kb.vocab_hash()), vocab).empty());
}

TEST(KnowledgeBase, ParseErrors) {
  const auto& vocab = default_vocabulary();
  const auto text = serialize_kb(build_kb(kb_fixture(10, 2, {"a", "b"}, vocab).pairs, vocab));
  const auto header_end = text.find('\n') + 1;
  EXPECT_THROW(parse_kb("{\"kb_version\":99}\n"), VersionMismatch);
  try {
    parse_kb(text.substr(0, header_end) + "{broken\n");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    ASSERT_TRUE(e.offset());
    EXPECT_EQ(*e.offset(), header_end);
  }
}

TEST(KnowledgeBase, LookupMissIsEmpty) {
  const KnowledgeBase kb;
  EXPECT_TRUE(kb.lookup("<∅>.Nothing();").empty());
}
