#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "acceptance.hpp"
#include "generators.hpp"
#include "perfix/abstraction.hpp"
#include "perfix/errors.hpp"
#include "perfix/knowledge_base.hpp"
#include "perfix/lexer.hpp"
#include "perfix/retrieval.hpp"
#include "perfix/util.hpp"
#include "support.hpp"

namespace perfix::acceptance {

using namespace perfix::testing;

namespace {

std::vector<std::pair<std::string, std::string>> read_tsv(const std::string& name) {
  std::vector<std::pair<std::string, std::string>> rows;
  const auto text = slurp(golden_path(name));
  for (const auto line : split(text, '\n')) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    rows.emplace_back(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return rows;
}

}  // namespace

Outcome abstraction_conformance() {
  const auto& vocab = default_vocabulary();
  Failures f;

  const auto method = parse_method_text("void M()\n{\n    Foo().Where(x => x.Bar()).FirstOrDefault();\n}");
  const auto worked = abstract_line(*method.file, method.statements.at(0), vocab);
  if (worked.raw != "<∅>.Where(<∅>).FirstOrDefault();") f.add("worked example gave " + worked.raw);

  const auto goldens = read_tsv("abstraction.tsv");
  for (const auto& [input, expected] : goldens) {
    const auto got = abstract_statement_text(input, vocab);
    if (got.raw != expected) f.add("'" + input + "' gave '" + got.raw + "'");
  }

  CodeGenerator gen(1, vocab);
  int checked = 0;
  while (checked < 500) {
    const auto t = gen.statement();
    const auto naming = gen.naming(t);
    const auto original = render(t, naming);
    const auto renamed = render(t, gen.rename_all(naming));
    BugPattern a;
    try {
      a = abstract_statement_text(original, vocab);
    } catch (const ParseError& e) {
      f.add("generated statement does not parse: " + original);
      ++checked;
      continue;
    }
    const auto b = abstract_statement_text(renamed, vocab);
    if (!(a == b) || a.raw != b.raw) f.add("rename changed '" + a.raw + "' to '" + b.raw + "'");
    const auto again = reabstract(a, vocab);
    if (!(again == a) || again.raw != a.raw)
      f.add("not idempotent: '" + a.raw + "' -> '" + again.raw + "'");
    std::set<std::string> project(naming.variables.begin(), naming.variables.end());
    project.insert(naming.projects.begin(), naming.projects.end());
    project.insert(naming.literals.begin(), naming.literals.end());
    for (const auto& tok : code_tokens(a.raw)) {
      if (project.contains(tok)) f.add("'" + tok + "' leaked into '" + a.raw + "'");
    }
    ++checked;
  }
  return f.outcome(std::to_string(goldens.size()) + " goldens, " + std::to_string(checked) +
                   " generated statements");
}

Outcome instruction_derivation() {
  const auto& vocab = default_vocabulary();
  Failures f;
  const auto goldens = read_tsv("instructions.tsv");
  std::set<InstructionCategory> categories;
  for (const auto& [stem, expected] : goldens) {
    const auto instruction = derive_instruction(derive_identifier_sets(instruction_pair(stem), vocab));
    categories.insert(instruction.category);
    if (instruction.text != expected) f.add(stem + " gave '" + instruction.text + "'");
  }
  if (goldens.size() < 6) f.add("fewer than 6 fixture pairs");
  if (categories.size() != 3) f.add("fixtures do not cover all three categories");
  return f.outcome(std::to_string(goldens.size()) + " pairs, " + std::to_string(categories.size()) +
                   " categories");
}

Outcome kb_determinism() {
  const auto& vocab = default_vocabulary();
  Failures f;
  const auto shared = kb_fixture(3, 25, {"alpha", "beta"}, vocab);
  const std::set<std::string> taken(shared.patterns.begin(), shared.patterns.end());
  const auto solo = kb_fixture(4, 10, {"gamma"}, vocab, taken);
  auto pairs = shared.pairs;
  pairs.insert(pairs.end(), solo.pairs.begin(), solo.pairs.end());

  TempDir dir;
  const auto baseline_path = dir / "kb0.jsonl";
  save_kb(build_kb(pairs, vocab), baseline_path);
  const auto baseline = slurp(baseline_path);

  std::mt19937_64 rng(5);
  for (int round = 1; round <= 10; ++round) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto path = dir / ("kb" + std::to_string(round) + ".jsonl");
    save_kb(build_kb(pairs, vocab), path);
    if (slurp(path) != baseline) f.add("shuffle " + std::to_string(round) + " changed the file");
  }

  const auto kb = load_kb(baseline_path);
  for (const auto& [key, entries] : kb.entries()) {
    std::set<std::string> repos;
    for (const auto& e : entries) repos.insert(e.repo_id);
    if (repos.size() < 2) f.add("single-project pattern kept: " + key);
  }
  for (const auto& p : solo.patterns) {
    if (!kb.lookup(p).empty()) f.add("single-project pattern present: " + p);
  }
  for (const auto& p : shared.patterns) {
    if (kb.lookup(p).size() != 2) f.add("two-project pattern missing: " + p);
  }
  return f.outcome("11 builds byte-identical, " + std::to_string(kb.entries().size()) +
                   " patterns, " + std::to_string(solo.patterns.size()) +
                   " single-project patterns dropped");
}

Outcome self_retrieval() {
  const auto& vocab = default_vocabulary();
  Failures f;
  const auto fixture = kb_fixture(7, 25, {"alpha", "beta"}, vocab);
  const auto kb = build_kb(fixture.pairs, vocab);
  if (kb.size() != 50) f.add("fixture KB has " + std::to_string(kb.size()) + " entries");
  std::size_t hits = 0;
  for (const auto& [key, entries] : kb.entries()) {
    for (const auto& e : entries) {
      const auto query = parse_method_text(e.before);
      const auto r = retrieve(kb, query, query.statements.at(e.statement_index), vocab);
      if (r.entry == e && r.rank == 1 && r.score == 1.0) {
        ++hits;
      } else {
        f.add(e.repo_id + "/" + e.commit_id + " retrieved " + r.entry.repo_id + "/" +
              r.entry.commit_id + " score " + std::to_string(r.score));
      }
    }
  }
  return f.outcome(std::to_string(hits) + "/" + std::to_string(kb.size()) + " at rank 1, score 1.0");
}

}  // namespace perfix::acceptance
