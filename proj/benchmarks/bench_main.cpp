#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include <string>
#include <vector>

#include "perfix/abstraction.hpp"
#include "perfix/evaluation.hpp"
#include "perfix/generation.hpp"
#include "perfix/knowledge_base.hpp"
#include "perfix/retrieval.hpp"

using namespace perfix;

namespace {

const char* kStatements[] = {
    "var first = orders.Where(o => o.Total > limit).FirstOrDefault();",
    "if (cache.Keys.Contains(key)) return;",
    "total += items.Where(i => i.Active).Sum(i => i.Price);",
    "var names = people.Select(p => p.Name).ToList();",
    "_logger.LogDebug(\"loaded {0}\", count);",
};

std::string method_with(const std::string& stmt, int i) {
  return "public int Handle" + std::to_string(i) + "(List<Order> orders, string key)\n{\n    var n = " +
         std::to_string(i) + ";\n    " + stmt + "\n    return n + orders.Count;\n}";
}

std::string method_without(int i) {
  return "public int Handle" + std::to_string(i) + "(List<Order> orders, string key)\n{\n    var n = " +
         std::to_string(i) + ";\n    return n + orders.Count;\n}";
}

KnowledgeBase make_kb(int per_pattern) {
  std::vector<MethodPair> pairs;
  int i = 0;
  for (const char* stmt : kStatements) {
    for (int k = 0; k < per_pattern; ++k, ++i) {
      pairs.push_back({parse_method_text(method_with(stmt, i)), parse_method_text(method_without(i)),
                       "repo" + std::to_string(k % 4), "c" + std::to_string(i), "F.cs"});
    }
  }
  return build_kb(pairs, default_vocabulary());
}

void BM_AbstractStatement(benchmark::State& state) {
  const auto& vocab = default_vocabulary();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(abstract_statement_text(kStatements[i++ % std::size(kStatements)], vocab));
  }
}
BENCHMARK(BM_AbstractStatement);

void BM_Retrieve(benchmark::State& state) {
  const auto kb = make_kb(static_cast<int>(state.range(0)));
  const auto query = parse_method_text(method_with(kStatements[0], 9999));
  const auto& vocab = default_vocabulary();
  for (auto _ : state) benchmark::DoNotOptimize(retrieve(kb, query, query.statements.at(1), vocab));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Retrieve)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_ExtractFix(benchmark::State& state) {
  Prompt prompt;
  prompt.expected_signature = "public int Handle(List<Order> orders)";
  std::string completion;
  for (int i = 0; i < state.range(0); ++i)
    completion += "    var s" + std::to_string(i) + " = $\"{orders.Count} }}\"; // }\n";
  completion += "    return 0;\n}\npublic void Trailer() { }\n";
  for (auto _ : state) benchmark::DoNotOptimize(extract_fix(prompt, completion));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * completion.size()));
}
BENCHMARK(BM_ExtractFix)->Range(8, 512);

void BM_CodeBleu(benchmark::State& state) {
  const auto reference = method_with(kStatements[3], 1);
  const auto candidate = method_with(kStatements[2], 2);
  for (auto _ : state) benchmark::DoNotOptimize(codebleu(candidate, reference));
}
BENCHMARK(BM_CodeBleu);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::off);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
