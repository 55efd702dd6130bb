#include "perfix/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "perfix/abstraction.hpp"
#include "perfix/errors.hpp"
#include "perfix/mining.hpp"

namespace perfix {

std::size_t select_statement(const SourceMethod& method, const LineSelector& selector,
                             const SourceMethod* after) {
  const auto& stmts = method.statements;
  if (selector.statement_index) {
    const int idx = *selector.statement_index;
    if (idx < 0 || static_cast<std::size_t>(idx) >= stmts.size())
      throw UsageError("statement index " + std::to_string(idx) + " out of range (method has " +
                       std::to_string(stmts.size()) + " statements)");
    return static_cast<std::size_t>(idx);
  }
  if (selector.source_line) {
    const auto line = static_cast<std::uint32_t>(*selector.source_line);
    const auto& content = method.file->content();
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      const auto first = line_of_offset(content, stmts[i].span.begin);
      const auto last = line_of_offset(content, stmts[i].span.end == 0 ? 0 : stmts[i].span.end - 1);
      if (first <= line && line <= last) return i;
    }
    throw UsageError("line " + std::to_string(line) + " holds no statement of method '" +
                     method.name + "'");
  }
  if (after) return localize_index(stmts, after->statements);
  throw UsageError("no buggy line given: pass a line number or a statement index");
}

PreparedPrompt prepare_prompt(const SourceMethod& method, std::size_t statement_index,
                              const KnowledgeBase& kb, const CommonVocabulary& vocab,
                              const PromptOptions& options) {
  PreparedPrompt out;
  out.statement_index = statement_index;
  out.line = method.statements.at(statement_index);
  out.pattern = abstract_line(*method.file, out.line, vocab).raw;

  auto retrieve_or_fallback = [&]() -> bool {
    try {
      out.retrieval = retrieve(kb, method, out.line, vocab);
      return true;
    } catch (const PatternNotFound& e) {
      if (!options.fallback_static) throw;
      spdlog::info("{}; falling back to the static prompt", e.what());
      out.prompt = render_static(method);
      out.fell_back = true;
      return false;
    }
  };

  switch (options.variant) {
    case PromptVariant::kRapGen:
      if (retrieve_or_fallback()) {
        out.prompt = render_rapgen(method, out.retrieval->entry.instruction);
        out.prompt.retrieved_entry = out.retrieval->entry;
      }
      break;
    case PromptVariant::kOneShot:
      if (retrieve_or_fallback()) out.prompt = render_one_shot(method, out.retrieval->entry);
      break;
    case PromptVariant::kStatic:
      out.prompt = render_static(method);
      break;
    case PromptVariant::kReasoning:
      out.prompt = render_reasoning(method, select_hotspot(*method.file, out.line, vocab));
      break;
  }
  return out;
}

SuggestResult suggest(const SourceMethod& method, std::size_t statement_index,
                      const KnowledgeBase& kb, const CommonVocabulary& vocab,
                      const PromptOptions& options, const SamplingConfig& sampling,
                      Backend& backend) {
  SuggestResult out;
  out.prepared = prepare_prompt(method, statement_index, kb, vocab, options);
  out.generation = generate(out.prepared.prompt, sampling, backend);
  out.suggestions = dedupe_suggestions(out.generation.suggestions);
  return out;
}

}  // namespace perfix
