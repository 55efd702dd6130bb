#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "perfix/knowledge_base.hpp"

namespace perfix {

enum class PromptVariant { kRapGen, kStatic, kOneShot, kReasoning };

std::string_view to_string(PromptVariant variant);
/// Accepts rapgen|static|oneshot|reasoning. Throws UsageError.
PromptVariant variant_from_string(std::string_view text);

inline constexpr std::string_view kStaticInstruction = "PERF: Improve performance of the above method.";

struct Prompt {
  PromptVariant variant = PromptVariant::kRapGen;
  std::string text;
  std::string expected_signature;
  std::optional<std::string> instruction_text;
  std::optional<KbEntry> retrieved_entry;
  std::optional<std::string> hotspot;
  /// One-shot prompt whose example is the buggy method itself.
  bool degenerate = false;
};

/// `/*` method `*/`, the instruction comment, then the signature and `{`.
/// Throws CommentCollision when the method contains `*/`.
Prompt render_rapgen(const SourceMethod& buggy, const TransformInstruction& instruction);
Prompt render_static(const SourceMethod& buggy);
Prompt render_one_shot(const SourceMethod& buggy, const KbEntry& entry);
/// Ends inside an open comment; the model finishes the sentence and the code.
Prompt render_reasoning(const SourceMethod& buggy, std::string_view hotspot_identifier);

/// First common identifier of the statement. Throws NoHotspotIdentifier.
std::string select_hotspot(const SourceFile& file, const Statement& line,
                           const CommonVocabulary& vocab);

}  // namespace perfix
