#include "perfix/prompting.hpp"

#include "perfix/errors.hpp"
#include "perfix/lexer.hpp"

namespace perfix {
namespace {

std::string commentable(std::string_view text, std::string_view what) {
  auto normalized = normalize_line_endings(text);
  if (normalized.find("*/") != std::string::npos) {
    throw CommentCollision(std::string(what) + " contains '*/' and cannot be placed in a block comment");
  }
  return normalized;
}

std::string commented(const std::string& text) { return "/*\n" + text + "\n*/\n"; }

std::string signature_of(const SourceMethod& m) { return normalize_line_endings(m.signature); }

Prompt instruction_prompt(PromptVariant variant, const SourceMethod& buggy, std::string_view message) {
  Prompt p;
  p.variant = variant;
  p.expected_signature = signature_of(buggy);
  p.instruction_text = std::string(message);
  p.text = commented(commentable(buggy.text(), "buggy method"));
  p.text += "/* ";
  p.text += normalize_line_endings(message);
  p.text += " */\n";
  p.text += p.expected_signature;
  p.text += " {\n";
  return p;
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::kRapGen: return "rapgen";
    case PromptVariant::kStatic: return "static";
    case PromptVariant::kOneShot: return "oneshot";
    case PromptVariant::kReasoning: return "reasoning";
  }
  return "rapgen";
}

PromptVariant variant_from_string(std::string_view text) {
  if (text == "rapgen") return PromptVariant::kRapGen;
  if (text == "static") return PromptVariant::kStatic;
  if (text == "oneshot") return PromptVariant::kOneShot;
  if (text == "reasoning") return PromptVariant::kReasoning;
  throw UsageError("unknown prompt variant '" + std::string(text) +
                   "' (expected rapgen, static, oneshot or reasoning)");
}

Prompt render_rapgen(const SourceMethod& buggy, const TransformInstruction& instruction) {
  if (instruction.text.empty()) throw EmptyChange("instruction text is empty");
  return instruction_prompt(PromptVariant::kRapGen, buggy, instruction.text);
}

Prompt render_static(const SourceMethod& buggy) {
  return instruction_prompt(PromptVariant::kStatic, buggy, kStaticInstruction);
}

Prompt render_one_shot(const SourceMethod& buggy, const KbEntry& entry) {
  Prompt p;
  p.variant = PromptVariant::kOneShot;
  p.expected_signature = signature_of(buggy);
  p.retrieved_entry = entry;
  const auto before = commentable(entry.before, "retrieved before method");
  const auto buggy_text = commentable(buggy.text(), "buggy method");
  p.degenerate = normalize_code(before) == normalize_code(buggy_text);
  p.text = commented(before);
  p.text += normalize_line_endings(entry.after);
  p.text += '\n';
  p.text += commented(buggy_text);
  p.text += p.expected_signature;
  p.text += " {\n";
  return p;
}

Prompt render_reasoning(const SourceMethod& buggy, std::string_view hotspot_identifier) {
  if (hotspot_identifier.empty()) throw NoHotspotIdentifier("empty hotspot identifier");
  Prompt p;
  p.variant = PromptVariant::kReasoning;
  p.expected_signature = signature_of(buggy);
  p.hotspot = std::string(hotspot_identifier);
  p.text = commented(commentable(buggy.text(), "buggy method"));
  p.text += "/* PERF: ";
  p.text += hotspot_identifier;
  p.text += " is on the hot-path in the above method. We can do better by ";
  return p;
}

std::string select_hotspot(const SourceFile& file, const Statement& line,
                           const CommonVocabulary& vocab) {
  for (const auto& token : statement_tokens(file, line)) {
    if (classify_token(token, vocab) == TokenClass::kCommonIdentifier) return token.text;
  }
  throw NoHotspotIdentifier("buggy line '" + line.text + "' has no common identifier");
}

}  // namespace perfix
