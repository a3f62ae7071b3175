/// @file scaffold.hpp
/// @brief Directed-reasoning prompt assembly and structured-output parsing.
///
/// The scaffold wraps a base system prompt with an explicit analyze-then-
/// answer protocol: a scaffold body stating the context-priority policy, a
/// block of format rules, and one or three worked examples. Outputs come back
/// as "Analysis: ... / Response: ..." and are split by a line-anchored,
/// first-occurrence marker parser with a whole-text fallback so nothing is
/// ever discarded.

#pragma once

#include "groundeval/dataset.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace groundeval::scaffold {

struct FewShotExample {
    std::string client_turn;
    std::string context_block;
    std::string analysis;
    std::string response;
};

struct ScaffoldTemplate {
    std::string base_system_prompt;
    std::string scaffold_body;
    std::string format_rules;
    std::vector<FewShotExample> few_shot_examples; ///< example 1 is the conflict case
};

enum class DeploymentMode { context_dominant, safety_override, balanced_authority };

struct ScaffoldConfig {
    bool enabled = true;
    int few_shot_count = 1; ///< 1 or 3
    DeploymentMode mode = DeploymentMode::context_dominant;
    std::optional<std::string> safety_exception_text;     ///< required for safety_override
    std::optional<double> context_confidence_threshold;   ///< required for balanced_authority
    double temperature = 1.0;
};

/// Throws ConfigError when mode-specific fields are missing, few_shot_count
/// is not 1 or 3, or temperature is negative.
void validate(const ScaffoldConfig& config);

enum class ParseStatus { structured, unstructured_fallback };

struct StructuredResponse {
    std::optional<std::string> analysis;
    std::string answer;
    std::string raw;
    ParseStatus parse_status = ParseStatus::unstructured_fallback;
};

struct AssembledPrompt {
    std::string text;
    bool used_scaffold = false;
    int few_shot_used = 0;
    /// Set when balanced_authority routed the item to the plain prompt.
    std::optional<std::string> routing_note;
};

/// Template file format: line-anchored [section] headers over UTF-8 text.
/// Sections: base, body, rules, example.N.client / .context / .analysis /
/// .response with N counting from 1.
ScaffoldTemplate parse_template(std::string_view text);
ScaffoldTemplate load_template(const std::filesystem::path& path);
std::string serialize_template(const ScaffoldTemplate& tmpl);

/// Builds the full prompt for one item. With the scaffold disabled the output
/// is base system prompt + question + context only. safety_override splices
/// the safety exception into the rules block exactly once. balanced_authority
/// consults `context_confidence` (an input, never computed here): below the
/// threshold the item is routed to the disabled-scaffold prompt and the
/// decision is recorded in routing_note. Items without a confidence value
/// keep the scaffold.
AssembledPrompt assemble_prompt(const dataset::EvalItem& item, const ScaffoldTemplate& tmpl,
                                const ScaffoldConfig& config,
                                std::optional<double> context_confidence = std::nullopt);

/// Splits raw model output on the first line-anchored "Analysis:" and the
/// first subsequent line-anchored "Response:" (case-sensitive). If either
/// marker is missing the whole text becomes the answer with
/// parse_status = unstructured_fallback. Empty input is an error.
StructuredResponse parse_structured(std::string_view raw);

struct FewShotChoice {
    int count = 1;
    bool unknown_family = false; ///< set when the family has no recorded policy
};

/// Smallest effective few-shot count per model family: 3 for gpt-4o and
/// claude-3.5-sonnet, 1 for the other known families, 1 with a warning flag
/// for unknown labels. Matching is case-insensitive with ' ' and '_'
/// normalized to '-'.
FewShotChoice few_shot_for_family(std::string_view family);

/// Candidate decoding temperature defaults: 0.3 for the small-model families,
/// 1.0 for frontier and unknown families. Config can always override.
double default_temperature(std::string_view family);

/// Relative prompt growth (scaffolded - base) / base. base must be positive.
double scaffold_token_overhead(long base_prompt_tokens, long scaffolded_prompt_tokens);

} // namespace groundeval::scaffold
