/// @file protocol.hpp
/// @brief Three-judge scoring protocol: verdicts, eligibility, aggregation.
///
/// Each response is judged grounded TRUE or FALSE by a panel of three judges.
/// The per-item score is the fraction of TRUE verdicts, so it lives on the
/// grid {0, 1/3, 2/3, 1}; scores are carried as integer TRUE counts and only
/// converted to doubles at the reporting edge, keeping downstream resampling
/// arithmetic exact. A response is dropped as ineligible (a non-attempt) only
/// when all three judges mark it ineligible; an ineligible verdict that is
/// not unanimous counts as FALSE for that judge.

#pragma once

#include "groundeval/scaffold.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace groundeval::protocol {

struct JudgeVerdict {
    std::string judge_id;
    bool verdict = false;  ///< grounded TRUE/FALSE as extracted from the judge
    bool eligible = true;  ///< false when the judge marked the response a non-attempt
    std::string raw_judgment;
};

/// The verdict that enters every computation: TRUE only when the judge said
/// TRUE and considered the response eligible.
inline bool effective_verdict(const JudgeVerdict& v) { return v.verdict && v.eligible; }

struct ItemScore {
    std::string item_digest;
    std::array<JudgeVerdict, 3> verdicts;
    int true_count = 0;     ///< effective TRUE verdicts, 0..3
    bool eligible = true;   ///< false only when all three verdicts are ineligible
    bool unanimous = false; ///< all three effective verdicts equal

    double judge_average() const { return true_count / 3.0; }
};

/// TRUE-count / 3 over three distinct-judge verdicts.
double judge_average(const std::array<JudgeVerdict, 3>& verdicts);

/// False iff every verdict has eligible = false.
bool eligibility(const std::array<JudgeVerdict, 3>& verdicts);

/// Validates the panel (three distinct judge ids) and fills the derived
/// fields.
ItemScore score_item(std::string item_digest, std::array<JudgeVerdict, 3> verdicts);

struct RunScore {
    long n = 0;                 ///< scored items (ineligible items are excluded)
    double mean_judge_average = 0.0;
    std::vector<std::pair<std::string, double>> per_judge_accuracy; ///< panel order
    double unanimity_rate = 0.0;
    long ineligible_count = 0;
};

/// Aggregates a run. All items must carry the same judge panel. Ineligible
/// items are excluded from every rate and counted in ineligible_count, which
/// keeps mean_judge_average equal to the mean of the per-judge accuracies.
RunScore aggregate_run(const std::vector<ItemScore>& scores);

struct AnonymizedPresentation {
    std::string label; ///< neutral, "Response-A", "Response-B", ...
    std::string text;  ///< response content, untouched
};

struct AnonymizationRecord {
    std::uint64_t seed = 0;
    std::vector<int> permutation; ///< presentation i shows input permutation[i]
    std::vector<std::pair<std::string, std::string>> label_to_model;
};

struct AnonymizedSet {
    std::vector<AnonymizedPresentation> presentations;
    AnonymizationRecord record;
};

/// Anonymizes a set of (model label, response text) for presentation to a
/// judge: the wrapper shows only neutral labels (never the model name), the
/// order is permuted deterministically under the seed, and the mapping is
/// recorded for de-anonymization. Content is never modified.
AnonymizedSet anonymize(const std::vector<std::pair<std::string, std::string>>& model_responses,
                        std::uint64_t seed);

/// Single-response convenience used when scoring one run: the presentation
/// label is always "Response-A".
AnonymizedPresentation anonymize(const scaffold::StructuredResponse& response, std::uint64_t seed);

/// Restores (model label, response text) in the original input order.
std::vector<std::pair<std::string, std::string>> deanonymize(const AnonymizedSet& set);

/// Wrapper text a judge sees for one presentation.
std::string render_presentation(const AnonymizedPresentation& presentation);

} // namespace groundeval::protocol
