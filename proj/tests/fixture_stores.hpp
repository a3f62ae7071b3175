/// @file fixture_stores.hpp
/// @brief Synthetic sealed stores shared by the acceptance binary, the
/// report tests, and the CLI smoke script (via make_fixtures).

#pragma once

#include "groundeval/clients.hpp"
#include "groundeval/report.hpp"
#include "groundeval/scaffold.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace fixtures {

/// One row of the frozen 500-item joint verdict table: per-judge verdicts
/// for run A and run B (order: claude, gpt, gemini; 1 = TRUE) and how many
/// items carry this pattern.
struct JointPattern {
    std::array<int, 3> a;
    std::array<int, 3> b;
    int count;
};

/// The full table. Row counts sum to 500. Constructed so that the per-judge
/// joint counts are claude 342/97/34/27, gpt 288/57/100/55, gemini
/// 221/98/106/75 (TT/TF/FT/FF, A-side verdict first) and the unanimity
/// counts are 297 (A) and 373 (B).
const std::vector<JointPattern>& joint_table();

inline const std::vector<std::string>& fixture_panel_ids() {
    static const std::vector<std::string> ids{"judge-claude", "judge-gpt", "judge-gemini"};
    return ids;
}

/// Expands the table into two sealed verdict stores over items
/// "item-0001".."item-0500" (table order, stable across calls).
void build_comparison_stores(const std::filesystem::path& dir_a,
                             const std::filesystem::path& dir_b);

/// Everything score/compare needs, generated without any network: a corpus,
/// two sealed response stores (one scaffolded run, one plain run), and a
/// sealed judge-completion store that replays every judge query the two
/// score passes will issue.
struct PipelineFixture {
    std::filesystem::path corpus;
    std::filesystem::path responses_a;
    std::filesystem::path responses_b;
    std::filesystem::path judge_store;

    groundeval::clients::ModelEndpoint endpoint_a;
    groundeval::clients::ModelEndpoint endpoint_b;
    std::vector<groundeval::clients::ModelEndpoint> panel;
    groundeval::clients::JudgeTemplate judge_template;
    groundeval::scaffold::ScaffoldTemplate scaffold_template;
    groundeval::scaffold::ScaffoldConfig config_a;
    groundeval::scaffold::ScaffoldConfig config_b;
    std::uint64_t seed = 0;
};

PipelineFixture build_pipeline_fixture(const std::filesystem::path& root, int n_items,
                                       std::uint64_t seed);

/// Raw text of the templates the pipeline fixture parses, so make_fixtures
/// can write byte-identical copies for the CLI to load.
const char* fixture_scaffold_text();
const char* fixture_judge_text();

} // namespace fixtures
