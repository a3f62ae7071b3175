/// @file report.hpp
/// @brief Pipeline orchestration and report assembly.
///
/// Ties the modules into the run / score / compare / progressive / cost
/// flows and renders each report in two formats with identical values:
/// markdown for reading, JSON for machines. Reports are deterministic
/// functions of (sealed stores, seeds, config): they identify inputs by
/// store content digests, never by filesystem paths, and carry no
/// generation-time clock, so regenerating a report yields identical bytes.

#pragma once

#include "groundeval/clients.hpp"
#include "groundeval/costmodel.hpp"
#include "groundeval/dataset.hpp"
#include "groundeval/protocol.hpp"
#include "groundeval/scaffold.hpp"
#include "groundeval/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace groundeval::report {

inline constexpr const char* kToolVersion = "groundeval 0.1.0";

/// Provenance a sealed response store carries in its manifest metadata.
struct RunManifest {
    std::string run_id;
    std::string corpus_digest;       ///< source_corpus_id of the subset
    std::string selection_kind;      ///< "full" or "first_n"
    long selection_n = 0;
    std::string scaffold_config_digest;
    std::string endpoint_name;
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    /// item content digest -> request digest, the bridge from items to
    /// completion records.
    std::map<std::string, std::string> requests;
    long total_input_tokens = 0;
    long total_output_tokens = 0;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

/// Digest of a scaffold configuration plus its template, recorded in run
/// manifests so two runs are comparable only when their scaffolds match.
std::string scaffold_config_digest(const scaffold::ScaffoldConfig& config,
                                   const scaffold::ScaffoldTemplate& tmpl);

struct VerdictRecord {
    std::string item_digest;
    std::string judge_id;
    bool verdict = false;
    bool eligible = true;
    std::string raw_judgment;
    std::string timestamp; ///< provenance only, excluded from content digests
};

/// Verdict store: one record per (item, judge) under <dir>/records, sealed
/// with a manifest naming the panel, the item order, and the response store
/// digest the verdicts were computed from.
class VerdictStore {
  public:
    explicit VerdictStore(std::filesystem::path dir, bool create = true);

    void append(const VerdictRecord& record);
    void seal(const std::vector<std::string>& panel, const std::vector<std::string>& item_order,
              const std::string& response_store_digest, std::uint64_t seed);

    bool sealed() const;
    std::string content_digest() const; ///< timestamps excluded

    std::vector<std::string> panel() const;
    std::vector<std::string> item_order() const;
    std::string response_store_digest() const;
    std::uint64_t seed() const;

    /// Reconstructs ItemScores in manifest item order.
    std::vector<protocol::ItemScore> load_scores() const;

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path record_path(const std::string& item_digest,
                                      const std::string& judge_id) const;
    void require_sealed() const;

    std::filesystem::path dir_;
};

/// Reads the RunManifest back out of a sealed response store's manifest
/// metadata.
RunManifest load_run_manifest(const clients::CompletionStore& store);

struct RunOptions {
    clients::ModelEndpoint endpoint;
    scaffold::ScaffoldConfig scaffold_config;
    scaffold::ScaffoldTemplate scaffold_template;
    std::string run_id;
    std::uint64_t seed = 0;
};

/// Assembles prompts for every item in the subset, completes them through
/// `client`, and seals the store with a RunManifest. Returns the manifest.
RunManifest run_subset(const dataset::EvalSubset& subset, clients::Client& client,
                       clients::CompletionStore& store, const RunOptions& options);

struct ScoreOptions {
    std::vector<clients::ModelEndpoint> panel; ///< exactly three judges
    clients::JudgeTemplate judge_template;
    std::uint64_t seed = 0;
};

struct ScoreReport {
    protocol::RunScore run_score;
    std::string response_store_digest;
    std::string verdict_store_digest;
    std::string run_id;
    long parsed_structured = 0;
    long parsed_fallback = 0;

    std::string to_json() const;
    std::string to_markdown() const;
};

/// Scores a sealed response store with a judge panel: parses each completion,
/// anonymizes the presentation, queries the judges through `judge_client`
/// (record or replay), and seals the verdict store.
ScoreReport score_store(const dataset::EvalSubset& subset, clients::CompletionStore& responses,
                        clients::Client& judge_client, VerdictStore& verdicts,
                        const ScoreOptions& options);

struct CompareOptions {
    std::vector<double> margins{0.05, 0.03};
    long resamples = 10000;
    std::uint64_t seed = 0;
    bool permutation_add_one = false;
    std::vector<long> checkpoints{10, 20, 50, 100, 200, 500};
    std::string label_a = "A";
    std::string label_b = "B";
};

struct JudgeComparisonRow {
    std::string judge_id;
    long both_true = 0;
    long only_a = 0;
    long only_b = 0;
    long both_false = 0;
    double agreement = 0.0; ///< (both_true + both_false) / n
    std::optional<stats::McNemarResult> mcnemar; ///< absent when b = c = 0
};

struct BatchRow {
    long checkpoint = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    int winner = 0; ///< +1 a, -1 b, 0 tie (exact rational comparison)
};

struct ComparisonReport {
    std::string label_a;
    std::string label_b;
    std::string verdict_digest_a;
    std::string verdict_digest_b;
    std::string response_digest_a;
    std::string response_digest_b;
    long n_pairs = 0;
    long excluded_ineligible = 0; ///< pairs dropped because either side was a non-attempt
    std::vector<dataset::UnmatchedResponse> unmatched;

    double mean_a = 0.0;
    double mean_b = 0.0;
    double delta = 0.0;
    stats::IntervalEstimate bootstrap95;
    stats::IntervalEstimate bootstrap90;
    stats::PermutationResult permutation;
    stats::EffectSize effect;
    std::vector<stats::TostResult> tost_results;

    std::vector<JudgeComparisonRow> judges;
    double unanimity_a = 0.0;
    double unanimity_b = 0.0;

    std::vector<BatchRow> batches;
    long wins_a = 0;
    long wins_b = 0;
    stats::StabilityStats stability_a;
    stats::StabilityStats stability_b;

    std::uint64_t seed = 0;
    long resamples = 0;

    std::string to_json() const;
    std::string to_markdown() const;
};

/// Full paired comparison of two sealed verdict stores.
ComparisonReport compare_runs(const VerdictStore& a, const VerdictStore& b,
                              const CompareOptions& options);

struct ProgressiveReport {
    std::string verdict_digest;
    stats::ProgressiveResult result;

    std::string to_json() const;
    std::string to_markdown() const;
};

/// Progressive validation over one sealed verdict store. Checkpoints beyond
/// the data are dropped; the full n is always included as the last row.
ProgressiveReport progressive_report(const VerdictStore& verdicts,
                                     const std::vector<long>& checkpoints);

struct CostReportRow {
    costmodel::PriceSheetEntry entry;
    costmodel::Money cost;
    double ratio_to_cheapest = 1.0;
    std::string trace;
};

struct CostReport {
    costmodel::RequestProfile profile;
    std::vector<CostReportRow> rows;
    std::optional<costmodel::SelfHostBreakdown> selfhost;
    std::optional<std::string> selfhost_trace;
    std::optional<costmodel::Money> edge;
    std::optional<std::string> edge_trace;

    std::string to_json() const;
    std::string to_markdown() const;
};

CostReport cost_report(const std::vector<costmodel::PriceSheetEntry>& sheet,
                       const costmodel::RequestProfile& profile,
                       const std::optional<costmodel::SelfHostProfile>& selfhost,
                       bool include_edge);

/// Renders the markdown twin of a machine-format report JSON produced by any
/// of the report types above (dispatches on the embedded report kind).
std::string render_markdown_from_json(const std::string& report_json);

} // namespace groundeval::report
