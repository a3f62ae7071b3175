/// @file dataset.hpp
/// @brief Corpus loading, sequential subset selection, and run alignment.
///
/// A corpus is a UTF-8 file of line-delimited JSON records with fields
/// {id?, question, context, domain?}; unknown fields are ignored. Evaluation
/// always works on sequential prefixes (Q1..Qn), and two runs are paired at
/// the question level through the content digest, never through ids or file
/// order.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace groundeval::dataset {

struct EvalItem {
    std::string id;               ///< from the record, or "q{sequence_index}" when absent
    long sequence_index = 0;      ///< 1-based position in the corpus file
    std::string question;
    std::string context_document; ///< grounding document, may run to ~32K tokens
    std::string domain_tag;       ///< optional; empty when the record has none
    std::string content_digest;   ///< digest of (question, context_document)
};

enum class SelectionKind { full, first_n };

struct EvalSubset {
    std::vector<EvalItem> items; ///< ascending sequence_index
    SelectionKind kind = SelectionKind::full;
    long n = 0;                  ///< |items|; for first_n, the requested prefix length
    std::string source_corpus_id;
};

/// One model completion attached to its item. Token counts ride along for the
/// cost model; zero means the provider did not report usage.
struct ModelResponse {
    std::string item_digest;
    std::string model;
    std::string text;
    long input_tokens = 0;
    long output_tokens = 0;
};

struct PairedRecord {
    EvalItem item;
    ModelResponse response_a;
    ModelResponse response_b;
};

/// One response that could not be paired: `side` is "a" or "b", `reason` is
/// "missing_counterpart" or "unknown_item".
struct UnmatchedResponse {
    std::string side;
    std::string item_digest;
    std::string reason;
};

struct AlignmentResult {
    std::vector<PairedRecord> pairs; ///< ordered by item sequence_index
    std::vector<UnmatchedResponse> unmatched;
};

/// Loads a corpus file. Errors report the offending line number; duplicate
/// ids and empty corpora are rejected. source_corpus_id is derived from the
/// file content digest so equal files get equal ids on any machine.
EvalSubset load_corpus(const std::filesystem::path& path);

/// Parses corpus text directly (the file loader delegates here).
EvalSubset parse_corpus(std::string_view text, const std::string& corpus_id);

/// Sequential prefix Q1..Qn. n must be in [1, |corpus|].
EvalSubset select_first_n(const EvalSubset& corpus, long n);

/// Pairs two runs by content digest against `items`. Responses with a digest
/// not in `items` and responses whose counterpart is missing are listed in
/// the report instead of silently dropped. A duplicate digest inside one run
/// makes pairing ambiguous and is an error.
AlignmentResult align_pairs(const EvalSubset& items, const std::vector<ModelResponse>& run_a,
                            const std::vector<ModelResponse>& run_b);

} // namespace groundeval::dataset
