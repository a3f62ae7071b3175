/// @file clients.hpp
/// @brief Model endpoints, the content-addressed record/replay store, and
/// judge querying.
///
/// Every completion is keyed by a digest of (endpoint name, prompt,
/// temperature, decode params) and persisted in an append-only store under a
/// run directory. Record mode issues chat-completion HTTP calls with bounded
/// retries and per-endpoint rate limiting; replay mode serves exclusively
/// from the store and never touches the network, which is what makes
/// re-scoring and judge-swap experiments reproducible. Sealing a store
/// freezes it behind a manifest whose digest covers record content but not
/// wall-clock timestamps, so reports derived from a sealed store are
/// byte-stable.

#pragma once

#include "groundeval/dataset.hpp"
#include "groundeval/errors.hpp"
#include "groundeval/protocol.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace groundeval::clients {

enum class EndpointRole { candidate, judge };

struct ModelEndpoint {
    std::string name;   ///< unique label; part of every request digest
    std::string family; ///< model family for defaulting policies
    EndpointRole role = EndpointRole::candidate;
    double temperature = 1.0;
    std::string base_url; ///< http(s)://host[:port]; empty means replay-only
    std::string auth_env; ///< env var NAME holding the bearer token, never the value
    double request_timeout_s = 60.0;
    int max_retries = 3;
    int requests_per_minute = 60;
};

/// Panel default temperatures: the claude judge runs at 1.0, the other two at
/// 0.0. Explicit config always wins.
double default_judge_temperature(std::string_view family);

struct DecodeParams {
    double temperature = 1.0;
    std::optional<double> top_p;
    std::optional<long> max_tokens;
};

/// Sorted-key JSON of the non-temperature decode fields; the digest carries
/// temperature in its own slot.
std::string canonical_decode_params(const DecodeParams& decode);

struct CompletionRecord {
    std::string request_digest;
    std::string endpoint; ///< endpoint name
    std::string model;    ///< model family label
    std::string prompt;
    std::string completion;
    long input_tokens = 0;
    long output_tokens = 0;
    std::string timestamp; ///< ISO 8601 UTC; provenance only, excluded from hashes
    int attempts = 0;      ///< HTTP attempts spent; 0 for cache hits
};

/// Append-only content-addressed store: <dir>/records/<digest>.json plus
/// <dir>/manifest.json once sealed. Appends are serialized; a record can
/// never be overwritten with different content.
class CompletionStore {
  public:
    explicit CompletionStore(std::filesystem::path dir, bool create = true);

    std::optional<CompletionRecord> find(const std::string& digest) const;
    void append(const CompletionRecord& record);

    /// Writes the manifest: sorted digest list, content digest, metadata.
    /// Idempotent for identical content; resealing with different content is
    /// an error.
    void seal(const std::string& metadata_json = "{}");
    bool sealed() const;

    /// Digest over canonical record content (timestamps and attempt counts
    /// excluded). Defined for unsealed stores too.
    std::string content_digest() const;

    std::vector<std::string> digests() const; ///< sorted
    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path record_path(const std::string& digest) const;

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

enum class ClientMode { record, replay };

struct HttpOptions {
    double backoff_initial_s = 0.5; ///< doubles per retry
    double backoff_cap_s = 8.0;
};

/// Judge output that matched no extraction rule. Never coerced to a verdict;
/// carries the raw text for inspection.
struct JudgeParseError : Error {
    JudgeParseError(const std::string& message, std::string raw_text)
        : Error(ErrorCategory::internal, message), raw(std::move(raw_text)) {}
    std::string raw;
};

class Client {
  public:
    Client(ClientMode mode, CompletionStore& store, HttpOptions options = {});

    /// Cache-first completion. Record mode calls the endpoint on a miss and
    /// persists the result; replay mode raises ReplayMissError instead.
    /// Concurrent calls for the same digest coalesce into one request.
    CompletionRecord complete(const ModelEndpoint& endpoint, const std::string& prompt,
                              const DecodeParams& decode);

    ClientMode mode() const { return mode_; }

  private:
    CompletionRecord fetch_http(const ModelEndpoint& endpoint, const std::string& prompt,
                                const DecodeParams& decode, const std::string& digest);
    void rate_limit(const ModelEndpoint& endpoint);

    ClientMode mode_;
    CompletionStore& store_;
    HttpOptions options_;

    std::mutex flight_mutex_;
    std::condition_variable flight_cv_;
    std::set<std::string> inflight_;

    struct Bucket {
        double tokens = 0.0;
        double capacity = 0.0;
        double refill_per_s = 0.0;
        std::chrono::steady_clock::time_point last;
    };
    std::mutex bucket_mutex_;
    std::map<std::string, Bucket> buckets_;
};

/// Judge prompt template: a [template] section with {{question}},
/// {{context}}, and {{presentation}} placeholders, plus an [extract] section
/// naming the verdict extraction rule ("first_token_boolean" or
/// "json_field:<name>").
struct JudgeTemplate {
    std::string body;
    std::string extract_rule = "first_token_boolean";
};

JudgeTemplate parse_judge_template(std::string_view text);
JudgeTemplate load_judge_template(const std::filesystem::path& path);

/// Renders the judge prompt for one item and presentation.
std::string render_judge_prompt(const JudgeTemplate& tmpl, const dataset::EvalItem& item,
                                const protocol::AnonymizedPresentation& presentation);

/// Applies the template's extraction rule to raw judge output. TRUE and
/// FALSE map to eligible verdicts, INELIGIBLE to eligible = false; anything
/// else raises JudgeParseError.
protocol::JudgeVerdict extract_verdict(const JudgeTemplate& tmpl, const std::string& judge_id,
                                       const std::string& raw);

/// Renders the template, runs the completion through `client`, and extracts
/// the verdict. The endpoint must have the judge role.
protocol::JudgeVerdict judge_query(Client& client, const ModelEndpoint& judge,
                                   const dataset::EvalItem& item,
                                   const protocol::AnonymizedPresentation& presentation,
                                   const JudgeTemplate& judge_template);

} // namespace groundeval::clients
