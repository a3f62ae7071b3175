/// @file report.cpp

#include "groundeval/report.hpp"

#include "groundeval/digest.hpp"
#include "groundeval/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace groundeval::report {

using nlohmann::json;

namespace {

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt_fixed(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

std::string fmt_compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw ConfigError("report: cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json interval_to_json(const stats::IntervalEstimate& ci) {
    return json{{"point", ci.point},
                {"lower", ci.lower},
                {"upper", ci.upper},
                {"level", ci.level},
                {"method", stats::interval_method_name(ci.method)}};
}

std::string interval_cell(const json& ci) {
    return "[" + fmt_fixed(ci.at("lower").get<double>(), 6) + ", " +
           fmt_fixed(ci.at("upper").get<double>(), 6) + "]";
}

} // namespace

std::string RunManifest::to_json() const {
    json requests_json = json::object();
    for (const auto& [item, request] : requests) requests_json[item] = request;
    return json{{"run_id", run_id},
                {"corpus_digest", corpus_digest},
                {"selection", json{{"kind", selection_kind}, {"n", selection_n}}},
                {"scaffold_config_digest", scaffold_config_digest},
                {"endpoint", endpoint_name},
                {"tool_version", tool_version},
                {"seed", std::to_string(seed)},
                {"requests", requests_json},
                {"total_input_tokens", total_input_tokens},
                {"total_output_tokens", total_output_tokens}}
        .dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run manifest: ") + e.what());
    }
    RunManifest manifest;
    manifest.run_id = doc.at("run_id").get<std::string>();
    manifest.corpus_digest = doc.at("corpus_digest").get<std::string>();
    manifest.selection_kind = doc.at("selection").at("kind").get<std::string>();
    manifest.selection_n = doc.at("selection").at("n").get<long>();
    manifest.scaffold_config_digest = doc.at("scaffold_config_digest").get<std::string>();
    manifest.endpoint_name = doc.at("endpoint").get<std::string>();
    manifest.tool_version = doc.at("tool_version").get<std::string>();
    manifest.seed = std::stoull(doc.at("seed").get<std::string>());
    for (const auto& [item, request] : doc.at("requests").items()) {
        manifest.requests[item] = request.get<std::string>();
    }
    manifest.total_input_tokens = doc.value("total_input_tokens", 0L);
    manifest.total_output_tokens = doc.value("total_output_tokens", 0L);
    return manifest;
}

std::string scaffold_config_digest(const scaffold::ScaffoldConfig& config,
                                   const scaffold::ScaffoldTemplate& tmpl) {
    json doc{{"enabled", config.enabled},
             {"few_shot_count", config.few_shot_count},
             {"mode", static_cast<int>(config.mode)},
             {"temperature", config.temperature}};
    if (config.safety_exception_text) doc["safety_exception_text"] = *config.safety_exception_text;
    if (config.context_confidence_threshold) {
        doc["context_confidence_threshold"] = *config.context_confidence_threshold;
    }
    return sha256_hex(doc.dump() + "\n" + scaffold::serialize_template(tmpl));
}

RunManifest load_run_manifest(const clients::CompletionStore& store) {
    std::ifstream in(store.dir() / "manifest.json");
    if (!in) throw ConfigError("response store is not sealed: " + store.dir().string());
    json doc;
    in >> doc;
    return RunManifest::from_json(doc.at("metadata").dump());
}

// --- VerdictStore ---------------------------------------------------------

namespace {

bool fs_safe(const std::string& name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
}

json verdict_to_json(const VerdictRecord& record) {
    return json{{"item_digest", record.item_digest}, {"judge_id", record.judge_id},
                {"verdict", record.verdict},         {"eligible", record.eligible},
                {"raw_judgment", record.raw_judgment}, {"timestamp", record.timestamp}};
}

std::string canonical_verdict(const json& doc) {
    json copy = doc;
    copy.erase("timestamp");
    return copy.dump();
}

} // namespace

VerdictStore::VerdictStore(std::filesystem::path dir, bool create) : dir_(std::move(dir)) {
    const auto records = dir_ / "records";
    if (create) {
        std::filesystem::create_directories(records);
    } else if (!std::filesystem::is_directory(records)) {
        throw ConfigError("verdict store: no records directory under " + dir_.string());
    }
}

std::filesystem::path VerdictStore::record_path(const std::string& item_digest,
                                                const std::string& judge_id) const {
    return dir_ / "records" / (item_digest + "." + judge_id + ".json");
}

void VerdictStore::append(const VerdictRecord& record) {
    if (!fs_safe(record.item_digest) || !fs_safe(record.judge_id)) {
        throw ConfigError("verdict store: unsafe item digest or judge id");
    }
    if (sealed()) {
        throw ConfigError("verdict store: sealed, no further appends: " + dir_.string());
    }
    const auto path = record_path(record.item_digest, record.judge_id);
    const json doc = verdict_to_json(record);
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        json existing;
        in >> existing;
        if (canonical_verdict(existing) != canonical_verdict(doc)) {
            throw ConfigError("verdict store: conflicting verdict for " + record.item_digest +
                              " by " + record.judge_id);
        }
        return;
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::string VerdictStore::content_digest() const {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "records")) {
        if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::string buffer;
    for (const auto& path : paths) {
        std::ifstream in(path);
        json doc;
        in >> doc;
        buffer += canonical_verdict(doc);
        buffer += '\n';
    }
    return sha256_hex(buffer);
}

void VerdictStore::seal(const std::vector<std::string>& panel,
                        const std::vector<std::string>& item_order,
                        const std::string& response_store_digest, std::uint64_t seed) {
    const std::string content = content_digest();
    const auto manifest_path = dir_ / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        json existing;
        in >> existing;
        if (existing.value("content_digest", "") != content) {
            throw ConfigError("verdict store: already sealed with different content: " +
                              dir_.string());
        }
        return;
    }
    json manifest{{"sealed", true},
                  {"content_digest", content},
                  {"panel", panel},
                  {"item_order", item_order},
                  {"response_store_digest", response_store_digest},
                  {"seed", std::to_string(seed)},
                  {"tool_version", kToolVersion}};
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

bool VerdictStore::sealed() const { return std::filesystem::exists(dir_ / "manifest.json"); }

void VerdictStore::require_sealed() const {
    if (!sealed()) throw ConfigError("verdict store is not sealed: " + dir_.string());
}

namespace {

json read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    json doc;
    in >> doc;
    return doc;
}

} // namespace

std::vector<std::string> VerdictStore::panel() const {
    require_sealed();
    return read_manifest(dir_).at("panel").get<std::vector<std::string>>();
}

std::vector<std::string> VerdictStore::item_order() const {
    require_sealed();
    return read_manifest(dir_).at("item_order").get<std::vector<std::string>>();
}

std::string VerdictStore::response_store_digest() const {
    require_sealed();
    return read_manifest(dir_).at("response_store_digest").get<std::string>();
}

std::uint64_t VerdictStore::seed() const {
    require_sealed();
    return std::stoull(read_manifest(dir_).at("seed").get<std::string>());
}

std::vector<protocol::ItemScore> VerdictStore::load_scores() const {
    require_sealed();
    const auto panel_ids = panel();
    if (panel_ids.size() != 3) {
        throw ConfigError("verdict store: panel must have exactly 3 judges");
    }
    std::vector<protocol::ItemScore> scores;
    for (const auto& item : item_order()) {
        std::array<protocol::JudgeVerdict, 3> verdicts;
        for (size_t j = 0; j < 3; ++j) {
            const auto path = record_path(item, panel_ids[j]);
            std::ifstream in(path);
            if (!in) {
                throw ConfigError("verdict store: missing record " + path.string());
            }
            json doc;
            in >> doc;
            verdicts[j].judge_id = doc.at("judge_id").get<std::string>();
            verdicts[j].verdict = doc.at("verdict").get<bool>();
            verdicts[j].eligible = doc.at("eligible").get<bool>();
            verdicts[j].raw_judgment = doc.at("raw_judgment").get<std::string>();
        }
        scores.push_back(protocol::score_item(item, std::move(verdicts)));
    }
    return scores;
}

// --- run ------------------------------------------------------------------

RunManifest run_subset(const dataset::EvalSubset& subset, clients::Client& client,
                       clients::CompletionStore& store, const RunOptions& options) {
    scaffold::validate(options.scaffold_config);
    if (options.run_id.empty()) throw ConfigError("run: run_id must not be empty");

    RunManifest manifest;
    manifest.run_id = options.run_id;
    manifest.corpus_digest = subset.source_corpus_id;
    manifest.selection_kind = subset.kind == dataset::SelectionKind::first_n ? "first_n" : "full";
    manifest.selection_n = subset.n;
    manifest.scaffold_config_digest =
        scaffold_config_digest(options.scaffold_config, options.scaffold_template);
    manifest.endpoint_name = options.endpoint.name;
    manifest.seed = options.seed;

    clients::DecodeParams decode;
    decode.temperature = options.scaffold_config.temperature;

    for (const auto& item : subset.items) {
        const scaffold::AssembledPrompt prompt =
            scaffold::assemble_prompt(item, options.scaffold_template, options.scaffold_config);
        const clients::CompletionRecord record =
            client.complete(options.endpoint, prompt.text, decode);
        manifest.requests[item.content_digest] = record.request_digest;
        manifest.total_input_tokens += record.input_tokens;
        manifest.total_output_tokens += record.output_tokens;
    }

    store.seal(manifest.to_json());
    return manifest;
}

// --- score ----------------------------------------------------------------

ScoreReport score_store(const dataset::EvalSubset& subset, clients::CompletionStore& responses,
                        clients::Client& judge_client, VerdictStore& verdicts,
                        const ScoreOptions& options) {
    if (!responses.sealed()) {
        throw ConfigError("score: response store must be sealed first");
    }
    if (options.panel.size() != 3) {
        throw ConfigError("score: judge panel must have exactly 3 members");
    }
    std::set<std::string> panel_names;
    for (const auto& judge : options.panel) {
        if (judge.role != clients::EndpointRole::judge) {
            throw ConfigError("score: endpoint " + judge.name + " does not have the judge role");
        }
        if (!panel_names.insert(judge.name).second) {
            throw ConfigError("score: duplicate judge " + judge.name);
        }
    }

    const RunManifest manifest = load_run_manifest(responses);
    ScoreReport result;
    std::vector<std::string> item_order;

    for (const auto& item : subset.items) {
        const auto request = manifest.requests.find(item.content_digest);
        if (request == manifest.requests.end()) {
            throw ConfigError("score: run has no response for item " + item.id);
        }
        const auto record = responses.find(request->second);
        if (!record) {
            throw ConfigError("score: response store missing record " + request->second);
        }

        const scaffold::StructuredResponse structured =
            scaffold::parse_structured(record->completion);
        if (structured.parse_status == scaffold::ParseStatus::structured) {
            ++result.parsed_structured;
        } else {
            ++result.parsed_fallback;
        }

        const protocol::AnonymizedPresentation presentation =
            protocol::anonymize(structured, options.seed);
        for (const auto& judge : options.panel) {
            const protocol::JudgeVerdict verdict = clients::judge_query(
                judge_client, judge, item, presentation, options.judge_template);
            VerdictRecord verdict_record;
            verdict_record.item_digest = item.content_digest;
            verdict_record.judge_id = verdict.judge_id;
            verdict_record.verdict = verdict.verdict;
            verdict_record.eligible = verdict.eligible;
            verdict_record.raw_judgment = verdict.raw_judgment;
            verdict_record.timestamp = iso_utc_now();
            verdicts.append(verdict_record);
        }
        item_order.push_back(item.content_digest);
    }

    std::vector<std::string> panel_order;
    for (const auto& judge : options.panel) panel_order.push_back(judge.name);
    verdicts.seal(panel_order, item_order, responses.content_digest(), options.seed);

    result.run_score = protocol::aggregate_run(verdicts.load_scores());
    result.response_store_digest = responses.content_digest();
    result.verdict_store_digest = verdicts.content_digest();
    result.run_id = manifest.run_id;
    return result;
}

// --- compare --------------------------------------------------------------

namespace {

std::vector<long> effective_checkpoints(const std::vector<long>& requested, long n) {
    std::vector<long> out;
    for (long checkpoint : requested) {
        if (checkpoint >= 1 && checkpoint <= n) out.push_back(checkpoint);
    }
    if (out.empty()) out.push_back(n);
    return out;
}

} // namespace

ComparisonReport compare_runs(const VerdictStore& a, const VerdictStore& b,
                              const CompareOptions& options) {
    const auto scores_a = a.load_scores();
    const auto scores_b = b.load_scores();

    std::unordered_map<std::string, const protocol::ItemScore*> index_b;
    for (const auto& score : scores_b) index_b.emplace(score.item_digest, &score);
    std::set<std::string> digests_a;
    for (const auto& score : scores_a) digests_a.insert(score.item_digest);

    ComparisonReport report;
    report.label_a = options.label_a;
    report.label_b = options.label_b;
    report.verdict_digest_a = a.content_digest();
    report.verdict_digest_b = b.content_digest();
    report.response_digest_a = a.response_store_digest();
    report.response_digest_b = b.response_store_digest();
    report.seed = options.seed;
    report.resamples = options.resamples;

    std::vector<std::pair<protocol::ItemScore, protocol::ItemScore>> pairs;
    long excluded_ineligible = 0;
    for (const auto& score : scores_a) {
        const auto match = index_b.find(score.item_digest);
        if (match == index_b.end()) {
            report.unmatched.push_back({"a", score.item_digest, "missing_counterpart"});
            continue;
        }
        if (!score.eligible || !match->second->eligible) {
            // A non-attempt on either side drops the pair from inference,
            // consistent with single-run aggregation.
            ++excluded_ineligible;
            continue;
        }
        pairs.emplace_back(score, *match->second);
    }
    for (const auto& score : scores_b) {
        if (!digests_a.count(score.item_digest)) {
            report.unmatched.push_back({"b", score.item_digest, "missing_counterpart"});
        }
    }
    if (pairs.empty()) {
        throw StatisticsError("compare: no eligible pairs to compare");
    }
    report.n_pairs = static_cast<long>(pairs.size());
    report.excluded_ineligible = excluded_ineligible;

    const stats::PairedDiffSeries series =
        stats::paired_diffs(pairs, options.label_a, options.label_b);

    long long sum_a = 0;
    long long sum_b = 0;
    long unanimous_a = 0;
    long unanimous_b = 0;
    for (const auto& [sa, sb] : pairs) {
        sum_a += sa.true_count;
        sum_b += sb.true_count;
        unanimous_a += sa.unanimous ? 1 : 0;
        unanimous_b += sb.unanimous ? 1 : 0;
    }
    report.mean_a = static_cast<double>(sum_a) / (3.0 * report.n_pairs);
    report.mean_b = static_cast<double>(sum_b) / (3.0 * report.n_pairs);
    report.delta = series.mean();
    report.unanimity_a = static_cast<double>(unanimous_a) / report.n_pairs;
    report.unanimity_b = static_cast<double>(unanimous_b) / report.n_pairs;

    report.bootstrap95 = stats::bootstrap_ci(series, 0.95, options.resamples, options.seed);
    report.bootstrap90 = stats::bootstrap_ci(series, 0.90, options.resamples, options.seed);
    report.permutation = stats::permutation_p(series, options.resamples, options.seed,
                                              options.permutation_add_one);
    report.effect = stats::effect_size(series);
    for (double margin : options.margins) {
        report.tost_results.push_back(
            stats::tost(series, margin, options.resamples, options.seed));
    }

    // Per-judge tables over the judges both panels share, in panel-a order.
    const auto panel_a = a.panel();
    const auto panel_b = b.panel();
    for (const auto& judge_id : panel_a) {
        if (std::find(panel_b.begin(), panel_b.end(), judge_id) == panel_b.end()) continue;
        JudgeComparisonRow row;
        row.judge_id = judge_id;
        std::vector<std::pair<protocol::JudgeVerdict, protocol::JudgeVerdict>> verdict_pairs;
        for (const auto& [sa, sb] : pairs) {
            const protocol::JudgeVerdict* va = nullptr;
            const protocol::JudgeVerdict* vb = nullptr;
            for (const auto& v : sa.verdicts) {
                if (v.judge_id == judge_id) va = &v;
            }
            for (const auto& v : sb.verdicts) {
                if (v.judge_id == judge_id) vb = &v;
            }
            verdict_pairs.emplace_back(*va, *vb);
            const bool at = protocol::effective_verdict(*va);
            const bool bt = protocol::effective_verdict(*vb);
            row.both_true += (at && bt) ? 1 : 0;
            row.both_false += (!at && !bt) ? 1 : 0;
        }
        const stats::DiscordantCounts counts = stats::discordant_counts(verdict_pairs);
        row.only_a = counts.b;
        row.only_b = counts.c;
        row.agreement =
            static_cast<double>(row.both_true + row.both_false) / static_cast<double>(pairs.size());
        if (counts.b + counts.c > 0) {
            row.mcnemar = stats::mcnemar(counts.b, counts.c);
        }
        report.judges.push_back(std::move(row));
    }

    // Cumulative batch table; winner decided by exact rational comparison.
    const auto checkpoints = effective_checkpoints(options.checkpoints, report.n_pairs);
    std::vector<double> means_a;
    std::vector<double> means_b;
    long long run_sum_a = 0;
    long long run_sum_b = 0;
    size_t index = 0;
    for (long checkpoint : checkpoints) {
        for (; index < static_cast<size_t>(checkpoint); ++index) {
            run_sum_a += pairs[index].first.true_count;
            run_sum_b += pairs[index].second.true_count;
        }
        BatchRow row;
        row.checkpoint = checkpoint;
        row.mean_a = static_cast<double>(run_sum_a) / (3.0 * checkpoint);
        row.mean_b = static_cast<double>(run_sum_b) / (3.0 * checkpoint);
        row.winner = run_sum_a > run_sum_b ? 1 : (run_sum_a < run_sum_b ? -1 : 0);
        report.wins_a += row.winner == 1 ? 1 : 0;
        report.wins_b += row.winner == -1 ? 1 : 0;
        means_a.push_back(row.mean_a);
        means_b.push_back(row.mean_b);
        report.batches.push_back(row);
    }
    report.stability_a = stats::stability_from_means(means_a);
    report.stability_b = stats::stability_from_means(means_b);
    return report;
}

// --- progressive ----------------------------------------------------------

ProgressiveReport progressive_report(const VerdictStore& verdicts,
                                     const std::vector<long>& checkpoints) {
    const auto scores = verdicts.load_scores();
    const long n = static_cast<long>(scores.size());
    auto effective = effective_checkpoints(checkpoints, n);
    if (effective.back() != n) effective.push_back(n);

    ProgressiveReport report;
    report.verdict_digest = verdicts.content_digest();
    report.result = stats::progressive_stats(scores, effective);
    return report;
}

// --- cost -----------------------------------------------------------------

CostReport cost_report(const std::vector<costmodel::PriceSheetEntry>& sheet,
                       const costmodel::RequestProfile& profile,
                       const std::optional<costmodel::SelfHostProfile>& selfhost,
                       bool include_edge) {
    if (sheet.empty()) throw ConfigError("cost: empty price sheet");

    CostReport report;
    report.profile = profile;

    for (const auto& entry : sheet) {
        CostReportRow row;
        row.entry = entry;
        row.cost = costmodel::normalized_cost(entry, profile);
        std::ostringstream trace;
        trace << entry.input_price_per_1k.to_string() << " x " << profile.input_tokens
              << "/1000 + " << entry.output_price_per_1k.to_string() << " x "
              << profile.output_tokens << "/1000";
        if (profile.overhead_fraction > 0.0) {
            trace << ", x (1 + " << fmt_compact(profile.overhead_fraction) << ")";
        }
        trace << " = " << row.cost.to_string();
        row.trace = trace.str();
        report.rows.push_back(std::move(row));
    }

    const auto cheapest = std::min_element(
        report.rows.begin(), report.rows.end(),
        [](const CostReportRow& x, const CostReportRow& y) { return x.cost < y.cost; });
    if (cheapest->cost.nanos() > 0) {
        for (auto& row : report.rows) {
            row.ratio_to_cheapest = costmodel::cost_ratio(row.cost, cheapest->cost);
        }
    }

    const long tokens = profile.input_tokens + profile.output_tokens;
    if (selfhost) {
        report.selfhost = costmodel::selfhost_cost(*selfhost, tokens);
        std::ostringstream trace;
        trace << tokens << " tok / " << fmt_compact(selfhost->throughput_tokens_per_s)
              << " tok/s = " << fmt_fixed(report.selfhost->seconds, 3) << " s; "
              << selfhost->hourly_rate.to_string() << "/hr -> raw "
              << report.selfhost->raw_cost.to_string() << "; / utilization "
              << fmt_compact(selfhost->utilization) << " = "
              << report.selfhost->utilization_adjusted_cost.to_string() << "; / batch "
              << fmt_compact(selfhost->batch_factor) << " = "
              << report.selfhost->batched_cost.to_string();
        report.selfhost_trace = trace.str();

        if (include_edge) {
            report.edge = costmodel::edge_cost(*selfhost, tokens);
            std::ostringstream edge_trace;
            edge_trace << "hourly rate = capex "
                       << selfhost->amortized_capex_per_hour->to_string() << " + power "
                       << selfhost->power_per_hour->to_string() << "; same formula -> "
                       << report.edge->to_string()
                       << " (batching beyond batch_factor is not modeled)";
            report.edge_trace = edge_trace.str();
        }
    } else if (include_edge) {
        throw ConfigError("cost: edge costing requires a self-host profile with capex and power");
    }
    return report;
}

// --- serialization --------------------------------------------------------

namespace {

json score_to_json_doc(const ScoreReport& report) {
    json per_judge = json::array();
    for (const auto& [judge, accuracy] : report.run_score.per_judge_accuracy) {
        per_judge.push_back(json{{"judge", judge}, {"accuracy", accuracy}});
    }
    return json{{"report", "run_score"},
                {"run_id", report.run_id},
                {"response_store_digest", report.response_store_digest},
                {"verdict_store_digest", report.verdict_store_digest},
                {"n", report.run_score.n},
                {"ineligible_count", report.run_score.ineligible_count},
                {"mean_judge_average", report.run_score.mean_judge_average},
                {"per_judge_accuracy", per_judge},
                {"unanimity_rate", report.run_score.unanimity_rate},
                {"parsed_structured", report.parsed_structured},
                {"parsed_fallback", report.parsed_fallback}};
}

std::string md_score(const json& doc) {
    std::ostringstream md;
    md << "# Run score: " << doc.at("run_id").get<std::string>() << "\n\n";
    md << "- response store: `" << doc.at("response_store_digest").get<std::string>() << "`\n";
    md << "- verdict store: `" << doc.at("verdict_store_digest").get<std::string>() << "`\n";
    md << "- scored items: " << doc.at("n").get<long>() << " (ineligible: "
       << doc.at("ineligible_count").get<long>() << ")\n";
    md << "- mean judge average: " << fmt_fixed(doc.at("mean_judge_average").get<double>(), 6)
       << "\n";
    md << "- unanimity rate: " << fmt_fixed(doc.at("unanimity_rate").get<double>(), 6) << "\n";
    md << "- parse status: " << doc.at("parsed_structured").get<long>() << " structured, "
       << doc.at("parsed_fallback").get<long>() << " fallback\n\n";
    md << "| judge | accuracy |\n|---|---|\n";
    for (const auto& row : doc.at("per_judge_accuracy")) {
        md << "| " << row.at("judge").get<std::string>() << " | "
           << fmt_fixed(row.at("accuracy").get<double>(), 6) << " |\n";
    }
    return md.str();
}

json comparison_to_json_doc(const ComparisonReport& report) {
    json unmatched = json::array();
    for (const auto& entry : report.unmatched) {
        unmatched.push_back(json{
            {"side", entry.side}, {"item_digest", entry.item_digest}, {"reason", entry.reason}});
    }
    json judges = json::array();
    for (const auto& row : report.judges) {
        json judge{{"judge", row.judge_id},     {"both_true", row.both_true},
                   {"only_a", row.only_a},      {"only_b", row.only_b},
                   {"both_false", row.both_false}, {"agreement", row.agreement}};
        if (row.mcnemar) {
            judge["mcnemar"] = json{{"b", row.mcnemar->b},
                                    {"c", row.mcnemar->c},
                                    {"chi2", row.mcnemar->chi2},
                                    {"p", row.mcnemar->p}};
        } else {
            judge["mcnemar"] = nullptr;
        }
        judges.push_back(std::move(judge));
    }
    json tost = json::array();
    for (const auto& result : report.tost_results) {
        tost.push_back(json{{"margin", result.margin},
                            {"ci90", interval_to_json(result.ci90)},
                            {"equivalent", result.equivalent}});
    }
    json batches = json::array();
    for (const auto& row : report.batches) {
        batches.push_back(json{{"n", row.checkpoint},
                               {"mean_a", row.mean_a},
                               {"mean_b", row.mean_b},
                               {"winner", row.winner}});
    }
    json effect{{"standard_error", report.effect.standard_error}, {"n", report.effect.n}};
    effect["cohens_d"] = report.effect.cohens_d ? json(*report.effect.cohens_d) : json(nullptr);

    return json{
        {"report", "comparison"},
        {"label_a", report.label_a},
        {"label_b", report.label_b},
        {"verdict_digest_a", report.verdict_digest_a},
        {"verdict_digest_b", report.verdict_digest_b},
        {"response_digest_a", report.response_digest_a},
        {"response_digest_b", report.response_digest_b},
        {"n_pairs", report.n_pairs},
        {"excluded_ineligible", report.excluded_ineligible},
        {"unmatched", unmatched},
        {"mean_a", report.mean_a},
        {"mean_b", report.mean_b},
        {"delta", report.delta},
        {"bootstrap95", interval_to_json(report.bootstrap95)},
        {"bootstrap90", interval_to_json(report.bootstrap90)},
        {"permutation",
         json{{"p", report.permutation.p_value},
              {"extreme_count", report.permutation.extreme_count},
              {"shuffles", report.permutation.shuffles},
              {"add_one", report.permutation.add_one}}},
        {"effect", effect},
        {"tost", tost},
        {"judges", judges},
        {"unanimity_a", report.unanimity_a},
        {"unanimity_b", report.unanimity_b},
        {"batches", batches},
        {"wins_a", report.wins_a},
        {"wins_b", report.wins_b},
        {"stability_a",
         json{{"sigma", report.stability_a.sigma}, {"range", report.stability_a.range}}},
        {"stability_b",
         json{{"sigma", report.stability_b.sigma}, {"range", report.stability_b.range}}},
        {"seed", std::to_string(report.seed)},
        {"resamples", report.resamples}};
}

std::string md_comparison(const json& doc) {
    const std::string label_a = doc.at("label_a").get<std::string>();
    const std::string label_b = doc.at("label_b").get<std::string>();
    std::ostringstream md;
    md << "# Paired comparison: " << label_a << " vs " << label_b << "\n\n";
    md << "- verdict stores: `" << doc.at("verdict_digest_a").get<std::string>() << "` vs `"
       << doc.at("verdict_digest_b").get<std::string>() << "`\n";
    md << "- response stores: `" << doc.at("response_digest_a").get<std::string>() << "` vs `"
       << doc.at("response_digest_b").get<std::string>() << "`\n";
    md << "- pairs: " << doc.at("n_pairs").get<long>() << " (unmatched: "
       << doc.at("unmatched").size()
       << ", dropped as ineligible: " << doc.at("excluded_ineligible").get<long>() << ")\n";
    md << "- seed: " << doc.at("seed").get<std::string>()
       << ", resamples: " << doc.at("resamples").get<long>() << "\n\n";

    md << "## Headline\n\n| metric | value |\n|---|---|\n";
    md << "| mean " << label_a << " | " << fmt_fixed(doc.at("mean_a").get<double>(), 6) << " |\n";
    md << "| mean " << label_b << " | " << fmt_fixed(doc.at("mean_b").get<double>(), 6) << " |\n";
    md << "| delta | " << fmt_fixed(doc.at("delta").get<double>(), 6) << " |\n";
    md << "| bootstrap 95% CI | " << interval_cell(doc.at("bootstrap95")) << " |\n";
    md << "| bootstrap 90% CI | " << interval_cell(doc.at("bootstrap90")) << " |\n";
    const auto& permutation = doc.at("permutation");
    md << "| permutation p | " << fmt_compact(permutation.at("p").get<double>()) << " ("
       << permutation.at("extreme_count").get<long>() << "/"
       << permutation.at("shuffles").get<long>()
       << (permutation.at("add_one").get<bool>() ? ", add-one" : "") << ") |\n";
    const auto& effect = doc.at("effect");
    md << "| Cohen's d | "
       << (effect.at("cohens_d").is_null() ? std::string("undefined (zero variance)")
                                           : fmt_fixed(effect.at("cohens_d").get<double>(), 6))
       << " |\n";
    md << "| standard error | " << fmt_fixed(effect.at("standard_error").get<double>(), 6)
       << " |\n\n";

    md << "## Equivalence (TOST)\n\n| margin | 90% CI | equivalent |\n|---|---|---|\n";
    for (const auto& row : doc.at("tost")) {
        md << "| " << fmt_compact(row.at("margin").get<double>()) << " | "
           << interval_cell(row.at("ci90")) << " | "
           << (row.at("equivalent").get<bool>() ? "yes" : "no") << " |\n";
    }

    md << "\n## Per-judge verdicts\n\n| judge | both TRUE | only " << label_a << " | only "
       << label_b << " | both FALSE | agreement | McNemar chi2 | p |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : doc.at("judges")) {
        md << "| " << row.at("judge").get<std::string>() << " | " << row.at("both_true").get<long>()
           << " | " << row.at("only_a").get<long>() << " | " << row.at("only_b").get<long>()
           << " | " << row.at("both_false").get<long>() << " | "
           << fmt_fixed(row.at("agreement").get<double>(), 6) << " | ";
        if (row.at("mcnemar").is_null()) {
            md << "undefined (no discordant pairs) | - |\n";
        } else {
            md << fmt_fixed(row.at("mcnemar").at("chi2").get<double>(), 4) << " | "
               << fmt_compact(row.at("mcnemar").at("p").get<double>()) << " |\n";
        }
    }

    md << "\n## Unanimity\n\n| run | rate |\n|---|---|\n";
    md << "| " << label_a << " | " << fmt_fixed(doc.at("unanimity_a").get<double>(), 6) << " |\n";
    md << "| " << label_b << " | " << fmt_fixed(doc.at("unanimity_b").get<double>(), 6) << " |\n";

    md << "\n## Cumulative batches\n\n| n | mean " << label_a << " | mean " << label_b
       << " | winner |\n|---|---|---|---|\n";
    for (const auto& row : doc.at("batches")) {
        const int winner = row.at("winner").get<int>();
        md << "| " << row.at("n").get<long>() << " | " << fmt_fixed(row.at("mean_a").get<double>(), 6)
           << " | " << fmt_fixed(row.at("mean_b").get<double>(), 6) << " | "
           << (winner > 0 ? label_a : (winner < 0 ? label_b : "tie")) << " |\n";
    }
    md << "\n- wins: " << label_a << " " << doc.at("wins_a").get<long>() << "/"
       << doc.at("batches").size() << ", " << label_b << " " << doc.at("wins_b").get<long>() << "/"
       << doc.at("batches").size() << "\n";
    md << "- stability sigma: " << label_a << " "
       << fmt_fixed(doc.at("stability_a").at("sigma").get<double>(), 6) << " (range "
       << fmt_fixed(doc.at("stability_a").at("range").get<double>(), 6) << "), " << label_b << " "
       << fmt_fixed(doc.at("stability_b").at("sigma").get<double>(), 6) << " (range "
       << fmt_fixed(doc.at("stability_b").at("range").get<double>(), 6) << ")\n";
    return md.str();
}

json progressive_to_json_doc(const ProgressiveReport& report) {
    json rows = json::array();
    for (const auto& row : report.result.rows) {
        rows.push_back(json{{"n", row.n},
                            {"cumulative_mean", row.cumulative_mean},
                            {"wilson", interval_to_json(row.wilson)},
                            {"exact", interval_to_json(row.exact)}});
    }
    return json{{"report", "progressive"},
                {"verdict_store_digest", report.verdict_digest},
                {"rows", rows},
                {"stability", json{{"sigma", report.result.stability.sigma},
                                   {"range", report.result.stability.range}}}};
}

std::string md_progressive(const json& doc) {
    std::ostringstream md;
    md << "# Progressive validation\n\n";
    md << "- verdict store: `" << doc.at("verdict_store_digest").get<std::string>() << "`\n\n";
    md << "| n | cumulative mean | wilson 95% | exact 95% |\n|---|---|---|---|\n";
    for (const auto& row : doc.at("rows")) {
        md << "| " << row.at("n").get<long>() << " | "
           << fmt_fixed(row.at("cumulative_mean").get<double>(), 6) << " | "
           << interval_cell(row.at("wilson")) << " | " << interval_cell(row.at("exact")) << " |\n";
    }
    md << "\n- stability sigma: " << fmt_fixed(doc.at("stability").at("sigma").get<double>(), 6)
       << "\n- score range: " << fmt_fixed(doc.at("stability").at("range").get<double>(), 6)
       << "\n";
    return md.str();
}

json cost_to_json_doc(const CostReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back(json{
            {"provider", row.entry.provider},
            {"model", row.entry.model},
            {"input_per_1k", row.entry.input_price_per_1k.to_string()},
            {"output_per_1k", row.entry.output_price_per_1k.to_string()},
            {"basis", row.entry.basis == costmodel::PriceBasis::measured ? "measured" : "estimated"},
            {"retrieved", row.entry.retrieved},
            {"source", row.entry.source},
            {"cost", row.cost.to_string()},
            {"ratio_to_cheapest", row.ratio_to_cheapest},
            {"trace", row.trace}});
    }
    json doc{{"report", "cost"},
             {"profile", json{{"input_tokens", report.profile.input_tokens},
                              {"output_tokens", report.profile.output_tokens},
                              {"overhead_fraction", report.profile.overhead_fraction}}},
             {"rows", rows}};
    if (report.selfhost) {
        doc["selfhost"] = json{
            {"seconds", report.selfhost->seconds},
            {"raw_cost", report.selfhost->raw_cost.to_string()},
            {"utilization_adjusted_cost", report.selfhost->utilization_adjusted_cost.to_string()},
            {"batched_cost", report.selfhost->batched_cost.to_string()},
            {"trace", *report.selfhost_trace}};
    } else {
        doc["selfhost"] = nullptr;
    }
    if (report.edge) {
        doc["edge"] = json{{"cost", report.edge->to_string()}, {"trace", *report.edge_trace}};
    } else {
        doc["edge"] = nullptr;
    }
    return doc;
}

std::string md_cost(const json& doc) {
    std::ostringstream md;
    const auto& profile = doc.at("profile");
    md << "# Normalized request cost\n\n";
    md << "- request profile: " << profile.at("input_tokens").get<long>() << " input + "
       << profile.at("output_tokens").get<long>() << " output tokens, overhead "
       << fmt_compact(profile.at("overhead_fraction").get<double>()) << "\n\n";
    md << "| provider | model | $/1K in | $/1K out | basis | cost | x cheapest |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& row : doc.at("rows")) {
        md << "| " << row.at("provider").get<std::string>() << " | "
           << row.at("model").get<std::string>() << " | " << row.at("input_per_1k").get<std::string>()
           << " | " << row.at("output_per_1k").get<std::string>() << " | "
           << row.at("basis").get<std::string>() << " | $" << row.at("cost").get<std::string>()
           << " | " << fmt_fixed(row.at("ratio_to_cheapest").get<double>(), 2) << " |\n";
    }
    md << "\n### Traces\n\n";
    for (const auto& row : doc.at("rows")) {
        md << "- " << row.at("model").get<std::string>() << ": " << row.at("trace").get<std::string>()
           << "\n";
    }
    if (!doc.at("selfhost").is_null()) {
        const auto& selfhost = doc.at("selfhost");
        md << "\n## Self-hosted\n\n";
        md << "- seconds per request: " << fmt_fixed(selfhost.at("seconds").get<double>(), 3)
           << "\n";
        md << "- raw cost: $" << selfhost.at("raw_cost").get<std::string>() << "\n";
        md << "- utilization adjusted: $"
           << selfhost.at("utilization_adjusted_cost").get<std::string>() << "\n";
        md << "- batched: $" << selfhost.at("batched_cost").get<std::string>() << "\n";
        md << "- trace: " << selfhost.at("trace").get<std::string>() << "\n";
    }
    if (!doc.at("edge").is_null()) {
        md << "\n## Edge\n\n";
        md << "- cost: $" << doc.at("edge").at("cost").get<std::string>() << "\n";
        md << "- trace: " << doc.at("edge").at("trace").get<std::string>() << "\n";
    }
    return md.str();
}

std::string render_markdown(const json& doc) {
    const std::string kind = doc.at("report").get<std::string>();
    if (kind == "run_score") return md_score(doc);
    if (kind == "comparison") return md_comparison(doc);
    if (kind == "progressive") return md_progressive(doc);
    if (kind == "cost") return md_cost(doc);
    throw ConfigError("unknown report kind: " + kind);
}

} // namespace

std::string ScoreReport::to_json() const { return score_to_json_doc(*this).dump(2) + "\n"; }
std::string ScoreReport::to_markdown() const { return md_score(score_to_json_doc(*this)); }

std::string ComparisonReport::to_json() const {
    return comparison_to_json_doc(*this).dump(2) + "\n";
}
std::string ComparisonReport::to_markdown() const {
    return md_comparison(comparison_to_json_doc(*this));
}

std::string ProgressiveReport::to_json() const {
    return progressive_to_json_doc(*this).dump(2) + "\n";
}
std::string ProgressiveReport::to_markdown() const {
    return md_progressive(progressive_to_json_doc(*this));
}

std::string CostReport::to_json() const { return cost_to_json_doc(*this).dump(2) + "\n"; }
std::string CostReport::to_markdown() const { return md_cost(cost_to_json_doc(*this)); }

std::string render_markdown_from_json(const std::string& report_json) {
    json doc;
    try {
        doc = json::parse(report_json);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report json: ") + e.what());
    }
    return render_markdown(doc);
}

} // namespace groundeval::report
