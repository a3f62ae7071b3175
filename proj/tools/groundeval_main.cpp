/// @file groundeval_main.cpp
/// @brief Command-line entry point: ingest, run, score, compare, progressive,
/// cost, report.
///
/// Every verb reads sealed stores and/or config, writes a report pair
/// (markdown + JSON with identical values) under --out-dir, and prints the
/// markdown to stdout. Failures map to distinct exit codes: 2 config,
/// 3 network, 4 replay miss, 5 statistics, 1 anything else.

#include "groundeval/errors.hpp"
#include "groundeval/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ge = groundeval;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config_path = "groundeval.json";
    std::uint64_t seed = 0;
    bool record = false;
    bool replay = false;
    std::string out_dir = ".";

    ge::clients::ClientMode client_mode() const {
        return record ? ge::clients::ClientMode::record : ge::clients::ClientMode::replay;
    }
};

/// Tool configuration file (JSON). Only the verbs that need a section read
/// it, so `cost` or `compare` work without any endpoint definitions.
struct ToolConfig {
    std::vector<ge::clients::ModelEndpoint> endpoints;
    std::vector<std::string> panel;
    std::filesystem::path scaffold_template = "templates/scaffold.tmpl";
    std::filesystem::path judge_template = "templates/judge.tmpl";
    std::filesystem::path price_sheet = "data/prices.json";
    std::optional<std::filesystem::path> selfhost_profile;
};

ge::clients::ModelEndpoint endpoint_from_json(const json& doc) {
    ge::clients::ModelEndpoint endpoint;
    endpoint.name = doc.at("name").get<std::string>();
    endpoint.family = doc.value("family", endpoint.name);
    const std::string role = doc.value("role", "candidate");
    if (role == "judge") {
        endpoint.role = ge::clients::EndpointRole::judge;
    } else if (role == "candidate") {
        endpoint.role = ge::clients::EndpointRole::candidate;
    } else {
        throw ge::ConfigError("config: endpoint role must be candidate or judge, got " + role);
    }
    endpoint.base_url = doc.value("base_url", "");
    endpoint.auth_env = doc.value("auth_env", "");
    if (doc.contains("temperature")) {
        endpoint.temperature = doc.at("temperature").get<double>();
    } else if (endpoint.role == ge::clients::EndpointRole::judge) {
        endpoint.temperature = ge::clients::default_judge_temperature(endpoint.family);
    } else {
        endpoint.temperature = ge::scaffold::default_temperature(endpoint.family);
    }
    endpoint.request_timeout_s = doc.value("request_timeout_s", endpoint.request_timeout_s);
    endpoint.max_retries = doc.value("max_retries", endpoint.max_retries);
    endpoint.requests_per_minute = doc.value("requests_per_minute", endpoint.requests_per_minute);
    return endpoint;
}

ToolConfig load_tool_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ge::ConfigError("config: cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ge::ConfigError("config " + path.string() + ": " + e.what());
    }
    ToolConfig config;
    for (const auto& entry : doc.value("endpoints", json::array())) {
        config.endpoints.push_back(endpoint_from_json(entry));
    }
    config.panel = doc.value("panel", std::vector<std::string>{});
    if (doc.contains("scaffold_template")) {
        config.scaffold_template = doc.at("scaffold_template").get<std::string>();
    }
    if (doc.contains("judge_template")) {
        config.judge_template = doc.at("judge_template").get<std::string>();
    }
    if (doc.contains("price_sheet")) {
        config.price_sheet = doc.at("price_sheet").get<std::string>();
    }
    if (doc.contains("selfhost_profile")) {
        config.selfhost_profile = std::filesystem::path(doc.at("selfhost_profile").get<std::string>());
    }
    return config;
}

const ge::clients::ModelEndpoint& find_endpoint(const ToolConfig& config,
                                                const std::string& name) {
    for (const auto& endpoint : config.endpoints) {
        if (endpoint.name == name) return endpoint;
    }
    throw ge::ConfigError("config: no endpoint named " + name);
}

ge::costmodel::SelfHostProfile selfhost_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ge::ConfigError("selfhost profile: cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ge::ConfigError("selfhost profile " + path.string() + ": " + e.what());
    }
    ge::costmodel::SelfHostProfile profile;
    profile.hourly_rate = ge::costmodel::Money::parse(doc.at("hourly_rate").get<std::string>());
    profile.throughput_tokens_per_s = doc.at("throughput_tokens_per_s").get<double>();
    profile.utilization = doc.value("utilization", 1.0);
    profile.batch_factor = doc.value("batch_factor", 1.0);
    if (doc.contains("amortized_capex_per_hour")) {
        profile.amortized_capex_per_hour =
            ge::costmodel::Money::parse(doc.at("amortized_capex_per_hour").get<std::string>());
    }
    if (doc.contains("power_per_hour")) {
        profile.power_per_hour =
            ge::costmodel::Money::parse(doc.at("power_per_hour").get<std::string>());
    }
    return profile;
}

ge::dataset::EvalSubset load_subset(const std::string& corpus, long first_n) {
    ge::dataset::EvalSubset subset = ge::dataset::load_corpus(corpus);
    if (first_n > 0) subset = ge::dataset::select_first_n(subset, first_n);
    return subset;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw ge::ConfigError("cannot write " + path.string());
}

/// Writes <out_dir>/<stem>.json and <stem>.md, prints the markdown.
void emit_report(const GlobalOptions& global, const std::string& stem,
                 const std::string& json_text, const std::string& markdown) {
    const std::filesystem::path dir(global.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (stem + ".json"), json_text);
    write_file(dir / (stem + ".md"), markdown);
    std::cout << markdown;
}

// --- verbs ----------------------------------------------------------------

struct IngestArgs {
    std::string corpus;
    long first_n = 0;
};

int cmd_ingest(const IngestArgs& args) {
    const ge::dataset::EvalSubset subset = load_subset(args.corpus, args.first_n);
    std::cout << "corpus: " << subset.source_corpus_id << "\n";
    std::cout << "items: " << subset.items.size() << "\n";
    for (const auto& item : subset.items) {
        std::cout << item.sequence_index << "\t" << item.id << "\t" << item.content_digest
                  << "\n";
    }
    return 0;
}

struct RunArgs {
    std::string corpus;
    long first_n = 0;
    std::string model;
    std::string store;
    std::string run_id;
    bool no_scaffold = false;
    std::string mode = "context-dominant";
    int few_shot = 0; ///< 0 = family policy
    double temperature = -1.0; ///< < 0 = family default
    double confidence_threshold = -1.0;
    std::string safety_exception_file;
};

int cmd_run(const GlobalOptions& global, const RunArgs& args) {
    const ToolConfig config = load_tool_config(global.config_path);
    const ge::clients::ModelEndpoint& endpoint = find_endpoint(config, args.model);

    ge::scaffold::ScaffoldConfig scaffold_config;
    scaffold_config.enabled = !args.no_scaffold;
    if (args.mode == "context-dominant") {
        scaffold_config.mode = ge::scaffold::DeploymentMode::context_dominant;
    } else if (args.mode == "safety-override") {
        scaffold_config.mode = ge::scaffold::DeploymentMode::safety_override;
        if (args.safety_exception_file.empty()) {
            throw ge::ConfigError("run: safety-override mode needs --safety-exception-file");
        }
        std::ifstream in(args.safety_exception_file);
        if (!in) {
            throw ge::ConfigError("run: cannot open " + args.safety_exception_file);
        }
        std::ostringstream text;
        text << in.rdbuf();
        scaffold_config.safety_exception_text = text.str();
    } else if (args.mode == "balanced-authority") {
        scaffold_config.mode = ge::scaffold::DeploymentMode::balanced_authority;
        if (args.confidence_threshold < 0.0) {
            throw ge::ConfigError("run: balanced-authority mode needs --confidence-threshold");
        }
        scaffold_config.context_confidence_threshold = args.confidence_threshold;
    } else {
        throw ge::ConfigError("run: unknown mode " + args.mode);
    }
    const ge::scaffold::FewShotChoice few_shot =
        ge::scaffold::few_shot_for_family(endpoint.family);
    scaffold_config.few_shot_count = args.few_shot > 0 ? args.few_shot : few_shot.count;
    scaffold_config.temperature = args.temperature >= 0.0
                                      ? args.temperature
                                      : ge::scaffold::default_temperature(endpoint.family);

    ge::report::RunOptions options;
    options.endpoint = endpoint;
    options.scaffold_config = scaffold_config;
    options.scaffold_template = ge::scaffold::load_template(config.scaffold_template);
    options.run_id = args.run_id.empty()
                         ? args.model + (scaffold_config.enabled ? "-scaffold" : "-plain")
                         : args.run_id;
    options.seed = global.seed;

    const ge::dataset::EvalSubset subset = load_subset(args.corpus, args.first_n);
    ge::clients::CompletionStore store(args.store);
    ge::clients::Client client(global.client_mode(), store);
    const ge::report::RunManifest manifest =
        ge::report::run_subset(subset, client, store, options);

    std::cout << "run: " << manifest.run_id << "\n";
    std::cout << "items: " << subset.items.size() << "\n";
    std::cout << "store digest: " << store.content_digest() << "\n";
    std::cout << "tokens: " << manifest.total_input_tokens << " in, "
              << manifest.total_output_tokens << " out\n";
    return 0;
}

struct ScoreArgs {
    std::string corpus;
    long first_n = 0;
    std::string responses;
    std::string judge_store;
    std::string verdicts;
    std::vector<std::string> panel;
};

int cmd_score(const GlobalOptions& global, const ScoreArgs& args) {
    const ToolConfig config = load_tool_config(global.config_path);
    const std::vector<std::string>& panel_names =
        args.panel.empty() ? config.panel : args.panel;
    if (panel_names.size() != 3) {
        throw ge::ConfigError("score: need exactly 3 judges (got " +
                              std::to_string(panel_names.size()) + ")");
    }

    ge::report::ScoreOptions options;
    for (const auto& name : panel_names) {
        options.panel.push_back(find_endpoint(config, name));
    }
    options.judge_template = ge::clients::load_judge_template(config.judge_template);
    options.seed = global.seed;

    const ge::dataset::EvalSubset subset = load_subset(args.corpus, args.first_n);
    ge::clients::CompletionStore responses(args.responses, /*create=*/false);
    ge::clients::CompletionStore judge_store(args.judge_store);
    ge::clients::Client judge_client(global.client_mode(), judge_store);
    ge::report::VerdictStore verdicts(args.verdicts);

    const ge::report::ScoreReport report =
        ge::report::score_store(subset, responses, judge_client, verdicts, options);
    if (global.record && !judge_store.sealed()) {
        judge_store.seal();
    }
    emit_report(global, "score_report", report.to_json(), report.to_markdown());
    return 0;
}

struct CompareArgs {
    std::string a;
    std::string b;
    std::string label_a = "A";
    std::string label_b = "B";
    std::vector<double> margins;
    long resamples = 10000;
    bool add_one = false;
    std::vector<long> checkpoints;
};

int cmd_compare(const GlobalOptions& global, const CompareArgs& args) {
    ge::report::CompareOptions options;
    if (!args.margins.empty()) options.margins = args.margins;
    options.resamples = args.resamples;
    options.seed = global.seed;
    options.permutation_add_one = args.add_one;
    if (!args.checkpoints.empty()) options.checkpoints = args.checkpoints;
    options.label_a = args.label_a;
    options.label_b = args.label_b;

    const ge::report::VerdictStore store_a(args.a, /*create=*/false);
    const ge::report::VerdictStore store_b(args.b, /*create=*/false);
    const ge::report::ComparisonReport report =
        ge::report::compare_runs(store_a, store_b, options);
    emit_report(global, "comparison_report", report.to_json(), report.to_markdown());
    return 0;
}

struct ProgressiveArgs {
    std::string verdicts;
    std::vector<long> checkpoints;
};

int cmd_progressive(const GlobalOptions& global, const ProgressiveArgs& args) {
    const ge::report::VerdictStore store(args.verdicts, /*create=*/false);
    const std::vector<long> checkpoints =
        args.checkpoints.empty() ? std::vector<long>{10, 20, 50, 100, 200, 500}
                                 : args.checkpoints;
    const ge::report::ProgressiveReport report =
        ge::report::progressive_report(store, checkpoints);
    emit_report(global, "progressive_report", report.to_json(), report.to_markdown());
    return 0;
}

struct CostArgs {
    std::string prices;
    long input_tokens = 500;
    long output_tokens = 500;
    double overhead = 0.0;
    std::string selfhost;
    bool edge = false;
};

int cmd_cost(const GlobalOptions& global, const CostArgs& args) {
    std::filesystem::path price_path;
    std::optional<std::filesystem::path> selfhost_path;
    if (!args.prices.empty()) {
        price_path = args.prices;
    } else {
        const ToolConfig config = load_tool_config(global.config_path);
        price_path = config.price_sheet;
        selfhost_path = config.selfhost_profile;
    }
    if (!args.selfhost.empty()) selfhost_path = args.selfhost;

    ge::costmodel::RequestProfile profile;
    profile.input_tokens = args.input_tokens;
    profile.output_tokens = args.output_tokens;
    profile.overhead_fraction = args.overhead;

    std::optional<ge::costmodel::SelfHostProfile> selfhost;
    if (selfhost_path) selfhost = selfhost_from_file(*selfhost_path);

    const ge::report::CostReport report = ge::report::cost_report(
        ge::costmodel::load_price_sheet(price_path), profile, selfhost, args.edge);
    emit_report(global, "cost_report", report.to_json(), report.to_markdown());
    return 0;
}

struct ReportArgs {
    std::string in;
    std::string out;
};

int cmd_report(const ReportArgs& args) {
    std::ifstream in(args.in);
    if (!in) throw ge::ConfigError("report: cannot open " + args.in);
    std::ostringstream text;
    text << in.rdbuf();
    const std::string markdown = ge::report::render_markdown_from_json(text.str());
    if (args.out.empty()) {
        std::cout << markdown;
    } else {
        write_file(args.out, markdown);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"groundeval: grounded-response evaluation harness"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "Tool configuration file (JSON)");
    app.add_option("--seed", global.seed, "Root seed for all randomized procedures");
    auto* record_flag =
        app.add_flag("--record", global.record, "Allow network calls, persist completions");
    app.add_flag("--replay", global.replay, "Serve completions from stores only (default)")
        ->excludes(record_flag);
    app.add_option("--out-dir", global.out_dir, "Directory for report files");

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print item digests");
    ingest->add_option("--corpus", ingest_args.corpus, "Corpus JSONL file")->required();
    ingest->add_option("--first-n", ingest_args.first_n, "Restrict to the first n items");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Complete every item through one endpoint");
    run->add_option("--corpus", run_args.corpus, "Corpus JSONL file")->required();
    run->add_option("--first-n", run_args.first_n, "Restrict to the first n items");
    run->add_option("--model", run_args.model, "Endpoint name from the config")->required();
    run->add_option("--store", run_args.store, "Response store directory")->required();
    run->add_option("--run-id", run_args.run_id, "Run identifier (default: model name + mode)");
    run->add_flag("--no-scaffold", run_args.no_scaffold, "Plain prompt, no scaffold");
    run->add_option("--mode", run_args.mode,
                    "context-dominant | safety-override | balanced-authority");
    run->add_option("--few-shot", run_args.few_shot, "Examples to include (default: by family)");
    run->add_option("--temperature", run_args.temperature,
                    "Decode temperature (default: by family)");
    run->add_option("--confidence-threshold", run_args.confidence_threshold,
                    "Routing threshold for balanced-authority");
    run->add_option("--safety-exception-file", run_args.safety_exception_file,
                    "Exception text spliced into the rules for safety-override");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Judge a sealed response store");
    score->add_option("--corpus", score_args.corpus, "Corpus JSONL file")->required();
    score->add_option("--first-n", score_args.first_n, "Restrict to the first n items");
    score->add_option("--responses", score_args.responses, "Sealed response store")->required();
    score->add_option("--judge-store", score_args.judge_store, "Judge completion store")
        ->required();
    score->add_option("--verdicts", score_args.verdicts, "Verdict store to write")->required();
    score->add_option("--panel", score_args.panel,
                      "Three judge endpoint names (default: config panel)");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Paired comparison of two verdict stores");
    compare->add_option("--a", compare_args.a, "First verdict store")->required();
    compare->add_option("--b", compare_args.b, "Second verdict store")->required();
    compare->add_option("--label-a", compare_args.label_a, "Display label for the first run");
    compare->add_option("--label-b", compare_args.label_b, "Display label for the second run");
    compare->add_option("--margin", compare_args.margins,
                        "Equivalence margin, repeatable (default 0.05 and 0.03)");
    compare->add_option("--resamples", compare_args.resamples,
                        "Bootstrap / permutation resamples");
    compare->add_flag("--add-one", compare_args.add_one,
                      "Use the (count+1)/(B+1) permutation convention");
    compare->add_option("--checkpoint", compare_args.checkpoints,
                        "Cumulative batch checkpoint, repeatable");

    ProgressiveArgs progressive_args;
    auto* progressive =
        app.add_subcommand("progressive", "Cumulative intervals over one verdict store");
    progressive->add_option("--verdicts", progressive_args.verdicts, "Verdict store")->required();
    progressive->add_option("--checkpoint", progressive_args.checkpoints,
                            "Checkpoint, repeatable (default 10 20 50 100 200 500)");

    CostArgs cost_args;
    auto* cost = app.add_subcommand("cost", "Normalized per-request costs");
    cost->add_option("--prices", cost_args.prices, "Price sheet JSON (default: config)");
    cost->add_option("--input-tokens", cost_args.input_tokens, "Request profile input tokens");
    cost->add_option("--output-tokens", cost_args.output_tokens, "Request profile output tokens");
    cost->add_option("--overhead", cost_args.overhead, "Scaffold overhead fraction");
    cost->add_option("--selfhost", cost_args.selfhost, "Self-host profile JSON");
    cost->add_flag("--edge", cost_args.edge, "Add the edge-deployment projection");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Render markdown from a machine report");
    report->add_option("--in", report_args.in, "Report JSON file")->required();
    report->add_option("--out", report_args.out, "Markdown output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ge::exit_code_for(ge::ErrorCategory::config);
    }

    try {
        if (*ingest) return cmd_ingest(ingest_args);
        if (*run) return cmd_run(global, run_args);
        if (*score) return cmd_score(global, score_args);
        if (*compare) return cmd_compare(global, compare_args);
        if (*progressive) return cmd_progressive(global, progressive_args);
        if (*cost) return cmd_cost(global, cost_args);
        if (*report) return cmd_report(report_args);
    } catch (const ge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ge::exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return ge::exit_code_for(ge::ErrorCategory::internal);
    }
    return 0;
}
