/// @file test_report.cpp

#include "groundeval/report.hpp"

#include "groundeval/dataset.hpp"
#include "groundeval/errors.hpp"
#include "fixture_stores.hpp"
#include "temp_dir.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <fstream>
#include <string>
#include <vector>

namespace ge = groundeval;
using fixtures::TempDir;
namespace rp = ge::report;
using nlohmann::json;

namespace {

const std::vector<std::string> kPanel{"j1", "j2", "j3"};

struct HandItem {
    std::string digest;
    std::array<int, 3> verdicts; ///< 1 = TRUE per judge
    bool eligible = true;        ///< false marks all three verdicts ineligible
};

/// Builds and seals a small verdict store from explicit per-judge verdicts.
void build_verdict_store(const std::filesystem::path& dir, const std::vector<HandItem>& items,
                         const std::string& response_digest, std::uint64_t seed = 0) {
    rp::VerdictStore store(dir);
    std::vector<std::string> order;
    for (const auto& item : items) {
        for (size_t j = 0; j < kPanel.size(); ++j) {
            rp::VerdictRecord record;
            record.item_digest = item.digest;
            record.judge_id = kPanel[j];
            record.verdict = item.verdicts[j] == 1;
            record.eligible = item.eligible;
            record.raw_judgment = record.verdict ? "TRUE" : "FALSE";
            record.timestamp = "1970-01-01T00:00:00Z";
            store.append(record);
        }
        order.push_back(item.digest);
    }
    store.seal(kPanel, order, response_digest, seed);
}

rp::RunManifest sample_manifest() {
    rp::RunManifest manifest;
    manifest.run_id = "model-x-scaffold";
    manifest.corpus_digest = "corpus-abc123";
    manifest.selection_kind = "first_n";
    manifest.selection_n = 50;
    manifest.scaffold_config_digest = "deadbeef";
    manifest.endpoint_name = "model-x";
    manifest.seed = 0xFEEDFACE12345678ULL;
    manifest.requests["item1"] = "req1";
    manifest.requests["item2"] = "req2";
    manifest.total_input_tokens = 1234;
    manifest.total_output_tokens = 567;
    return manifest;
}

} // namespace

TEST_CASE("run manifest survives a JSON round trip") {
    const rp::RunManifest manifest = sample_manifest();
    auto restored = rp::RunManifest::from_json(manifest.to_json());
    CHECK(restored.run_id == manifest.run_id);
    CHECK(restored.corpus_digest == manifest.corpus_digest);
    CHECK(restored.selection_kind == manifest.selection_kind);
    CHECK(restored.selection_n == manifest.selection_n);
    CHECK(restored.scaffold_config_digest == manifest.scaffold_config_digest);
    CHECK(restored.endpoint_name == manifest.endpoint_name);
    CHECK(restored.tool_version == manifest.tool_version);
    CHECK(restored.seed == manifest.seed);
    CHECK(restored.requests == manifest.requests);
    CHECK(restored.total_input_tokens == 1234);
    CHECK(restored.total_output_tokens == 567);

    CHECK_THROWS_AS(rp::RunManifest::from_json("not json"), ge::ConfigError);
}

TEST_CASE("scaffold config digest tracks config and template changes") {
    ge::scaffold::ScaffoldTemplate tmpl;
    tmpl.base_system_prompt = "Base.";
    tmpl.scaffold_body = "Body.";
    tmpl.format_rules = "Rules.";
    ge::scaffold::FewShotExample example;
    example.client_turn = "C";
    example.context_block = "X";
    example.analysis = "A";
    example.response = "R";
    tmpl.few_shot_examples.push_back(example);

    ge::scaffold::ScaffoldConfig config;
    config.enabled = true;
    config.few_shot_count = 1;
    config.temperature = 0.3;

    const std::string base = rp::scaffold_config_digest(config, tmpl);
    CHECK(base == rp::scaffold_config_digest(config, tmpl));

    auto warmer = config;
    warmer.temperature = 1.0;
    CHECK(rp::scaffold_config_digest(warmer, tmpl) != base);

    auto plain = config;
    plain.enabled = false;
    CHECK(rp::scaffold_config_digest(plain, tmpl) != base);

    auto reworded = tmpl;
    reworded.format_rules = "Different rules.";
    CHECK(rp::scaffold_config_digest(config, reworded) != base);
}

TEST_CASE("verdict store round-trips scores in manifest order") {
    TempDir dir("verdicts");
    build_verdict_store(dir.path() / "store",
                        {{"item-b", {1, 1, 1}}, {"item-a", {1, 0, 0}}, {"item-c", {0, 0, 0}}},
                        "resp-digest", 99);

    rp::VerdictStore store(dir.path() / "store", false);
    CHECK(store.sealed());
    CHECK(store.panel() == kPanel);
    CHECK(store.item_order() == std::vector<std::string>{"item-b", "item-a", "item-c"});
    CHECK(store.response_store_digest() == "resp-digest");
    CHECK(store.seed() == 99);

    auto scores = store.load_scores();
    REQUIRE(scores.size() == 3);
    // Manifest order, not lexical record order.
    CHECK(scores[0].item_digest == "item-b");
    CHECK(scores[0].true_count == 3);
    CHECK(scores[0].unanimous);
    CHECK(scores[1].item_digest == "item-a");
    CHECK(scores[1].true_count == 1);
    CHECK(scores[2].item_digest == "item-c");
    CHECK(scores[2].true_count == 0);
    for (const auto& score : scores) {
        CHECK(score.verdicts[0].judge_id == "j1");
        CHECK(score.verdicts[1].judge_id == "j2");
        CHECK(score.verdicts[2].judge_id == "j3");
    }
}

TEST_CASE("verdict store append and seal rules") {
    TempDir dir("verdicts-rules");
    rp::VerdictStore store(dir.path() / "store");

    rp::VerdictRecord record;
    record.item_digest = "item-1";
    record.judge_id = "j1";
    record.verdict = true;
    record.raw_judgment = "TRUE";
    record.timestamp = "2026-01-01T00:00:00Z";
    store.append(record);

    // Identical content appends are no-ops even when timestamps differ.
    auto later = record;
    later.timestamp = "2026-06-01T00:00:00Z";
    CHECK_NOTHROW(store.append(later));

    auto flipped = record;
    flipped.verdict = false;
    CHECK_THROWS_WITH_AS(store.append(flipped), doctest::Contains("conflicting"),
                         ge::ConfigError);

    auto unsafe = record;
    unsafe.item_digest = "../escape";
    CHECK_THROWS_WITH_AS(store.append(unsafe), doctest::Contains("unsafe"), ge::ConfigError);

    CHECK_THROWS_WITH_AS(store.load_scores(), doctest::Contains("not sealed"), ge::ConfigError);

    for (const char* judge : {"j2", "j3"}) {
        auto v = record;
        v.judge_id = judge;
        store.append(v);
    }
    store.seal(kPanel, {"item-1"}, "resp", 0);
    CHECK_NOTHROW(store.seal(kPanel, {"item-1"}, "resp", 0)); // idempotent
    CHECK_THROWS_WITH_AS(store.append(record), doctest::Contains("sealed"), ge::ConfigError);
}

TEST_CASE("verdict store rejects conflicting reseal and missing records") {
    TempDir dir("verdicts-reseal");
    const auto path = dir.path() / "store";
    {
        rp::VerdictStore store(path);
        rp::VerdictRecord record;
        record.item_digest = "item-1";
        record.judge_id = "j1";
        record.verdict = true;
        store.append(record);
        std::ofstream out(path / "manifest.json");
        out << R"({"content_digest": "bogus", "panel": ["j1","j2","j3"],)"
            << R"( "item_order": ["item-1"], "response_store_digest": "r", "seed": "0"})" << "\n";
    }
    rp::VerdictStore reopened(path, false);
    CHECK_THROWS_WITH_AS(reopened.seal(kPanel, {"item-1"}, "r", 0),
                         doctest::Contains("different content"), ge::ConfigError);
    // The hand-written manifest names an item with only one of three
    // verdict records on disk.
    CHECK_THROWS_WITH_AS(reopened.load_scores(), doctest::Contains("missing record"),
                         ge::ConfigError);

    CHECK_THROWS_AS(rp::VerdictStore(dir.path() / "absent", false), ge::ConfigError);
}

TEST_CASE("verdict store content digest ignores timestamps") {
    TempDir dir("verdicts-digest");
    build_verdict_store(dir.path() / "a", {{"item-1", {1, 0, 1}}}, "r");
    rp::VerdictStore a(dir.path() / "a", false);

    {
        rp::VerdictStore b(dir.path() / "b");
        for (size_t j = 0; j < kPanel.size(); ++j) {
            rp::VerdictRecord record;
            record.item_digest = "item-1";
            record.judge_id = kPanel[j];
            record.verdict = j != 1;
            record.eligible = true;
            record.raw_judgment = record.verdict ? "TRUE" : "FALSE";
            record.timestamp = "2031-05-05T05:05:05Z"; // differs from store a
            b.append(record);
        }
        b.seal(kPanel, {"item-1"}, "r", 0);
    }
    rp::VerdictStore b(dir.path() / "b", false);
    CHECK(a.content_digest() == b.content_digest());

    build_verdict_store(dir.path() / "c", {{"item-1", {1, 1, 1}}}, "r");
    rp::VerdictStore c(dir.path() / "c", false);
    CHECK(a.content_digest() != c.content_digest());
}

TEST_CASE("compare_runs aligns, drops non-attempts, and reports per-judge tables") {
    TempDir dir("compare-hand");
    build_verdict_store(dir.path() / "a",
                        {{"d1", {1, 1, 1}},
                         {"d2", {1, 0, 1}},
                         {"d3", {1, 1, 1}, false},
                         {"d4", {0, 1, 0}}},
                        "resp-a");
    build_verdict_store(dir.path() / "b",
                        {{"d1", {1, 1, 1}}, {"d2", {0, 0, 1}}, {"d3", {1, 0, 1}},
                         {"d5", {1, 1, 1}}},
                        "resp-b");

    rp::VerdictStore a(dir.path() / "a", false);
    rp::VerdictStore b(dir.path() / "b", false);

    rp::CompareOptions options;
    options.label_a = "scaffold";
    options.label_b = "plain";
    options.resamples = 2000;
    options.seed = 17;
    options.checkpoints = {1, 2, 50};

    auto report = rp::compare_runs(a, b, options);
    CHECK(report.label_a == "scaffold");
    CHECK(report.n_pairs == 2); // d1, d2; d3 dropped, d4/d5 unmatched
    CHECK(report.excluded_ineligible == 1);
    REQUIRE(report.unmatched.size() == 2);
    CHECK(report.unmatched[0].side == "a");
    CHECK(report.unmatched[0].item_digest == "d4");
    CHECK(report.unmatched[1].side == "b");
    CHECK(report.unmatched[1].item_digest == "d5");

    CHECK(report.mean_a == doctest::Approx(5.0 / 6.0));
    CHECK(report.mean_b == doctest::Approx(4.0 / 6.0));
    CHECK(report.delta == doctest::Approx(1.0 / 6.0));
    CHECK(report.unanimity_a == doctest::Approx(0.5));
    CHECK(report.unanimity_b == doctest::Approx(0.5));
    CHECK(report.verdict_digest_a == a.content_digest());
    CHECK(report.response_digest_a == "resp-a");

    REQUIRE(report.judges.size() == 3);
    const auto& j1 = report.judges[0];
    CHECK(j1.judge_id == "j1");
    CHECK(j1.both_true == 1);
    CHECK(j1.only_a == 1);
    CHECK(j1.only_b == 0);
    CHECK(j1.both_false == 0);
    CHECK(j1.agreement == doctest::Approx(0.5));
    REQUIRE(j1.mcnemar.has_value());
    CHECK(j1.mcnemar->chi2 == doctest::Approx(1.0));

    const auto& j2 = report.judges[1];
    CHECK(j2.both_true == 1);
    CHECK(j2.both_false == 1);
    CHECK(j2.agreement == doctest::Approx(1.0));
    CHECK_FALSE(j2.mcnemar.has_value()); // no discordant pairs

    // Counts in every judge row partition the paired items.
    for (const auto& row : report.judges) {
        CHECK(row.both_true + row.only_a + row.only_b + row.both_false == report.n_pairs);
    }

    // Checkpoints beyond the data are dropped; the exact integer comparison
    // calls the first batch a tie.
    REQUIRE(report.batches.size() == 2);
    CHECK(report.batches[0].checkpoint == 1);
    CHECK(report.batches[0].winner == 0); // 3 thirds each
    CHECK(report.batches[1].checkpoint == 2);
    CHECK(report.batches[1].winner == 1); // 5 vs 4 thirds
    CHECK(report.wins_a == 1);
    CHECK(report.wins_b == 0);

    // The machine format carries the alignment bookkeeping.
    const json doc = json::parse(report.to_json());
    CHECK(doc.at("excluded_ineligible") == 1);
    CHECK(doc.at("n_pairs") == 2);
    CHECK(doc.at("judges")[1].at("mcnemar").is_null());
    CHECK(doc.at("seed") == "17");
    CHECK(report.to_markdown().find("dropped as ineligible: 1") != std::string::npos);
}

TEST_CASE("compare_runs with no usable pairs is an error") {
    TempDir dir("compare-empty");
    build_verdict_store(dir.path() / "a", {{"d1", {1, 1, 1}}}, "ra");
    build_verdict_store(dir.path() / "b", {{"d2", {1, 1, 1}}}, "rb");
    rp::VerdictStore a(dir.path() / "a", false);
    rp::VerdictStore b(dir.path() / "b", false);
    CHECK_THROWS_AS(rp::compare_runs(a, b, {}), ge::StatisticsError);

    build_verdict_store(dir.path() / "c", {{"d1", {1, 1, 1}, false}}, "rc");
    rp::VerdictStore c(dir.path() / "c", false);
    CHECK_THROWS_AS(rp::compare_runs(a, c, {}), ge::StatisticsError);
}

TEST_CASE("score_store scores a sealed run through a replay judge client") {
    TempDir dir("pipeline");
    auto fx = fixtures::build_pipeline_fixture(dir.path(), 6, 2026);

    auto corpus = ge::dataset::load_corpus(fx.corpus);
    ge::clients::CompletionStore responses(fx.responses_a, false);
    ge::clients::CompletionStore judge_store(fx.judge_store, false);
    ge::clients::Client judge_client(ge::clients::ClientMode::replay, judge_store);

    rp::ScoreOptions options;
    options.panel = fx.panel;
    options.judge_template = fx.judge_template;
    options.seed = fx.seed;

    rp::VerdictStore verdicts(dir.path() / "verdicts-a");
    auto report = rp::score_store(corpus, responses, judge_client, verdicts, options);

    CHECK(report.run_id == "fixture-run-a");
    CHECK(report.response_store_digest == responses.content_digest());
    CHECK(report.verdict_store_digest == verdicts.content_digest());
    CHECK(report.parsed_structured == 6); // the scaffolded run emits Analysis/Response
    CHECK(report.parsed_fallback == 0);
    CHECK(report.run_score.n + report.run_score.ineligible_count == 6);
    CHECK(report.run_score.ineligible_count >= 1); // item 3 is a planned non-attempt
    CHECK(report.run_score.mean_judge_average >= 0.0);
    CHECK(report.run_score.mean_judge_average <= 1.0);
    CHECK(verdicts.sealed());
    CHECK(verdicts.item_order().size() == 6);

    // The plain run parses through the fallback path.
    ge::clients::CompletionStore responses_b(fx.responses_b, false);
    rp::VerdictStore verdicts_b(dir.path() / "verdicts-b");
    auto report_b = rp::score_store(corpus, responses_b, judge_client, verdicts_b, options);
    CHECK(report_b.parsed_structured == 0);
    CHECK(report_b.parsed_fallback == 6);
    CHECK(report_b.run_id == "fixture-run-b");
}

TEST_CASE("scoring the same sealed store twice is byte-identical") {
    TempDir dir("deterministic");
    auto fx = fixtures::build_pipeline_fixture(dir.path(), 5, 7);

    auto corpus = ge::dataset::load_corpus(fx.corpus);
    ge::clients::CompletionStore responses(fx.responses_a, false);
    ge::clients::CompletionStore judge_store(fx.judge_store, false);
    ge::clients::Client judge_client(ge::clients::ClientMode::replay, judge_store);

    rp::ScoreOptions options;
    options.panel = fx.panel;
    options.judge_template = fx.judge_template;
    options.seed = fx.seed;

    rp::VerdictStore first(dir.path() / "v1");
    auto report1 = rp::score_store(corpus, responses, judge_client, first, options);
    rp::VerdictStore second(dir.path() / "v2");
    auto report2 = rp::score_store(corpus, responses, judge_client, second, options);

    CHECK(first.content_digest() == second.content_digest());
    CHECK(report1.to_json() == report2.to_json());
    CHECK(report1.to_markdown() == report2.to_markdown());

    // Reports identify inputs by digest; the two verdict directories never
    // appear in the output.
    CHECK(report1.to_json().find(dir.path().string()) == std::string::npos);
}

TEST_CASE("score_store validation") {
    TempDir dir("score-validation");
    auto fx = fixtures::build_pipeline_fixture(dir.path(), 3, 1);
    auto corpus = ge::dataset::load_corpus(fx.corpus);
    ge::clients::CompletionStore responses(fx.responses_a, false);
    ge::clients::CompletionStore judge_store(fx.judge_store, false);
    ge::clients::Client judge_client(ge::clients::ClientMode::replay, judge_store);

    rp::ScoreOptions options;
    options.panel = fx.panel;
    options.judge_template = fx.judge_template;
    options.seed = fx.seed;

    {
        auto two_judges = options;
        two_judges.panel.pop_back();
        rp::VerdictStore v(dir.path() / "v-two");
        CHECK_THROWS_WITH_AS(rp::score_store(corpus, responses, judge_client, v, two_judges),
                             doctest::Contains("exactly 3"), ge::ConfigError);
    }
    {
        auto bad_role = options;
        bad_role.panel[0].role = ge::clients::EndpointRole::candidate;
        rp::VerdictStore v(dir.path() / "v-role");
        CHECK_THROWS_WITH_AS(rp::score_store(corpus, responses, judge_client, v, bad_role),
                             doctest::Contains("judge role"), ge::ConfigError);
    }
    {
        auto duplicate = options;
        duplicate.panel[1] = duplicate.panel[0];
        rp::VerdictStore v(dir.path() / "v-dup");
        CHECK_THROWS_WITH_AS(rp::score_store(corpus, responses, judge_client, v, duplicate),
                             doctest::Contains("duplicate judge"), ge::ConfigError);
    }
    {
        ge::clients::CompletionStore unsealed(dir.path() / "unsealed-responses");
        rp::VerdictStore v(dir.path() / "v-unsealed");
        CHECK_THROWS_WITH_AS(rp::score_store(corpus, unsealed, judge_client, v, options),
                             doctest::Contains("sealed"), ge::ConfigError);
    }
}

TEST_CASE("comparing a fixture pipeline twice is byte-identical") {
    TempDir dir("compare-deterministic");
    auto fx = fixtures::build_pipeline_fixture(dir.path(), 6, 11);

    auto corpus = ge::dataset::load_corpus(fx.corpus);
    ge::clients::CompletionStore responses_a(fx.responses_a, false);
    ge::clients::CompletionStore responses_b(fx.responses_b, false);
    ge::clients::CompletionStore judge_store(fx.judge_store, false);
    ge::clients::Client judge_client(ge::clients::ClientMode::replay, judge_store);

    rp::ScoreOptions score_options;
    score_options.panel = fx.panel;
    score_options.judge_template = fx.judge_template;
    score_options.seed = fx.seed;

    rp::VerdictStore va(dir.path() / "va");
    rp::score_store(corpus, responses_a, judge_client, va, score_options);
    rp::VerdictStore vb(dir.path() / "vb");
    rp::score_store(corpus, responses_b, judge_client, vb, score_options);

    rp::CompareOptions options;
    options.resamples = 1000;
    options.seed = 5;
    options.checkpoints = {2, 4};

    auto r1 = rp::compare_runs(va, vb, options);
    auto r2 = rp::compare_runs(va, vb, options);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_markdown() == r2.to_markdown());

    // The markdown twin renders from the same document the JSON dumps.
    CHECK(rp::render_markdown_from_json(r1.to_json()) == r1.to_markdown());

    // A different seed changes the resampling outputs but not the data.
    auto reseeded_options = options;
    reseeded_options.seed = 6;
    auto r3 = rp::compare_runs(va, vb, reseeded_options);
    CHECK(r3.n_pairs == r1.n_pairs);
    CHECK(r3.delta == r1.delta);
}

TEST_CASE("progressive_report appends the full n and renders both formats") {
    TempDir dir("progressive");
    build_verdict_store(dir.path() / "v",
                        {{"d1", {1, 1, 1}},
                         {"d2", {1, 0, 0}},
                         {"d3", {0, 0, 0}},
                         {"d4", {1, 1, 0}},
                         {"d5", {1, 1, 1}}},
                        "resp");
    rp::VerdictStore store(dir.path() / "v", false);

    auto report = rp::progressive_report(store, {2, 100});
    CHECK(report.verdict_digest == store.content_digest());
    REQUIRE(report.result.rows.size() == 2); // checkpoint 100 dropped, n=5 appended
    CHECK(report.result.rows[0].n == 2);
    CHECK(report.result.rows[0].cumulative_mean == doctest::Approx(4.0 / 6.0));
    CHECK(report.result.rows[1].n == 5);
    CHECK(report.result.rows[1].cumulative_mean == doctest::Approx(9.0 / 15.0));

    const json doc = json::parse(report.to_json());
    CHECK(doc.at("report") == "progressive");
    CHECK(doc.at("rows").size() == 2);
    CHECK(doc.at("verdict_store_digest") == store.content_digest());

    const std::string md = report.to_markdown();
    CHECK(md.find("| 5 | 0.600000 |") != std::string::npos);
    CHECK(md.find("stability sigma") != std::string::npos);
    CHECK(rp::render_markdown_from_json(report.to_json()) == md);
}

TEST_CASE("cost_report traces every figure it prints") {
    std::vector<ge::costmodel::PriceSheetEntry> sheet;
    ge::costmodel::PriceSheetEntry gpt4o;
    gpt4o.provider = "openai";
    gpt4o.model = "gpt-4o";
    gpt4o.input_price_per_1k = ge::costmodel::Money::parse("0.0025");
    gpt4o.output_price_per_1k = ge::costmodel::Money::parse("0.0100");
    gpt4o.basis = ge::costmodel::PriceBasis::measured;
    gpt4o.retrieved = "2025-10-01";
    sheet.push_back(gpt4o);

    ge::costmodel::PriceSheetEntry phi = gpt4o;
    phi.provider = "azure";
    phi.model = "phi-3.5-mini-instruct";
    phi.input_price_per_1k = ge::costmodel::Money::parse("0.00013");
    phi.output_price_per_1k = ge::costmodel::Money::parse("0.00052");
    sheet.push_back(phi);

    ge::costmodel::SelfHostProfile a100;
    a100.hourly_rate = ge::costmodel::Money::parse("3.67");
    a100.throughput_tokens_per_s = 45.0;
    a100.utilization = 0.65;
    a100.amortized_capex_per_hour = ge::costmodel::Money::parse("0.57");
    a100.power_per_hour = ge::costmodel::Money::parse("0.15");

    auto report = rp::cost_report(sheet, {}, a100, true);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].cost.to_string() == "0.00625");
    CHECK(report.rows[0].trace == "0.0025 x 500/1000 + 0.01 x 500/1000 = 0.00625");
    CHECK(report.rows[0].ratio_to_cheapest == doctest::Approx(19.230769231));
    CHECK(report.rows[1].cost.to_string() == "0.000325");
    CHECK(report.rows[1].ratio_to_cheapest == doctest::Approx(1.0));

    REQUIRE(report.selfhost.has_value());
    CHECK(report.selfhost->raw_cost.to_string() == "0.022654321");
    CHECK(report.selfhost->utilization_adjusted_cost.to_string() == "0.034852802");
    REQUIRE(report.selfhost_trace.has_value());
    CHECK(*report.selfhost_trace ==
          "1000 tok / 45 tok/s = 22.222 s; 3.67/hr -> raw 0.022654321; / utilization 0.65 = "
          "0.034852802; / batch 1 = 0.034852802");

    REQUIRE(report.edge.has_value());
    CHECK(report.edge->nanos() == 6837606);
    CHECK(report.edge_trace->find("capex 0.57 + power 0.15") != std::string::npos);

    const json doc = json::parse(report.to_json());
    CHECK(doc.at("report") == "cost");
    CHECK(doc.at("rows")[0].at("cost") == "0.00625"); // money stays a decimal string
    CHECK(doc.at("selfhost").at("batched_cost") == "0.034852802");

    const std::string md = report.to_markdown();
    CHECK(md.find("| openai | gpt-4o | 0.0025 | 0.01 | measured | $0.00625 | 19.23 |") !=
          std::string::npos);
    CHECK(md.find("## Self-hosted") != std::string::npos);
    CHECK(md.find("## Edge") != std::string::npos);
    CHECK(rp::render_markdown_from_json(report.to_json()) == md);

    // Overhead shows up in the trace when present.
    ge::costmodel::RequestProfile with_overhead;
    with_overhead.overhead_fraction = 0.04;
    auto overhead_report = rp::cost_report(sheet, with_overhead, std::nullopt, false);
    CHECK(overhead_report.rows[0].trace ==
          "0.0025 x 500/1000 + 0.01 x 500/1000, x (1 + 0.04) = 0.0065");
    CHECK_FALSE(overhead_report.selfhost.has_value());
    CHECK(json::parse(overhead_report.to_json()).at("selfhost").is_null());

    CHECK_THROWS_AS(rp::cost_report({}, {}, std::nullopt, false), ge::ConfigError);
    CHECK_THROWS_WITH_AS(rp::cost_report(sheet, {}, std::nullopt, true),
                         doctest::Contains("requires a self-host profile"), ge::ConfigError);
}

TEST_CASE("render_markdown_from_json rejects unknown report kinds") {
    CHECK_THROWS_AS(rp::render_markdown_from_json("not json"), ge::ConfigError);
    CHECK_THROWS_WITH_AS(rp::render_markdown_from_json(R"({"report": "weather"})"),
                         doctest::Contains("unknown report kind"), ge::ConfigError);
}
