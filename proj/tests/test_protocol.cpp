/// @file test_protocol.cpp

#include "groundeval/protocol.hpp"

#include "groundeval/errors.hpp"

#include <doctest.h>

#include <array>
#include <set>
#include <string>
#include <vector>

namespace ge = groundeval;
namespace pr = ge::protocol;

namespace {

pr::JudgeVerdict verdict(const char* judge, bool value, bool eligible = true) {
    pr::JudgeVerdict v;
    v.judge_id = judge;
    v.verdict = value;
    v.eligible = eligible;
    return v;
}

std::array<pr::JudgeVerdict, 3> triple(bool a, bool b, bool c) {
    return {verdict("j1", a), verdict("j2", b), verdict("j3", c)};
}

} // namespace

TEST_CASE("judge average covers the quarter grid over all verdict patterns") {
    for (int mask = 0; mask < 8; ++mask) {
        const bool a = mask & 1, b = mask & 2, c = mask & 4;
        const int trues = (a ? 1 : 0) + (b ? 1 : 0) + (c ? 1 : 0);
        CHECK(pr::judge_average(triple(a, b, c)) == trues / 3.0);
    }
}

TEST_CASE("eligibility fails only when all three judges opt out") {
    for (int mask = 0; mask < 8; ++mask) {
        std::array<pr::JudgeVerdict, 3> vs = triple(true, true, true);
        for (int j = 0; j < 3; ++j) vs[j].eligible = (mask >> j) & 1;
        CHECK(pr::eligibility(vs) == (mask != 0));
    }
}

TEST_CASE("an ineligible verdict outside a unanimous opt-out counts as FALSE") {
    auto vs = triple(true, true, true);
    vs[1].eligible = false;

    pr::ItemScore score = pr::score_item("d1", vs);
    CHECK(score.true_count == 2);
    CHECK(score.eligible);
    CHECK_FALSE(score.unanimous);
    CHECK(score.judge_average() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("unanimity is judged on effective verdicts") {
    // A TRUE vote from an opted-out judge is effectively FALSE, which can
    // complete a unanimous-FALSE item.
    auto vs = triple(true, false, false);
    vs[0].eligible = false;

    pr::ItemScore score = pr::score_item("d1", vs);
    CHECK(score.true_count == 0);
    CHECK(score.eligible);
    CHECK(score.unanimous);

    CHECK(pr::score_item("d2", triple(true, true, true)).unanimous);
    CHECK(pr::score_item("d3", triple(false, false, false)).unanimous);
    CHECK_FALSE(pr::score_item("d4", triple(true, false, true)).unanimous);
}

TEST_CASE("score_item validates the panel") {
    CHECK_THROWS_AS(pr::score_item("", triple(true, true, true)), ge::ConfigError);

    auto dup = triple(true, true, true);
    dup[2].judge_id = "j1";
    CHECK_THROWS_AS(pr::score_item("d1", dup), ge::ConfigError);

    auto blank = triple(true, true, true);
    blank[0].judge_id.clear();
    CHECK_THROWS_AS(pr::score_item("d1", blank), ge::ConfigError);
}

TEST_CASE("aggregate_run excludes ineligible items and reconciles per-judge rates") {
    std::vector<pr::ItemScore> scores;
    scores.push_back(pr::score_item("i1", triple(true, true, true)));
    scores.push_back(pr::score_item("i2", triple(true, false, true)));
    scores.push_back(pr::score_item("i3", triple(false, false, false)));

    auto opt_out = triple(true, true, true);
    for (auto& v : opt_out) v.eligible = false;
    scores.push_back(pr::score_item("i4", opt_out));

    auto partial = triple(true, true, true);
    partial[0].eligible = false; // effective (F, T, T)
    scores.push_back(pr::score_item("i5", partial));

    pr::RunScore run = pr::aggregate_run(scores);
    CHECK(run.n == 4);
    CHECK(run.ineligible_count == 1);
    CHECK(run.mean_judge_average == doctest::Approx(7.0 / 12.0));
    CHECK(run.unanimity_rate == doctest::Approx(0.5));

    REQUIRE(run.per_judge_accuracy.size() == 3);
    CHECK(run.per_judge_accuracy[0].first == "j1");
    CHECK(run.per_judge_accuracy[1].first == "j2");
    CHECK(run.per_judge_accuracy[2].first == "j3");
    CHECK(run.per_judge_accuracy[0].second == doctest::Approx(0.5));
    CHECK(run.per_judge_accuracy[1].second == doctest::Approx(0.5));
    CHECK(run.per_judge_accuracy[2].second == doctest::Approx(0.75));

    // The item mean is the mean of the per-judge accuracies by construction.
    double mean = 0.0;
    for (const auto& [id, acc] : run.per_judge_accuracy) mean += acc;
    CHECK(run.mean_judge_average == doctest::Approx(mean / 3.0));
}

TEST_CASE("aggregate_run rejects degenerate inputs") {
    CHECK_THROWS_AS(pr::aggregate_run({}), ge::StatisticsError);

    auto opt_out = triple(true, true, true);
    for (auto& v : opt_out) v.eligible = false;
    std::vector<pr::ItemScore> all_out{pr::score_item("i1", opt_out)};
    CHECK_THROWS_AS(pr::aggregate_run(all_out), ge::StatisticsError);

    std::vector<pr::ItemScore> mixed;
    mixed.push_back(pr::score_item("i1", triple(true, true, true)));
    mixed.push_back(pr::score_item("i2", {verdict("j2", true), verdict("j1", true),
                                          verdict("j3", true)}));
    CHECK_THROWS_AS(pr::aggregate_run(mixed), ge::ConfigError);
}

TEST_CASE("anonymize permutes under the seed and deanonymize restores input order") {
    const std::vector<std::pair<std::string, std::string>> responses{
        {"model-a", "answer alpha"},
        {"model-b", "answer beta"},
        {"model-c", "answer gamma"},
    };

    pr::AnonymizedSet set = pr::anonymize(responses, 42);
    REQUIRE(set.presentations.size() == 3);
    CHECK(set.presentations[0].label == "Response-A");
    CHECK(set.presentations[1].label == "Response-B");
    CHECK(set.presentations[2].label == "Response-C");

    // Labels never leak model names; texts are passed through unmodified.
    std::set<std::string> texts;
    for (const auto& p : set.presentations) {
        CHECK(p.text.find("model-") == std::string::npos);
        texts.insert(p.text);
    }
    CHECK(texts == std::set<std::string>{"answer alpha", "answer beta", "answer gamma"});

    // The record ties each label to the model that produced its text.
    REQUIRE(set.record.label_to_model.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(set.record.label_to_model[i].first == set.presentations[i].label);
        const auto& model = set.record.label_to_model[i].second;
        const auto& original = responses[set.record.permutation[i]];
        CHECK(model == original.first);
        CHECK(set.presentations[i].text == original.second);
    }

    CHECK(pr::deanonymize(set) == responses);

    pr::AnonymizedSet again = pr::anonymize(responses, 42);
    CHECK(again.record.permutation == set.record.permutation);
}

TEST_CASE("anonymization order varies across seeds") {
    const std::vector<std::pair<std::string, std::string>> responses{
        {"model-a", "first"},
        {"model-b", "second"},
    };
    std::set<std::string> leading;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        leading.insert(pr::anonymize(responses, seed).presentations[0].text);
    }
    CHECK(leading == std::set<std::string>{"first", "second"});
}

TEST_CASE("single-response anonymization always presents Response-A") {
    ge::scaffold::StructuredResponse response;
    response.raw = "Analysis: fine.\nResponse: The context covers it.";
    response.analysis = "fine.";
    response.answer = "The context covers it.";

    for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
        pr::AnonymizedPresentation p = pr::anonymize(response, seed);
        CHECK(p.label == "Response-A");
        CHECK(p.text == "The context covers it.");
    }
}

TEST_CASE("render_presentation prefixes the label on its own line") {
    pr::AnonymizedPresentation p;
    p.label = "Response-B";
    p.text = "Grounded answer.";
    CHECK(pr::render_presentation(p) == "Response-B:\nGrounded answer.");
}
