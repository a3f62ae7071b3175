/// @file test_dataset.cpp

#include "groundeval/dataset.hpp"

#include "groundeval/digest.hpp"

#include "groundeval/errors.hpp"
#include "temp_dir.hpp"

#include <doctest.h>

#include <fstream>
#include <string>

namespace ge = groundeval;
using ge::dataset::EvalSubset;

namespace {

EvalSubset parse(const std::string& text) { return ge::dataset::parse_corpus(text, "test"); }

const char* kThreeItems =
    R"({"id": "a", "question": "Q one?", "context": "C one", "domain": "med"})"
    "\n"
    R"({"question": "Q two?", "context": "C two"})"
    "\n"
    "\n"
    R"({"id": "c", "question": "Q three?", "context": "C three"})"
    "\n";

} // namespace

TEST_CASE("parse_corpus assigns sequence and fallback ids") {
    const EvalSubset subset = parse(kThreeItems);
    REQUIRE(subset.items.size() == 3);
    CHECK(subset.items[0].id == "a");
    CHECK(subset.items[0].sequence_index == 1);
    CHECK(subset.items[0].domain_tag == "med");
    CHECK(subset.items[1].id == "q2"); // no id field, synthesized from position
    CHECK(subset.items[1].domain_tag.empty());
    CHECK(subset.items[2].id == "c");
    CHECK(subset.items[2].sequence_index == 3);
    CHECK(subset.n == 3);
    CHECK(subset.kind == ge::dataset::SelectionKind::full);
}

TEST_CASE("parse_corpus digests are content digests") {
    const EvalSubset subset = parse(kThreeItems);
    CHECK(subset.items[0].content_digest ==
          ge::content_digest("Q one?", "C one"));
    // Same question and context in a different file position digests equal.
    const EvalSubset again = parse(
        R"({"id": "x", "question": "Q one?", "context": "C one"})" "\n");
    CHECK(again.items[0].content_digest == subset.items[0].content_digest);
}

TEST_CASE("parse_corpus rejects malformed lines with their line number") {
    CHECK_THROWS_WITH_AS(parse("{\"question\": \"q\", \"context\": \"c\"}\nnot json\n"),
                         doctest::Contains("line 2"), ge::ConfigError);
    CHECK_THROWS_WITH_AS(parse(R"({"question": "only"})" "\n"),
                         doctest::Contains("question and context"), ge::ConfigError);
    CHECK_THROWS_WITH_AS(parse(R"(["array"])" "\n"), doctest::Contains("line 1"),
                         ge::ConfigError);
}

TEST_CASE("parse_corpus rejects duplicates and empty input") {
    const std::string dup =
        R"({"id": "a", "question": "q", "context": "c"})" "\n"
        R"({"id": "a", "question": "r", "context": "d"})" "\n";
    CHECK_THROWS_WITH_AS(parse(dup), doctest::Contains("duplicate id"), ge::ConfigError);
    CHECK_THROWS_AS(parse(""), ge::ConfigError);
    CHECK_THROWS_AS(parse("\n  \n\t\n"), ge::ConfigError);
}

TEST_CASE("load_corpus derives a content-based corpus id") {
    fixtures::TempDir tmp("dataset");
    const auto path_a = tmp.path() / "a.jsonl";
    const auto path_b = tmp.path() / "b.jsonl";
    std::ofstream(path_a) << kThreeItems;
    std::ofstream(path_b) << kThreeItems;

    const EvalSubset a = ge::dataset::load_corpus(path_a);
    const EvalSubset b = ge::dataset::load_corpus(path_b);
    CHECK(a.source_corpus_id == b.source_corpus_id); // same bytes, same id
    CHECK(a.source_corpus_id.rfind("corpus-", 0) == 0);

    CHECK_THROWS_AS(ge::dataset::load_corpus(tmp.path() / "missing.jsonl"), ge::ConfigError);
}

TEST_CASE("select_first_n takes the prefix and validates bounds") {
    const EvalSubset subset = parse(kThreeItems);
    const EvalSubset first2 = ge::dataset::select_first_n(subset, 2);
    CHECK(first2.items.size() == 2);
    CHECK(first2.items[0].id == "a");
    CHECK(first2.items[1].id == "q2");
    CHECK(first2.kind == ge::dataset::SelectionKind::first_n);
    CHECK(first2.n == 2);
    CHECK(first2.source_corpus_id == subset.source_corpus_id);

    const EvalSubset all = ge::dataset::select_first_n(subset, 3);
    CHECK(all.items.size() == 3);

    CHECK_THROWS_AS(ge::dataset::select_first_n(subset, 0), ge::ConfigError);
    CHECK_THROWS_AS(ge::dataset::select_first_n(subset, 4), ge::ConfigError);
}

TEST_CASE("align_pairs pairs by digest and reports the rest") {
    const EvalSubset subset = parse(kThreeItems);
    auto response = [](const std::string& digest, const std::string& model) {
        ge::dataset::ModelResponse r;
        r.item_digest = digest;
        r.model = model;
        r.text = "answer";
        return r;
    };

    // run a: items 0 and 1; run b: items 1 and 2, plus one unknown digest.
    const std::vector run_a{response(subset.items[0].content_digest, "m1"),
                            response(subset.items[1].content_digest, "m1")};
    const std::vector run_b{response(subset.items[1].content_digest, "m2"),
                            response(subset.items[2].content_digest, "m2"),
                            response("feedfeed", "m2")};

    const ge::dataset::AlignmentResult result = ge::dataset::align_pairs(subset, run_a, run_b);
    REQUIRE(result.pairs.size() == 1);
    CHECK(result.pairs[0].item.id == "q2");
    CHECK(result.pairs[0].response_a.model == "m1");
    CHECK(result.pairs[0].response_b.model == "m2");

    REQUIRE(result.unmatched.size() == 3);
    int missing = 0;
    int unknown = 0;
    for (const auto& entry : result.unmatched) {
        if (entry.reason == "missing_counterpart") ++missing;
        if (entry.reason == "unknown_item") ++unknown;
    }
    CHECK(missing == 2); // item 0 from a, item 2 from b
    CHECK(unknown == 1); // feedfeed
}

TEST_CASE("align_pairs rejects duplicate digests inside one run") {
    const EvalSubset subset = parse(kThreeItems);
    ge::dataset::ModelResponse r;
    r.item_digest = subset.items[0].content_digest;
    r.model = "m";
    CHECK_THROWS_WITH_AS(ge::dataset::align_pairs(subset, {r, r}, {}),
                         doctest::Contains("duplicate digest"), ge::ConfigError);
}
