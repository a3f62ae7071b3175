/// @file protocol.cpp

#include "groundeval/protocol.hpp"

#include "groundeval/errors.hpp"
#include "groundeval/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace groundeval::protocol {

namespace {

void check_distinct_judges(const std::array<JudgeVerdict, 3>& verdicts) {
    std::set<std::string> ids;
    for (const auto& v : verdicts) {
        if (v.judge_id.empty()) {
            throw ConfigError("judge verdict without judge_id");
        }
        if (!ids.insert(v.judge_id).second) {
            throw ConfigError("duplicate judge_id in verdict triple: " + v.judge_id);
        }
    }
}

} // namespace

double judge_average(const std::array<JudgeVerdict, 3>& verdicts) {
    check_distinct_judges(verdicts);
    int trues = 0;
    for (const auto& v : verdicts) trues += effective_verdict(v) ? 1 : 0;
    return trues / 3.0;
}

bool eligibility(const std::array<JudgeVerdict, 3>& verdicts) {
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const JudgeVerdict& v) { return v.eligible; });
}

ItemScore score_item(std::string item_digest, std::array<JudgeVerdict, 3> verdicts) {
    if (item_digest.empty()) {
        throw ConfigError("score_item: empty item digest");
    }
    check_distinct_judges(verdicts);

    ItemScore score;
    score.item_digest = std::move(item_digest);
    score.verdicts = std::move(verdicts);
    score.true_count = 0;
    for (const auto& v : score.verdicts) score.true_count += effective_verdict(v) ? 1 : 0;
    score.eligible = eligibility(score.verdicts);
    score.unanimous = score.true_count == 0 || score.true_count == 3;
    return score;
}

RunScore aggregate_run(const std::vector<ItemScore>& scores) {
    if (scores.empty()) {
        throw StatisticsError("aggregate_run: empty score list");
    }

    // Panel consistency: same judge ids, same order, on every item.
    std::vector<std::string> panel;
    for (const auto& v : scores.front().verdicts) panel.push_back(v.judge_id);
    for (const auto& score : scores) {
        for (size_t j = 0; j < panel.size(); ++j) {
            if (score.verdicts[j].judge_id != panel[j]) {
                throw ConfigError("aggregate_run: inconsistent judge panel at item " +
                                  score.item_digest);
            }
        }
    }

    RunScore run;
    long true_count_sum = 0;
    long unanimous = 0;
    std::array<long, 3> judge_trues{0, 0, 0};

    for (const auto& score : scores) {
        if (!score.eligible) {
            ++run.ineligible_count;
            continue;
        }
        ++run.n;
        true_count_sum += score.true_count;
        unanimous += score.unanimous ? 1 : 0;
        for (size_t j = 0; j < 3; ++j) {
            judge_trues[j] += effective_verdict(score.verdicts[j]) ? 1 : 0;
        }
    }
    if (run.n == 0) {
        throw StatisticsError("aggregate_run: no eligible items");
    }

    run.mean_judge_average = static_cast<double>(true_count_sum) / (3.0 * run.n);
    run.unanimity_rate = static_cast<double>(unanimous) / run.n;
    for (size_t j = 0; j < 3; ++j) {
        run.per_judge_accuracy.emplace_back(panel[j],
                                            static_cast<double>(judge_trues[j]) / run.n);
    }
    return run;
}

AnonymizedSet anonymize(const std::vector<std::pair<std::string, std::string>>& model_responses,
                        std::uint64_t seed) {
    AnonymizedSet set;
    set.record.seed = seed;
    const size_t n = model_responses.size();
    if (n == 0) return set;

    std::vector<int> permutation(n);
    std::iota(permutation.begin(), permutation.end(), 0);
    // Fisher-Yates under the anonymization substream; deterministic per seed.
    SplitMix64 rng = substream(seed, kDomainAnonymize, 0);
    for (size_t i = n - 1; i > 0; --i) {
        const size_t j = rng.uniform_below(i + 1);
        std::swap(permutation[i], permutation[j]);
    }

    for (size_t i = 0; i < n; ++i) {
        AnonymizedPresentation presentation;
        // Labels walk the alphabet; panels are pairs in practice.
        presentation.label = std::string("Response-") + static_cast<char>('A' + i);
        presentation.text = model_responses[permutation[i]].second;
        set.record.label_to_model.emplace_back(presentation.label,
                                               model_responses[permutation[i]].first);
        set.presentations.push_back(std::move(presentation));
    }
    set.record.permutation = std::move(permutation);
    return set;
}

AnonymizedPresentation anonymize(const scaffold::StructuredResponse& response,
                                 std::uint64_t seed) {
    AnonymizedSet set = anonymize({{std::string("model"), response.answer}}, seed);
    return set.presentations.front();
}

std::vector<std::pair<std::string, std::string>> deanonymize(const AnonymizedSet& set) {
    std::vector<std::pair<std::string, std::string>> out(set.presentations.size());
    for (size_t i = 0; i < set.presentations.size(); ++i) {
        out[set.record.permutation[i]] = {set.record.label_to_model[i].second,
                                          set.presentations[i].text};
    }
    return out;
}

std::string render_presentation(const AnonymizedPresentation& presentation) {
    return presentation.label + ":\n" + presentation.text;
}

} // namespace groundeval::protocol
