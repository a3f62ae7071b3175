/// @file stats.hpp
/// @brief Inference over paired judge-average scores: intervals, resampling
/// tests, equivalence decisions, effect sizes, progressive stability.
///
/// Paired differences d(i) live on the grid {-1, -2/3, ..., 1}. They are
/// stored as integer numerators over 3 ("thirds") and all resampling reduces
/// to integer sums, so tail comparisons like |mean| >= |observed| are exact
/// with no floating-point tie ambiguity. Every stochastic routine takes an
/// explicit seed and derives one substream per resample, making results
/// bit-reproducible and independent of thread count.

#pragma once

#include "groundeval/protocol.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace groundeval::stats {

enum class IntervalMethod { wilson, exact_binomial, bootstrap_percentile };

const char* interval_method_name(IntervalMethod method);

struct IntervalEstimate {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    IntervalMethod method = IntervalMethod::wilson;
};

/// Wilson score interval with the two-sided normal quantile for `level`.
IntervalEstimate wilson_ci(double p_hat, long n, double level);

/// Clopper-Pearson interval via beta quantiles. `successes` may be fractional
/// (effective successes from judge-average means); the usual k=0 / k=n
/// boundary rules apply.
IntervalEstimate exact_binomial_ci(double successes, long n, double level);

struct PairedDiffSeries {
    /// Per item, 3 * (judge_average_a - judge_average_b), an integer in
    /// [-3, 3]. diffs() exposes the rational values.
    std::vector<int> diff_thirds;
    std::string label_a = "A";
    std::string label_b = "B";

    long n() const { return static_cast<long>(diff_thirds.size()); }
    double mean() const;
    std::vector<double> diffs() const;
};

/// Builds the difference series d(i) = m_a(i) - m_b(i), order preserved.
/// Every pair must share its item digest.
PairedDiffSeries paired_diffs(
    const std::vector<std::pair<protocol::ItemScore, protocol::ItemScore>>& pairs,
    std::string label_a = "A", std::string label_b = "B");

/// Percentile bootstrap interval for the mean difference: `resamples`
/// with-replacement resamples of the items, quantiles by linear interpolation
/// over the order statistics. Deterministic under (seed, resamples).
IntervalEstimate bootstrap_ci(const PairedDiffSeries& series, double level, long resamples,
                              std::uint64_t seed);

struct PermutationResult {
    double p_value = 1.0;
    long extreme_count = 0; ///< shuffles with |mean| >= |observed mean|
    long shuffles = 0;
    std::uint64_t seed = 0;
    bool add_one = false; ///< (count+1)/(B+1) convention instead of count/B
};

/// Two-tailed sign-flip permutation test: each shuffle negates every d(i)
/// independently with probability 1/2; p is the fraction of shuffles at least
/// as extreme as the observed mean.
PermutationResult permutation_p(const PairedDiffSeries& series, long shuffles, std::uint64_t seed,
                                bool add_one = false);

struct TostResult {
    double margin = 0.0;
    IntervalEstimate ci90;
    bool equivalent = false;
};

/// Equivalence decision given a 90% CI: equivalent iff the interval lies
/// strictly inside (-margin, +margin).
bool tost_decision(const IntervalEstimate& ci90, double margin);

/// Two One-Sided Tests via the bootstrap 90% CI of the mean difference.
TostResult tost(const PairedDiffSeries& series, double margin, long resamples,
                std::uint64_t seed);

struct McNemarResult {
    long b = 0; ///< A-only successes
    long c = 0; ///< B-only successes
    double chi2 = 0.0;
    double p = 0.0;
};

/// McNemar test without continuity correction: chi2 = (b-c)^2/(b+c), p from
/// the upper tail of chi-square with 1 df. b + c = 0 leaves the test
/// undefined and raises StatisticsError.
McNemarResult mcnemar(long b, long c);

struct EffectSize {
    /// Absent when the series has zero variance (d undefined there).
    std::optional<double> cohens_d;
    double standard_error = 0.0; ///< sample-sd / sqrt(n)
    long n = 0;
};

/// Paired-differences Cohen's d: mean / sample-sd with the n-1 denominator.
/// Requires n >= 2.
EffectSize effect_size(const PairedDiffSeries& series);

struct DiscordantCounts {
    long b = 0; ///< A TRUE, B FALSE
    long c = 0; ///< A FALSE, B TRUE
};

/// Discordant pair counts for one judge over aligned items, using effective
/// verdicts.
DiscordantCounts discordant_counts(
    const std::vector<std::pair<protocol::JudgeVerdict, protocol::JudgeVerdict>>& pairs);

struct StabilityStats {
    std::vector<double> checkpoint_means;
    double sigma = 0.0; ///< population standard deviation over the means
    double range = 0.0; ///< max - min
};

/// Stability of a precomputed sequence of checkpoint means.
StabilityStats stability_from_means(const std::vector<double>& means);

struct ProgressiveRow {
    long n = 0;
    double cumulative_mean = 0.0;
    IntervalEstimate wilson;
    IntervalEstimate exact;
};

struct ProgressiveResult {
    std::vector<ProgressiveRow> rows;
    StabilityStats stability;
};

/// Progressive validation: cumulative mean judge-average at each checkpoint
/// with Wilson and exact intervals per row. Checkpoints must be ascending and
/// within the data; ineligible items are skipped in the cumulative means,
/// consistent with aggregate_run.
ProgressiveResult progressive_stats(const std::vector<protocol::ItemScore>& scores,
                                    const std::vector<long>& checkpoints);

} // namespace groundeval::stats
