/// @file stats.cpp

#include "groundeval/stats.hpp"

#include "groundeval/errors.hpp"
#include "groundeval/rng.hpp"
#include "groundeval/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace groundeval::stats {

const char* interval_method_name(IntervalMethod method) {
    switch (method) {
        case IntervalMethod::wilson: return "wilson";
        case IntervalMethod::exact_binomial: return "exact_binomial";
        case IntervalMethod::bootstrap_percentile: return "bootstrap_percentile";
    }
    return "unknown";
}

IntervalEstimate wilson_ci(double p_hat, long n, double level) {
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) {
        throw StatisticsError("wilson_ci: p_hat must be in [0,1]");
    }
    if (n < 1) throw StatisticsError("wilson_ci: n must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw StatisticsError("wilson_ci: level must be in (0,1)");

    const double z = inv_norm_cdf(0.5 + level / 2.0);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p_hat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * static_cast<double>(n) * n)) / denom;

    IntervalEstimate ci;
    ci.point = p_hat;
    ci.lower = std::max(0.0, center - half);
    ci.upper = std::min(1.0, center + half);
    ci.level = level;
    ci.method = IntervalMethod::wilson;
    return ci;
}

IntervalEstimate exact_binomial_ci(double successes, long n, double level) {
    if (n < 1) throw StatisticsError("exact_binomial_ci: n must be >= 1");
    if (!(successes >= 0.0 && successes <= static_cast<double>(n))) {
        throw StatisticsError("exact_binomial_ci: successes must be in [0, n]");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw StatisticsError("exact_binomial_ci: level must be in (0,1)");
    }

    const double alpha = 1.0 - level;
    const double k = successes;
    IntervalEstimate ci;
    ci.point = k / n;
    ci.level = level;
    ci.method = IntervalMethod::exact_binomial;
    // Beta-quantile form of Clopper-Pearson; fractional k generalizes the
    // parameters directly. k = 0 pins the lower bound, k = n the upper.
    ci.lower = (k <= 0.0) ? 0.0 : inv_reg_inc_beta(k, n - k + 1.0, alpha / 2.0);
    ci.upper = (k >= static_cast<double>(n)) ? 1.0
                                             : inv_reg_inc_beta(k + 1.0, n - k, 1.0 - alpha / 2.0);
    return ci;
}

double PairedDiffSeries::mean() const {
    if (diff_thirds.empty()) return 0.0;
    const long long sum = std::accumulate(diff_thirds.begin(), diff_thirds.end(), 0LL);
    return static_cast<double>(sum) / (3.0 * static_cast<double>(diff_thirds.size()));
}

std::vector<double> PairedDiffSeries::diffs() const {
    std::vector<double> out;
    out.reserve(diff_thirds.size());
    for (int t : diff_thirds) out.push_back(t / 3.0);
    return out;
}

PairedDiffSeries paired_diffs(
    const std::vector<std::pair<protocol::ItemScore, protocol::ItemScore>>& pairs,
    std::string label_a, std::string label_b) {
    PairedDiffSeries series;
    series.label_a = std::move(label_a);
    series.label_b = std::move(label_b);
    series.diff_thirds.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        if (a.item_digest != b.item_digest) {
            throw ConfigError("paired_diffs: digest mismatch: " + a.item_digest + " vs " +
                              b.item_digest);
        }
        series.diff_thirds.push_back(a.true_count - b.true_count);
    }
    return series;
}

namespace {

/// Linear interpolation over sorted values (the common "type 7" convention),
/// computed on integer thirds sums and scaled once at the end.
double percentile_of_sums(const std::vector<long long>& sorted_sums, double probability,
                          double scale) {
    const size_t count = sorted_sums.size();
    if (count == 1) return sorted_sums[0] * scale;
    const double position = probability * static_cast<double>(count - 1);
    const size_t lo = static_cast<size_t>(position);
    const size_t hi = std::min(lo + 1, count - 1);
    const double fraction = position - static_cast<double>(lo);
    const double value = static_cast<double>(sorted_sums[lo]) +
                         fraction * static_cast<double>(sorted_sums[hi] - sorted_sums[lo]);
    return value * scale;
}

} // namespace

IntervalEstimate bootstrap_ci(const PairedDiffSeries& series, double level, long resamples,
                              std::uint64_t seed) {
    const long n = series.n();
    if (n < 1) throw StatisticsError("bootstrap_ci: empty series");
    if (resamples < 1) throw StatisticsError("bootstrap_ci: resamples must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw StatisticsError("bootstrap_ci: level must be in (0,1)");

    std::vector<long long> sums(static_cast<size_t>(resamples));
    for (long r = 0; r < resamples; ++r) {
        SplitMix64 rng = substream(seed, kDomainBootstrap, static_cast<std::uint64_t>(r));
        long long sum = 0;
        for (long i = 0; i < n; ++i) {
            sum += series.diff_thirds[rng.uniform_below(static_cast<std::uint64_t>(n))];
        }
        sums[static_cast<size_t>(r)] = sum;
    }
    std::sort(sums.begin(), sums.end());

    const double scale = 1.0 / (3.0 * static_cast<double>(n));
    const double alpha = 1.0 - level;
    IntervalEstimate ci;
    ci.point = series.mean();
    ci.lower = percentile_of_sums(sums, alpha / 2.0, scale);
    ci.upper = percentile_of_sums(sums, 1.0 - alpha / 2.0, scale);
    ci.level = level;
    ci.method = IntervalMethod::bootstrap_percentile;
    return ci;
}

PermutationResult permutation_p(const PairedDiffSeries& series, long shuffles, std::uint64_t seed,
                                bool add_one) {
    const long n = series.n();
    if (n < 1) throw StatisticsError("permutation_p: empty series");
    if (shuffles < 1) throw StatisticsError("permutation_p: shuffles must be >= 1");

    long long observed = 0;
    for (int t : series.diff_thirds) observed += t;
    const long long observed_abs = std::llabs(observed);

    long extreme = 0;
    for (long r = 0; r < shuffles; ++r) {
        SplitMix64 rng = substream(seed, kDomainPermutation, static_cast<std::uint64_t>(r));
        long long sum = 0;
        for (int t : series.diff_thirds) {
            sum += rng.next_bit() ? -t : t;
        }
        // |mean| >= |observed mean| reduces to integer |sum| comparison.
        if (std::llabs(sum) >= observed_abs) ++extreme;
    }

    PermutationResult result;
    result.extreme_count = extreme;
    result.shuffles = shuffles;
    result.seed = seed;
    result.add_one = add_one;
    result.p_value = add_one
                         ? static_cast<double>(extreme + 1) / static_cast<double>(shuffles + 1)
                         : static_cast<double>(extreme) / static_cast<double>(shuffles);
    return result;
}

bool tost_decision(const IntervalEstimate& ci90, double margin) {
    if (!(margin > 0.0)) throw StatisticsError("tost: margin must be positive");
    return ci90.lower > -margin && ci90.upper < margin;
}

TostResult tost(const PairedDiffSeries& series, double margin, long resamples,
                std::uint64_t seed) {
    if (!(margin > 0.0)) throw StatisticsError("tost: margin must be positive");
    TostResult result;
    result.margin = margin;
    result.ci90 = bootstrap_ci(series, 0.90, resamples, seed);
    result.equivalent = tost_decision(result.ci90, margin);
    return result;
}

McNemarResult mcnemar(long b, long c) {
    if (b < 0 || c < 0) throw StatisticsError("mcnemar: counts must be nonnegative");
    if (b + c == 0) {
        throw StatisticsError("mcnemar: undefined with no discordant pairs (b + c = 0)");
    }
    McNemarResult result;
    result.b = b;
    result.c = c;
    const double diff = static_cast<double>(b - c);
    result.chi2 = diff * diff / static_cast<double>(b + c);
    result.p = chi2_sf_1df(result.chi2);
    return result;
}

EffectSize effect_size(const PairedDiffSeries& series) {
    const long n = series.n();
    if (n < 2) throw StatisticsError("effect_size: need at least 2 paired differences");

    long long sum = 0;
    long long sum_sq = 0;
    for (int t : series.diff_thirds) {
        sum += t;
        sum_sq += static_cast<long long>(t) * t;
    }
    const double mean_thirds = static_cast<double>(sum) / static_cast<double>(n);
    // Sample variance in thirds units, n-1 denominator; divide by 9 for d(i).
    const double var_thirds =
        (static_cast<double>(sum_sq) - static_cast<double>(n) * mean_thirds * mean_thirds) /
        static_cast<double>(n - 1);
    const double sd = std::sqrt(std::max(0.0, var_thirds)) / 3.0;
    const double mean = mean_thirds / 3.0;

    EffectSize effect;
    effect.n = n;
    effect.standard_error = sd / std::sqrt(static_cast<double>(n));
    if (sd > 0.0) {
        effect.cohens_d = mean / sd;
    }
    return effect;
}

DiscordantCounts discordant_counts(
    const std::vector<std::pair<protocol::JudgeVerdict, protocol::JudgeVerdict>>& pairs) {
    DiscordantCounts counts;
    for (const auto& [a, b] : pairs) {
        const bool at = protocol::effective_verdict(a);
        const bool bt = protocol::effective_verdict(b);
        if (at && !bt) ++counts.b;
        if (!at && bt) ++counts.c;
    }
    return counts;
}

StabilityStats stability_from_means(const std::vector<double>& means) {
    if (means.empty()) throw StatisticsError("stability: no checkpoint means");

    StabilityStats stats;
    stats.checkpoint_means = means;
    const double n = static_cast<double>(means.size());
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    stats.sigma = std::sqrt(ss / n);
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    stats.range = *hi - *lo;
    return stats;
}

ProgressiveResult progressive_stats(const std::vector<protocol::ItemScore>& scores,
                                    const std::vector<long>& checkpoints) {
    if (checkpoints.empty()) throw StatisticsError("progressive_stats: no checkpoints");
    long previous = 0;
    for (long checkpoint : checkpoints) {
        if (checkpoint <= previous) {
            throw StatisticsError("progressive_stats: checkpoints must be strictly ascending");
        }
        if (checkpoint > static_cast<long>(scores.size())) {
            throw StatisticsError("progressive_stats: checkpoint " + std::to_string(checkpoint) +
                                  " exceeds data size " + std::to_string(scores.size()));
        }
        previous = checkpoint;
    }

    ProgressiveResult result;
    std::vector<double> means;
    size_t index = 0;
    long eligible = 0;
    long true_sum = 0;
    for (long checkpoint : checkpoints) {
        for (; index < static_cast<size_t>(checkpoint); ++index) {
            if (!scores[index].eligible) continue;
            ++eligible;
            true_sum += scores[index].true_count;
        }
        if (eligible == 0) {
            throw StatisticsError("progressive_stats: no eligible items at checkpoint " +
                                  std::to_string(checkpoint));
        }
        ProgressiveRow row;
        row.n = eligible;
        row.cumulative_mean = static_cast<double>(true_sum) / (3.0 * eligible);
        row.wilson = wilson_ci(row.cumulative_mean, eligible, 0.95);
        // Judge-average means convert to fractional effective successes.
        row.exact = exact_binomial_ci(static_cast<double>(true_sum) / 3.0, eligible, 0.95);
        means.push_back(row.cumulative_mean);
        result.rows.push_back(row);
    }
    result.stability = stability_from_means(means);
    return result;
}

} // namespace groundeval::stats
