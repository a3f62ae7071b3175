/// @file bindings.cpp
/// @brief pybind11 module exposing the statistics, protocol math, and cost
/// model to Python.
///
/// Stores, clients, and report rendering stay C++-side; the bindings cover
/// the numeric operations people want to poke at interactively. Structured
/// results come back as plain dicts, money as decimal strings.

#include "groundeval/costmodel.hpp"
#include "groundeval/errors.hpp"
#include "groundeval/protocol.hpp"
#include "groundeval/scaffold.hpp"
#include "groundeval/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

namespace py = pybind11;
namespace ge = groundeval;

namespace {

py::dict interval_dict(const ge::stats::IntervalEstimate& ci) {
    py::dict out;
    out["point"] = ci.point;
    out["lower"] = ci.lower;
    out["upper"] = ci.upper;
    out["level"] = ci.level;
    out["method"] = ge::stats::interval_method_name(ci.method);
    return out;
}

ge::stats::PairedDiffSeries series_from(const std::vector<int>& diff_thirds) {
    ge::stats::PairedDiffSeries series;
    series.diff_thirds = diff_thirds;
    return series;
}

ge::costmodel::PriceSheetEntry entry_from(const std::string& input_per_1k,
                                          const std::string& output_per_1k) {
    ge::costmodel::PriceSheetEntry entry;
    entry.model = "adhoc";
    entry.input_price_per_1k = ge::costmodel::Money::parse(input_per_1k);
    entry.output_price_per_1k = ge::costmodel::Money::parse(output_per_1k);
    return entry;
}

} // namespace

PYBIND11_MODULE(_groundeval, m) {
    m.doc() = "Grounded-response evaluation: statistics, judge math, cost model";

    py::register_exception<ge::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ge::StatisticsError>(m, "StatisticsError", PyExc_ValueError);

    m.def(
        "wilson_ci",
        [](double p_hat, long n, double level) {
            return interval_dict(ge::stats::wilson_ci(p_hat, n, level));
        },
        py::arg("p_hat"), py::arg("n"), py::arg("level") = 0.95,
        "Wilson score interval for a proportion, clamped to [0, 1].");

    m.def(
        "exact_binomial_ci",
        [](double successes, long n, double level) {
            return interval_dict(ge::stats::exact_binomial_ci(successes, n, level));
        },
        py::arg("successes"), py::arg("n"), py::arg("level") = 0.95,
        "Clopper-Pearson interval; fractional success counts are allowed.");

    m.def(
        "bootstrap_ci",
        [](const std::vector<int>& diff_thirds, double level, long resamples,
           std::uint64_t seed) {
            return interval_dict(
                ge::stats::bootstrap_ci(series_from(diff_thirds), level, resamples, seed));
        },
        py::arg("diff_thirds"), py::arg("level") = 0.95, py::arg("resamples") = 10000,
        py::arg("seed") = 0,
        "Percentile bootstrap CI for the mean paired difference. diff_thirds "
        "holds 3 * (judge_average_a - judge_average_b) per item, integers in "
        "[-3, 3].");

    m.def(
        "permutation_p",
        [](const std::vector<int>& diff_thirds, long shuffles, std::uint64_t seed,
           bool add_one) {
            const auto result =
                ge::stats::permutation_p(series_from(diff_thirds), shuffles, seed, add_one);
            py::dict out;
            out["p_value"] = result.p_value;
            out["extreme_count"] = result.extreme_count;
            out["shuffles"] = result.shuffles;
            out["add_one"] = result.add_one;
            return out;
        },
        py::arg("diff_thirds"), py::arg("shuffles") = 10000, py::arg("seed") = 0,
        py::arg("add_one") = false, "Two-tailed sign-flip permutation test.");

    m.def(
        "tost",
        [](const std::vector<int>& diff_thirds, double margin, long resamples,
           std::uint64_t seed) {
            const auto result =
                ge::stats::tost(series_from(diff_thirds), margin, resamples, seed);
            py::dict out;
            out["margin"] = result.margin;
            out["equivalent"] = result.equivalent;
            out["ci90"] = interval_dict(result.ci90);
            return out;
        },
        py::arg("diff_thirds"), py::arg("margin"), py::arg("resamples") = 10000,
        py::arg("seed") = 0,
        "Equivalence via TOST: the bootstrap 90% CI must sit strictly inside "
        "(-margin, +margin).");

    m.def(
        "mcnemar",
        [](long b, long c) {
            const auto result = ge::stats::mcnemar(b, c);
            py::dict out;
            out["b"] = result.b;
            out["c"] = result.c;
            out["chi2"] = result.chi2;
            out["p"] = result.p;
            return out;
        },
        py::arg("b"), py::arg("c"),
        "McNemar test on discordant counts, no continuity correction.");

    m.def(
        "effect_size",
        [](const std::vector<int>& diff_thirds) {
            const auto result = ge::stats::effect_size(series_from(diff_thirds));
            py::dict out;
            out["cohens_d"] = result.cohens_d ? py::object(py::float_(*result.cohens_d))
                                              : py::object(py::none());
            out["standard_error"] = result.standard_error;
            out["n"] = result.n;
            return out;
        },
        py::arg("diff_thirds"),
        "Paired Cohen's d; cohens_d is None when the series has no variance.");

    m.def(
        "stability",
        [](const std::vector<double>& means) {
            const auto result = ge::stats::stability_from_means(means);
            py::dict out;
            out["sigma"] = result.sigma;
            out["range"] = result.range;
            out["checkpoint_means"] = result.checkpoint_means;
            return out;
        },
        py::arg("checkpoint_means"),
        "Population standard deviation and range over checkpoint means.");

    m.def(
        "judge_average",
        [](const std::vector<bool>& verdicts, const std::vector<bool>& eligible) {
            if (verdicts.size() != 3 || eligible.size() != 3) {
                throw ge::ConfigError("judge_average: need exactly 3 verdicts");
            }
            std::array<ge::protocol::JudgeVerdict, 3> panel;
            const char* ids[3] = {"judge-1", "judge-2", "judge-3"};
            for (size_t j = 0; j < 3; ++j) {
                panel[j].judge_id = ids[j];
                panel[j].verdict = verdicts[j];
                panel[j].eligible = eligible[j];
            }
            const auto score = ge::protocol::score_item("item", panel);
            py::dict out;
            out["judge_average"] = score.judge_average();
            out["true_count"] = score.true_count;
            out["eligible"] = score.eligible;
            out["unanimous"] = score.unanimous;
            return out;
        },
        py::arg("verdicts"), py::arg("eligible") = std::vector<bool>{true, true, true},
        "Three-judge aggregation for one item: TRUE count / 3, eligibility, "
        "unanimity. Opted-out judges count FALSE unless all three opt out.");

    m.def(
        "normalized_cost",
        [](const std::string& input_per_1k, const std::string& output_per_1k,
           long input_tokens, long output_tokens, double overhead_fraction) {
            ge::costmodel::RequestProfile profile;
            profile.input_tokens = input_tokens;
            profile.output_tokens = output_tokens;
            profile.overhead_fraction = overhead_fraction;
            return ge::costmodel::normalized_cost(entry_from(input_per_1k, output_per_1k),
                                                  profile)
                .to_string();
        },
        py::arg("input_per_1k"), py::arg("output_per_1k"), py::arg("input_tokens") = 500,
        py::arg("output_tokens") = 500, py::arg("overhead_fraction") = 0.0,
        "Cost of one normalized request as a decimal dollar string.");

    m.def(
        "cost_ratio",
        [](const std::string& a, const std::string& b) {
            return ge::costmodel::cost_ratio(ge::costmodel::Money::parse(a),
                                             ge::costmodel::Money::parse(b));
        },
        py::arg("a"), py::arg("b"), "Ratio of two decimal dollar amounts.");

    m.def(
        "selfhost_cost",
        [](const std::string& hourly_rate, double throughput_tokens_per_s, double utilization,
           double batch_factor, long tokens) {
            ge::costmodel::SelfHostProfile profile;
            profile.hourly_rate = ge::costmodel::Money::parse(hourly_rate);
            profile.throughput_tokens_per_s = throughput_tokens_per_s;
            profile.utilization = utilization;
            profile.batch_factor = batch_factor;
            const auto breakdown = ge::costmodel::selfhost_cost(profile, tokens);
            py::dict out;
            out["seconds"] = breakdown.seconds;
            out["raw"] = breakdown.raw_cost.to_string();
            out["utilization_adjusted"] = breakdown.utilization_adjusted_cost.to_string();
            out["batched"] = breakdown.batched_cost.to_string();
            return out;
        },
        py::arg("hourly_rate"), py::arg("throughput_tokens_per_s"),
        py::arg("utilization") = 1.0, py::arg("batch_factor") = 1.0, py::arg("tokens") = 1000,
        "Self-hosted per-request cost breakdown as decimal dollar strings.");

    m.def("default_temperature", &ge::scaffold::default_temperature, py::arg("family"),
          "Candidate decode temperature policy by model family.");

    m.attr("__version__") = "0.1.0";
}
