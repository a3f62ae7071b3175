/// @file costmodel.cpp

#include "groundeval/costmodel.hpp"

#include "groundeval/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace groundeval::costmodel {

using nlohmann::json;

namespace {

constexpr std::int64_t kPpm = 1'000'000;

std::int64_t to_ppm(double fraction, const char* what) {
    if (!std::isfinite(fraction)) {
        throw ConfigError(std::string("costmodel: ") + what + " must be finite");
    }
    return std::llround(fraction * static_cast<double>(kPpm));
}

} // namespace

Money normalized_cost(const PriceSheetEntry& sheet, const RequestProfile& profile) {
    if (sheet.input_price_per_1k.is_negative() || sheet.output_price_per_1k.is_negative()) {
        throw ConfigError("costmodel: negative price in sheet for " + sheet.model);
    }
    if (profile.input_tokens < 0 || profile.output_tokens < 0) {
        throw ConfigError("costmodel: negative token count");
    }
    if (profile.overhead_fraction < 0.0) {
        throw ConfigError("costmodel: overhead_fraction must be nonnegative");
    }

    const Money base = sheet.input_price_per_1k.scaled(profile.input_tokens, 1000) +
                       sheet.output_price_per_1k.scaled(profile.output_tokens, 1000);
    const std::int64_t overhead_ppm = to_ppm(profile.overhead_fraction, "overhead_fraction");
    return base.scaled(kPpm + overhead_ppm, kPpm);
}

double cost_ratio(Money a, Money b) {
    if (b.nanos() <= 0) {
        throw ConfigError("cost_ratio: denominator must be positive");
    }
    return static_cast<double>(a.nanos()) / static_cast<double>(b.nanos());
}

SelfHostBreakdown selfhost_cost(const SelfHostProfile& profile, long tokens) {
    if (tokens < 0) throw ConfigError("selfhost_cost: tokens must be nonnegative");
    if (!(profile.throughput_tokens_per_s > 0.0)) {
        throw ConfigError("selfhost_cost: throughput must be positive");
    }
    if (!(profile.utilization > 0.0 && profile.utilization <= 1.0)) {
        throw ConfigError("selfhost_cost: utilization must be in (0,1]");
    }
    if (!(profile.batch_factor >= 1.0)) {
        throw ConfigError("selfhost_cost: batch_factor must be >= 1");
    }

    const std::int64_t throughput_milli =
        std::llround(profile.throughput_tokens_per_s * 1000.0);
    const std::int64_t utilization_ppm = to_ppm(profile.utilization, "utilization");
    const std::int64_t batch_milli = std::llround(profile.batch_factor * 1000.0);

    SelfHostBreakdown breakdown;
    breakdown.seconds = static_cast<double>(tokens) / profile.throughput_tokens_per_s;
    // rate * seconds / 3600 = rate * (tokens * 1000) / (throughput_milli * 3600)
    breakdown.raw_cost =
        profile.hourly_rate.scaled(tokens * 1000, throughput_milli * 3600);
    breakdown.utilization_adjusted_cost = breakdown.raw_cost.scaled(kPpm, utilization_ppm);
    breakdown.batched_cost = breakdown.utilization_adjusted_cost.scaled(1000, batch_milli);
    return breakdown;
}

Money edge_cost(const SelfHostProfile& profile, long tokens) {
    if (!profile.amortized_capex_per_hour || !profile.power_per_hour) {
        throw ConfigError("edge_cost: amortized_capex_per_hour and power_per_hour required");
    }
    SelfHostProfile effective = profile;
    effective.hourly_rate = *profile.amortized_capex_per_hour + *profile.power_per_hour;
    return selfhost_cost(effective, tokens).batched_cost;
}

std::vector<PriceSheetEntry> load_price_sheet(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(
            "price sheet not found: " + path.string() +
            " (expected a JSON array of {provider, model, input_per_1k, output_per_1k, "
            "basis, retrieved, source})");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("price sheet " + path.string() + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw ConfigError("price sheet " + path.string() + ": expected a nonempty JSON array");
    }

    std::vector<PriceSheetEntry> sheet;
    for (const auto& row : doc) {
        PriceSheetEntry entry;
        try {
            entry.provider = row.at("provider").get<std::string>();
            entry.model = row.at("model").get<std::string>();
            entry.input_price_per_1k = Money::parse(row.at("input_per_1k").get<std::string>());
            entry.output_price_per_1k = Money::parse(row.at("output_per_1k").get<std::string>());
            const std::string basis = row.at("basis").get<std::string>();
            if (basis == "measured") {
                entry.basis = PriceBasis::measured;
            } else if (basis == "estimated") {
                entry.basis = PriceBasis::estimated;
            } else {
                throw ConfigError("basis must be measured or estimated, got \"" + basis + "\"");
            }
            entry.retrieved = row.at("retrieved").get<std::string>();
            if (entry.retrieved.empty()) throw ConfigError("retrieved date is mandatory");
            if (row.contains("source")) entry.source = row.at("source").get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError("price sheet " + path.string() + ": bad row for model \"" +
                              entry.model + "\": " + e.what());
        }
        if (entry.input_price_per_1k.is_negative() || entry.output_price_per_1k.is_negative()) {
            throw ConfigError("price sheet " + path.string() + ": negative price for " +
                              entry.model);
        }
        sheet.push_back(std::move(entry));
    }
    return sheet;
}

} // namespace groundeval::costmodel
