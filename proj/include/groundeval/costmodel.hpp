/// @file costmodel.hpp
/// @brief Normalized per-request cost for managed APIs, self-hosted GPUs, and
/// edge deployments.
///
/// The comparison convention is a 1,000-token request (500 in, 500 out)
/// priced from a data-file price sheet; scaffold overhead enters as a
/// fractional multiplier. Self-hosted cost follows
/// rate * (tokens / throughput) / 3600 with utilization and batching
/// divisors. Fractional factors (utilization, overhead) are carried at
/// parts-per-million resolution so money arithmetic stays integral.

#pragma once

#include "groundeval/money.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace groundeval::costmodel {

/// Measured token-overhead bands for the two scaffold variants.
inline constexpr double kDirectedOverheadLow = 0.01;
inline constexpr double kDirectedOverheadHigh = 0.02;
inline constexpr double kFullScaffoldOverheadLow = 0.03;
inline constexpr double kFullScaffoldOverheadHigh = 0.05;

enum class PriceBasis { measured, estimated };

/// One price-sheet row. Sheets are data files, never hard-coded: prices
/// drift, and the basis/retrieved fields are mandatory provenance.
struct PriceSheetEntry {
    std::string provider;
    std::string model;
    Money input_price_per_1k;
    Money output_price_per_1k;
    PriceBasis basis = PriceBasis::estimated;
    std::string retrieved; ///< ISO date the price was read
    std::string source;    ///< URL or citation, may be empty
};

struct RequestProfile {
    long input_tokens = 500;
    long output_tokens = 500;
    double overhead_fraction = 0.0; ///< >= 0; ppm resolution
};

struct SelfHostProfile {
    Money hourly_rate;
    double throughput_tokens_per_s = 0.0; ///< > 0; milli-token resolution
    double utilization = 1.0;             ///< (0, 1]; ppm resolution
    double batch_factor = 1.0;            ///< >= 1; milli resolution
    std::optional<Money> amortized_capex_per_hour;
    std::optional<Money> power_per_hour;
};

/// (input/1000)*input_price + (output/1000)*output_price, then
/// *(1 + overhead_fraction). Zero tokens cost zero; negative anything is an
/// error.
Money normalized_cost(const PriceSheetEntry& sheet, const RequestProfile& profile);

/// a / b as a dimensionless multiplier; b must be positive.
double cost_ratio(Money a, Money b);

struct SelfHostBreakdown {
    double seconds = 0.0;
    Money raw_cost;
    Money utilization_adjusted_cost;
    Money batched_cost;
};

/// seconds = tokens/throughput; raw = rate*seconds/3600; then /utilization,
/// then /batch_factor.
SelfHostBreakdown selfhost_cost(const SelfHostProfile& profile, long tokens);

/// Self-host formula with hourly_rate = amortized capex + power. Both fields
/// must be present. Returns the final (batched) cost.
Money edge_cost(const SelfHostProfile& profile, long tokens);

/// Loads a JSON price sheet: an array of rows with keys provider, model,
/// input_per_1k, output_per_1k (decimal strings), basis, retrieved, source.
std::vector<PriceSheetEntry> load_price_sheet(const std::filesystem::path& path);

} // namespace groundeval::costmodel
