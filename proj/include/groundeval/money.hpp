/// @file money.hpp
/// @brief Exact fixed-point USD amounts.
///
/// Prices and costs are int64 nanodollars (1e-9 USD). Price sheets carry
/// decimal strings that parse exactly; scaling by token counts, utilization,
/// or overhead happens through integer rational multiplication with a single
/// rounding at the end of each step. Binary floating point never touches a
/// monetary value; ratios and display formatting convert at the edges.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace groundeval::costmodel {

class Money {
  public:
    constexpr Money() = default;

    static constexpr Money from_nanos(std::int64_t nanos) { return Money(nanos); }

    /// Parses a decimal string like "0.00013" or "3.67". At most 9 fractional
    /// digits (nanodollar resolution); more is an error, not a silent round.
    static Money parse(std::string_view text);

    constexpr std::int64_t nanos() const { return nanos_; }
    constexpr bool is_zero() const { return nanos_ == 0; }
    constexpr bool is_negative() const { return nanos_ < 0; }

    /// value * numerator / denominator in 128-bit intermediate arithmetic,
    /// rounded half away from zero. denominator must be positive.
    Money scaled(std::int64_t numerator, std::int64_t denominator) const;

    constexpr Money operator+(Money other) const { return Money(nanos_ + other.nanos_); }
    constexpr Money operator-(Money other) const { return Money(nanos_ - other.nanos_); }
    constexpr auto operator<=>(const Money&) const = default;

    /// Canonical decimal string, trailing fractional zeros trimmed
    /// ("0.00625", "3.67", "0").
    std::string to_string() const;

    /// For ratios and chart-style output only; never fed back into Money.
    double to_double() const { return static_cast<double>(nanos_) / 1e9; }

  private:
    explicit constexpr Money(std::int64_t nanos) : nanos_(nanos) {}
    std::int64_t nanos_ = 0;
};

} // namespace groundeval::costmodel
