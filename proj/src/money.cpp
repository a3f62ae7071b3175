/// @file money.cpp

#include "groundeval/money.hpp"

#include "groundeval/errors.hpp"

#include <cctype>
#include <cstdlib>

namespace groundeval::costmodel {

namespace {

constexpr std::int64_t kNanosPerDollar = 1'000'000'000;

[[noreturn]] void bad_amount(std::string_view text, const char* why) {
    throw ConfigError("money: cannot parse \"" + std::string(text) + "\": " + why);
}

} // namespace

Money Money::parse(std::string_view text) {
    if (text.empty()) bad_amount(text, "empty");

    size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }

    std::int64_t dollars = 0;
    bool any_digit = false;
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
        any_digit = true;
        dollars = dollars * 10 + (text[pos] - '0');
        if (dollars > 9'000'000'000) bad_amount(text, "amount too large");
    }

    std::int64_t frac_nanos = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
            any_digit = true;
            if (++digits > 9) bad_amount(text, "more than 9 fractional digits");
            frac_nanos = frac_nanos * 10 + (text[pos] - '0');
        }
        for (; digits < 9; ++digits) frac_nanos *= 10;
    }

    if (!any_digit || pos != text.size()) bad_amount(text, "not a decimal number");

    const std::int64_t magnitude = dollars * kNanosPerDollar + frac_nanos;
    return Money::from_nanos(negative ? -magnitude : magnitude);
}

Money Money::scaled(std::int64_t numerator, std::int64_t denominator) const {
    if (denominator <= 0) {
        throw ConfigError("money: scale denominator must be positive");
    }
    __int128 product = static_cast<__int128>(nanos_) * numerator;
    const bool negative = product < 0;
    if (negative) product = -product;
    // Round half away from zero.
    const __int128 quotient = (product + denominator / 2) / denominator;
    return Money::from_nanos(static_cast<std::int64_t>(negative ? -quotient : quotient));
}

std::string Money::to_string() const {
    std::int64_t n = nanos_;
    std::string sign;
    if (n < 0) {
        sign = "-";
        n = -n;
    }
    std::string out = sign + std::to_string(n / kNanosPerDollar);
    std::int64_t frac = n % kNanosPerDollar;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, 9 - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += "." + digits;
    }
    return out;
}

} // namespace groundeval::costmodel
