/// @file special.hpp
/// @brief Special functions backing the interval and test computations.
///
/// Self-contained implementations (normal quantile, regularized incomplete
/// beta and its inverse, chi-square tail) so the statistics layer has no
/// external numeric dependency and behaves identically on every platform.
/// Accuracy targets are far tighter than any fixture tolerance: the normal
/// quantile is good to ~1e-15, the beta inversion to ~1e-12 in x.

#pragma once

namespace groundeval::stats {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile (inverse CDF) for p in (0, 1).
/// Acklam's rational approximation polished with one Halley step.
double inv_norm_cdf(double p);

/// log Beta(a, b) for a, b > 0.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
/// evaluated by the Lentz continued fraction.
double reg_inc_beta(double a, double b, double x);

/// Inverse of I_x(a, b) in x: smallest x with I_x(a, b) >= p.
/// Bisection to machine precision plus Newton polish; exact at p = 0 and 1.
double inv_reg_inc_beta(double a, double b, double p);

/// Upper tail of the chi-square distribution with one degree of freedom,
/// P(X >= x) = erfc(sqrt(x / 2)).
double chi2_sf_1df(double x);

} // namespace groundeval::stats
