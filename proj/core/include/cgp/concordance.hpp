#pragma once

#include <span>

namespace cgp {

/// Kendall's tau-a on paired observations:
/// sum over i<j of sign((x_j - x_i)(y_j - y_i)) divided by n(n-1)/2, where
/// tied pairs contribute 0. Computed in O(n log n) by inversion counting;
/// identical to direct pair enumeration.
double empirical_kendall(std::span<const double> x, std::span<const double> y);

/// Spearman's rho: Pearson correlation of the rank vectors, ties receiving
/// average ranks. Throws std::domain_error when a rank vector is constant
/// (correlation undefined).
double empirical_spearman(std::span<const double> x, std::span<const double> y);

/// Median-quadrant odds-ratio estimate theta* = a^2 / (0.5 - a)^2, where a is
/// the fraction of points whose coordinates both sit at or below their sample
/// medians (ties count as below). Throws NumericalError when a is 0 or 0.5
/// (theta* would be 0 or infinite).
double estimate_theta_median_quadrant(std::span<const double> x, std::span<const double> y);

}  // namespace cgp
