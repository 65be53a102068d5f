#pragma once

#include <cmath>

namespace cgp {

inline double normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// Inverse of the standard normal CDF. Rational approximation refined with
/// one Halley step, accurate to a few ulps on (0,1).
/// Throws std::domain_error for p outside (0,1).
double normal_quantile(double p);

}  // namespace cgp
