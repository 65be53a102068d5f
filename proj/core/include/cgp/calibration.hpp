#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cgp/garch.hpp"

namespace cgp {

/// Daily closing prices with ISO-8601 dates. Lexicographic date order equals
/// chronological order for this format.
struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> prices;
};

/// Reads a `date,price` CSV (exact header required). Throws DataError naming
/// the offending line on malformed input, non-positive prices, or dates out
/// of order.
PriceSeries load_price_csv(const std::string& path);

/// Daily log returns. r_step is the per-step risk-free rate the likelihood
/// subtracts from returns; it defaults to 0 (a daily rate is negligible over
/// typical samples and rarely published with the data).
struct ReturnSeries {
    std::vector<std::string> dates;  ///< date of each return (interval end)
    std::vector<double> returns;
    double r_step = 0.0;
};

/// Log returns between consecutive rows of a price series.
ReturnSeries to_returns(const PriceSeries& prices, double r_step = 0.0);

/// Two return series on the intersection of trading dates, for concordance
/// estimation and joint calibration. Throws DataError with fewer than 30
/// common dates.
struct AlignedReturns {
    std::vector<std::string> dates;
    std::vector<double> r1;
    std::vector<double> r2;
    double r_step = 0.0;
};
AlignedReturns align_series(const PriceSeries& a, const PriceSeries& b, double r_step = 0.0);

/// Gaussian conditional log likelihood of the GARCH(1,1) under the physical
/// measure, with the variance path filtered from the returns themselves.
/// Infeasible parameter/variance combinations yield -infinity rather than an
/// exception, so optimizers can probe freely.
double log_likelihood(const GarchParams& p, const ReturnSeries& series, double h_init);

struct MleResult {
    GarchParams params;                   ///< physical-measure estimate
    double h_init = 0.0;                  ///< variance used at the first step
    double loglik = 0.0;
    std::array<double, 5> std_errors{};   ///< omega, alpha, beta, gamma, lambda
    std::array<bool, 5> se_ok{};          ///< false where the Hessian was unusable
    bool converged = false;
    int iterations = 0;
};

/// Maximum likelihood fit over (omega, alpha, beta, gamma, lambda).
/// Positivity of the first three is enforced by log reparameterization; the
/// search is a multi-start downhill simplex, h_init is pinned to the sample
/// variance. Non-convergence is reported in the result, not thrown.
MleResult mle_fit(const ReturnSeries& series, std::optional<GarchParams> init = std::nullopt);

struct StdErrors {
    std::array<double, 5> value{};
    std::array<bool, 5> ok{};
};

/// Standard errors from the inverse numerical Hessian (central differences,
/// relative step 1e-4) of the negative log likelihood at the optimum.
/// Parameters whose curvature is unusable (boundary, flat direction,
/// non-positive-definite block) come back flagged instead of throwing.
StdErrors std_errors(const MleResult& result, const ReturnSeries& series);

/// sqrt(252 * (omega + alpha) / (1 - beta - alpha gamma^2)); requires
/// persistence < 1.
double annualized_vol(const GarchParams& p);

}  // namespace cgp
