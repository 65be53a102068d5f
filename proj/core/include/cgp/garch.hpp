#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace cgp {

enum class Measure { physical, risk_neutral };

/// Parameters of the Gaussian affine GARCH(1,1)
///
///   ln S_t = ln S_{t-1} + r + lambda * h_t + sqrt(h_t) * z_t
///   h_t    = omega + beta * h_{t-1} + alpha * (z_{t-1} - gamma * sqrt(h_{t-1}))^2
///
/// with z_t standard normal. One step is one trading day; rates and variances
/// are per step. A risk-neutral instance always carries lambda = -1/2.
struct GarchParams {
    double omega = 0.0;   ///< variance offset, >= 0
    double alpha = 0.0;   ///< ARCH coefficient, >= 0
    double beta = 0.0;    ///< GARCH coefficient, >= 0
    double gamma = 0.0;   ///< asymmetry parameter
    double lambda = 0.0;  ///< risk premium per unit variance
    Measure measure = Measure::physical;

    double persistence() const noexcept { return beta + alpha * gamma * gamma; }

    /// The variance process mean-reverts iff persistence() < 1. Pricing over a
    /// finite horizon does not require this, so it is a diagnostic, not a
    /// validity condition.
    bool is_stationary() const noexcept { return persistence() < 1.0; }
};

/// Throws std::domain_error on negative variance coefficients, non-finite
/// values, or a risk-neutral tag with lambda != -1/2. Non-stationary
/// parameters pass; check is_stationary() if you want to warn.
void validate(const GarchParams& p);

/// Market state attached to a pricing or simulation horizon.
struct MarketContext {
    double s0 = 0.0;      ///< spot price, > 0
    double r_step = 0.0;  ///< continuously compounded risk-free rate per step
    double h_next = 0.0;  ///< conditional variance of the first future step, > 0
};
void validate(const MarketContext& m);

/// GARCH(p,q) coefficient set. Supported by simulate_path only; the affine
/// recursion for the generating function is specific to (1,1).
struct GarchPQParams {
    double omega = 0.0;
    std::vector<double> beta_j;   ///< p GARCH coefficients
    std::vector<double> alpha_j;  ///< q ARCH coefficients
    double gamma = 0.0;
    double lambda = 0.0;
};
void validate(const GarchPQParams& p);

/// Throws std::domain_error unless p = q = 1.
GarchParams to_garch11(const GarchPQParams& p);

/// Measure change gamma* = gamma + lambda + 1/2, lambda* = -1/2.
/// Applying it to an already risk-neutral input is rejected: a second
/// transform would corrupt gamma silently.
GarchParams risk_neutralize(const GarchParams& p);

/// One variance update: omega + beta*h + alpha*(z - gamma*sqrt(h))^2.
double variance_step(const GarchParams& p, double h, double z);

/// Variance update driven by an observed log return instead of the shock:
/// omega + beta*h + alpha*(R - r_step - lambda*h - gamma*h)^2 / h.
double h_from_return(const GarchParams& p, double h, double log_return, double r_step);

/// (omega + alpha) / (1 - persistence); requires persistence < 1.
double long_run_variance(const GarchParams& p);

/// E[h_{t+1} | h_t = h] = omega + alpha + (beta + alpha*gamma^2) * h.
double expected_next_variance(const GarchParams& p, double h);

/// Cov(h_{t+1}, ln S_t | h_t = h) = -2 * alpha * gamma * h.
double spot_variance_covariance(const GarchParams& p, double h);

/// Coefficients of the exponentially affine generating function
/// E_t[S_T^u] = S_t^u * exp(a + b * h_{t+1}), obtained by iterating
///
///   a <- a + u*r + b*omega - log(1 - 2*alpha*b) / 2
///   b <- u*(lambda + gamma) - gamma^2/2 + beta*b + (u - gamma)^2 / (2*(1 - 2*alpha*b))
///
/// n_steps times from the terminal condition a = b = 0. The complex log uses
/// the principal branch; if 1 - 2*alpha*b leaves the right half plane (or gets
/// within 1e-12 of zero) the recursion aborts with NumericalError, since the
/// branch choice would no longer be trustworthy.
struct MgfCoefficients {
    std::complex<double> a;
    std::complex<double> b;
};
MgfCoefficients mgf_coefficients(const GarchParams& p, std::complex<double> u, int n_steps,
                                 double r_step);

/// Characteristic function of ln S_T given the state in m, n_steps ahead:
/// s0^{iu} * exp(a + b*h_next) with (a,b) evaluated at iu.
std::complex<double> log_price_cf(const GarchParams& p, const MarketContext& m, double u,
                                  int n_steps);

/// Characteristic function of the log return ln(S_T/S_0); the s0 factor drops.
std::complex<double> log_return_cf(const GarchParams& p, const MarketContext& m, double u,
                                   int n_steps);

/// log E[e^{u X}] for the log return X over n_steps, real u. Useful for moment
/// probes (mean/variance by finite differences) and the martingale identity.
double log_return_cumulant(const GarchParams& p, const MarketContext& m, double u, int n_steps);

struct SimulatedPath {
    std::vector<double> log_price;  ///< size n_steps + 1, [0] = ln s0
    std::vector<double> variance;   ///< size n_steps, [t] drives step t+1; [0] = h_next
};

/// Seeded path simulation. Deterministic for a fixed seed; shocks come from a
/// counter-indexed stream, so disjoint seeds give independent paths.
SimulatedPath simulate_path(const GarchParams& p, const MarketContext& m, int n_steps,
                            std::uint64_t seed);

/// GARCH(p,q) variant. Pre-sample variance lags are seeded with h_next and
/// pre-sample squared shocks with their stationary mean 1 + gamma^2 * h_next.
SimulatedPath simulate_path(const GarchPQParams& p, const MarketContext& m, int n_steps,
                            std::uint64_t seed);

}  // namespace cgp
