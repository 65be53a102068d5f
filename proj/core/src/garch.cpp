#include "cgp/garch.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cgp/errors.hpp"
#include "cgp/math/rng.hpp"

namespace cgp {

void validate(const GarchParams& p) {
    if (!(std::isfinite(p.omega) && std::isfinite(p.alpha) && std::isfinite(p.beta) &&
          std::isfinite(p.gamma) && std::isfinite(p.lambda))) {
        throw std::domain_error("GarchParams: non-finite parameter");
    }
    if (p.omega < 0.0 || p.alpha < 0.0 || p.beta < 0.0) {
        throw std::domain_error("GarchParams: omega, alpha and beta must be non-negative");
    }
    if (p.measure == Measure::risk_neutral && p.lambda != -0.5) {
        throw std::domain_error("GarchParams: risk-neutral parameters require lambda = -1/2");
    }
}

void validate(const MarketContext& m) {
    if (!(m.s0 > 0.0) || !std::isfinite(m.s0)) {
        throw std::domain_error("MarketContext: s0 must be positive");
    }
    if (!(m.h_next > 0.0) || !std::isfinite(m.h_next)) {
        throw std::domain_error("MarketContext: h_next must be positive");
    }
    if (!std::isfinite(m.r_step)) {
        throw std::domain_error("MarketContext: r_step must be finite");
    }
}

void validate(const GarchPQParams& p) {
    if (p.beta_j.empty() || p.alpha_j.empty()) {
        throw std::domain_error("GarchPQParams: coefficient lists must be non-empty");
    }
    if (p.omega < 0.0) throw std::domain_error("GarchPQParams: omega must be non-negative");
    for (double b : p.beta_j) {
        if (!(b >= 0.0)) throw std::domain_error("GarchPQParams: beta coefficients must be >= 0");
    }
    for (double a : p.alpha_j) {
        if (!(a >= 0.0)) throw std::domain_error("GarchPQParams: alpha coefficients must be >= 0");
    }
}

GarchParams to_garch11(const GarchPQParams& p) {
    validate(p);
    if (p.beta_j.size() != 1 || p.alpha_j.size() != 1) {
        throw std::domain_error(
            "to_garch11: the affine generating-function recursion only exists for (p,q) = (1,1); "
            "higher orders are simulation-only");
    }
    return GarchParams{p.omega, p.alpha_j[0], p.beta_j[0], p.gamma, p.lambda, Measure::physical};
}

GarchParams risk_neutralize(const GarchParams& p) {
    validate(p);
    if (p.measure == Measure::risk_neutral) {
        throw std::domain_error("risk_neutralize: parameters are already risk-neutral");
    }
    GarchParams q = p;
    q.gamma = p.gamma + p.lambda + 0.5;
    q.lambda = -0.5;
    q.measure = Measure::risk_neutral;
    return q;
}

double variance_step(const GarchParams& p, double h, double z) {
    if (!(h > 0.0)) throw std::domain_error("variance_step: h must be positive");
    const double dev = z - p.gamma * std::sqrt(h);
    const double dev2 = dev * dev;
    return p.omega + p.beta * h + p.alpha * dev2;
}

double h_from_return(const GarchParams& p, double h, double log_return, double r_step) {
    if (!(h > 0.0)) throw std::domain_error("h_from_return: h must be positive");
    const double dev = log_return - r_step - p.lambda * h - p.gamma * h;
    return p.omega + p.beta * h + p.alpha * dev * dev / h;
}

double long_run_variance(const GarchParams& p) {
    const double pers = p.persistence();
    if (!(pers < 1.0)) {
        throw std::domain_error("long_run_variance: persistence >= 1, no stationary level");
    }
    return (p.omega + p.alpha) / (1.0 - pers);
}

double expected_next_variance(const GarchParams& p, double h) {
    if (!(h > 0.0)) throw std::domain_error("expected_next_variance: h must be positive");
    return p.omega + p.alpha + p.persistence() * h;
}

double spot_variance_covariance(const GarchParams& p, double h) {
    return -2.0 * p.alpha * p.gamma * h;
}

MgfCoefficients mgf_coefficients(const GarchParams& p, std::complex<double> u, int n_steps,
                                 double r_step) {
    if (n_steps < 0) throw std::domain_error("mgf_coefficients: n_steps must be >= 0");

    std::complex<double> a{0.0, 0.0};
    std::complex<double> b{0.0, 0.0};
    const double g = p.gamma;

    for (int k = 0; k < n_steps; ++k) {
        const std::complex<double> w = 1.0 - 2.0 * p.alpha * b;
        if (std::abs(w) < 1e-12 || w.real() <= 0.0) {
            throw NumericalError(
                "mgf_coefficients: 1 - 2*alpha*b reached the branch cut of the complex log "
                "(exponent outside the analyticity strip) at step " +
                std::to_string(k + 1) + " of " + std::to_string(n_steps));
        }
        const std::complex<double> um = u - g;
        a += u * r_step + b * p.omega - 0.5 * std::log(w);
        b = u * (p.lambda + g) - 0.5 * g * g + p.beta * b + 0.5 * um * um / w;
    }
    return {a, b};
}

std::complex<double> log_price_cf(const GarchParams& p, const MarketContext& m, double u,
                                  int n_steps) {
    validate(m);
    const std::complex<double> iu{0.0, u};
    const MgfCoefficients c = mgf_coefficients(p, iu, n_steps, m.r_step);
    return std::exp(iu * std::log(m.s0) + c.a + c.b * m.h_next);
}

std::complex<double> log_return_cf(const GarchParams& p, const MarketContext& m, double u,
                                   int n_steps) {
    validate(m);
    const std::complex<double> iu{0.0, u};
    const MgfCoefficients c = mgf_coefficients(p, iu, n_steps, m.r_step);
    return std::exp(c.a + c.b * m.h_next);
}

double log_return_cumulant(const GarchParams& p, const MarketContext& m, double u, int n_steps) {
    validate(m);
    const MgfCoefficients c = mgf_coefficients(p, std::complex<double>{u, 0.0}, n_steps, m.r_step);
    return c.a.real() + c.b.real() * m.h_next;
}

SimulatedPath simulate_path(const GarchParams& p, const MarketContext& m, int n_steps,
                            std::uint64_t seed) {
    validate(p);
    validate(m);
    if (n_steps < 1) throw std::domain_error("simulate_path: n_steps must be >= 1");

    CounterRng rng(seed);
    SimulatedPath path;
    path.log_price.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.variance.reserve(static_cast<std::size_t>(n_steps));

    double x = std::log(m.s0);
    double h = m.h_next;
    path.log_price.push_back(x);
    for (int t = 0; t < n_steps; ++t) {
        if (!(h > 0.0)) {
            throw NumericalError("simulate_path: variance reached zero (degenerate parameters)");
        }
        const double z = rng.normal(static_cast<std::uint64_t>(t));
        x += m.r_step + p.lambda * h + std::sqrt(h) * z;
        path.log_price.push_back(x);
        path.variance.push_back(h);
        if (t + 1 < n_steps) h = variance_step(p, h, z);
    }
    return path;
}

SimulatedPath simulate_path(const GarchPQParams& p, const MarketContext& m, int n_steps,
                            std::uint64_t seed) {
    validate(p);
    validate(m);
    if (n_steps < 1) throw std::domain_error("simulate_path: n_steps must be >= 1");

    const std::size_t nb = p.beta_j.size();
    const std::size_t na = p.alpha_j.size();

    CounterRng rng(seed);
    SimulatedPath path;
    path.log_price.reserve(static_cast<std::size_t>(n_steps) + 1);
    path.variance.reserve(static_cast<std::size_t>(n_steps));

    // Most recent lag first. Pre-sample shocks sit at their conditional mean.
    std::vector<double> h_lags(nb, m.h_next);
    std::vector<double> shock_lags(na, 1.0 + p.gamma * p.gamma * m.h_next);

    double x = std::log(m.s0);
    double h = m.h_next;
    path.log_price.push_back(x);
    for (int t = 0; t < n_steps; ++t) {
        if (!(h > 0.0)) {
            throw NumericalError("simulate_path: variance reached zero (degenerate parameters)");
        }
        const double z = rng.normal(static_cast<std::uint64_t>(t));
        x += m.r_step + p.lambda * h + std::sqrt(h) * z;
        path.log_price.push_back(x);
        path.variance.push_back(h);

        const double dev = z - p.gamma * std::sqrt(h);
        h_lags.insert(h_lags.begin(), h);
        h_lags.pop_back();
        shock_lags.insert(shock_lags.begin(), dev * dev);
        shock_lags.pop_back();

        double next = p.omega;
        for (std::size_t j = 0; j < nb; ++j) next += p.beta_j[j] * h_lags[j];
        for (std::size_t j = 0; j < na; ++j) next += p.alpha_j[j] * shock_lags[j];
        h = next;
    }
    return path;
}

}  // namespace cgp
