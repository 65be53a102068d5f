#include "cgp/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cgp/errors.hpp"
#include "cgp/math/quadrature.hpp"
#include "cgp/math/rng.hpp"

namespace cgp {

namespace {

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0,1]");
    }
}

void check_theta_positive(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("plackett: theta must be positive and finite");
    }
}

constexpr double kThetaOneBand = 1e-4;

// Q = [1 + (theta-1)(u+v)]^2 - 4uv theta (theta-1), regrouped as
// 1 + 2(theta-1)w + (theta-1)^2 (u-v)^2 with w = u + v - 2uv, which avoids
// the cancellation of the raw form at large theta.
double plackett_discriminant(double theta, double u, double v) {
    const double e = theta - 1.0;
    const double w = u + v - 2.0 * u * v;
    const double q = 1.0 + 2.0 * e * w + e * e * (u - v) * (u - v);
    return std::max(q, 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Copula base
// ---------------------------------------------------------------------------

double Copula::density(double, double) const {
    throw UnsupportedOperation(std::string(name()) +
                               ": not absolutely continuous, density undefined");
}

double Copula::conditional_inverse(double u, double s) const {
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("conditional_inverse: u and s must lie in (0,1)");
    }
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double val = du(u, mid);
        if (std::abs(val - s) < 1e-12) return mid;
        if (val < s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(du(u, mid) - s) > 1e-9) {
        throw NumericalError(std::string(name()) +
                             ": conditional inverse bisection failed to converge");
    }
    return mid;
}

// ---------------------------------------------------------------------------
// Plackett
// ---------------------------------------------------------------------------

double plackett_cdf(double theta, double u, double v) {
    check_theta_positive(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;

    const double e = theta - 1.0;
    double c;
    if (std::abs(e) < kThetaOneBand) {
        // Second-order expansion around independence.
        const double w = u + v - 2.0 * u * v;
        const double prod = u * v * (1.0 - u) * (1.0 - v);
        c = u * v + e * prod * (1.0 - e * w);
    } else {
        const double s = 1.0 + e * (u + v);
        const double d = std::sqrt(plackett_discriminant(theta, u, v));
        c = (s - d) / (2.0 * e);
    }
    return std::clamp(c, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double plackett_density(double theta, double u, double v) {
    check_theta_positive(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    const double e = theta - 1.0;
    const double w = u + v - 2.0 * u * v;
    const double q = plackett_discriminant(theta, u, v);
    return theta * (1.0 + e * w) / (q * std::sqrt(q));
}

double plackett_du(double theta, double u, double v) {
    check_theta_positive(theta);
    check_unit(u, "u");
    check_unit(v, "v");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    const double e = theta - 1.0;
    const double s = 1.0 + e * (u + v);
    const double d = std::sqrt(plackett_discriminant(theta, u, v));
    return std::clamp(0.5 * (1.0 - (s - 2.0 * v * theta) / d), 0.0, 1.0);
}

double plackett_dv(double theta, double u, double v) { return plackett_du(theta, v, u); }

double plackett_conditional_inverse(double theta, double u, double s, bool use_closed_form) {
    check_theta_positive(theta);
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("plackett_conditional_inverse: u and s must lie in (0,1)");
    }
    if (theta == 1.0) return s;

    if (!use_closed_form) {
        double lo = 0.0, hi = 1.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            const double val = plackett_du(theta, u, mid);
            if (std::abs(val - s) < 1e-12) return mid;
            if (val < s) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double mid = 0.5 * (lo + hi);
        if (std::abs(plackett_du(theta, u, mid) - s) > 1e-10) {
            throw NumericalError("plackett_conditional_inverse: bisection did not converge");
        }
        return mid;
    }

    // du(u,v) = s reduces to a quadratic in v after squaring
    // S - 2 v theta = (1 - 2s) D.
    const double e = theta - 1.0;
    const double m = 1.0 - 2.0 * s;
    const double ac = 1.0 + e * u;
    const double qa = 4.0 * (theta + s * (1.0 - s) * e * e);
    const double qb = -2.0 * ac * (theta + 1.0) - 2.0 * m * m * e * (1.0 - u * (theta + 1.0));
    const double qc = 4.0 * s * (1.0 - s) * ac * ac;
    const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
    const double root = std::sqrt(disc);

    // One of the two roots is spurious (it solves the squared equation with
    // the wrong sign); keep the candidate that best reproduces s.
    const double v1 = std::clamp((-qb - root) / (2.0 * qa), 0.0, 1.0);
    const double v2 = std::clamp((-qb + root) / (2.0 * qa), 0.0, 1.0);
    const double r1 = std::abs(plackett_du(theta, u, v1) - s);
    const double r2 = std::abs(plackett_du(theta, u, v2) - s);
    double v = (r1 <= r2) ? v1 : v2;
    double res = std::min(r1, r2);

    // Newton polish; d(du)/dv is the copula density.
    for (int k = 0; k < 4 && res > 1e-13; ++k) {
        const double dens = plackett_density(theta, u, v);
        if (!(dens > 0.0)) break;
        v = std::clamp(v - (plackett_du(theta, u, v) - s) / dens, 0.0, 1.0);
        res = std::abs(plackett_du(theta, u, v) - s);
    }
    return v;
}

double spearman_from_theta(double theta) {
    check_theta_positive(theta);
    const double e = theta - 1.0;
    if (std::abs(e) < kThetaOneBand) {
        return e / 3.0 - e * e / 6.0 + e * e * e / 10.0;
    }
    return (theta + 1.0) / e - 2.0 * theta * std::log(theta) / (e * e);
}

PlackettCopula::PlackettCopula(double theta) : theta_(theta) { check_theta_positive(theta); }

double PlackettCopula::cdf(double u, double v) const { return plackett_cdf(theta_, u, v); }
double PlackettCopula::density(double u, double v) const { return plackett_density(theta_, u, v); }
double PlackettCopula::du(double u, double v) const { return plackett_du(theta_, u, v); }
double PlackettCopula::dv(double u, double v) const { return plackett_dv(theta_, u, v); }
double PlackettCopula::conditional_inverse(double u, double s) const {
    return plackett_conditional_inverse(theta_, u, s);
}

// ---------------------------------------------------------------------------
// Fundamental copulas
// ---------------------------------------------------------------------------

double IndependenceCopula::cdf(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return u * v;
}
double IndependenceCopula::density(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return 1.0;
}
double IndependenceCopula::du(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return v;
}
double IndependenceCopula::dv(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return u;
}
double IndependenceCopula::conditional_inverse(double u, double s) const {
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("conditional_inverse: u and s must lie in (0,1)");
    }
    return s;
}

double ComonotonicityCopula::cdf(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return std::min(u, v);
}
double ComonotonicityCopula::du(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return v >= u ? 1.0 : 0.0;
}
double ComonotonicityCopula::dv(double u, double v) const { return du(v, u); }
double ComonotonicityCopula::conditional_inverse(double u, double s) const {
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("conditional_inverse: u and s must lie in (0,1)");
    }
    return u;  // V = U almost surely
}

double CountermonotonicityCopula::cdf(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return std::max(u + v - 1.0, 0.0);
}
double CountermonotonicityCopula::du(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    return u + v > 1.0 ? 1.0 : 0.0;
}
double CountermonotonicityCopula::dv(double u, double v) const { return du(v, u); }
double CountermonotonicityCopula::conditional_inverse(double u, double s) const {
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("conditional_inverse: u and s must lie in (0,1)");
    }
    return 1.0 - u;  // V = 1 - U almost surely
}

FundamentalCopulas fundamental_copulas() { return {}; }

// ---------------------------------------------------------------------------
// Archimedean
// ---------------------------------------------------------------------------

namespace {

// Generator derivatives per family. Interior arguments only; the copula
// methods special-case the unit-square boundary before calling these.
struct GeneratorOps {
    double phi;
    double dphi;
    double d2phi;
};

GeneratorOps clayton_ops(double theta, double x) {
    const double base = 1.0 + x;
    const double inv_t = 1.0 / theta;
    const double phi = std::pow(base, -inv_t);
    const double dphi = -inv_t * std::pow(base, -inv_t - 1.0);
    const double d2phi = inv_t * (inv_t + 1.0) * std::pow(base, -inv_t - 2.0);
    return {phi, dphi, d2phi};
}

GeneratorOps gumbel_ops(double theta, double x) {
    const double inv_t = 1.0 / theta;
    const double s = std::pow(x, inv_t);
    const double phi = std::exp(-s);
    const double dphi = -inv_t * std::pow(x, inv_t - 1.0) * phi;
    const double d2phi = inv_t * std::pow(x, inv_t - 2.0) * phi * (inv_t * s + 1.0 - inv_t);
    return {phi, dphi, d2phi};
}

}  // namespace

ArchimedeanCopula::ArchimedeanCopula(ArchimedeanFamily family, double theta)
    : family_(family), theta_(theta) {
    switch (family) {
        case ArchimedeanFamily::clayton:
            if (!(theta > 0.0)) {
                throw std::domain_error("clayton: theta must lie in (0,inf)");
            }
            break;
        case ArchimedeanFamily::gumbel:
            if (!(theta >= 1.0)) {
                throw std::domain_error("gumbel: theta must lie in [1,inf)");
            }
            break;
        case ArchimedeanFamily::amh:
            if (!(theta >= 0.0 && theta < 1.0)) {
                throw std::domain_error("ali-mikhail-haq: theta must lie in [0,1)");
            }
            break;
    }
    if (!std::isfinite(theta)) throw std::domain_error("archimedean: theta must be finite");
}

const char* ArchimedeanCopula::name() const noexcept {
    switch (family_) {
        case ArchimedeanFamily::clayton: return "clayton";
        case ArchimedeanFamily::gumbel: return "gumbel";
        case ArchimedeanFamily::amh: return "ali-mikhail-haq";
    }
    return "archimedean";
}

double ArchimedeanCopula::generator(double x) const {
    if (!(x >= 0.0)) throw std::domain_error("generator: x must be >= 0");
    switch (family_) {
        case ArchimedeanFamily::clayton: return std::pow(1.0 + x, -1.0 / theta_);
        case ArchimedeanFamily::gumbel: return std::exp(-std::pow(x, 1.0 / theta_));
        case ArchimedeanFamily::amh: return (1.0 - theta_) / (std::exp(x) - theta_);
    }
    return 0.0;
}

double ArchimedeanCopula::generator_inverse(double y) const {
    if (!(y > 0.0 && y <= 1.0)) throw std::domain_error("generator_inverse: y must lie in (0,1]");
    switch (family_) {
        case ArchimedeanFamily::clayton: return std::expm1(-theta_ * std::log(y));
        case ArchimedeanFamily::gumbel: return std::pow(-std::log(y), theta_);
        case ArchimedeanFamily::amh: return std::log((1.0 - theta_) / y + theta_);
    }
    return 0.0;
}

double ArchimedeanCopula::cdf(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;

    switch (family_) {
        case ArchimedeanFamily::clayton: {
            // (u^-theta + v^-theta - 1)^(-1/theta), via expm1/log1p for small theta.
            const double t = generator_inverse(u) + generator_inverse(v);
            return std::exp(-std::log1p(t) / theta_);
        }
        case ArchimedeanFamily::gumbel: {
            if (theta_ == 1.0) return u * v;
            const double t = generator_inverse(u) + generator_inverse(v);
            return std::exp(-std::pow(t, 1.0 / theta_));
        }
        case ArchimedeanFamily::amh:
            return u * v / (1.0 - theta_ * (1.0 - u) * (1.0 - v));
    }
    return 0.0;
}

double ArchimedeanCopula::du(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;

    if (family_ == ArchimedeanFamily::amh) {
        const double g = 1.0 - theta_ * (1.0 - u) * (1.0 - v);
        return std::clamp(v * (1.0 - theta_ * (1.0 - v)) / (g * g), 0.0, 1.0);
    }
    // For these generators the conditional law of V given U -> 0 collapses to
    // the left tail, so the conditional CDF at any interior v tends to 1.
    if (u == 0.0) return 1.0;

    const double xu = generator_inverse(u);
    const double t = xu + generator_inverse(v);
    const GeneratorOps at_t = family_ == ArchimedeanFamily::clayton ? clayton_ops(theta_, t)
                                                                    : gumbel_ops(theta_, t);
    const GeneratorOps at_u = family_ == ArchimedeanFamily::clayton ? clayton_ops(theta_, xu)
                                                                    : gumbel_ops(theta_, xu);
    return std::clamp(at_t.dphi / at_u.dphi, 0.0, 1.0);
}

double ArchimedeanCopula::dv(double u, double v) const { return du(v, u); }

double ArchimedeanCopula::density(double u, double v) const {
    check_unit(u, "u");
    check_unit(v, "v");
    if (u == 0.0 || v == 0.0 || u == 1.0 || v == 1.0) {
        // The density on the boundary is a limit; evaluate just inside.
        u = std::clamp(u, 1e-12, 1.0 - 1e-12);
        v = std::clamp(v, 1e-12, 1.0 - 1e-12);
    }
    if (family_ == ArchimedeanFamily::amh) {
        const double g = 1.0 - theta_ * (1.0 - u) * (1.0 - v);
        const double n = (1.0 - theta_ + 2.0 * theta_ * v) * g -
                         2.0 * theta_ * (1.0 - u) * ((1.0 - theta_) * v + theta_ * v * v);
        return n / (g * g * g);
    }
    const double xu = generator_inverse(u);
    const double xv = generator_inverse(v);
    const double t = xu + xv;
    if (family_ == ArchimedeanFamily::clayton) {
        const GeneratorOps at_t = clayton_ops(theta_, t);
        const GeneratorOps at_u = clayton_ops(theta_, xu);
        const GeneratorOps at_v = clayton_ops(theta_, xv);
        return at_t.d2phi / (at_u.dphi * at_v.dphi);
    }
    if (theta_ == 1.0) return 1.0;
    const GeneratorOps at_t = gumbel_ops(theta_, t);
    const GeneratorOps at_u = gumbel_ops(theta_, xu);
    const GeneratorOps at_v = gumbel_ops(theta_, xv);
    return at_t.d2phi / (at_u.dphi * at_v.dphi);
}

double ArchimedeanCopula::conditional_inverse(double u, double s) const {
    if (!(u > 0.0 && u < 1.0) || !(s > 0.0 && s < 1.0)) {
        throw std::domain_error("conditional_inverse: u and s must lie in (0,1)");
    }
    if (family_ == ArchimedeanFamily::clayton) {
        // du = (C/u)^{theta+1} = s solves in closed form.
        const double a = std::pow(s, -theta_ / (1.0 + theta_)) - 1.0;
        const double ut = std::pow(u, -theta_);
        return std::pow(a * ut + 1.0, -1.0 / theta_);
    }
    return Copula::conditional_inverse(u, s);
}

// ---------------------------------------------------------------------------
// Concordance functionals and sampling
// ---------------------------------------------------------------------------

double spearman_numeric(const Copula& c, int n_quad) {
    if (n_quad < 2) throw std::domain_error("spearman_numeric: n_quad must be >= 2");
    const QuadratureRule rule = gauss_legendre_01(n_quad);
    double acc = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_quad; ++j) {
            row += rule.weights[j] * c.cdf(rule.nodes[i], rule.nodes[j]);
        }
        acc += rule.weights[i] * row;
    }
    return 12.0 * acc - 3.0;
}

namespace {

double kendall_quadrature(const Copula& c, int n_quad) {
    const QuadratureRule rule = gauss_legendre_01(n_quad);
    double acc = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_quad; ++j) {
            const double u = rule.nodes[i], v = rule.nodes[j];
            row += rule.weights[j] * c.cdf(u, v) * c.density(u, v);
        }
        acc += rule.weights[i] * row;
    }
    return 4.0 * acc - 1.0;
}

}  // namespace

KendallEstimate kendall_numeric(const Copula& c, int n_quad) {
    if (n_quad < 4) throw std::domain_error("kendall_numeric: n_quad must be >= 4");
    if (!c.has_density()) {
        throw UnsupportedOperation(std::string(c.name()) +
                                   ": kendall_numeric requires a density; use kendall_sampled");
    }
    const double full = kendall_quadrature(c, n_quad);
    const double half = kendall_quadrature(c, n_quad / 2);
    return {full, std::abs(full - half)};
}

double kendall_sampled(const Copula& c, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::domain_error("kendall_sampled: need at least 2 pairs");
    const PairSample ps = sample(c, n, seed);
    // E[C(U,V)] estimated on the sample.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += c.cdf(ps.u[i], ps.v[i]);
    return 4.0 * acc / static_cast<double>(n) - 1.0;
}

PairSample sample(const Copula& c, std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    PairSample out;
    out.u.resize(n);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform(2 * i);
        const double s = rng.uniform(2 * i + 1);
        out.u[i] = u;
        out.v[i] = c.conditional_inverse(u, s);
    }
    return out;
}

}  // namespace cgp
