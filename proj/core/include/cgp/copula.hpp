#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace cgp {

/// Bivariate copula interface. Implementations are immutable after
/// construction and all evaluations are pure, so instances are freely
/// shareable across threads.
///
/// du/dv are the first partial derivatives of the CDF; du(u, .) is the
/// conditional distribution of V given U = u and therefore maps into [0,1].
class Copula {
public:
    virtual ~Copula() = default;

    virtual double cdf(double u, double v) const = 0;

    /// Mixed second derivative d2C/dudv. Copulas that are not absolutely
    /// continuous throw UnsupportedOperation.
    virtual double density(double u, double v) const;

    virtual double du(double u, double v) const = 0;
    virtual double dv(double u, double v) const = 0;

    /// Solves du(u, v) = s for v. The default implementation bisects the
    /// monotone conditional CDF; families with closed forms override it.
    virtual double conditional_inverse(double u, double s) const;

    virtual bool has_density() const noexcept { return false; }
    virtual const char* name() const noexcept = 0;
};

// ---------------------------------------------------------------------------
// Plackett family
// ---------------------------------------------------------------------------

/// Plackett copula with constant odds ratio theta > 0; theta = 1 is
/// independence, theta -> 0 and theta -> inf approach the lower and upper
/// Frechet-Hoeffding bounds. Near theta = 1 the closed forms have a 0/0
/// cancellation and a second-order Taylor expansion takes over.
double plackett_cdf(double theta, double u, double v);
double plackett_density(double theta, double u, double v);
double plackett_du(double theta, double u, double v);
double plackett_dv(double theta, double u, double v);

/// Closed-form conditional inverse (quadratic in the Plackett algebra); with
/// use_closed_form = false falls back to bisection on du, which throws
/// NumericalError if 200 iterations do not reach tolerance.
double plackett_conditional_inverse(double theta, double u, double s,
                                    bool use_closed_form = true);

/// Spearman's rho of the Plackett copula:
/// (theta+1)/(theta-1) - 2*theta*log(theta)/(theta-1)^2, 0 at theta = 1,
/// with a series expansion near theta = 1.
double spearman_from_theta(double theta);

class PlackettCopula final : public Copula {
public:
    explicit PlackettCopula(double theta);
    double theta() const noexcept { return theta_; }

    double cdf(double u, double v) const override;
    double density(double u, double v) const override;
    double du(double u, double v) const override;
    double dv(double u, double v) const override;
    double conditional_inverse(double u, double s) const override;
    bool has_density() const noexcept override { return true; }
    const char* name() const noexcept override { return "plackett"; }

private:
    double theta_;
};

// ---------------------------------------------------------------------------
// Fundamental copulas
// ---------------------------------------------------------------------------

/// Independence, Pi(u,v) = u*v.
class IndependenceCopula final : public Copula {
public:
    double cdf(double u, double v) const override;
    double density(double u, double v) const override;
    double du(double u, double v) const override;
    double dv(double u, double v) const override;
    double conditional_inverse(double u, double s) const override;
    bool has_density() const noexcept override { return true; }
    const char* name() const noexcept override { return "independence"; }
};

/// Comonotonicity, M(u,v) = min(u,v). Not absolutely continuous: no density.
class ComonotonicityCopula final : public Copula {
public:
    double cdf(double u, double v) const override;
    double du(double u, double v) const override;
    double dv(double u, double v) const override;
    double conditional_inverse(double u, double s) const override;
    const char* name() const noexcept override { return "comonotonicity"; }
};

/// Countermonotonicity, W(u,v) = max(u+v-1, 0). No density.
class CountermonotonicityCopula final : public Copula {
public:
    double cdf(double u, double v) const override;
    double du(double u, double v) const override;
    double dv(double u, double v) const override;
    double conditional_inverse(double u, double s) const override;
    const char* name() const noexcept override { return "countermonotonicity"; }
};

struct FundamentalCopulas {
    ComonotonicityCopula m;
    CountermonotonicityCopula w;
    IndependenceCopula pi;
};
FundamentalCopulas fundamental_copulas();

// ---------------------------------------------------------------------------
// Archimedean families
// ---------------------------------------------------------------------------

enum class ArchimedeanFamily { clayton, gumbel, amh };

/// Archimedean copula C(u,v) = phi(phi^{-1}(u) + phi^{-1}(v)) where phi is
/// the family generator. Partials and density come from the hand-derived
/// generator derivatives, not numeric differentiation.
///
/// Admissible ranges: Clayton theta in (0,inf), Gumbel theta in [1,inf),
/// Ali-Mikhail-Haq theta in [0,1).
class ArchimedeanCopula final : public Copula {
public:
    ArchimedeanCopula(ArchimedeanFamily family, double theta);

    ArchimedeanFamily family() const noexcept { return family_; }
    double theta() const noexcept { return theta_; }

    double generator(double x) const;          ///< phi
    double generator_inverse(double y) const;  ///< phi^{-1}

    double cdf(double u, double v) const override;
    double density(double u, double v) const override;
    double du(double u, double v) const override;
    double dv(double u, double v) const override;
    double conditional_inverse(double u, double s) const override;
    bool has_density() const noexcept override { return true; }
    const char* name() const noexcept override;

private:
    ArchimedeanFamily family_;
    double theta_;
};

// ---------------------------------------------------------------------------
// Concordance functionals and sampling
// ---------------------------------------------------------------------------

/// Spearman's rho as 12 * integral of C over the unit square - 3, by
/// tensor-product Gauss-Legendre quadrature.
double spearman_numeric(const Copula& c, int n_quad = 256);

struct KendallEstimate {
    double value = 0.0;
    double tolerance = 0.0;  ///< difference against the half-order rule
};

/// Kendall's tau as 4 E[C(U,V)] - 1 by Gauss-Legendre quadrature over C * c.
/// Requires a density.
KendallEstimate kendall_numeric(const Copula& c, int n_quad = 256);

/// Kendall's tau estimated from n sampled pairs (fallback for copulas where
/// quadrature is unsuitable).
double kendall_sampled(const Copula& c, std::size_t n, std::uint64_t seed);

struct PairSample {
    std::vector<double> u;
    std::vector<double> v;
};

/// Conditional sampling: u and a second uniform s are drawn from a
/// counter-indexed stream, v = conditional_inverse(u, s). Deterministic per
/// seed.
PairSample sample(const Copula& c, std::size_t n, std::uint64_t seed);

}  // namespace cgp
