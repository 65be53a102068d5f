#include "cgp/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cgp/errors.hpp"

namespace cgp {

namespace {

constexpr double kCdfCoverageTol = 1e-3;
constexpr double kPdfMassTol = 5e-3;
constexpr double kRepairLimit = 1e-4;
constexpr double kDensityClamp = 1e-8;

void require_resolved(const InversionConfig& cfg) {
    if (!cfg.resolved()) {
        throw std::domain_error("InversionConfig: unresolved config (run resolve_inversion_config)");
    }
    if (cfg.n_freq < 16) throw std::domain_error("InversionConfig: n_freq must be >= 16");
    if (cfg.n_grid < 64) throw std::domain_error("InversionConfig: n_grid must be >= 64");
}

std::complex<double> cf_checked(const CharacteristicFn& cf, double u) {
    const std::complex<double> v = cf(u);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw NumericalError("inverse transform: characteristic function not finite at u = " +
                             std::to_string(u));
    }
    return v;
}

}  // namespace

InversionConfig resolve_inversion_config(const CharacteristicFn& cf, const CumulantFn& cumulant,
                                         InversionConfig overrides) {
    InversionConfig cfg = overrides;

    // Mean and variance of the law from central differences of the cumulant.
    const double delta = 1e-3;
    const double kp = cumulant(delta);
    const double km = cumulant(-delta);
    const double mean = (kp - km) / (2.0 * delta);
    const double var = (kp + km) / (delta * delta);
    if (!(var > 0.0) || !std::isfinite(var) || !std::isfinite(mean)) {
        throw NumericalError("resolve_inversion_config: could not estimate a positive variance");
    }
    const double sigma = std::sqrt(var);

    if (!(cfg.x_lo < cfg.x_hi)) {
        cfg.x_lo = mean - cfg.sigma_mult * sigma;
        cfg.x_hi = mean + cfg.sigma_mult * sigma;
    }

    if (cfg.u_max <= 0.0) {
        const double step = 0.25 / sigma;
        double u = step;
        while (u < cfg.u_max_cap && std::abs(cf_checked(cf, u)) >= cfg.cf_tail_tol) {
            u += step;
        }
        cfg.u_max = std::min(u, cfg.u_max_cap);
    }

    if (cfg.n_freq <= 0) {
        // Alias period of the midpoint rule is 2*pi*n/u_max; keep it at 1.5x
        // the grid extent so wrapped-around mass stays below the tail level.
        const double span = 1.5 * (cfg.x_hi - cfg.x_lo);
        const int needed = static_cast<int>(std::ceil(cfg.u_max * span / (2.0 * M_PI)));
        cfg.n_freq = std::max(1024, needed);
    }

    if (cfg.n_grid <= 0) cfg.n_grid = 4096;
    return cfg;
}

double density_at(const CharacteristicFn& cf, double x, const InversionConfig& cfg) {
    require_resolved(cfg);
    const double h = cfg.u_max / cfg.n_freq;
    double acc = 0.0;
    for (int j = 0; j < cfg.n_freq; ++j) {
        const double u = (j + 0.5) * h;
        const std::complex<double> term = std::exp(std::complex<double>(0.0, -u * x)) *
                                          cf_checked(cf, u);
        acc += term.real();
    }
    double f = acc * h / M_PI;
    if (f < 0.0 && f >= -kDensityClamp) f = 0.0;
    return f;
}

double cdf_at(const CharacteristicFn& cf, double x, const InversionConfig& cfg) {
    require_resolved(cfg);
    const double h = cfg.u_max / cfg.n_freq;
    double acc = 0.0;
    for (int j = 0; j < cfg.n_freq; ++j) {
        const double u = (j + 0.5) * h;
        const std::complex<double> term = std::exp(std::complex<double>(0.0, -u * x)) *
                                          cf_checked(cf, u) / std::complex<double>(0.0, u);
        acc += term.real();
    }
    return std::clamp(0.5 - acc * h / M_PI, 0.0, 1.0);
}

MarginalLaw::MarginalLaw(std::vector<double> x, std::vector<double> cdf, std::vector<double> pdf,
                         double repair_magnitude, std::optional<double> log_mgf1,
                         std::optional<HnLawMetadata> metadata)
    : x_(std::move(x)),
      cdf_(std::move(cdf)),
      pdf_(std::move(pdf)),
      repair_magnitude_(repair_magnitude),
      log_mgf1_(log_mgf1),
      metadata_(std::move(metadata)) {
    const std::size_t n = x_.size();
    if (n < 2 || cdf_.size() != n || pdf_.size() != n) {
        throw std::domain_error("MarginalLaw: grids must share a length >= 2");
    }
    // Hermite slopes from the tabulated density, clamped so each cubic piece
    // stays monotone (slope <= 3x the secant on both adjacent intervals).
    slope_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double cap = std::numeric_limits<double>::infinity();
        if (i > 0) {
            cap = std::min(cap, 3.0 * (cdf_[i] - cdf_[i - 1]) / (x_[i] - x_[i - 1]));
        }
        if (i + 1 < n) {
            cap = std::min(cap, 3.0 * (cdf_[i + 1] - cdf_[i]) / (x_[i + 1] - x_[i]));
        }
        slope_[i] = std::clamp(pdf_[i], 0.0, std::max(cap, 0.0));
    }
}

MarginalLaw::MarginalLaw(const MarginalLaw& other)
    : x_(other.x_),
      cdf_(other.cdf_),
      pdf_(other.pdf_),
      slope_(other.slope_),
      repair_magnitude_(other.repair_magnitude_),
      log_mgf1_(other.log_mgf1_),
      metadata_(other.metadata_),
      clamp_count_(other.clamp_count_.load(std::memory_order_relaxed)) {}

MarginalLaw& MarginalLaw::operator=(const MarginalLaw& other) {
    if (this != &other) {
        x_ = other.x_;
        cdf_ = other.cdf_;
        pdf_ = other.pdf_;
        slope_ = other.slope_;
        repair_magnitude_ = other.repair_magnitude_;
        log_mgf1_ = other.log_mgf1_;
        metadata_ = other.metadata_;
        clamp_count_.store(other.clamp_count_.load(std::memory_order_relaxed),
                           std::memory_order_relaxed);
    }
    return *this;
}

double MarginalLaw::cdf(double x) const {
    if (x <= x_.front()) return cdf_.front();
    if (x >= x_.back()) return cdf_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double hx = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / hx;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    const double v = h00 * cdf_[i] + h10 * hx * slope_[i] + h01 * cdf_[i + 1] +
                     h11 * hx * slope_[i + 1];
    return std::clamp(v, 0.0, 1.0);
}

double MarginalLaw::pdf(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return pdf_.front();
    if (it == x_.end()) return pdf_.back();
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return (1.0 - t) * pdf_[i] + t * pdf_[i + 1];
}

double MarginalLaw::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("MarginalLaw::quantile: p must lie in (0,1)");
    }
    if (p <= cdf_.front()) {
        clamp_count_.fetch_add(1, std::memory_order_relaxed);
        return x_.front();
    }
    if (p >= cdf_.back()) {
        clamp_count_.fetch_add(1, std::memory_order_relaxed);
        return x_.back();
    }
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    std::size_t i = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    if (i + 2 > x_.size()) i = x_.size() - 2;

    // Invert the Hermite cubic of the bracketing cell: Newton with the cell
    // polynomial's own derivative, bisection whenever Newton leaves the
    // bracket. The interpolant is monotone, so the bracket never breaks.
    const double hx = x_[i + 1] - x_[i];
    const double c0 = cdf_[i], c1 = cdf_[i + 1];
    const double m0 = slope_[i] * hx, m1 = slope_[i + 1] * hx;
    const auto eval = [&](double t, double& deriv) {
        const double t2 = t * t, t3 = t2 * t;
        deriv = (6.0 * t2 - 6.0 * t) * (c0 - c1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 +
                (3.0 * t2 - 2.0 * t) * m1;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * c0 + (t3 - 2.0 * t2 + t) * m0 +
               (-2.0 * t3 + 3.0 * t2) * c1 + (t3 - t2) * m1;
    };

    double lo = 0.0, hi = 1.0;
    double t = (c1 > c0) ? (p - c0) / (c1 - c0) : 0.5;
    for (int k = 0; k < 100; ++k) {
        double deriv = 0.0;
        const double v = eval(t, deriv);
        if (std::abs(v - p) < 1e-13) break;
        if (v < p) {
            lo = t;
        } else {
            hi = t;
        }
        const double tn = deriv > 0.0 ? t - (v - p) / deriv : -1.0;
        t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
        if (hi - lo < 1e-15) break;
    }
    return x_[i] + t * hx;
}

MarginalLaw build_marginal(const CharacteristicFn& cf, const InversionConfig& cfg,
                           std::optional<double> log_mgf1,
                           std::optional<HnLawMetadata> metadata) {
    require_resolved(cfg);

    const int nu = cfg.n_freq;
    const int nx = cfg.n_grid;
    const double hu = cfg.u_max / nu;
    const double dx = (cfg.x_hi - cfg.x_lo) / (nx - 1);

    std::vector<double> x(nx);
    for (int k = 0; k < nx; ++k) x[k] = cfg.x_lo + k * dx;

    std::vector<double> pdf_acc(nx, 0.0), cdf_acc(nx, 0.0);

    // One pass per frequency node; e^{-iu x_k} advances across the grid by a
    // unit-modulus rotation, re-synchronized periodically to stop drift.
    constexpr int kResync = 512;
    for (int j = 0; j < nu; ++j) {
        const double u = (j + 0.5) * hu;
        const std::complex<double> phi = cf_checked(cf, u);
        const std::complex<double> psi = phi / std::complex<double>(0.0, u);
        const std::complex<double> rot = std::exp(std::complex<double>(0.0, -u * dx));
        std::complex<double> cur;
        for (int k = 0; k < nx; ++k) {
            if (k % kResync == 0) {
                cur = std::exp(std::complex<double>(0.0, -u * x[k]));
            }
            pdf_acc[k] += (cur * phi).real();
            cdf_acc[k] += (cur * psi).real();
            cur *= rot;
        }
    }

    std::vector<double> pdf(nx), cdf_raw(nx);
    for (int k = 0; k < nx; ++k) {
        double f = pdf_acc[k] * hu / M_PI;
        if (f < 0.0 && f >= -kDensityClamp) f = 0.0;
        if (f < 0.0) {
            throw NumericalError("build_marginal: density negative beyond tolerance at x = " +
                                 std::to_string(x[k]));
        }
        pdf[k] = f;
        cdf_raw[k] = std::clamp(0.5 - cdf_acc[k] * hu / M_PI, 0.0, 1.0);
    }

    // Monotone repair by running maximum; record the worst violation.
    double repair = 0.0;
    std::vector<double> cdf(nx);
    double run = 0.0;
    for (int k = 0; k < nx; ++k) {
        repair = std::max(repair, run - cdf_raw[k]);
        run = std::max(run, cdf_raw[k]);
        cdf[k] = run;
    }
    if (repair > kRepairLimit) {
        throw NumericalError("build_marginal: monotone repair of " + std::to_string(repair) +
                             " exceeds tolerance; inversion too inaccurate for pricing");
    }

    if (cdf.front() > kCdfCoverageTol || cdf.back() < 1.0 - kCdfCoverageTol) {
        throw NumericalError("build_marginal: grid does not cover the distribution mass");
    }

    double mass = 0.0;
    for (int k = 0; k + 1 < nx; ++k) mass += 0.5 * (pdf[k] + pdf[k + 1]) * dx;
    if (std::abs(mass - 1.0) > kPdfMassTol) {
        throw NumericalError("build_marginal: density mass " + std::to_string(mass) +
                             " deviates from 1 beyond tolerance");
    }

    return MarginalLaw(std::move(x), std::move(cdf), std::move(pdf), repair, log_mgf1,
                       std::move(metadata));
}

MarginalLaw hn_marginal_law(const GarchParams& p, const MarketContext& m, int n_steps,
                            InversionConfig overrides) {
    validate(p);
    validate(m);
    if (n_steps < 1) throw std::domain_error("hn_marginal_law: n_steps must be >= 1");

    const CharacteristicFn cf = [p, m, n_steps](double u) {
        return log_return_cf(p, m, u, n_steps);
    };
    const CumulantFn cumulant = [p, m, n_steps](double u) {
        return log_return_cumulant(p, m, u, n_steps);
    };
    const InversionConfig cfg = resolve_inversion_config(cf, cumulant, overrides);
    const double lm1 = log_return_cumulant(p, m, 1.0, n_steps);
    return build_marginal(cf, cfg, lm1, HnLawMetadata{p, m, n_steps});
}

}  // namespace cgp
