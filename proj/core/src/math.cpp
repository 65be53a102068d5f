#include "cgp/math/normal.hpp"
#include "cgp/math/quadrature.hpp"
#include "cgp/math/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cgp {

namespace {

// Acklam's rational approximation to the inverse normal CDF (~1e-9).
double acklam(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    }
    double x = acklam(p);
    // One Halley refinement against the erfc-based CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

QuadratureRule gauss_legendre_01(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre_01: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            deriv = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& opt) {
    const std::size_t n = start.size();
    if (n == 0 || steps.size() != n) {
        throw std::invalid_argument("nelder_mead: dimension mismatch");
    }

    constexpr double kRefl = 1.0, kExp = 2.0, kContr = 0.5, kShrink = 0.5;
    const auto safe_eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<std::vector<double>> verts(n + 1, start);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i) fv[i] = safe_eval(verts[i]);

    NelderMeadResult res;
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), cand(n);

    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double edge = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                edge = std::max(edge, std::abs(verts[i][j] - verts[best][j]));
            }
        }
        const double spread = fv[worst] - fv[best];
        if (std::isfinite(fv[best]) && spread < opt.f_tol * (1.0 + std::abs(fv[best])) &&
            edge < opt.x_tol) {
            res.converged = true;
            break;
        }

        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                if (i != worst) s += verts[i][j];
            }
            centroid[j] = s / static_cast<double>(n);
        }

        for (std::size_t j = 0; j < n; ++j) {
            cand[j] = centroid[j] + kRefl * (centroid[j] - verts[worst][j]);
        }
        const double f_refl = safe_eval(cand);

        if (f_refl < fv[best]) {
            std::vector<double> expd(n);
            for (std::size_t j = 0; j < n; ++j) {
                expd[j] = centroid[j] + kExp * (centroid[j] - verts[worst][j]);
            }
            const double f_exp = safe_eval(expd);
            if (f_exp < f_refl) {
                verts[worst] = expd;
                fv[worst] = f_exp;
            } else {
                verts[worst] = cand;
                fv[worst] = f_refl;
            }
        } else if (f_refl < fv[second]) {
            verts[worst] = cand;
            fv[worst] = f_refl;
        } else {
            const bool outside = f_refl < fv[worst];
            std::vector<double> contr(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double towards = outside ? cand[j] : verts[worst][j];
                contr[j] = centroid[j] + kContr * (towards - centroid[j]);
            }
            const double f_contr = safe_eval(contr);
            if (f_contr < std::min(f_refl, fv[worst])) {
                verts[worst] = contr;
                fv[worst] = f_contr;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j) {
                        verts[i][j] = verts[best][j] + kShrink * (verts[i][j] - verts[best][j]);
                    }
                    fv[i] = safe_eval(verts[i]);
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = verts[best];
    res.fmin = fv[best];
    res.iterations = iter;
    return res;
}

}  // namespace cgp
