#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "cgp/errors.hpp"
#include "cgp/fourier.hpp"
#include "cgp/math/normal.hpp"
#include "helpers.hpp"

using namespace cgp;
using namespace cgp::testing;

TEST_SUITE("fourier") {

TEST_CASE("pointwise density against the normal closed form") {
    const double s2 = 0.01;
    const auto cf = gaussian_cf(0.0, s2);
    const auto cfg = gaussian_cfg(0.0, s2);
    CHECK(std::abs(density_at(cf, 0.0, cfg) - 1.0 / std::sqrt(2.0 * M_PI * s2)) < 1e-6);
    for (double x : {0.05, 0.12, 0.31}) {
        CHECK(density_at(cf, x, cfg) ==
              doctest::Approx(normal_pdf(x / 0.1) / 0.1).epsilon(1e-9));
        CHECK(density_at(cf, x, cfg) == doctest::Approx(density_at(cf, -x, cfg)).epsilon(1e-10));
    }
}

TEST_CASE("pointwise cdf against the normal closed form") {
    const auto cf = gaussian_cf(0.0, 0.01);
    const auto cfg = gaussian_cfg(0.0, 0.01);
    CHECK(std::abs(cdf_at(cf, 0.0, cfg) - 0.5) < 1e-8);
    CHECK(std::abs(cdf_at(cf, 0.1, cfg) - normal_cdf(1.0)) < 1e-6);
    CHECK(cdf_at(cf, 1.1, cfg) >= 0.999);
    CHECK(cdf_at(cf, -1.1, cfg) <= 0.001);
}

TEST_CASE("non-finite characteristic function is rejected") {
    const auto cf = [](double u) {
        return u > 3.0 ? std::complex<double>(std::numeric_limits<double>::quiet_NaN(), 0.0)
                       : std::complex<double>(1.0, 0.0);
    };
    InversionConfig cfg;
    cfg.u_max = 10.0;
    cfg.n_freq = 64;
    cfg.x_lo = -1.0;
    cfg.x_hi = 1.0;
    cfg.n_grid = 64;
    CHECK_THROWS_AS(density_at(cf, 0.0, cfg), NumericalError);
    CHECK_THROWS_AS(cdf_at(cf, 0.0, cfg), NumericalError);
}

TEST_CASE("tabulated law reproduces the normal law") {
    const double mu = 0.004, s2 = 0.0081;
    const MarginalLaw law = gaussian_law(mu, s2);
    const double sigma = std::sqrt(s2);

    double max_err = 0.0;
    for (double x : law.x_grid()) {
        max_err = std::max(max_err, std::abs(law.cdf(x) - normal_cdf((x - mu) / sigma)));
    }
    CHECK(max_err < 1e-6);
    CHECK(law.repair_magnitude() < 1e-10);

    CHECK(std::abs(law.quantile(0.5) - mu) < 1e-6);
    for (double p = 0.01; p < 0.995; p += 0.01) {
        CHECK(std::abs(law.quantile(p) - (mu + sigma * normal_quantile(p))) < 1e-5);
    }
}

TEST_CASE("law invariants") {
    const MarginalLaw law = gaussian_law(-0.01, 0.02);
    const auto& cdf = law.cdf_values();
    const auto& pdf = law.pdf_values();
    CHECK(cdf.front() <= 0.001);
    CHECK(cdf.back() >= 0.999);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        CHECK(cdf[i] >= cdf[i - 1]);
        CHECK(cdf[i] <= 1.0);
    }
    for (double f : pdf) CHECK(f >= 0.0);
    double mass = 0.0;
    const auto& x = law.x_grid();
    for (std::size_t i = 1; i < x.size(); ++i) {
        mass += 0.5 * (pdf[i] + pdf[i - 1]) * (x[i] - x[i - 1]);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(0.005));
}

TEST_CASE("quantile contracts") {
    const MarginalLaw law = gaussian_law(0.0, 0.01);
    for (double p : {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99}) {
        CHECK(std::abs(law.cdf(law.quantile(p)) - p) < 1e-6);
    }
    double prev = -1e30;
    for (double p = 0.001; p < 0.9995; p += 0.0013) {
        const double q = law.quantile(p);
        CHECK(q >= prev);
        prev = q;
    }
    CHECK_THROWS_AS(law.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(law.quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(law.quantile(-0.5), std::domain_error);

    const auto clamps_before = law.quantile_clamp_count();
    CHECK(law.quantile(1e-300) == law.x_grid().front());
    CHECK(law.quantile_clamp_count() == clamps_before + 1);
}

TEST_CASE("doubling the frequency resolution leaves the table unchanged") {
    const auto cf = gaussian_cf(0.0, 0.01);
    InversionConfig base = gaussian_cfg(0.0, 0.01, 512, 1025);
    InversionConfig fine = base;
    fine.n_freq = 1024;
    const MarginalLaw a = build_marginal(cf, base);
    const MarginalLaw b = build_marginal(cf, fine);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < a.cdf_values().size(); ++i) {
        max_diff = std::max(max_diff, std::abs(a.cdf_values()[i] - b.cdf_values()[i]));
    }
    CHECK(max_diff < 1e-7);
}

TEST_CASE("badly truncated inversion is refused") {
    const auto cf = gaussian_cf(0.0, 0.01);
    InversionConfig cfg = gaussian_cfg(0.0, 0.01);
    cfg.u_max = 2.0 / 0.1;  // far inside the support of |cf|
    cfg.n_freq = 64;
    CHECK_THROWS_AS(build_marginal(cf, cfg), NumericalError);
}

TEST_CASE("auto-resolved config covers a GARCH law") {
    const GarchParams q = risk_neutralize(brent_params());
    const MarketContext m{55.0, 1e-4, 3.53e-4};
    const MarginalLaw law = hn_marginal_law(q, m, 90);
    CHECK(law.metadata().has_value());
    CHECK(law.metadata()->n_steps == 90);
    CHECK(law.log_mgf1().has_value());
    // martingale identity carried in the law
    CHECK(*law.log_mgf1() == doctest::Approx(90 * 1e-4).epsilon(1e-9));
    CHECK(law.cdf_values().front() <= 0.001);
    CHECK(law.cdf_values().back() >= 0.999);
    for (double p : {0.01, 0.2, 0.5, 0.8, 0.99}) {
        CHECK(std::abs(law.cdf(law.quantile(p)) - p) < 1e-8);
    }
}

TEST_CASE("unresolved or invalid configs are rejected") {
    const auto cf = gaussian_cf(0.0, 0.01);
    InversionConfig cfg;  // everything unset
    CHECK_THROWS_AS(build_marginal(cf, cfg), std::domain_error);
    cfg = gaussian_cfg(0.0, 0.01);
    cfg.n_freq = 8;
    CHECK_THROWS_AS(build_marginal(cf, cfg), std::domain_error);
    cfg = gaussian_cfg(0.0, 0.01);
    cfg.n_grid = 32;
    CHECK_THROWS_AS(build_marginal(cf, cfg), std::domain_error);
}

}  // TEST_SUITE
