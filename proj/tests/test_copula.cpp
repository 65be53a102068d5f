#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "cgp/concordance.hpp"
#include "cgp/copula.hpp"
#include "cgp/errors.hpp"
#include "cgp/math/rng.hpp"
#include "helpers.hpp"

using namespace cgp;

namespace {

// Families exercised by the generic interface property tests.
std::vector<std::unique_ptr<Copula>> test_families() {
    std::vector<std::unique_ptr<Copula>> out;
    out.push_back(std::make_unique<PlackettCopula>(0.1));
    out.push_back(std::make_unique<PlackettCopula>(2.0));
    out.push_back(std::make_unique<PlackettCopula>(50.52));
    out.push_back(std::make_unique<IndependenceCopula>());
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::clayton, 0.7));
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::clayton, 3.0));
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::gumbel, 1.6));
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::gumbel, 4.0));
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::amh, 0.4));
    out.push_back(std::make_unique<ArchimedeanCopula>(ArchimedeanFamily::amh, 0.9));
    return out;
}

double fd_du(const Copula& c, double u, double v, double h = 1e-6) {
    return (c.cdf(u + h, v) - c.cdf(u - h, v)) / (2.0 * h);
}
double fd_dv(const Copula& c, double u, double v, double h = 1e-6) {
    return (c.cdf(u, v + h) - c.cdf(u, v - h)) / (2.0 * h);
}
double fd_density(const Copula& c, double u, double v, double h = 1e-4) {
    return (c.cdf(u + h, v + h) - c.cdf(u + h, v - h) - c.cdf(u - h, v + h) +
            c.cdf(u - h, v - h)) /
           (4.0 * h * h);
}

}  // namespace

TEST_SUITE("copula") {

TEST_CASE("plackett cdf closed form") {
    CHECK(plackett_cdf(2.0, 0.5, 0.5) == doctest::Approx((2.0 - std::sqrt(2.0)) / 2.0).epsilon(1e-12));
    for (double u : {0.1, 0.4, 0.9}) {
        CHECK(plackett_cdf(1.0, u, 0.7) == doctest::Approx(u * 0.7).epsilon(1e-14));
        CHECK(plackett_cdf(5.0, u, 1.0) == doctest::Approx(u).epsilon(1e-14));
        CHECK(plackett_cdf(5.0, 1.0, u) == doctest::Approx(u).epsilon(1e-14));
        CHECK(plackett_cdf(5.0, u, 0.0) == 0.0);
    }
    // Substituting C back into the odds-ratio identity must return theta.
    const double u = 0.37, v = 0.62, theta = 2.0;
    const double c = plackett_cdf(theta, u, v);
    const double recovered = (c * (1.0 - u - v + c)) / ((u - c) * (v - c));
    CHECK(recovered == doctest::Approx(theta).epsilon(1e-9));
    CHECK_THROWS_AS(plackett_cdf(0.0, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(plackett_cdf(-2.0, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(plackett_cdf(2.0, 1.5, 0.5), std::domain_error);
}

TEST_CASE("plackett density") {
    for (double u : {0.2, 0.5, 0.8}) {
        for (double v : {0.3, 0.6}) {
            CHECK(plackett_density(1.0, u, v) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK(plackett_density(5.0, 0.3, 0.7) ==
          doctest::Approx(fd_density(PlackettCopula(5.0), 0.3, 0.7)).epsilon(1e-6));

    // Normalization over the unit square.
    const PlackettCopula c(7.5);
    double mass = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            mass += c.density((i + 0.5) / n, (j + 0.5) / n);
        }
    }
    CHECK(mass / (n * n) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("plackett partial derivatives") {
    for (double u : {0.2, 0.5, 0.9}) {
        CHECK(plackett_du(1.0, u, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(plackett_dv(1.0, u, 0.4) == doctest::Approx(u).epsilon(1e-12));
        CHECK(plackett_du(3.0, u, 1.0) == 1.0);
        CHECK(plackett_du(3.0, u, 0.0) == 0.0);
    }
    for (double theta : {0.1, 2.0, 50.52}) {
        const PlackettCopula c(theta);
        for (int i = 1; i <= 20; ++i) {
            for (int j = 1; j <= 20; ++j) {
                const double u = i / 21.0, v = j / 21.0;
                CHECK(c.du(u, v) == doctest::Approx(fd_du(c, u, v)).epsilon(5e-7));
                CHECK(c.dv(u, v) == doctest::Approx(fd_dv(c, u, v)).epsilon(5e-7));
            }
        }
    }
}

TEST_CASE("plackett conditional inverse") {
    CHECK(plackett_conditional_inverse(1.0, 0.3, 0.8) == 0.8);

    CounterRng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double theta = std::exp(std::log(0.05) +
                                      rng.uniform(3 * i) * (std::log(100.0) - std::log(0.05)));
        const double u = 0.01 + 0.98 * rng.uniform(3 * i + 1);
        const double v = 0.01 + 0.98 * rng.uniform(3 * i + 2);
        const double s = plackett_du(theta, u, v);
        if (s <= 0.0 || s >= 1.0) continue;
        const double back = plackett_conditional_inverse(theta, u, s);
        CHECK(std::abs(back - v) < 1e-8);
        CHECK(std::abs(plackett_du(theta, u, back) - s) < 1e-10);
    }

    // Bisection cross-check at the calibration-sized theta.
    const double closed = plackett_conditional_inverse(50.52, 0.5, 0.5);
    const double bisect = plackett_conditional_inverse(50.52, 0.5, 0.5, false);
    CHECK(std::abs(closed - bisect) < 1e-9);
    CHECK(std::abs(plackett_du(50.52, 0.5, closed) - 0.5) < 1e-10);
    CHECK_THROWS_AS(plackett_conditional_inverse(2.0, 0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(plackett_conditional_inverse(2.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("archimedean limits and ranges") {
    const ArchimedeanCopula clayton_small(ArchimedeanFamily::clayton, 1e-6);
    const ArchimedeanCopula gumbel_one(ArchimedeanFamily::gumbel, 1.0);
    const ArchimedeanCopula amh_zero(ArchimedeanFamily::amh, 0.0);
    for (double u : {0.1, 0.45, 0.8}) {
        for (double v : {0.25, 0.65, 0.95}) {
            CHECK(std::abs(clayton_small.cdf(u, v) - u * v) < 1e-4);
            CHECK(gumbel_one.cdf(u, v) == doctest::Approx(u * v).epsilon(1e-14));
            CHECK(amh_zero.cdf(u, v) == doctest::Approx(u * v).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(ArchimedeanCopula(ArchimedeanFamily::clayton, 0.0), std::domain_error);
    CHECK_THROWS_AS(ArchimedeanCopula(ArchimedeanFamily::clayton, -1.0), std::domain_error);
    CHECK_THROWS_AS(ArchimedeanCopula(ArchimedeanFamily::gumbel, 0.8), std::domain_error);
    CHECK_THROWS_AS(ArchimedeanCopula(ArchimedeanFamily::amh, 1.0), std::domain_error);
    CHECK_THROWS_AS(ArchimedeanCopula(ArchimedeanFamily::amh, -0.1), std::domain_error);
}

TEST_CASE("archimedean generator identities") {
    for (auto family : {ArchimedeanFamily::clayton, ArchimedeanFamily::gumbel,
                        ArchimedeanFamily::amh}) {
        const double theta = family == ArchimedeanFamily::gumbel ? 2.5
                             : family == ArchimedeanFamily::amh ? 0.6
                                                                : 1.7;
        const ArchimedeanCopula c(family, theta);
        CHECK(c.generator(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        for (double y : {0.05, 0.3, 0.8, 1.0}) {
            CHECK(c.generator(c.generator_inverse(y)) == doctest::Approx(y).epsilon(1e-12));
        }
        // phi is non-increasing and vanishes at infinity
        CHECK(c.generator(1.0) <= 1.0);
        CHECK(c.generator(50.0) <= c.generator(1.0));
        CHECK(c.generator(1e6) < 0.05);
    }
}

TEST_CASE("archimedean partials match finite differences") {
    for (const auto& c : test_families()) {
        for (int i = 1; i <= 9; ++i) {
            for (int j = 1; j <= 9; ++j) {
                const double u = i / 10.0, v = j / 10.0;
                CHECK(c->du(u, v) == doctest::Approx(fd_du(*c, u, v)).epsilon(2e-6));
                CHECK(c->dv(u, v) == doctest::Approx(fd_dv(*c, u, v)).epsilon(2e-6));
                if (c->has_density()) {
                    CHECK(c->density(u, v) ==
                          doctest::Approx(fd_density(*c, u, v)).epsilon(1e-4));
                }
            }
        }
    }
}

TEST_CASE("fundamental copulas") {
    const FundamentalCopulas f = fundamental_copulas();
    CHECK(f.m.cdf(0.3, 0.7) == 0.3);
    CHECK(f.w.cdf(0.3, 0.6) == 0.0);
    CHECK(f.w.cdf(0.7, 0.8) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.pi.cdf(0.25, 0.4) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK_THROWS_AS(f.m.density(0.5, 0.5), UnsupportedOperation);
    CHECK_THROWS_AS(f.w.density(0.5, 0.5), UnsupportedOperation);
    CHECK(!f.m.has_density());
    CHECK(f.pi.has_density());
}

TEST_CASE("interface invariants across families") {
    CounterRng rng(77);
    for (const auto& c : test_families()) {
        // uniform margins and groundedness
        for (double t : {0.05, 0.33, 0.71, 0.98}) {
            CHECK(c->cdf(t, 1.0) == doctest::Approx(t).epsilon(1e-12));
            CHECK(c->cdf(1.0, t) == doctest::Approx(t).epsilon(1e-12));
            CHECK(c->cdf(t, 0.0) == 0.0);
            CHECK(c->cdf(0.0, t) == 0.0);
        }
        for (int k = 0; k < 200; ++k) {
            const double a = rng.uniform(8 * k), b = rng.uniform(8 * k + 1);
            const double cc = rng.uniform(8 * k + 2), d = rng.uniform(8 * k + 3);
            const double u1 = std::min(a, b), u2 = std::max(a, b);
            const double v1 = std::min(cc, d), v2 = std::max(cc, d);
            // 2-increasing rectangle inequality
            CHECK(c->cdf(u2, v2) - c->cdf(u1, v2) - c->cdf(u2, v1) + c->cdf(u1, v1) >= -1e-9);
            // Frechet-Hoeffding sandwich
            const double val = c->cdf(u2, v1);
            CHECK(val >= std::max(u2 + v1 - 1.0, 0.0) - 1e-12);
            CHECK(val <= std::min(u2, v1) + 1e-12);
            // conditional CDF properties of du
            const double w1 = c->du(u2, v1), w2 = c->du(u2, v2);
            CHECK(w1 >= 0.0);
            CHECK(w2 <= 1.0);
            CHECK(w2 >= w1 - 1e-9);
        }
        // conditional inverse roundtrip
        for (int k = 0; k < 100; ++k) {
            const double u = 0.02 + 0.96 * rng.uniform(3000 + 2 * k);
            const double s = 0.02 + 0.96 * rng.uniform(3000 + 2 * k + 1);
            const double v = c->conditional_inverse(u, s);
            CHECK(std::abs(c->du(u, v) - s) < 1e-8);
        }
    }
}

TEST_CASE("plackett spans the frechet interval") {
    const ComonotonicityCopula m;
    const CountermonotonicityCopula w;
    double worst_low = 0.0, worst_high = 0.0;
    for (int i = 1; i < 50; ++i) {
        for (int j = 1; j < 50; ++j) {
            const double u = i / 50.0, v = j / 50.0;
            worst_low = std::max(worst_low, std::abs(plackett_cdf(1e-8, u, v) - w.cdf(u, v)));
            worst_high = std::max(worst_high, std::abs(plackett_cdf(1e8, u, v) - m.cdf(u, v)));
        }
    }
    CHECK(worst_low < 1e-3);
    CHECK(worst_high < 1e-3);
}

TEST_CASE("spearman: closed form, quadrature and anchors") {
    CHECK(spearman_from_theta(1.0) == 0.0);
    CHECK(spearman_from_theta(50.52) == doctest::Approx(0.8788).epsilon(2e-4));
    CHECK(spearman_from_theta(1e6) > 0.999);
    CHECK(spearman_from_theta(1e-6) < -0.999);
    CHECK_THROWS_AS(spearman_from_theta(-1.0), std::domain_error);

    for (double theta : {0.04, 0.5, 1.0, 2.0, 30.0, 50.52}) {
        CHECK(std::abs(spearman_from_theta(theta) - spearman_numeric(PlackettCopula(theta))) <
              1e-4);
    }

    CHECK(std::abs(spearman_numeric(IndependenceCopula())) < 1e-12);
    CHECK(std::abs(spearman_numeric(ComonotonicityCopula()) - 1.0) < 5e-4);
    CHECK(std::abs(spearman_numeric(CountermonotonicityCopula()) + 1.0) < 5e-4);

    // strictly increasing in theta, smooth through the theta = 1 seam
    double prev = -2.0;
    for (double lt = -6.0; lt <= 6.0; lt += 0.17) {
        const double rho = spearman_from_theta(std::exp(lt));
        CHECK(rho > prev);
        prev = rho;
    }
    const auto series2 = [](double e) { return e / 3.0 - e * e / 6.0; };
    CHECK(std::abs(spearman_from_theta(1.0 + 5e-5) - series2(5e-5)) < 1e-13);
    CHECK(std::abs(spearman_from_theta(1.0 - 5e-5) - series2(-5e-5)) < 1e-13);
}

TEST_CASE("kendall tau by quadrature and sampling") {
    CHECK(std::abs(kendall_numeric(IndependenceCopula()).value) < 1e-3);
    CHECK(std::abs(kendall_numeric(PlackettCopula(1.0)).value) < 1e-3);
    CHECK_THROWS_AS(kendall_numeric(ComonotonicityCopula()), UnsupportedOperation);

    const PlackettCopula c(20.0);
    const KendallEstimate q = kendall_numeric(c);
    CHECK(q.value > 0.0);
    const PairSample ps = sample(c, 100000, 13);
    const double tau_hat = empirical_kendall(ps.u, ps.v);
    CHECK(std::abs(q.value - tau_hat) < 2e-3);
    CHECK(q.tolerance < 1e-4);
}

TEST_CASE("conditional sampling") {
    const IndependenceCopula pi;
    const PairSample ind = sample(pi, 100000, 7);
    CHECK(std::abs(empirical_spearman(ind.u, ind.v)) < 0.01);

    // marginal uniformity via Kolmogorov-Smirnov
    const auto ks_uniform = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        double ks = 0.0;
        const double n = static_cast<double>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            ks = std::max(ks, std::abs(v[i] - (i + 1.0) / n));
            ks = std::max(ks, std::abs(v[i] - i / n));
        }
        return ks;
    };
    const PairSample pos = sample(PlackettCopula(30.0), 100000, 11);
    CHECK(ks_uniform(pos.u) < 0.0062);
    CHECK(ks_uniform(pos.v) < 0.0062);
    CHECK(std::abs(empirical_spearman(pos.u, pos.v) - spearman_from_theta(30.0)) < 0.01);

    const PairSample neg = sample(PlackettCopula(0.04), 100000, 13);
    CHECK(std::abs(empirical_spearman(neg.u, neg.v) - spearman_from_theta(0.04)) < 0.01);

    // same seed, same bytes; comonotone sampler collapses to the diagonal
    const PairSample again = sample(PlackettCopula(30.0), 1000, 11);
    CHECK(std::equal(again.u.begin(), again.u.end(), pos.u.begin()));
    const PairSample diag = sample(ComonotonicityCopula(), 100, 3);
    for (std::size_t i = 0; i < diag.u.size(); ++i) CHECK(diag.v[i] == diag.u[i]);
}

}  // TEST_SUITE
