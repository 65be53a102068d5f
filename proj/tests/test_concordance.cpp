#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cgp/concordance.hpp"
#include "cgp/copula.hpp"
#include "cgp/errors.hpp"
#include "cgp/math/normal.hpp"
#include "cgp/math/rng.hpp"

using namespace cgp;

namespace {

double brute_force_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double prod = (x[j] - x[i]) * (y[j] - y[i]);
            acc += prod > 0.0 ? 1.0 : (prod < 0.0 ? -1.0 : 0.0);
        }
    }
    return acc / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double rank_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < v.size()) {
            std::size_t j = i;
            while (j < v.size() && v[idx[j]] == v[idx[i]]) ++j;
            for (std::size_t k = i; k < j; ++k) r[idx[k]] = 0.5 * (i + j - 1) + 1.0;
            i = j;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_SUITE("concordance") {

TEST_CASE("kendall small cases") {
    CHECK(empirical_kendall(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 1.0);
    CHECK(empirical_kendall(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == -1.0);
    // one tie in x: pairs (1,2) tied-x, (1,3) concordant, (2,3) concordant
    CHECK(empirical_kendall(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 3}) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(empirical_kendall(std::vector<double>{1.0}, std::vector<double>{1.0}),
                    std::domain_error);
    CHECK_THROWS_AS(empirical_kendall(std::vector<double>{1, 2}, std::vector<double>{1}),
                    std::domain_error);
}

TEST_CASE("kendall equals brute-force enumeration") {
    CounterRng rng(404);
    for (int rep = 0; rep < 6; ++rep) {
        std::vector<double> x(50), y(50);
        for (int i = 0; i < 50; ++i) {
            // quantize to provoke ties in both coordinates
            x[i] = std::floor(rng.uniform(1000 * rep + 2 * i) * 20.0);
            y[i] = std::floor(rng.uniform(1000 * rep + 2 * i + 1) * 20.0);
        }
        CHECK(empirical_kendall(x, y) == brute_force_kendall(x, y));
    }
}

TEST_CASE("spearman") {
    CHECK(empirical_spearman(std::vector<double>{1, 2, 5, 9}, std::vector<double>{2, 4, 5, 6}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(empirical_spearman(std::vector<double>{1, 2, 5, 9}, std::vector<double>{6, 5, 4, 2}) ==
          doctest::Approx(-1.0).epsilon(1e-15));

    CounterRng rng(505);
    std::vector<double> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
        x[i] = std::floor(rng.uniform(2 * i) * 15.0);
        y[i] = std::floor(rng.uniform(2 * i + 1) * 15.0);
    }
    CHECK(empirical_spearman(x, y) == doctest::Approx(rank_pearson(x, y)).epsilon(1e-12));

    CHECK_THROWS_AS(empirical_spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    std::domain_error);
}

TEST_CASE("median-quadrant estimator arithmetic") {
    // n = 100, x = 0..99; choose y so exactly 40 points have both coords in
    // the lower half: theta* = (0.4/0.1)^2 = 16.
    const auto build = [](int both_low) {
        std::vector<double> x(100), y(100);
        int low_used = 0, high_used = 0;
        for (int i = 0; i < 100; ++i) {
            x[i] = i;
            if (i < 50) {
                // x-low: first `both_low` rows take low y values
                y[i] = (i < both_low) ? low_used++ : 50 + high_used++;
            } else {
                // x-high: absorb the remaining y pool
                y[i] = (low_used < 50) ? low_used++ : 50 + high_used++;
            }
        }
        return std::pair{x, y};
    };
    {
        const auto [x, y] = build(40);
        CHECK(estimate_theta_median_quadrant(x, y) == doctest::Approx(16.0).epsilon(1e-9));
    }
    {
        const auto [x, y] = build(25);
        CHECK(estimate_theta_median_quadrant(x, y) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("median-quadrant degenerate inputs") {
    std::vector<double> x(40), y(40), yneg(40);
    for (int i = 0; i < 40; ++i) {
        x[i] = i;
        y[i] = i;           // comonotone: a = 0.5
        yneg[i] = -i;       // countermonotone: a = 0
    }
    CHECK_THROWS_AS(estimate_theta_median_quadrant(x, y), NumericalError);
    CHECK_THROWS_AS(estimate_theta_median_quadrant(x, yneg), NumericalError);
    CHECK_THROWS_AS(estimate_theta_median_quadrant(std::vector<double>{1, 2, 3},
                                                   std::vector<double>{1, 2, 3}),
                    std::domain_error);
}

TEST_CASE("estimator recovers the sampler's theta") {
    const double theta = 50.52;
    const PairSample ps = sample(PlackettCopula(theta), 10000, 321);
    // Monotone marginal transforms leave quadrant counts unchanged.
    std::vector<double> x(ps.u.size()), y(ps.v.size());
    for (std::size_t i = 0; i < ps.u.size(); ++i) {
        x[i] = normal_quantile(ps.u[i]);
        y[i] = normal_quantile(ps.v[i]);
    }
    const double direct = estimate_theta_median_quadrant(ps.u, ps.v);
    const double transformed = estimate_theta_median_quadrant(x, y);
    CHECK(direct == transformed);
    CHECK(std::abs(direct - theta) / theta < 0.2);
}

}  // TEST_SUITE
