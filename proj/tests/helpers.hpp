#pragma once

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cgp/fourier.hpp"
#include "cgp/garch.hpp"

namespace cgp::testing {

// Closed-form normal characteristic function for X ~ N(mu, sigma2).
inline CharacteristicFn gaussian_cf(double mu, double sigma2) {
    return [mu, sigma2](double u) {
        return std::exp(std::complex<double>(-0.5 * sigma2 * u * u, mu * u));
    };
}

// Explicit inversion config sized for a normal law: |cf| ~ 1e-14 at the
// truncation point, bounds at +-12 sigma.
inline InversionConfig gaussian_cfg(double mu, double sigma2, int n_freq = 512,
                                    int n_grid = 2049) {
    const double sigma = std::sqrt(sigma2);
    InversionConfig cfg;
    cfg.u_max = 9.0 / sigma;
    cfg.n_freq = n_freq;
    cfg.x_lo = mu - 12.0 * sigma;
    cfg.x_hi = mu + 12.0 * sigma;
    cfg.n_grid = n_grid;
    return cfg;
}

inline MarginalLaw gaussian_law(double mu, double sigma2) {
    return build_marginal(gaussian_cf(mu, sigma2), gaussian_cfg(mu, sigma2),
                          mu + 0.5 * sigma2);
}

// Parameter sets shaped like daily crude-oil futures estimates.
inline GarchParams brent_params() {
    return {9.124e-33, 7.081e-6, 0.914, 96.505, -0.418, Measure::physical};
}
inline GarchParams wti_params() {
    return {2.845e-4, 7.155e-6, 0.175, 0.161, -0.522, Measure::physical};
}

// Sequential calendar dates in ISO-8601 starting 2017-03-01.
inline std::vector<std::string> make_dates(std::size_t n) {
    static const int month_days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    std::vector<std::string> out;
    out.reserve(n);
    unsigned y = 2017, m = 3, d = 1;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%04u-%02u-%02u", y, m, d);
        out.emplace_back(buf);
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        const unsigned dim =
            (m == 2 && leap) ? 29u : static_cast<unsigned>(month_days[m - 1]);
        if (++d > dim) {
            d = 1;
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    }
    return out;
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cgp_tests_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace cgp::testing
