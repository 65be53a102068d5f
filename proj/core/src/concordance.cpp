#include "cgp/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgp/errors.hpp"

namespace cgp {

namespace {

void check_paired(std::span<const double> x, std::span<const double> y, std::size_t min_n,
                  const char* who) {
    if (x.size() != y.size()) {
        throw std::domain_error(std::string(who) + ": series must have equal length");
    }
    if (x.size() < min_n) {
        throw std::domain_error(std::string(who) + ": need at least " + std::to_string(min_n) +
                                " observations");
    }
}

// Strict inversions (a[i] > a[j] for i < j) by merge sort.
std::uint64_t count_inversions(std::vector<double>& a, std::vector<double>& buf, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(a, buf, lo, mid) + count_inversions(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            inv += mid - i;
            buf[k++] = a[j++];
        } else {
            buf[k++] = a[i++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
    return inv;
}

std::uint64_t tied_pairs(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    std::uint64_t ties = 0;
    std::size_t i = 0;
    while (i < vals.size()) {
        std::size_t j = i;
        while (j < vals.size() && vals[j] == vals[i]) ++j;
        const std::uint64_t g = j - i;
        ties += g * (g - 1) / 2;
        i = j;
    }
    return ties;
}

// Ranks with average rank for ties, 1-based.
std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[idx[j]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j - 1) + 1.0;
        for (std::size_t k = i; k < j; ++k) rank[idx[k]] = avg;
        i = j;
    }
    return rank;
}

}  // namespace

double empirical_kendall(std::span<const double> x, std::span<const double> y) {
    check_paired(x, y, 2, "empirical_kendall");
    const std::size_t n = x.size();

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // After sorting by (x asc, y asc), strict y-inversions are exactly the
    // discordant pairs: equal-x blocks are y-sorted and contribute none, and
    // y-ties are not counted as inversions.
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
    std::vector<double> buf(n);
    const std::uint64_t discordant = count_inversions(ys, buf, 0, n);

    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t tx = tied_pairs(std::vector<double>(x.begin(), x.end()));
    const std::uint64_t ty = tied_pairs(std::vector<double>(y.begin(), y.end()));

    std::uint64_t txy = 0;  // joint ties, counted along the (x,y)-sorted order
    {
        std::vector<std::size_t> order = idx;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && x[order[j]] == x[order[i]] && y[order[j]] == y[order[i]]) ++j;
            const std::uint64_t g = j - i;
            txy += g * (g - 1) / 2;
            i = j;
        }
    }

    // concordant - discordant = total - ties(any) - 2 * discordant
    const std::uint64_t ties_any = tx + ty - txy;
    const double numerator = static_cast<double>(total) - static_cast<double>(ties_any) -
                             2.0 * static_cast<double>(discordant);
    return numerator / static_cast<double>(total);
}

double empirical_spearman(std::span<const double> x, std::span<const double> y) {
    check_paired(x, y, 2, "empirical_spearman");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const std::size_t n = x.size();
    const double mean = 0.5 * static_cast<double>(n + 1);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("empirical_spearman: zero rank variance, correlation undefined");
    }
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

double estimate_theta_median_quadrant(std::span<const double> x, std::span<const double> y) {
    check_paired(x, y, 4, "estimate_theta_median_quadrant");
    const std::size_t n = x.size();

    const auto median = [](std::span<const double> v) {
        std::vector<double> s(v.begin(), v.end());
        std::sort(s.begin(), s.end());
        const std::size_t n2 = s.size() / 2;
        return s.size() % 2 == 1 ? s[n2] : 0.5 * (s[n2 - 1] + s[n2]);
    };
    const double mx = median(x);
    const double my = median(y);

    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= mx && y[i] <= my) ++k;
    }
    const double a = static_cast<double>(k) / static_cast<double>(n);
    if (k == 0 || 2 * k == n) {
        throw NumericalError(
            "estimate_theta_median_quadrant: degenerate quadrant frequency a = " +
            std::to_string(a) + " (theta* would be zero or infinite)");
    }
    const double ratio = a / (0.5 - a);
    return ratio * ratio;
}

}  // namespace cgp
