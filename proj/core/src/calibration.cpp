#include "cgp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cgp/errors.hpp"
#include "cgp/math/nelder_mead.hpp"

namespace cgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMinObservations = 30;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double sample_variance(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / (n - 1.0);
}

}  // namespace

PriceSeries load_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");

    PriceSeries out;
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    ++lineno;
    if (trim(line) != "date,price") {
        throw DataError(path + ":1: expected header 'date,price'");
    }

    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": expected exactly two fields 'date,price'");
        }
        const std::string date = trim(row.substr(0, comma));
        const std::string price_str = trim(row.substr(comma + 1));
        if (date.empty()) {
            throw DataError(path + ":" + std::to_string(lineno) + ": empty date");
        }
        std::size_t used = 0;
        double price = 0.0;
        try {
            price = std::stod(price_str, &used);
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": unparsable price '" +
                            price_str + "'");
        }
        if (used != price_str.size() || !std::isfinite(price)) {
            throw DataError(path + ":" + std::to_string(lineno) + ": unparsable price '" +
                            price_str + "'");
        }
        if (!(price > 0.0)) {
            throw DataError(path + ":" + std::to_string(lineno) + ": price must be positive");
        }
        if (!out.dates.empty() && !(out.dates.back() < date)) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": dates must be strictly ascending");
        }
        out.dates.push_back(date);
        out.prices.push_back(price);
    }
    return out;
}

ReturnSeries to_returns(const PriceSeries& prices, double r_step) {
    if (prices.dates.size() != prices.prices.size()) {
        throw DataError("to_returns: dates and prices differ in length");
    }
    if (prices.prices.size() < 2) {
        throw DataError("to_returns: need at least two prices");
    }
    ReturnSeries out;
    out.r_step = r_step;
    out.dates.reserve(prices.dates.size() - 1);
    out.returns.reserve(prices.dates.size() - 1);
    for (std::size_t i = 1; i < prices.prices.size(); ++i) {
        out.dates.push_back(prices.dates[i]);
        out.returns.push_back(std::log(prices.prices[i] / prices.prices[i - 1]));
    }
    return out;
}

AlignedReturns align_series(const PriceSeries& a, const PriceSeries& b, double r_step) {
    if (a.dates.empty() || b.dates.empty()) {
        throw DataError("align_series: both series must be non-empty");
    }

    // Sorted-merge intersection; both series are date-ascending.
    PriceSeries ja, jb;
    std::size_t i = 0, j = 0;
    while (i < a.dates.size() && j < b.dates.size()) {
        if (a.dates[i] == b.dates[j]) {
            ja.dates.push_back(a.dates[i]);
            ja.prices.push_back(a.prices[i]);
            jb.dates.push_back(b.dates[j]);
            jb.prices.push_back(b.prices[j]);
            ++i;
            ++j;
        } else if (a.dates[i] < b.dates[j]) {
            ++i;
        } else {
            ++j;
        }
    }

    if (ja.dates.size() < kMinObservations) {
        throw DataError("align_series: only " + std::to_string(ja.dates.size()) +
                        " common dates, need at least " + std::to_string(kMinObservations));
    }

    const ReturnSeries ra = to_returns(ja, r_step);
    const ReturnSeries rb = to_returns(jb, r_step);
    AlignedReturns out;
    out.dates = ra.dates;
    out.r1 = ra.returns;
    out.r2 = rb.returns;
    out.r_step = r_step;
    return out;
}

double log_likelihood(const GarchParams& p, const ReturnSeries& series, double h_init) {
    if (!(h_init > 0.0)) throw std::domain_error("log_likelihood: h_init must be positive");
    if (p.measure != Measure::physical) {
        throw std::domain_error("log_likelihood: expects physical-measure parameters");
    }
    if (p.omega < 0.0 || p.alpha < 0.0 || p.beta < 0.0 || !std::isfinite(p.omega) ||
        !std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.lambda)) {
        return kNegInf;  // infeasible point, encoded for the optimizer
    }

    constexpr double kLog2Pi = 1.8378770664093454836;
    double h = h_init;
    double ll = 0.0;
    for (double r : series.returns) {
        if (!(h > 1e-300) || !std::isfinite(h)) return kNegInf;
        const double eps = r - series.r_step - p.lambda * h;
        ll -= 0.5 * (kLog2Pi + std::log(h) + eps * eps / h);
        const double dev = eps / std::sqrt(h) - p.gamma * std::sqrt(h);
        h = p.omega + p.beta * h + p.alpha * dev * dev;
    }
    return std::isfinite(ll) ? ll : kNegInf;
}

namespace {

GarchParams from_opt_vector(const std::vector<double>& x) {
    GarchParams p;
    p.omega = std::exp(x[0]);
    p.alpha = std::exp(x[1]);
    p.beta = std::exp(x[2]);
    p.gamma = x[3];
    p.lambda = x[4];
    return p;
}

std::vector<double> to_opt_vector(const GarchParams& p) {
    const auto safe_log = [](double v) { return std::log(std::max(v, 1e-300)); };
    return {safe_log(p.omega), safe_log(p.alpha), safe_log(p.beta), p.gamma, p.lambda};
}

std::vector<GarchParams> default_starts(double var) {
    // One variance-targeted symmetric start, two with the leverage shape
    // typical of daily series (large gamma, persistence near one).
    std::vector<GarchParams> starts;
    {
        GarchParams p;
        p.beta = 0.85;
        p.alpha = 0.05 * var;
        p.gamma = 0.0;
        p.lambda = 0.0;
        p.omega = 0.10 * var;
        starts.push_back(p);
    }
    {
        GarchParams p;
        p.beta = 0.60;
        p.gamma = 2.0 / std::sqrt(var);
        p.alpha = 0.30 / (p.gamma * p.gamma);
        p.lambda = 0.5;
        p.omega = std::max(var * (1.0 - p.persistence()) - p.alpha, 1e-4 * var);
        starts.push_back(p);
    }
    {
        GarchParams p;
        p.beta = 0.90;
        p.gamma = 1.0 / std::sqrt(var);
        p.alpha = 0.08 / (p.gamma * p.gamma);
        p.lambda = -0.5;
        p.omega = std::max(var * (1.0 - p.persistence()) - p.alpha, 1e-4 * var);
        starts.push_back(p);
    }
    return starts;
}

}  // namespace

MleResult mle_fit(const ReturnSeries& series, std::optional<GarchParams> init) {
    if (series.returns.size() < kMinObservations) {
        throw DataError("mle_fit: need at least " + std::to_string(kMinObservations) +
                        " returns, got " + std::to_string(series.returns.size()));
    }
    const double var = sample_variance(series.returns);
    if (!(var > 0.0)) throw DataError("mle_fit: return series has zero variance");

    const auto objective = [&](const std::vector<double>& x) {
        const double ll = log_likelihood(from_opt_vector(x), series, var);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    std::vector<GarchParams> starts = default_starts(var);
    if (init) starts.insert(starts.begin(), *init);

    MleResult best;
    best.h_init = var;
    best.loglik = kNegInf;
    best.converged = false;

    NelderMeadOptions opts;
    opts.max_iter = 20000;
    for (const GarchParams& s : starts) {
        const std::vector<double> x0 = to_opt_vector(s);
        const std::vector<double> steps = {1.0, 1.0, 0.5, std::max(1.0, 0.2 * std::abs(s.gamma)),
                                           0.25};
        NelderMeadResult r1 = nelder_mead(objective, x0, steps, opts);
        // Restart from the candidate with a tighter simplex; guards against a
        // collapsed simplex claiming convergence early.
        const std::vector<double> steps2 = {0.1, 0.1, 0.05,
                                            std::max(0.1, 0.02 * std::abs(r1.x[3])), 0.05};
        NelderMeadResult r2 = nelder_mead(objective, r1.x, steps2, opts);
        const NelderMeadResult& r = r2.fmin <= r1.fmin ? r2 : r1;

        const double ll = -r.fmin;
        best.iterations += r1.iterations + r2.iterations;
        const bool better = ll > best.loglik ||
                            (ll == best.loglik && to_opt_vector(best.params) > r.x);
        if (std::isfinite(ll) && better) {
            best.params = from_opt_vector(r.x);
            best.loglik = ll;
            best.converged = r2.converged;
        }
    }

    if (std::isfinite(best.loglik)) {
        const StdErrors se = std_errors(best, series);
        best.std_errors = se.value;
        best.se_ok = se.ok;
    }
    return best;
}

StdErrors std_errors(const MleResult& result, const ReturnSeries& series) {
    constexpr int dim = 5;
    const std::array<double, dim> theta = {result.params.omega, result.params.alpha,
                                           result.params.beta, result.params.gamma,
                                           result.params.lambda};

    const auto neg_ll = [&](const std::array<double, dim>& t) {
        GarchParams p;
        p.omega = t[0];
        p.alpha = t[1];
        p.beta = t[2];
        p.gamma = t[3];
        p.lambda = t[4];
        const double ll = log_likelihood(p, series, result.h_init);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    // Relative step 1e-4; parameters sitting exactly at zero get an absolute
    // probe instead (their curvature would otherwise be lost in rounding).
    std::array<double, dim> step{};
    for (int i = 0; i < dim; ++i) {
        step[i] = theta[i] != 0.0 ? 1e-4 * std::abs(theta[i]) : 1e-4;
    }

    // Central-difference Hessian.
    double hess[dim][dim];
    const double f0 = neg_ll(theta);
    for (int i = 0; i < dim; ++i) {
        auto tp = theta, tm = theta;
        tp[i] += step[i];
        tm[i] -= step[i];
        hess[i][i] = (neg_ll(tp) - 2.0 * f0 + neg_ll(tm)) / (step[i] * step[i]);
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            auto tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[i] += step[i];
            tpp[j] += step[j];
            tpm[i] += step[i];
            tpm[j] -= step[j];
            tmp[i] -= step[i];
            tmp[j] += step[j];
            tmm[i] -= step[i];
            tmm[j] -= step[j];
            hess[i][j] = hess[j][i] =
                (neg_ll(tpp) - neg_ll(tpm) - neg_ll(tmp) + neg_ll(tmm)) /
                (4.0 * step[i] * step[j]);
        }
    }

    StdErrors out;
    for (int i = 0; i < dim; ++i) {
        out.value[i] = std::numeric_limits<double>::quiet_NaN();
        out.ok[i] = false;
    }

    // Keep parameters with usable curvature, drop the rest, and invert the
    // surviving block by Cholesky; peel off the weakest pivot on failure.
    // Diagonals are screened first: a boundary parameter (probe leaves the
    // feasible set) must not poison the cross terms of the others.
    std::vector<int> live;
    for (int i = 0; i < dim; ++i) {
        if (std::isfinite(hess[i][i]) && hess[i][i] > 0.0) live.push_back(i);
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < live.size() && !changed; ++a) {
            for (std::size_t b = 0; b < live.size(); ++b) {
                if (!std::isfinite(hess[live[a]][live[b]])) {
                    const std::size_t drop =
                        hess[live[a]][live[a]] < hess[live[b]][live[b]] ? a : b;
                    live.erase(live.begin() + static_cast<long>(drop));
                    changed = true;
                    break;
                }
            }
        }
    }

    while (!live.empty()) {
        const int m = static_cast<int>(live.size());
        std::vector<double> a(m * m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a[i * m + j] = hess[live[i]][live[j]];
        }
        // Cholesky factorization, failure -> drop the param with the smallest
        // diagonal curvature and retry.
        bool ok = true;
        std::vector<double> chol(a);
        for (int i = 0; i < m && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = chol[i * m + j];
                for (int k = 0; k < j; ++k) s -= chol[i * m + k] * chol[j * m + k];
                if (i == j) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    chol[i * m + i] = std::sqrt(s);
                } else {
                    chol[i * m + j] = s / chol[j * m + j];
                }
            }
        }
        if (!ok) {
            int weakest = 0;
            for (int i = 1; i < m; ++i) {
                if (hess[live[i]][live[i]] < hess[live[weakest]][live[weakest]]) weakest = i;
            }
            live.erase(live.begin() + weakest);
            continue;
        }
        // Invert via the factor: solve L L^T X = I column by column.
        std::vector<double> inv(m * m, 0.0);
        for (int c = 0; c < m; ++c) {
            std::vector<double> e(m, 0.0);
            e[c] = 1.0;
            for (int i = 0; i < m; ++i) {
                double s = e[i];
                for (int k = 0; k < i; ++k) s -= chol[i * m + k] * e[k];
                e[i] = s / chol[i * m + i];
            }
            for (int i = m - 1; i >= 0; --i) {
                double s = e[i];
                for (int k = i + 1; k < m; ++k) s -= chol[k * m + i] * e[k];
                e[i] = s / chol[i * m + i];
            }
            for (int i = 0; i < m; ++i) inv[i * m + c] = e[i];
        }
        for (int i = 0; i < m; ++i) {
            const double v = inv[i * m + i];
            if (v > 0.0 && std::isfinite(v)) {
                out.value[live[i]] = std::sqrt(v);
                out.ok[live[i]] = true;
            }
        }
        break;
    }
    return out;
}

double annualized_vol(const GarchParams& p) {
    return std::sqrt(252.0 * long_run_variance(p));
}

}  // namespace cgp
