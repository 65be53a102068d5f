#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgp/calibration.hpp"
#include "cgp/concordance.hpp"
#include "cgp/copula.hpp"
#include "cgp/errors.hpp"
#include "cgp/fourier.hpp"
#include "cgp/garch.hpp"
#include "cgp/pricing.hpp"

namespace cgp::tools {

namespace {

using nlohmann::json;

struct ModelFile {
    GarchParams params;
    MarketContext market;
};

// Model files are flat JSON with per-day keys:
// omega, alpha, beta, gamma, lambda, h0, s0, r and an optional "measure".
ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open model file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    try {
        ModelFile m;
        m.params.omega = j.at("omega").get<double>();
        m.params.alpha = j.at("alpha").get<double>();
        m.params.beta = j.at("beta").get<double>();
        m.params.gamma = j.at("gamma").get<double>();
        m.params.lambda = j.at("lambda").get<double>();
        m.market.h_next = j.at("h0").get<double>();
        m.market.s0 = j.at("s0").get<double>();
        m.market.r_step = j.at("r").get<double>();
        const std::string measure = j.value("measure", "physical");
        if (measure == "physical") {
            m.params.measure = Measure::physical;
        } else if (measure == "risk-neutral") {
            m.params.measure = Measure::risk_neutral;
        } else {
            throw DataError(path + ": unknown measure '" + measure + "'");
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

GarchParams as_risk_neutral(const GarchParams& p) {
    return p.measure == Measure::risk_neutral ? p : risk_neutralize(p);
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError(out_path + ": cannot open for writing");
    out << text;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}
std::string money(double v) { return fmt("%.3f", v); }
std::string num(double v) { return fmt("%.12g", v); }

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

void warn_if_nonstationary(const GarchParams& p, const std::string& label) {
    if (!p.is_stationary()) {
        std::cerr << "warning: " << label << " has persistence " << p.persistence()
                  << " >= 1 (variance not mean-reverting); finite-horizon pricing proceeds\n";
    }
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

struct PriceConfig {
    std::string model1, model2;
    double theta = 0.0;
    std::vector<double> strikes;
    int maturity_days = 90;
    std::optional<double> rate;
    std::string method = "single";
    std::vector<int> n_nodes{5000};
    long sims = 100000;
    std::uint64_t seed = 42;
    std::string out;
    std::string format = "csv";
    bool no_timing = false;
};

struct PriceRow {
    double strike;
    PriceReport report;
};

int cmd_price(const PriceConfig& cfg) {
    // Validate everything before any numerical work.
    const bool want_single = cfg.method == "single" || cfg.method == "all";
    const bool want_double = cfg.method == "double" || cfg.method == "all";
    const bool want_mc = cfg.method == "mc" || cfg.method == "all";
    if (!want_single && !want_double && !want_mc) {
        throw std::invalid_argument("price: unknown method '" + cfg.method +
                                    "' (single|double|mc|all)");
    }
    if (cfg.strikes.empty()) throw std::invalid_argument("price: --strikes is required");
    for (double k : cfg.strikes) {
        if (!(k >= 0.0)) throw std::invalid_argument("price: strikes must be >= 0");
    }
    if (cfg.maturity_days < 1) throw std::invalid_argument("price: --maturity-days must be >= 1");
    if (!(cfg.theta > 0.0)) throw std::invalid_argument("price: --theta must be > 0");
    if (cfg.n_nodes.empty()) throw std::invalid_argument("price: --n must not be empty");
    for (int n : cfg.n_nodes) {
        if ((want_single || want_double) && n < 10) {
            throw std::invalid_argument("price: quadrature N must be >= 10");
        }
    }
    if (cfg.n_nodes.size() > 1 && cfg.method != "single") {
        throw std::invalid_argument("price: an N ladder is only supported with --method single");
    }
    if (want_mc && cfg.sims < 100) throw std::invalid_argument("price: --sims must be >= 100");
    if (cfg.format != "csv" && cfg.format != "json") {
        throw std::invalid_argument("price: --format must be csv or json");
    }

    const ModelFile m1 = load_model(cfg.model1);
    const ModelFile m2 = load_model(cfg.model2);
    double rate = 0.0;
    if (cfg.rate) {
        rate = *cfg.rate;
    } else {
        if (m1.market.r_step != m2.market.r_step) {
            throw std::invalid_argument(
                "price: model files disagree on r; pass --rate to pick one");
        }
        rate = m1.market.r_step;
    }

    const GarchParams rn1 = as_risk_neutral(m1.params);
    const GarchParams rn2 = as_risk_neutral(m2.params);
    validate(rn1);
    validate(rn2);
    warn_if_nonstationary(m1.params, cfg.model1);
    warn_if_nonstationary(m2.params, cfg.model2);

    MarketContext mkt1 = m1.market;
    MarketContext mkt2 = m2.market;
    mkt1.r_step = rate;
    mkt2.r_step = rate;
    validate(mkt1);
    validate(mkt2);

    const MarginalLaw law1 = hn_marginal_law(rn1, mkt1, cfg.maturity_days);
    const MarginalLaw law2 = hn_marginal_law(rn2, mkt2, cfg.maturity_days);
    const PlackettCopula copula(cfg.theta);

    std::vector<PriceRow> rows;
    for (double strike : cfg.strikes) {
        const SpreadOption opt{mkt1.s0, mkt2.s0, strike, cfg.maturity_days, rate};
        for (int n : cfg.n_nodes) {
            if (want_single) rows.push_back({strike, price_single_integral(law1, law2, copula, opt, n)});
        }
        if (want_double) rows.push_back({strike, price_double_integral(law1, law2, copula, opt, cfg.n_nodes[0])});
        if (want_mc) rows.push_back({strike, price_monte_carlo(law1, law2, copula, opt, cfg.sims, cfg.seed)});
    }
    if (cfg.no_timing) {
        for (auto& r : rows) r.report.elapsed_seconds = 0.0;
    }

    std::ostringstream os;
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json rec;
            rec["strike"] = round3(r.strike);
            rec["method"] = to_string(r.report.method);
            rec["price"] = round3(r.report.price);
            rec["resolution"] = r.report.resolution;
            rec["elapsed_seconds"] = round3(r.report.elapsed_seconds);
            rec["ci_low"] = r.report.ci_low ? json(round3(*r.report.ci_low)) : json(nullptr);
            rec["ci_high"] = r.report.ci_high ? json(round3(*r.report.ci_high)) : json(nullptr);
            rec["seed"] = r.report.seed ? json(*r.report.seed) : json(nullptr);
            arr.push_back(rec);
        }
        os << arr.dump(2) << "\n";
    } else if (cfg.n_nodes.size() > 1) {
        // Strike-by-N convergence grid (methods == {single}).
        os << "strike";
        for (int n : cfg.n_nodes) os << ",N=" << n;
        for (int n : cfg.n_nodes) os << ",seconds_N=" << n;
        os << "\n";
        std::size_t row_at = 0;
        for (double strike : cfg.strikes) {
            os << money(strike);
            for (std::size_t j = 0; j < cfg.n_nodes.size(); ++j) {
                os << "," << money(rows[row_at + j].report.price);
            }
            for (std::size_t j = 0; j < cfg.n_nodes.size(); ++j) {
                os << "," << money(rows[row_at + j].report.elapsed_seconds);
            }
            row_at += cfg.n_nodes.size();
            os << "\n";
        }
    } else {
        // Strike-by-method table with CI columns.
        os << "strike,single,double,mc,ci_low,ci_high,single_seconds,double_seconds,mc_seconds\n";
        std::size_t idx = 0;
        for (double strike : cfg.strikes) {
            std::string single_p, double_p, mc_p, cil, cih, st, dt, mt;
            while (idx < rows.size() && rows[idx].strike == strike) {
                const PriceReport& rep = rows[idx].report;
                switch (rep.method) {
                    case PriceMethod::single_integral:
                        single_p = money(rep.price);
                        st = money(rep.elapsed_seconds);
                        break;
                    case PriceMethod::double_integral:
                        double_p = money(rep.price);
                        dt = money(rep.elapsed_seconds);
                        break;
                    case PriceMethod::monte_carlo:
                        mc_p = money(rep.price);
                        mt = money(rep.elapsed_seconds);
                        if (rep.ci_low) cil = money(*rep.ci_low);
                        if (rep.ci_high) cih = money(*rep.ci_high);
                        break;
                }
                ++idx;
            }
            os << money(strike) << "," << single_p << "," << double_p << "," << mc_p << ","
               << cil << "," << cih << "," << st << "," << dt << "," << mt << "\n";
        }
    }
    write_text(cfg.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

int cmd_calibrate(const std::string& csv_path, double rate, const std::string& out,
                  const std::string& format) {
    if (format != "csv" && format != "json") {
        throw std::invalid_argument("calibrate: --format must be csv or json");
    }
    const PriceSeries prices = load_price_csv(csv_path);
    if (prices.prices.size() < 31) {
        throw DataError(csv_path + ": insufficient data, need at least 31 prices (30 returns)");
    }
    const ReturnSeries returns = to_returns(prices, rate);
    const MleResult fit = mle_fit(returns);

    const char* names[5] = {"omega", "alpha", "beta", "gamma", "lambda"};
    const double est[5] = {fit.params.omega, fit.params.alpha, fit.params.beta, fit.params.gamma,
                           fit.params.lambda};

    std::ostringstream os;
    if (format == "json") {
        json rec;
        rec["converged"] = fit.converged;
        rec["iterations"] = fit.iterations;
        rec["loglik"] = fit.loglik;
        rec["h_init"] = fit.h_init;
        rec["n_returns"] = returns.returns.size();
        for (int i = 0; i < 5; ++i) {
            rec["params"][names[i]] = est[i];
            rec["std_errors"][names[i]] =
                fit.se_ok[i] ? json(fit.std_errors[i]) : json(nullptr);
        }
        rec["persistence"] = fit.params.persistence();
        rec["annualized_vol"] =
            fit.params.is_stationary() ? json(annualized_vol(fit.params)) : json(nullptr);
        os << rec.dump(2) << "\n";
    } else {
        os << "parameter,estimate,std_error\n";
        for (int i = 0; i < 5; ++i) {
            os << names[i] << "," << num(est[i]) << ","
               << (fit.se_ok[i] ? num(fit.std_errors[i]) : std::string("")) << "\n";
        }
        os << "persistence," << num(fit.params.persistence()) << ",\n";
        if (fit.params.is_stationary()) {
            os << "annualized_vol," << num(annualized_vol(fit.params)) << ",\n";
        }
        os << "loglik," << num(fit.loglik) << ",\n";
        os << "converged," << (fit.converged ? "true" : "false") << ",\n";
    }
    write_text(out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// concordance
// ---------------------------------------------------------------------------

int cmd_concordance(const std::string& csv1, const std::string& csv2, const std::string& out,
                    const std::string& format) {
    if (format != "csv" && format != "json") {
        throw std::invalid_argument("concordance: --format must be csv or json");
    }
    const PriceSeries a = load_price_csv(csv1);
    const PriceSeries b = load_price_csv(csv2);
    const AlignedReturns pair = align_series(a, b);

    const double tau = empirical_kendall(pair.r1, pair.r2);
    const double rho = empirical_spearman(pair.r1, pair.r2);
    std::optional<double> theta_star;
    std::string note;
    try {
        theta_star = estimate_theta_median_quadrant(pair.r1, pair.r2);
    } catch (const NumericalError& e) {
        note = e.what();
    }

    std::ostringstream os;
    if (format == "json") {
        json rec;
        rec["n_pairs"] = pair.r1.size();
        rec["kendall_tau"] = tau;
        rec["spearman_rho"] = rho;
        rec["theta_star"] = theta_star ? json(*theta_star) : json(nullptr);
        rec["spearman_of_theta_star"] =
            theta_star ? json(spearman_from_theta(*theta_star)) : json(nullptr);
        if (!note.empty()) rec["theta_star_note"] = note;
        os << rec.dump(2) << "\n";
    } else {
        os << "n_pairs,kendall_tau,spearman_rho,theta_star,spearman_of_theta_star\n";
        os << pair.r1.size() << "," << num(tau) << "," << num(rho) << ","
           << (theta_star ? num(*theta_star) : std::string("")) << ","
           << (theta_star ? num(spearman_from_theta(*theta_star)) : std::string("")) << "\n";
        if (!note.empty()) os << "# theta_star degenerate: " << note << "\n";
    }
    write_text(out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// figures
// ---------------------------------------------------------------------------

struct FiguresConfig {
    std::string model1;
    int maturity_days = 90;
    long sims = 10000;
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_figures(const FiguresConfig& cfg) {
    if (cfg.out.empty()) throw std::invalid_argument("figures: --out directory is required");
    if (cfg.maturity_days < 1) {
        throw std::invalid_argument("figures: --maturity-days must be >= 1");
    }
    if (cfg.sims < 100) throw std::invalid_argument("figures: --sims must be >= 100");

    const ModelFile m = load_model(cfg.model1);
    validate(m.params);
    validate(m.market);

    std::filesystem::create_directories(cfg.out);
    const auto path = [&](const char* f) {
        return (std::filesystem::path(cfg.out) / f).string();
    };

    // Terminal-price histograms at three horizons up to maturity.
    {
        std::ostringstream os;
        os << "horizon,bin_left,bin_right,count\n";
        const int horizons[3] = {std::max(1, cfg.maturity_days / 3),
                                 std::max(1, 2 * cfg.maturity_days / 3), cfg.maturity_days};
        for (int h : horizons) {
            std::vector<double> terminal(cfg.sims);
            for (long i = 0; i < cfg.sims; ++i) {
                terminal[i] = std::exp(
                    simulate_path(m.params, m.market, h, cfg.seed + static_cast<std::uint64_t>(i))
                        .log_price.back());
            }
            const auto [mn, mx] = std::minmax_element(terminal.begin(), terminal.end());
            const int bins = 60;
            const double lo = *mn, hi = *mx;
            const double w = (hi - lo) / bins;
            std::vector<long> count(bins, 0);
            for (double s : terminal) {
                int b = w > 0.0 ? static_cast<int>((s - lo) / w) : 0;
                b = std::clamp(b, 0, bins - 1);
                ++count[b];
            }
            for (int b = 0; b < bins; ++b) {
                os << h << "," << num(lo + b * w) << "," << num(lo + (b + 1) * w) << ","
                   << count[b] << "\n";
            }
        }
        write_text(path("garch_terminal_hist.csv"), os.str());
    }

    // Characteristic function of the log price and the derived return law.
    {
        const GarchParams rn = as_risk_neutral(m.params);
        const CharacteristicFn cf = [&](double u) {
            return log_return_cf(rn, m.market, u, cfg.maturity_days);
        };
        const CumulantFn cum = [&](double u) {
            return log_return_cumulant(rn, m.market, u, cfg.maturity_days);
        };
        const InversionConfig icfg = resolve_inversion_config(cf, cum);

        std::ostringstream os;
        os << "u,re_phi,im_phi\n";
        const int nu = 200;
        for (int i = 0; i < nu; ++i) {
            const double u = icfg.u_max * (i + 0.5) / nu;
            const std::complex<double> phi =
                log_price_cf(rn, m.market, u, cfg.maturity_days);
            os << num(u) << "," << num(phi.real()) << "," << num(phi.imag()) << "\n";
        }
        write_text(path("cf_grid.csv"), os.str());

        const MarginalLaw law = build_marginal(cf, icfg);
        std::ostringstream os2;
        os2 << "x,pdf,cdf\n";
        for (std::size_t i = 0; i < law.x_grid().size(); ++i) {
            os2 << num(law.x_grid()[i]) << "," << num(law.pdf_values()[i]) << ","
                << num(law.cdf_values()[i]) << "\n";
        }
        write_text(path("density_grid.csv"), os2.str());
    }

    // Copula scatters for a negative, independent and positive theta.
    {
        std::ostringstream os;
        os << "theta,u,v\n";
        for (double theta : {0.04, 1.0, 30.0}) {
            const PlackettCopula c(theta);
            const PairSample ps = sample(c, static_cast<std::size_t>(cfg.sims), cfg.seed);
            for (std::size_t i = 0; i < ps.u.size(); ++i) {
                os << num(theta) << "," << num(ps.u[i]) << "," << num(ps.v[i]) << "\n";
            }
        }
        write_text(path("plackett_scatter.csv"), os.str());
    }

    // Spearman rho as a function of theta, 200 log-spaced points.
    {
        std::ostringstream os;
        os << "theta,spearman_rho\n";
        const int n = 200;
        const double lt0 = std::log(0.01), lt1 = std::log(100.0);
        for (int i = 0; i < n; ++i) {
            const double theta = std::exp(lt0 + (lt1 - lt0) * i / (n - 1.0));
            os << num(theta) << "," << num(spearman_from_theta(theta)) << "\n";
        }
        write_text(path("spearman_curve.csv"), os.str());
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Spread option pricing under affine GARCH marginals with copula dependence"};
    app.require_subcommand(1);

    // calibrate
    std::string cal_csv, cal_out, cal_format = "json";
    double cal_rate = 0.0;
    auto* cal = app.add_subcommand("calibrate", "Fit GARCH parameters to a price CSV by MLE");
    cal->add_option("csv", cal_csv, "Input CSV with header date,price")->required();
    cal->add_option("--rate", cal_rate, "Per-day risk-free rate used in the likelihood");
    cal->add_option("--out", cal_out, "Output path (default stdout)");
    cal->add_option("--format", cal_format, "json|csv");

    // price
    PriceConfig pc;
    auto* price = app.add_subcommand("price", "Price a European spread call");
    price->add_option("--model1", pc.model1, "Model file for asset 1")->required();
    price->add_option("--model2", pc.model2, "Model file for asset 2")->required();
    price->add_option("--theta", pc.theta, "Plackett dependence parameter")->required();
    price->add_option("--strikes", pc.strikes, "Strike ladder")->delimiter(',')->required();
    price->add_option("--maturity-days", pc.maturity_days, "Maturity in trading days");
    double price_rate = 0.0;
    auto* rate_opt = price->add_option("--rate", price_rate, "Per-day rate (overrides model files)");
    price->add_option("--method", pc.method, "single|double|mc|all");
    price->add_option("--n", pc.n_nodes, "Quadrature node count(s)")->delimiter(',');
    price->add_option("--sims", pc.sims, "Monte Carlo simulation count");
    price->add_option("--seed", pc.seed, "Monte Carlo seed");
    price->add_option("--out", pc.out, "Output path (default stdout)");
    price->add_option("--format", pc.format, "json|csv");
    price->add_flag("--no-timing", pc.no_timing, "Zero elapsed times in the output");

    // concordance
    std::string con_csv1, con_csv2, con_out, con_format = "json";
    auto* con = app.add_subcommand("concordance",
                                   "Dependence estimates for two aligned price series");
    con->add_option("csv1", con_csv1, "First price CSV")->required();
    con->add_option("csv2", con_csv2, "Second price CSV")->required();
    con->add_option("--out", con_out, "Output path (default stdout)");
    con->add_option("--format", con_format, "json|csv");

    // figures
    FiguresConfig fc;
    auto* fig = app.add_subcommand("figures", "Emit figure-ready CSV bundles");
    fig->add_option("--model1", fc.model1, "Model file")->required();
    fig->add_option("--maturity-days", fc.maturity_days, "Horizon in trading days");
    fig->add_option("--sims", fc.sims, "Paths per histogram / points per scatter");
    fig->add_option("--seed", fc.seed, "Simulation seed");
    fig->add_option("--out", fc.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cal->parsed()) return cmd_calibrate(cal_csv, cal_rate, cal_out, cal_format);
        if (price->parsed()) {
            if (rate_opt->count() > 0) pc.rate = price_rate;
            return cmd_price(pc);
        }
        if (con->parsed()) return cmd_concordance(con_csv1, con_csv2, con_out, con_format);
        if (fig->parsed()) return cmd_figures(fc);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const UnsupportedOperation& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace cgp::tools
