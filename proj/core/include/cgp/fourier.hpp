#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cgp/garch.hpp"

namespace cgp {

using CharacteristicFn = std::function<std::complex<double>(double)>;
/// u -> log E[e^{u X}] for real u near 0; used to size the inversion grid.
using CumulantFn = std::function<double(double)>;

/// Discretization of the inversion integrals. Zero-valued fields are filled
/// by resolve_inversion_config; build_marginal and the pointwise transforms
/// require a fully resolved config.
struct InversionConfig {
    double u_max = 0.0;  ///< frequency truncation point (> 0)
    int n_freq = 0;      ///< midpoint nodes on [0, u_max] (>= 16)
    double x_lo = 0.0;   ///< left grid bound
    double x_hi = 0.0;   ///< right grid bound (x_lo < x_hi)
    int n_grid = 0;      ///< spatial grid points (>= 64)

    double cf_tail_tol = 1e-12;  ///< |cf| level that defines the auto u_max
    double u_max_cap = 1e6;      ///< ceiling for the auto u_max search
    double sigma_mult = 12.0;    ///< auto bounds are mean +- sigma_mult * stddev

    bool resolved() const noexcept {
        return u_max > 0.0 && n_freq > 0 && x_lo < x_hi && n_grid > 0;
    }
};

/// Fills the unset fields of `overrides`: grid bounds from the mean and
/// variance implied by central finite differences of the cumulant at 0,
/// u_max from the decay of |cf|, and n_freq from the alias-free spatial
/// period implied by the grid extent.
InversionConfig resolve_inversion_config(const CharacteristicFn& cf, const CumulantFn& cumulant,
                                         InversionConfig overrides = {});

/// Density by inverse transform, (1/pi) * integral of Re[e^{-iux} cf(u)] over
/// [0, u_max], midpoint rule. Values in [-1e-8, 0) are clamped to 0; a larger
/// negative value is returned as-is so callers can detect a broken inversion.
double density_at(const CharacteristicFn& cf, double x, const InversionConfig& cfg);

/// CDF by inverse transform, 1/2 - (1/pi) * integral of
/// Re[e^{-iux} cf(u) / (iu)], clamped to [0,1]. Midpoint nodes never hit the
/// removable singularity at u = 0.
double cdf_at(const CharacteristicFn& cf, double x, const InversionConfig& cfg);

/// Provenance of a law built from GARCH dynamics.
struct HnLawMetadata {
    GarchParams params;
    MarketContext market;
    int n_steps = 0;
};

/// Tabulated conditional distribution of a log return. Immutable after
/// construction; safe for concurrent reads. The CDF is interpolated with a
/// monotone cubic (slopes clamped Fritsch-Carlson style against the
/// tabulated density), the quantile inverts it by bisection.
class MarginalLaw {
public:
    MarginalLaw(std::vector<double> x, std::vector<double> cdf, std::vector<double> pdf,
                double repair_magnitude, std::optional<double> log_mgf1,
                std::optional<HnLawMetadata> metadata);

    MarginalLaw(const MarginalLaw& other);
    MarginalLaw& operator=(const MarginalLaw& other);

    const std::vector<double>& x_grid() const noexcept { return x_; }
    const std::vector<double>& cdf_values() const noexcept { return cdf_; }
    const std::vector<double>& pdf_values() const noexcept { return pdf_; }

    double cdf(double x) const;
    double pdf(double x) const;

    /// Inverse CDF for p in (0,1); |cdf(result) - p| < 1e-8 inside the grid.
    /// p beyond the tabulated range clamps to the grid edge (counted, see
    /// quantile_clamp_count).
    double quantile(double p) const;

    /// Largest downward monotonicity violation repaired at construction.
    double repair_magnitude() const noexcept { return repair_magnitude_; }

    /// log E[e^X] when the builder knew it; pricing uses it to cross-check
    /// the martingale identity.
    std::optional<double> log_mgf1() const noexcept { return log_mgf1_; }

    const std::optional<HnLawMetadata>& metadata() const noexcept { return metadata_; }

    std::uint64_t quantile_clamp_count() const noexcept {
        return clamp_count_.load(std::memory_order_relaxed);
    }

private:
    std::vector<double> x_;
    std::vector<double> cdf_;
    std::vector<double> pdf_;
    std::vector<double> slope_;  // monotonicity-clamped Hermite slopes
    double repair_magnitude_ = 0.0;
    std::optional<double> log_mgf1_;
    std::optional<HnLawMetadata> metadata_;
    mutable std::atomic<std::uint64_t> clamp_count_{0};
};

/// Tabulates cdf_at and density_at of `cf` on the config grid, repairs tiny
/// CDF non-monotonicities by running maximum, and enforces the law
/// invariants. Throws NumericalError when the repair exceeds 1e-4, when the
/// grid misses distribution mass (first CDF value > 0.001 or last < 0.999),
/// or when the density does not integrate to 1 within 5e-3.
MarginalLaw build_marginal(const CharacteristicFn& cf, const InversionConfig& cfg,
                           std::optional<double> log_mgf1 = std::nullopt,
                           std::optional<HnLawMetadata> metadata = std::nullopt);

/// Conditional law of the n_steps log return under the supplied parameters
/// (use risk-neutral parameters for pricing). Auto-resolves the grid unless
/// overridden.
MarginalLaw hn_marginal_law(const GarchParams& p, const MarketContext& m, int n_steps,
                            InversionConfig overrides = {});

inline double quantile(const MarginalLaw& law, double p) { return law.quantile(p); }

}  // namespace cgp
