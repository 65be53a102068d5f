#pragma once

#include <functional>
#include <vector>

namespace cgp {

struct NelderMeadOptions {
    int max_iter = 20000;
    double f_tol = 1e-10;  ///< stop when the simplex f-spread falls below this
    double x_tol = 1e-9;   ///< ... and the largest edge falls below this
};

struct NelderMeadResult {
    std::vector<double> x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization. `steps` gives the initial simplex edge per
/// coordinate. Infinite objective values are tolerated (treated as very bad
/// vertices), which lets callers encode infeasibility as +inf.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& start,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& opt = {});

}  // namespace cgp
