#pragma once

#include <vector>

namespace cgp {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, mapped to [0,1].
QuadratureRule gauss_legendre_01(int n);

}  // namespace cgp
