#pragma once

#include "iomodel/core_algebra.hpp"

#include <cstddef>

namespace iomodel::detail {

struct SimplexFixedPoint {
    Vector p;
    double lambda = 0.0;  // 1^T M p at the fixed point, so M p = lambda p
    std::size_t iterations = 0;
};

/// Plain iteration of p <- (p + M p) / (1 + 1^T M p) from the barycenter; M non-negative.
SimplexFixedPoint simplex_fixed_point(const Matrix& m);

}  // namespace iomodel::detail
