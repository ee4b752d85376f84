#include "simplex_map.hpp"

#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"

namespace iomodel::detail {

SimplexFixedPoint simplex_fixed_point(const Matrix& m) {
    const Index n = m.rows();
    Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    SimplexFixedPoint out;
    for (std::size_t it = 0; it < tol::max_iterations; ++it) {
        const Vector mp = m * p;
        Vector next = (p + mp) / (1.0 + mp.sum());
        const double step = (next - p).cwiseAbs().maxCoeff();
        p = next;
        out.iterations = it + 1;
        if (step < tol::fixed_point) {
            p /= p.sum();
            out.p = p;
            out.lambda = (m * p).sum();
            return out;
        }
    }
    throw Error(ErrorKind::NoConvergence, "simplex price map did not converge");
}

}  // namespace iomodel::detail
