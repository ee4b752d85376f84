#include "iomodel/sustainability.hpp"

#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"
#include "simplex_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iomodel {

namespace {

// Limit of (A + eps E)^-1 x as eps -> 0. The eps sequence 1e-4 .. 1e-10 is tried first; when rounding
// (of order u / eps) swamps it before it settles, the limit is taken in closed form as A y with A^2 y = x,
// the solution of A b1 = x lying in the range of A.
Vector regularized_preimage(const Matrix& a, const Vector& x) {
    const Index n = a.rows();
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    Vector previous;
    for (int k = 4; k <= 10; ++k) {
        const double eps = std::pow(10.0, -k);
        Vector current = (a + eps * Matrix::Identity(n, n)).partialPivLu().solve(x);
        if (previous.size() &&
            (current - previous).cwiseAbs().maxCoeff() < tol::singular_successive * std::max(1.0, current.cwiseAbs().maxCoeff()))
            return current;
        previous = current;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a * a);
    cod.setThreshold(tol::rank_pivot);
    const Vector limit = a * cod.solve(x);
    if ((a * limit - x).cwiseAbs().maxCoeff() < tol::singular_successive * scale) return limit;
    throw Error(ErrorKind::SingularUnresolved, "regularized solutions of A b1 = x do not stabilize");
}

}  // namespace

SustainabilityVerdict check_sustainable(const Technology& t, const Vector& x) {
    const Index n = t.n();
    if (x.size() != n) throw Error(ErrorKind::InvalidArgument, "output vector has the wrong length");
    if ((x.array() < 0.0).any() || !(x.maxCoeff() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "output vector must be non-negative and non-zero");
    if (!is_productive(t)) throw Error(ErrorKind::NotProductive, "spectral radius is not below one");
    if (!is_indecomposable(t)) throw Error(ErrorKind::HypothesisViolated, "technology is decomposable");

    const Matrix& a = t.a();
    const Matrix leontief = Matrix::Identity(n, n) - a;
    SustainabilityVerdict v;
    if (numerical_rank(a) == n) {
        v.b1 = a.fullPivLu().solve(x);
    } else {
        v.regularized = true;
        v.b1 = regularized_preimage(a, x);
    }
    v.alpha = leontief * v.b1;
    v.sustainable = strictly_positive(v.b1) && strictly_positive(v.alpha);

    if (!v.sustainable && v.regularized) {
        // A b1 = x has many solutions; test x against the cone spanned by A (E - A)^-1 directly.
        const Matrix k = a * leontief.partialPivLu().inverse();
        try {
            v.alpha = positive_solution_family(k, x).centroid();
            v.b1 = leontief.partialPivLu().solve(v.alpha);
            v.sustainable = strictly_positive(v.b1) && strictly_positive(v.alpha);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotInterior) throw;
        }
    }

    if (!v.sustainable) {
        v.reason = strictly_positive(v.b1) ? "surplus (E - A) b1 is not strictly positive"
                                           : "pre-tax output b1 is not strictly positive";
        return v;
    }

    // u(i, k) = a_ik b1_i / (A b1)_i; the transpose drives the simplex map on d.
    const Vector ab1 = a * v.b1;
    const Vector gain = v.b1.cwiseQuotient(ab1);
    const Matrix u = gain.asDiagonal() * a;
    const detail::SimplexFixedPoint fp = detail::simplex_fixed_point(u.transpose());
    Vector p = gain.cwiseProduct(fp.p);
    p /= p.sum();
    v.prices = p;
    v.margins = p - a.transpose() * p;
    return v;
}

Vector clearing_residual(const Technology& t, const Vector& x, const Vector& p) {
    const Index n = t.n();
    if (x.size() != n || p.size() != n) throw Error(ErrorKind::InvalidArgument, "vectors have the wrong length");
    const Vector cost = t.a().transpose() * p;
    Vector flow(n);
    for (Index i = 0; i < n; ++i) {
        const double value = x(i) * p(i);
        if (value == 0.0) {
            flow(i) = 0.0;
            continue;
        }
        if (!(cost(i) > 0.0)) throw Error(ErrorKind::ZeroDenominator, "good " + std::to_string(i + 1) + " has zero input cost");
        flow(i) = value / cost(i);
    }
    return t.a() * flow - x;
}

}  // namespace iomodel
