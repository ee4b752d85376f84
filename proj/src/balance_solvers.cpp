#include "iomodel/balance_solvers.hpp"

#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iomodel {

namespace {

void require_nonnegative(const Matrix& m, const char* what) {
    if (!m.allFinite() || (m.array() < 0.0).any())
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite and non-negative");
}

Vector row_sums(const Matrix& m) { return m.rowwise().sum(); }

}  // namespace

double balance_residual(const Matrix& b1, const Vector& d) {
    const Vector r = row_sums(b1);
    const Vector rhs = r.cwiseProduct(d);
    const Vector lhs = b1.transpose() * d;
    const double scale = std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

double normalized_balance_residual(const Matrix& b1, const Vector& d) {
    const Vector r = row_sums(b1);
    Vector d1 = r.cwiseProduct(d);
    d1 /= d1.sum();
    const Matrix e = r.asDiagonal().inverse() * b1;
    return (e.transpose() * d1 - d1).cwiseAbs().maxCoeff();
}

BalancedVector balanced_eigenvector(const Matrix& b1) {
    if (b1.rows() != b1.cols() || b1.rows() == 0)
        throw Error(ErrorKind::InvalidArgument, "balance matrix must be square and non-empty");
    require_nonnegative(b1, "balance matrix");
    const Index n = b1.rows();
    const Vector r = row_sums(b1);
    for (Index i = 0; i < n; ++i)
        if (!(r(i) > 0.0))
            throw Error(ErrorKind::InvalidArgument, "balance matrix row " + std::to_string(i + 1) + " sums to zero");

    // Rows of e sum to one; the fixed point of the averaged map solves e^T d1 = d1.
    const Matrix et = (r.asDiagonal().inverse() * b1).transpose();
    Vector d1 = Vector::Constant(n, 1.0 / static_cast<double>(n));
    BalancedVector out;
    bool settled = false;
    for (std::size_t it = 0; it < tol::max_iterations; ++it) {
        Vector next = 0.5 * (d1 + et * d1);
        next /= next.sum();
        const double step = (next - d1).cwiseAbs().maxCoeff();
        d1 = next;
        out.iterations = it + 1;
        if (step < tol::fixed_point) {
            settled = true;
            break;
        }
    }

    Vector d = d1.cwiseQuotient(r);
    d /= d.sum();
    out.d = d;
    out.unique = is_indecomposable(b1);
    const bool solved = settled && normalized_balance_residual(b1, d) < tol::balanced_residual;
    if (!out.unique) {
        if (!solved || !strictly_positive(d))
            throw Error(ErrorKind::Decomposable, "balance matrix is decomposable and has no positive balanced vector");
        return out;
    }
    if (!solved) throw Error(ErrorKind::NoConvergence, "averaged balance map did not converge");
    return out;
}

Matrix supply_demand_factor(const Matrix& c, const Matrix& b) {
    if (c.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "C and B have different row counts");
    require_nonnegative(c, "C");
    require_nonnegative(b, "B");
    Matrix b1(c.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j) {
        const Vector target = b.col(j);
        try {
            b1.col(j) = positive_solution_family(c, target).centroid();
            continue;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotInterior) throw;
        }
        auto y = nonnegative_combination(c, target);
        if (!y) throw Error(ErrorKind::NotInCone, "column " + std::to_string(j + 1) + " of B is outside the cone of C");
        b1.col(j) = *y;
    }
    return b1;
}

double clearing_equilibrium_residual(const Matrix& c, const Matrix& b, const Vector& p) {
    const Vector value_out = b.transpose() * p;  // <b_i, p>
    const Vector value_in = c.transpose() * p;   // <C_i, p>
    Vector ratio(c.cols());
    for (Index i = 0; i < c.cols(); ++i) {
        if (!(value_in(i) > 0.0)) throw Error(ErrorKind::ZeroDenominator, "column " + std::to_string(i + 1) + " has zero cost");
        ratio(i) = value_out(i) / value_in(i);
    }
    const Vector supply = row_sums(b);
    const Vector demand = c * ratio;
    double worst = 0.0;
    for (Index k = 0; k < c.rows(); ++k)
        worst = std::max(worst, std::abs(demand(k) - supply(k)) / std::max(1.0, supply(k)));
    return worst;
}

ClearingResult clearing_equilibrium(const Matrix& c, const Matrix& b) {
    if (c.rows() != b.rows() || c.cols() != b.cols())
        throw Error(ErrorKind::InvalidArgument, "C and B must have the same shape");
    require_nonnegative(c, "C");
    require_nonnegative(b, "B");
    for (Index i = 0; i < c.cols(); ++i)
        if (!(c.col(i).sum() > 0.0))
            throw Error(ErrorKind::HypothesisViolated, "column " + std::to_string(i + 1) + " of C is zero");
    for (Index k = 0; k < c.rows(); ++k)
        if (!(c.row(k).sum() > 0.0))
            throw Error(ErrorKind::HypothesisViolated, "row " + std::to_string(k + 1) + " of C is zero");

    ClearingResult out;
    out.factor = supply_demand_factor(c, b);
    const Vector y = row_sums(out.factor);
    for (Index i = 0; i < y.size(); ++i) {
        if (!(y(i) > 0.0)) {
            out.failed_condition = "factor row " + std::to_string(i + 1) + " is zero";
            return out;
        }
    }
    try {
        out.balanced = balanced_eigenvector(out.factor).d;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Decomposable) throw;
        out.failed_condition = "balance system for the factor has no positive solution";
        return out;
    }
    auto p = nonnegative_combination(c.transpose(), out.balanced);
    if (!p) {
        out.failed_condition = "balanced vector is outside the cone of the rows of C";
        return out;
    }
    Vector prices = *p / p->sum();
    const double residual = clearing_equilibrium_residual(c, b, prices);
    if (residual >= tol::clearing) {
        out.failed_condition = "clearing residual " + std::to_string(residual) + " exceeds tolerance";
        return out;
    }
    out.prices = prices;
    return out;
}

InequalitySolution inequality_solution(const Technology& t, const Vector& b) {
    const Index n = t.n();
    if (b.size() != n) throw Error(ErrorKind::InvalidArgument, "supply vector has the wrong length");
    if (!(b.array() > 0.0).all()) throw Error(ErrorKind::InvalidArgument, "supply vector must be strictly positive");
    if (!is_indecomposable(t)) throw Error(ErrorKind::HypothesisViolated, "technology is decomposable");

    const Matrix m = b.cwiseInverse().asDiagonal() * t.a();  // m(k, i) = a_ki / b_k
    const double nd = static_cast<double>(n);
    Vector y = Vector::Constant(n, 1.0 / nd);
    std::vector<Vector> levels;
    double eps_reached = 0.0;
    for (int k = 1; k <= 8; ++k) {
        const double eps = std::pow(10.0, -k);
        bool settled = false;
        for (std::size_t it = 0; it < tol::max_iterations; ++it) {
            const Vector f = m * y;
            const double q = y.dot(f);
            Vector next = (y + y.cwiseProduct(f)).array() + eps;
            next /= 1.0 + q + nd * eps;
            const double step = (next - y).cwiseAbs().maxCoeff();
            y = next;
            if (step < tol::fixed_point) {
                settled = true;
                break;
            }
        }
        if (!settled) break;
        levels.push_back(y);
        eps_reached = eps;
        const std::size_t L = levels.size();
        if (L >= 2 && (levels[L - 1] - levels[L - 2]).cwiseAbs().maxCoeff() < tol::epsilon_successive) break;
    }
    if (levels.empty()) throw Error(ErrorKind::NoConvergence, "regularized map did not converge at the first level");

    InequalitySolution out;
    out.epsilon_reached = eps_reached;
    const Vector& last = levels.back();

    // Support components converge to positive limits; the rest shrink in proportion to epsilon.
    std::vector<Index> support;
    for (Index i = 0; i < n; ++i) {
        const bool keep = levels.size() >= 2 ? last(i) > 0.5 * levels[levels.size() - 2](i)
                                             : last(i) > 1e-6 * last.maxCoeff();
        if (keep) support.push_back(i);
    }

    const auto binding_rows = [&](const Vector& z) {
        std::vector<Index> rows;
        const Vector az = t.a() * z;
        for (Index k = 0; k < n; ++k)
            if (std::abs(b(k) - az(k)) <= tol::binding * std::max(1.0, b(k))) rows.push_back(k);
        return rows;
    };

    if (!support.empty()) {
        const Index s = static_cast<Index>(support.size());
        Matrix ass(s, s);
        Vector bs(s);
        for (Index i = 0; i < s; ++i) {
            bs(i) = b(support[static_cast<std::size_t>(i)]);
            for (Index j = 0; j < s; ++j)
                ass(i, j) = t.a()(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
        }
        Eigen::FullPivLU<Matrix> lu(ass);
        lu.setThreshold(tol::rank_pivot);
        if (lu.isInvertible()) {
            const Vector zs = lu.solve(bs);
            Vector z = Vector::Zero(n);
            for (Index i = 0; i < s; ++i) z(support[static_cast<std::size_t>(i)]) = zs(i);
            const Vector az = t.a() * z;
            bool feasible = (zs.array() > 0.0).all();
            for (Index k = 0; k < n && feasible; ++k)
                feasible = az(k) <= b(k) + tol::binding * std::max(1.0, b(k));
            if (feasible) {
                out.z = z;
                out.limit = z / z.sum();
                out.binding = binding_rows(z);
                out.exact_support = true;
                if (!out.binding.empty()) return out;
            }
        }
    }

    Vector y0 = last / last.sum();
    const double q = y0.dot(m * y0);
    if (!(q > 1e-300)) throw Error(ErrorKind::DegenerateQuadraticForm, "quadratic form vanishes at the limit");
    Vector z = y0 / q;
    const Vector az = t.a() * z;
    double scale = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k)
        if (az(k) > 0.0) scale = std::min(scale, b(k) / az(k));
    out.z = z * scale;
    out.limit = y0;
    out.binding = binding_rows(out.z);
    out.exact_support = false;
    return out;
}

SupportPartition support_partition(const Technology& t, const Vector& b, const Vector& y) {
    const Index n = t.n();
    if (b.size() != n || y.size() != n) throw Error(ErrorKind::InvalidArgument, "vectors have the wrong length");
    if ((y.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "direction must be non-negative");
    const Vector w = t.a() * y;
    SupportPartition out;
    bool any = false;
    for (Index i = 0; i < n; ++i) {
        if (w(i) > 0.0) {
            const double ratio = b(i) / w(i);
            out.scale = any ? std::min(out.scale, ratio) : ratio;
            any = true;
        }
    }
    if (!any) throw Error(ErrorKind::ZeroImage, "A y has no positive component");
    out.z = out.scale * y;
    for (Index i = 0; i < n; ++i) {
        if (w(i) > 0.0 && b(i) / w(i) <= out.scale * (1.0 + 1e-12))
            out.binding.push_back(i);
        else
            out.slack.push_back(i);
    }
    return out;
}

}  // namespace iomodel
