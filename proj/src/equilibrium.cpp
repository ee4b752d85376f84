#include "iomodel/equilibrium.hpp"

#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"
#include "simplex_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iomodel {

namespace {

void require_positive_supply(const Technology& t, const Vector& b) {
    if (b.size() != t.n()) throw Error(ErrorKind::InvalidArgument, "supply vector has the wrong length");
    if (!b.allFinite() || !(b.array() > 0.0).all())
        throw Error(ErrorKind::InvalidArgument, "supply vector must be strictly positive");
}

Matrix minor(const Matrix& a, const std::vector<Index>& idx) {
    const Index s = static_cast<Index>(idx.size());
    Matrix out(s, s);
    for (Index i = 0; i < s; ++i)
        for (Index j = 0; j < s; ++j) out(i, j) = a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    return out;
}

SupportPrices to_prices(const detail::SimplexFixedPoint& fp) {
    SupportPrices out;
    out.p = fp.p;
    out.lambda = fp.lambda;
    out.iterations = fp.iterations;
    return out;
}

}  // namespace

std::string_view to_string(PriceMode mode) { return mode == PriceMode::Support ? "support" : "consumption"; }

Vector min_ratios(const Technology& t, const Vector& b) {
    require_positive_supply(t, b);
    const Index n = t.n();
    Vector d(n);
    for (Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Index k = 0; k < n; ++k)
            if (t.a()(k, i) > 0.0) best = std::min(best, b(k) / t.a()(k, i));
        if (!std::isfinite(best)) throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(i + 1) + " of A is zero");
        d(i) = best;
    }
    return d;
}

AlphaPoint solution_from_alpha(const Technology& t, const Vector& b, const Vector& alpha) {
    const Index n = t.n();
    if (alpha.size() != n) throw Error(ErrorKind::InvalidArgument, "alpha has the wrong length");
    if ((alpha.array() < 0.0).any() || std::abs(alpha.sum() - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidArgument, "alpha must lie on the unit simplex");
    const Vector d = min_ratios(t, b);
    Index vertex = 0;
    if (alpha.maxCoeff(&vertex) == 1.0) {
        // At a vertex the minimizing row of d_i is binding by construction.
        AlphaPoint out;
        out.alpha = alpha;
        out.scale = 1.0;
        out.z = alpha.cwiseProduct(d);
        out.excess = (b - t.a() * out.z).squaredNorm();
        return out;
    }
    const Vector w = t.a() * alpha.cwiseProduct(d);

    // Guarded ratios keep the minimum continuous where a row of A(alpha o d) vanishes.
    double amin = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i)
            if (t.a()(k, i) > 0.0) amin = std::min(amin, t.a()(k, i));
    const double c0 = b.maxCoeff() / amin;
    const double upper = (c0 * d.cwiseInverse()).sum();
    const double eps = b.minCoeff() / (2.0 * upper);
    double scale = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) scale = std::min(scale, w(k) > eps ? b(k) / w(k) : b(k) / eps);

    AlphaPoint out;
    out.alpha = alpha;
    out.scale = scale;
    out.z = scale * alpha.cwiseProduct(d);
    out.excess = (b - t.a() * out.z).squaredNorm();
    return out;
}

QpResult min_excess_qp(const Technology& t, const Vector& b) {
    require_positive_supply(t, b);
    const Index n = t.n();
    const Matrix& a = t.a();

    QpResult out;
    Matrix h = 2.0 * a.transpose() * a;
    if (numerical_rank(a) < n) {
        out.regularized = true;
        h += 2.0 * 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()) * Matrix::Identity(n, n);
    }
    const Vector g = -2.0 * a.transpose() * b;

    // Constraints g_i^T z <= h_i: rows 0..n-1 are -z_j <= 0, rows n..2n-1 are (A z)_k <= b_k.
    const Index mcon = 2 * n;
    Matrix gc(mcon, n);
    gc.topRows(n) = -Matrix::Identity(n, n);
    gc.bottomRows(n) = a;
    Vector hc(mcon);
    hc.head(n).setZero();
    hc.tail(n) = b;

    Vector z = Vector::Zero(n);
    std::vector<Index> work;
    for (Index j = 0; j < n; ++j) work.push_back(j);
    std::vector<bool> active(static_cast<std::size_t>(mcon), false);
    for (Index j = 0; j < n; ++j) active[static_cast<std::size_t>(j)] = true;

    const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
    const std::size_t cap = static_cast<std::size_t>(50 * mcon * mcon + 1000);
    std::size_t zero_steps = 0;
    bool optimal = false;
    Vector lambda;
    for (std::size_t it = 0; it < cap; ++it) {
        out.iterations = it + 1;
        const Index w = static_cast<Index>(work.size());
        Matrix kkt = Matrix::Zero(n + w, n + w);
        kkt.topLeftCorner(n, n) = h;
        for (Index r = 0; r < w; ++r) {
            kkt.block(0, n + r, n, 1) = gc.row(work[static_cast<std::size_t>(r)]).transpose();
            kkt.block(n + r, 0, 1, n) = gc.row(work[static_cast<std::size_t>(r)]);
        }
        Vector rhs = Vector::Zero(n + w);
        rhs.head(n) = -(h * z + g);
        const Vector sol = kkt.fullPivLu().solve(rhs);
        const Vector p = sol.head(n);
        lambda = sol.tail(w);

        if (p.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
            Index drop = -1;
            double most = -tol::kkt * gscale;
            for (Index r = 0; r < w; ++r) {
                if (lambda(r) < most) {
                    // After repeated zero steps switch to the smallest index to break cycles.
                    if (zero_steps > static_cast<std::size_t>(mcon)) {
                        if (drop < 0 || work[static_cast<std::size_t>(r)] < work[static_cast<std::size_t>(drop)]) drop = r;
                    } else {
                        most = lambda(r);
                        drop = r;
                    }
                }
            }
            if (drop < 0) {
                optimal = true;
                break;
            }
            active[static_cast<std::size_t>(work[static_cast<std::size_t>(drop)])] = false;
            work.erase(work.begin() + drop);
            continue;
        }

        double step = 1.0;
        Index blocking = -1;
        for (Index i = 0; i < mcon; ++i) {
            if (active[static_cast<std::size_t>(i)]) continue;
            const double gp = gc.row(i).dot(p);
            if (gp > 1e-14 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
                const double ratio = std::max(0.0, (hc(i) - gc.row(i).dot(z)) / gp);
                if (ratio < step) {
                    step = ratio;
                    blocking = i;
                }
            }
        }
        z += step * p;
        zero_steps = step == 0.0 ? zero_steps + 1 : 0;
        if (blocking >= 0) {
            active[static_cast<std::size_t>(blocking)] = true;
            work.push_back(blocking);
        }
    }
    if (!optimal) throw Error(ErrorKind::SolverStall, "active-set iterations exceeded the cap");

    z = z.cwiseMax(0.0);
    out.z = z;
    out.objective = (b - a * z).squaredNorm();

    Vector grad = h * z + g;
    for (std::size_t r = 0; r < work.size(); ++r) grad += lambda(static_cast<Index>(r)) * gc.row(work[r]).transpose();
    out.kkt_residual = grad.cwiseAbs().maxCoeff() / gscale;
    return out;
}

SupportPrices prices_on_support(const Technology& t, const Vector& b, const Vector& z,
                                const std::vector<Index>& support) {
    require_positive_supply(t, b);
    const Index n = t.n();
    if (z.size() != n) throw Error(ErrorKind::InvalidArgument, "activity vector has the wrong length");
    if (support.empty()) throw Error(ErrorKind::InvalidArgument, "support is empty");
    for (Index i : support)
        if (i < 0 || i >= n) throw Error(ErrorKind::InvalidArgument, "support index out of range");
    const Matrix ai = minor(t.a(), support);
    if (!is_indecomposable(ai)) throw Error(ErrorKind::DecomposableMinor, "technology restricted to the support is decomposable");

    const Index s = static_cast<Index>(support.size());
    Vector y(s);
    for (Index i = 0; i < s; ++i) {
        const Index g = support[static_cast<std::size_t>(i)];
        if (!(z(g) > 0.0)) throw Error(ErrorKind::HypothesisViolated, "activity is zero on support row " + std::to_string(g + 1));
        y(i) = z(g) / b(g);
    }
    SupportPrices local = to_prices(detail::simplex_fixed_point(y.asDiagonal() * ai.transpose()));
    SupportPrices out = local;
    out.p = Vector::Zero(n);
    for (Index i = 0; i < s; ++i) out.p(support[static_cast<std::size_t>(i)]) = local.p(i);
    return out;
}

SupportPrices prices_from_consumption(const Technology& t, const Vector& z) {
    const Index n = t.n();
    if (z.size() != n) throw Error(ErrorKind::InvalidArgument, "activity vector has the wrong length");
    if ((z.array() < 0.0).any() || !(z.maxCoeff() > 0.0))
        throw Error(ErrorKind::HypothesisViolated, "activity vector must be non-negative and non-zero");
    const Vector b_bar = t.a() * z;
    Vector y = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        if (z(i) > 0.0) {
            if (!(b_bar(i) > 0.0))
                throw Error(ErrorKind::HypothesisViolated, "good " + std::to_string(i + 1) + " is produced but never consumed");
            y(i) = z(i) / b_bar(i);
        }
    }
    SupportPrices out = to_prices(detail::simplex_fixed_point(y.asDiagonal() * t.a().transpose()));
    // Inactive goods have p_i b_bar_i = z_i (A^T p)_i = 0; the iteration only shrinks them geometrically.
    for (Index i = 0; i < n; ++i)
        if (y(i) == 0.0) out.p(i) = 0.0;
    out.p /= out.p.sum();
    out.lambda = (y.asDiagonal() * t.a().transpose() * out.p).sum();
    if (std::abs(out.lambda - 1.0) > tol::clearing)
        throw Error(ErrorKind::HypothesisViolated, "no price vector clears the consumption vector");
    return out;
}

bool no_equilibrium_certificate(const Vector& z, const std::vector<Index>& slack) {
    if (z.size() == 0) return false;
    const double cut = tol::positive * std::max(z.cwiseAbs().maxCoeff(), 1e-300);
    return std::any_of(slack.begin(), slack.end(), [&](Index j) { return z(j) > cut; });
}

double excess_supply(const Vector& b, const Vector& b_bar, const Vector& p_u) {
    if (b.size() != b_bar.size() || b.size() != p_u.size())
        throw Error(ErrorKind::InvalidArgument, "vectors have different lengths");
    const double total = b.dot(p_u);
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroValue, "supply has zero value at these prices");
    return (b - b_bar).dot(p_u) / total;
}

Vector extended_prices(const Technology& t, const Vector& p, const std::vector<Index>& slack) {
    Vector p_u = p;
    for (Index j : slack) {
        const double cost = t.a().col(j).dot(p);
        p_u(j) = cost > 0.0 ? cost : 1.0;
    }
    return p_u;
}

std::vector<Index> binding_rows(const Vector& b, const Vector& b_bar) {
    std::vector<Index> rows;
    for (Index k = 0; k < b.size(); ++k)
        if (std::abs(b(k) - b_bar(k)) <= tol::binding * std::max(1.0, b(k))) rows.push_back(k);
    return rows;
}

EquilibriumState assemble_equilibrium(const Technology& t, const Vector& b) {
    require_positive_supply(t, b);
    if (!is_indecomposable(t)) throw Error(ErrorKind::HypothesisViolated, "technology is decomposable");
    const Index n = t.n();

    EquilibriumState st;
    const QpResult qp = min_excess_qp(t, b);
    st.z = qp.z;
    st.objective = qp.objective;
    st.b_bar = t.a() * st.z;
    st.binding = binding_rows(b, st.b_bar);
    for (Index k = 0; k < n; ++k)
        if (std::find(st.binding.begin(), st.binding.end(), k) == st.binding.end()) st.slack.push_back(k);
    st.no_equilibrium = no_equilibrium_certificate(st.z, st.slack);

    const double cut = tol::positive * std::max(st.z.cwiseAbs().maxCoeff(), 1e-300);
    const bool active_on_support =
        std::all_of(st.binding.begin(), st.binding.end(), [&](Index i) { return st.z(i) > cut; });
    const bool support_mode = !st.binding.empty() && !st.no_equilibrium && active_on_support &&
                              is_indecomposable(minor(t.a(), st.binding));
    if (support_mode) {
        Vector z = st.z;
        for (Index j : st.slack) z(j) = 0.0;
        st.p = prices_on_support(t, b, z, st.binding).p;
        st.p_u = extended_prices(t, st.p, st.slack);
        st.mode = PriceMode::Support;
    } else {
        st.p = prices_from_consumption(t, st.z).p;
        st.p_u = st.p;
        st.mode = PriceMode::Consumption;
    }
    st.excess_ratio = excess_supply(b, st.b_bar, st.p_u);
    return st;
}

}  // namespace iomodel
