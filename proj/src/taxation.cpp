#include "iomodel/taxation.hpp"

#include "iomodel/balance_solvers.hpp"
#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iomodel {

namespace {

Vector column_sums(const Technology& t) { return t.a().colwise().sum().transpose(); }

// The balanced vector of sum_i abar_ki V_i = (sum_s abar_sk) V_k.
Vector balanced_output(const Technology& abar) { return balanced_eigenvector(abar.a().transpose()).d; }

}  // namespace

Vector TaxFamily::pi(double c0) const { return Vector::Ones(intensity.size()) - c0 * intensity; }

TaxFamily tax_family(const Technology& abar, const Vector& x, const Vector& delta) {
    const Index n = abar.n();
    if (x.size() != n || delta.size() != n) throw Error(ErrorKind::InvalidArgument, "vectors have the wrong length");
    if (!(x.array() > 0.0).all()) throw Error(ErrorKind::InvalidArgument, "gross output must be strictly positive");
    const Vector cs = column_sums(abar);
    for (Index i = 0; i < n; ++i) {
        const double expected = 1.0 - delta(i) / x(i);
        if (std::abs(cs(i) - expected) > tol::table_balance)
            throw Error(ErrorKind::BalanceInconsistent,
                        "column " + std::to_string(i + 1) + " sums to " + std::to_string(cs(i)) + " but value added implies " +
                            std::to_string(expected));
    }
    TaxFamily f;
    f.v0 = balanced_output(abar);
    f.intensity = f.v0.cwiseQuotient(x).cwiseProduct(Vector::Ones(n) - delta.cwiseQuotient(x));
    Index arg = 0;
    const double peak = f.intensity.maxCoeff(&arg);
    if (!(peak > 0.0)) throw Error(ErrorKind::BalanceInconsistent, "value technology has no intermediate inputs");
    f.c0_max = 1.0 / peak;
    f.best_pi = f.pi(f.c0_max);
    f.best_pi(arg) = 0.0;
    return f;
}

double taxed_clearing_residual(const Technology& abar, const Vector& x, const Vector& pi) {
    const Vector cs = column_sums(abar);
    const Vector kept = (Vector::Ones(pi.size()) - pi).cwiseProduct(x);
    const Vector lhs = abar.a() * kept.cwiseQuotient(cs);
    return (lhs - kept).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
}

TaxBoundsReport tax_bounds(const Vector& pi, const Vector& ratios, const std::optional<Technology>& abar) {
    const Index n = pi.size();
    if (ratios.size() != n || n == 0) throw Error(ErrorKind::InvalidArgument, "rates and ratios must have the same non-zero length");
    if (!(ratios.array() < 1.0).all()) throw Error(ErrorKind::InvalidArgument, "value-added ratios must be below one");

    TaxBoundsReport r;
    const Vector kept = Vector::Ones(n) - pi;
    const Vector cost_share = Vector::Ones(n) - ratios;
    r.has_zero_rate = (pi.array() <= 0.0).any();
    r.lower = std::max(0.0, kept.maxCoeff());
    const double rate_cap = kept.cwiseQuotient(cost_share).minCoeff();
    const double share_cap = 1.0 / cost_share.maxCoeff();
    r.upper = std::min(rate_cap, share_cap);
    r.upper_closed = rate_cap < share_cap;
    r.feasible = r.lower < r.upper;
    if (!r.feasible) return r;
    r.witness = 0.5 * (r.lower + r.upper);

    if (abar) {
        if (abar->n() != n) throw Error(ErrorKind::InvalidArgument, "technology has the wrong size");
        const Vector cs = column_sums(*abar);
        if ((cs - cost_share).cwiseAbs().maxCoeff() > tol::table_balance)
            throw Error(ErrorKind::BalanceInconsistent, "ratios do not match the column sums of the technology");
        const Vector x0 = balanced_output(*abar);
        const Vector x = cs.cwiseQuotient(kept).cwiseProduct(x0);
        r.reconstructed_x = x;
        r.final_y = x - abar->a() * x;
    }
    return r;
}

ValueAddedTax value_added_tax(const Technology& abar) {
    const Vector cs = column_sums(abar);
    for (Index i = 0; i < cs.size(); ++i)
        if (!(cs(i) < 1.0))
            throw Error(ErrorKind::ColumnSumViolation,
                        "column " + std::to_string(i + 1) + " sums to " + std::to_string(cs(i)) + ", not below one");
    ValueAddedTax v;
    v.pi = Vector::Ones(cs.size()) - cs;
    v.x0 = balanced_output(abar);
    v.base = v.pi.cwiseProduct(v.x0);
    return v;
}

double fit_scale(const Vector& y, const Vector& base) {
    if (y.size() != base.size()) throw Error(ErrorKind::InvalidArgument, "vectors have different lengths");
    const double denom = base.squaredNorm();
    if (!(denom > 0.0)) throw Error(ErrorKind::ZeroBase, "base vector is zero");
    return y.dot(base) / denom;
}

RealTaxVector real_tax_vector(const Vector& tax_revenue, const Vector& value_added) {
    if (tax_revenue.size() != value_added.size()) throw Error(ErrorKind::InvalidArgument, "vectors have different lengths");
    RealTaxVector out;
    out.pi.resize(value_added.size());
    for (Index i = 0; i < value_added.size(); ++i) {
        if (value_added(i) == 0.0)
            throw Error(ErrorKind::ZeroValueAdded, "sector " + std::to_string(i + 1) + " has zero value added");
        out.pi(i) = tax_revenue(i) / value_added(i);
        if (!(out.pi(i) > 0.0 && out.pi(i) < 1.0)) out.outside_unit_interval.push_back(i);
    }
    return out;
}

}  // namespace iomodel
