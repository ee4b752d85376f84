#include "iomodel/core_algebra.hpp"

#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iomodel {

namespace {

// Coordinates in the basis formed by independent generators completed with an orthonormal
// complement of their span; row i of the inverse basis is the biorthogonal vector f_i.
class Biorthogonal {
public:
    explicit Biorthogonal(const Matrix& generators) : m_(generators.cols()) {
        const Index n = generators.rows();
        Matrix basis(n, n);
        basis.leftCols(m_) = generators;
        if (m_ < n) {
            Eigen::HouseholderQR<Matrix> qr(generators);
            Matrix q = qr.householderQ();
            basis.rightCols(n - m_) = q.rightCols(n - m_);
        }
        lu_.compute(basis);
    }

    Vector coordinates(const Vector& v) const { return lu_.solve(v); }
    Index generator_count() const { return m_; }

private:
    Index m_;
    Eigen::PartialPivLU<Matrix> lu_;
};

ConeMembership classify(const Vector& coords, Index m, const Vector& b) {
    ConeMembership out;
    const double bscale = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
    if (bscale == 0.0) {
        out.status = ConeStatus::Boundary;
        out.coefficients = Vector::Zero(m);
        return out;
    }
    const Index n = coords.size();
    if (m < n && coords.tail(n - m).cwiseAbs().maxCoeff() > tol::positive * bscale) {
        out.status = ConeStatus::Outside;
        return out;
    }
    Vector head = coords.head(m);
    const double scale = head.cwiseAbs().maxCoeff();
    if ((head.array() > tol::positive * scale).all()) {
        out.status = ConeStatus::Interior;
    } else if ((head.array() >= -tol::positive * scale).all()) {
        out.status = ConeStatus::Boundary;
    } else {
        out.status = ConeStatus::Outside;
        return out;
    }
    out.coefficients = head;
    return out;
}

// Calls visit(subset) for each k-subset of {0..n-1} in lexicographic order until it returns true.
template <class Visit>
bool for_each_subset(Index n, Index k, Visit&& visit) {
    if (k > n || k <= 0) return false;
    std::vector<Index> idx(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (visit(idx)) return true;
        Index pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) return false;
        ++idx[static_cast<std::size_t>(pos)];
        for (Index j = pos + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

Matrix select_columns(const Matrix& m, const std::vector<Index>& cols) {
    Matrix out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
    return out;
}

void require_square_nonnegative(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidArgument, "technology matrix must be square");
    if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "technology matrix has non-finite entries");
    if ((a.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "technology matrix has negative entries");
}

std::vector<bool> reachable(const Matrix& a, bool forward) {
    const Index n = a.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        Index i = stack.back();
        stack.pop_back();
        for (Index k = 0; k < n; ++k) {
            const double w = forward ? a(k, i) : a(i, k);
            if (w > 0.0 && !seen[static_cast<std::size_t>(k)]) {
                seen[static_cast<std::size_t>(k)] = true;
                stack.push_back(k);
            }
        }
    }
    return seen;
}

}  // namespace

Technology::Technology(Matrix a, Units units) : a_(std::move(a)), units_(units) {
    if (a_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "technology matrix is empty");
    require_square_nonnegative(a_);
}

std::string_view to_string(Units units) { return units == Units::Natural ? "natural" : "value"; }

std::string_view to_string(ConeStatus status) {
    switch (status) {
    case ConeStatus::Interior: return "interior";
    case ConeStatus::Boundary: return "boundary";
    case ConeStatus::Outside: return "outside";
    }
    return "outside";
}

bool is_indecomposable(const Matrix& a) {
    require_square_nonnegative(a);
    if (a.rows() <= 1) return true;
    auto fwd = reachable(a, true);
    auto bwd = reachable(a, false);
    return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

bool is_indecomposable(const Technology& t) { return is_indecomposable(t.a()); }

bool indecomposable_by_power(const Matrix& a) {
    require_square_nonnegative(a);
    const Index n = a.rows();
    // Only the sign pattern matters; work on the 0/1 pattern to avoid underflow.
    Matrix step = Matrix::Identity(n, n);
    step += (a.array() > 0.0).cast<double>().matrix();
    Matrix acc = Matrix::Identity(n, n);
    for (Index k = 0; k + 1 < n; ++k) {
        acc = acc * step;
        acc = (acc.array() > 0.0).cast<double>().matrix();
    }
    return (acc.array() > 0.0).all();
}

double spectral_radius(const Matrix& a) {
    const Index n = a.rows();
    if (n == 0) return 0.0;
    const Matrix m = a.cwiseAbs() + Matrix::Identity(n, n);
    Vector v = Vector::Constant(n, 1.0);
    double previous = -1.0;
    for (std::size_t it = 0; it < tol::max_iterations; ++it) {
        Vector w = m * v;
        const double norm = w.maxCoeff();
        // Collatz-Wielandt bounds bracket the Perron root of m while v stays positive.
        const Vector ratio = w.cwiseQuotient(v);
        const double upper = ratio.maxCoeff();
        const double lower = ratio.minCoeff();
        if (upper - lower <= tol::power_relative * upper) return 0.5 * (upper + lower) - 1.0;
        if (previous > 0.0 && std::abs(norm - previous) <= tol::power_relative * norm) return norm - 1.0;
        previous = norm;
        v = w / norm;
    }
    throw Error(ErrorKind::NoConvergence, "power iteration for the spectral radius did not settle");
}

bool productive_by_spectrum(const Matrix& a) { return spectral_radius(a) < 1.0; }

bool productive_by_solve(const Matrix& a) {
    const Index n = a.rows();
    Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - a);
    lu.setThreshold(tol::rank_pivot);
    if (!lu.isInvertible()) return false;
    Vector x = lu.solve(Vector::Ones(n));
    return (x.array() > 0.0).all();
}

bool is_productive(const Technology& t) {
    return productive_by_spectrum(t.a()) && productive_by_solve(t.a());
}

Vector leontief_solve(const Technology& t, const Vector& c) {
    if (c.size() != t.n()) throw Error(ErrorKind::InvalidArgument, "demand vector has the wrong length");
    if ((c.array() < 0.0).any()) throw Error(ErrorKind::InvalidArgument, "demand vector has negative entries");
    if (!is_productive(t)) throw Error(ErrorKind::NotProductive, "spectral radius is not below one");
    const Index n = t.n();
    Vector x = (Matrix::Identity(n, n) - t.a()).partialPivLu().solve(c);
    return x.cwiseMax(0.0);
}

Index numerical_rank(const Matrix& m) {
    if (m.size() == 0) return 0;
    Eigen::FullPivLU<Matrix> lu(m);
    lu.setThreshold(tol::rank_pivot);
    return lu.rank();
}

bool strictly_positive(const Vector& v) {
    if (v.size() == 0) return false;
    const double scale = v.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return false;
    return ((v / scale).array() > tol::positive).all();
}

ConeMembership cone_membership(const Matrix& generators, const Vector& b) {
    if (generators.rows() != b.size())
        throw Error(ErrorKind::InvalidArgument, "generators and target have different dimensions");
    const Index m = generators.cols();
    if (m == 0 || numerical_rank(generators) < m)
        throw Error(ErrorKind::DegenerateGenerators, "generators are linearly dependent");
    Biorthogonal bio(generators);
    return classify(bio.coordinates(b), m, b);
}

std::optional<Vector> nonnegative_combination(const Matrix& generators, const Vector& b) {
    const Index m = generators.cols();
    if (generators.rows() != b.size())
        throw Error(ErrorKind::InvalidArgument, "generators and target have different dimensions");
    if (b.size() == 0 || b.cwiseAbs().maxCoeff() == 0.0) return Vector::Zero(m);
    const Index r = numerical_rank(generators);
    std::optional<Vector> found;
    for (Index k = 1; k <= r && !found; ++k) {
        for_each_subset(m, k, [&](const std::vector<Index>& cols) {
            Matrix g = select_columns(generators, cols);
            if (numerical_rank(g) < k) return false;
            ConeMembership cm = cone_membership(g, b);
            if (cm.status == ConeStatus::Outside) return false;
            Vector y = Vector::Zero(m);
            for (std::size_t j = 0; j < cols.size(); ++j)
                y(cols[j]) = std::max(0.0, cm.coefficients(static_cast<Index>(j)));
            found = y;
            return true;
        });
    }
    return found;
}

Index SolutionFamily::columns() const {
    return static_cast<Index>(basis_columns.size() + free_columns.size());
}

bool SolutionFamily::admissible(const Vector& gamma) const {
    if (gamma.size() != static_cast<Index>(generators.size())) return false;
    if (std::abs(gamma.sum() - 1.0) > 1e-12) return false;
    if (gamma.size() > 1 && !(gamma.tail(gamma.size() - 1).array() > 0.0).all()) return false;
    if (free_columns.empty()) return true;
    Vector load = free_coordinates * step.cwiseProduct(gamma.tail(gamma.size() - 1));
    return (load.array() < psi_coordinates.array()).all();
}

Vector SolutionFamily::combine(const Vector& gamma) const {
    if (!admissible(gamma)) throw Error(ErrorKind::InvalidArgument, "weights are not admissible for this family");
    Vector y = Vector::Zero(columns());
    for (std::size_t i = 0; i < generators.size(); ++i) y += gamma(static_cast<Index>(i)) * generators[i];
    return y;
}

Vector SolutionFamily::centroid_weights() const {
    const Index k = static_cast<Index>(generators.size());
    return Vector::Constant(k, 1.0 / static_cast<double>(k));
}

Vector SolutionFamily::centroid() const { return combine(centroid_weights()); }

SolutionFamily positive_solution_family(const Matrix& c, const Vector& psi) {
    if (c.rows() != psi.size()) throw Error(ErrorKind::InvalidArgument, "columns and target have different dimensions");
    const Index l = c.cols();
    const Index r = numerical_rank(c);
    if (r == 0) throw Error(ErrorKind::NotInterior, "column set has rank zero");

    std::vector<Index> chosen;
    for_each_subset(l, r, [&](const std::vector<Index>& cols) {
        Matrix g = select_columns(c, cols);
        if (numerical_rank(g) < r) return false;
        if (cone_membership(g, psi).status != ConeStatus::Interior) return false;
        chosen = cols;
        return true;
    });
    if (chosen.empty())
        throw Error(ErrorKind::NotInterior, "no set of independent columns holds the target in its interior");

    SolutionFamily fam;
    fam.rank = r;
    fam.basis_columns = chosen;
    for (Index i = 0; i < l; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) fam.free_columns.push_back(i);

    Biorthogonal bio(select_columns(c, chosen));
    fam.psi_coordinates = bio.coordinates(psi).head(r);

    const Index nfree = static_cast<Index>(fam.free_columns.size());
    fam.free_coordinates.resize(r, nfree);
    fam.step.resize(nfree);

    Vector base = Vector::Zero(l);
    for (Index k = 0; k < r; ++k) base(chosen[static_cast<std::size_t>(k)]) = fam.psi_coordinates(k);
    fam.generators.push_back(base);

    for (Index j = 0; j < nfree; ++j) {
        const Index col = fam.free_columns[static_cast<std::size_t>(j)];
        Vector coords = bio.coordinates(c.col(col)).head(r);
        const double cut = 1e-12 * std::max(coords.cwiseAbs().maxCoeff(), 1e-300);
        for (Index k = 0; k < r; ++k)
            if (std::abs(coords(k)) <= cut) coords(k) = 0.0;
        fam.free_coordinates.col(j) = coords;

        double ystar = 1.0;
        bool any = false;
        for (Index k = 0; k < r; ++k) {
            if (coords(k) > 0.0) {
                const double ratio = fam.psi_coordinates(k) / coords(k);
                ystar = any ? std::min(ystar, ratio) : ratio;
                any = true;
            }
        }
        fam.step(j) = ystar;

        Vector z = Vector::Zero(l);
        for (Index k = 0; k < r; ++k)
            z(chosen[static_cast<std::size_t>(k)]) = std::max(0.0, fam.psi_coordinates(k) - coords(k) * ystar);
        z(col) = ystar;
        fam.generators.push_back(z);
    }
    return fam;
}

}  // namespace iomodel
