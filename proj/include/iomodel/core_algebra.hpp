#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace iomodel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class Units { Natural, Value };

/// Square non-negative input coefficient matrix; a(k, i) is the input of good k per unit of good i.
class Technology {
public:
    explicit Technology(Matrix a, Units units = Units::Natural);

    Index n() const { return a_.rows(); }
    const Matrix& a() const { return a_; }
    Units units() const { return units_; }

private:
    Matrix a_;
    Units units_;
};

std::string_view to_string(Units units);

// Graph test: the directed graph with an edge i -> k whenever a(k, i) > 0 is strongly connected.
bool is_indecomposable(const Matrix& a);
bool is_indecomposable(const Technology& t);
/// Cross-check: (E + A)^(n-1) is strictly positive.
bool indecomposable_by_power(const Matrix& a);

/// Perron root by power iteration on |A| + E, shifted back.
double spectral_radius(const Matrix& a);

/// Spectral radius below one and the Leontief inverse applied to the unit vector is positive.
bool is_productive(const Technology& t);
bool productive_by_spectrum(const Matrix& a);
bool productive_by_solve(const Matrix& a);

/// x with (E - A) x = c.
Vector leontief_solve(const Technology& t, const Vector& c);

Index numerical_rank(const Matrix& m);

/// max_i |v_i| > 0 and every v_i / max|v| exceeds the positivity threshold.
bool strictly_positive(const Vector& v);

enum class ConeStatus { Interior, Boundary, Outside };
std::string_view to_string(ConeStatus status);

struct ConeMembership {
    ConeStatus status = ConeStatus::Outside;
    Vector coefficients;  // <f_i, b> for the generators, empty when Outside
};

/// Generators are the columns of `generators` and must be linearly independent.
ConeMembership cone_membership(const Matrix& generators, const Vector& b);

/// Some y >= 0 with generators * y = b, scanning independent column subsets.
std::optional<Vector> nonnegative_combination(const Matrix& generators, const Vector& b);

/// Every strictly positive y with C y = psi, parametrized by convex weights.
struct SolutionFamily {
    Index rank = 0;
    std::vector<Index> basis_columns;  // the r independent columns whose cone holds psi in its interior
    std::vector<Index> free_columns;
    Vector psi_coordinates;            // <psi, f_k>, k < r
    Matrix free_coordinates;           // r x (l - r), entry (k, j) = <C_free[j], f_k>
    Vector step;                       // largest admissible weight per free column
    std::vector<Vector> generators;    // base point first, then one per free column

    Index columns() const;
    /// Weights: one per generator, summing to one, positive on the free part,
    /// and keeping every basis coordinate positive.
    bool admissible(const Vector& gamma) const;
    Vector combine(const Vector& gamma) const;
    Vector centroid_weights() const;
    Vector centroid() const;
};

SolutionFamily positive_solution_family(const Matrix& c, const Vector& psi);

}  // namespace iomodel
