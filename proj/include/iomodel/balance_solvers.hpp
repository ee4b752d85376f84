#pragma once

#include "iomodel/core_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iomodel {

/// Positive d on the simplex with sum_k b(k, i) d_k = (sum_s b(i, s)) d_i for every i.
struct BalancedVector {
    Vector d;
    bool unique = true;          // false when the matrix is decomposable and d is one of many
    std::size_t iterations = 0;
};

BalancedVector balanced_eigenvector(const Matrix& b1);

/// Largest violation of the balance system, relative to the row-sum weights.
double balance_residual(const Matrix& b1, const Vector& d);
/// Same system after rescaling by the row sums, where the rows of the weight matrix sum to one.
double normalized_balance_residual(const Matrix& b1, const Vector& d);

/// Non-negative B1 with B = C * B1; interior columns use the centroid of their solution family.
Matrix supply_demand_factor(const Matrix& c, const Matrix& b);

struct ClearingResult {
    std::optional<Vector> prices;
    std::string failed_condition;  // empty when prices exist
    Matrix factor;                 // B1
    Vector balanced;               // D
};

ClearingResult clearing_equilibrium(const Matrix& c, const Matrix& b);

/// Largest |sum_i c_ki <b_i,p>/<C_i,p> - sum_i b_ki| over k.
double clearing_equilibrium_residual(const Matrix& c, const Matrix& b, const Vector& p);

struct InequalitySolution {
    Vector z;
    Vector limit;                // the epsilon -> 0 limit on the simplex
    std::vector<Index> binding;  // rows with (A z)_k = b_k
    double epsilon_reached = 0.0;
    bool exact_support = false;  // z solved exactly on the identified support
};

/// z >= 0 with A z <= b and at least one binding row, via the regularized simplex map.
InequalitySolution inequality_solution(const Technology& t, const Vector& b);

struct SupportPartition {
    double scale = 0.0;  // a = min b_i / (A y)_i over rows with (A y)_i > 0
    Vector z;            // a * y
    std::vector<Index> binding;
    std::vector<Index> slack;
};

SupportPartition support_partition(const Technology& t, const Vector& b, const Vector& y);

}  // namespace iomodel
