#pragma once

#include "iomodel/core_algebra.hpp"

#include <string_view>
#include <vector>

namespace iomodel {

/// d_i = min over k with a_ki > 0 of b_k / a_ki.
Vector min_ratios(const Technology& t, const Vector& b);

struct AlphaPoint {
    Vector alpha;
    double scale = 0.0;  // a(alpha) >= 1
    Vector z;            // scale * alpha o d
    double excess = 0.0; // sum_k (b_k - (A z)_k)^2
};

/// Alpha must lie on the unit simplex.
AlphaPoint solution_from_alpha(const Technology& t, const Vector& b, const Vector& alpha);

struct QpResult {
    Vector z;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool regularized = false;  // A was rank deficient
    double kkt_residual = 0.0;
};

/// min ||b - A z||^2 subject to z >= 0 and A z <= b, by a primal active-set method.
QpResult min_excess_qp(const Technology& t, const Vector& b);

struct SupportPrices {
    Vector p;             // zero off the support
    double lambda = 0.0;  // equals one at an exact fixed point
    std::size_t iterations = 0;
};

/// Fixed point of the clearing map restricted to the binding rows `support`.
SupportPrices prices_on_support(const Technology& t, const Vector& b, const Vector& z,
                                const std::vector<Index>& support);

/// Prices clearing the consumption vector A z.
SupportPrices prices_from_consumption(const Technology& t, const Vector& z);

/// True when some slack row carries positive activity.
bool no_equilibrium_certificate(const Vector& z, const std::vector<Index>& slack);

/// <b - b_bar, p_u> / <b, p_u>.
double excess_supply(const Vector& b, const Vector& b_bar, const Vector& p_u);

/// Cost prices sum_s a_si p_s on the slack rows, falling back to one where that sum is zero.
Vector extended_prices(const Technology& t, const Vector& p, const std::vector<Index>& slack);

enum class PriceMode { Support, Consumption };
std::string_view to_string(PriceMode mode);

struct EquilibriumState {
    Vector z;
    std::vector<Index> binding;  // I
    std::vector<Index> slack;    // J
    Vector p;
    Vector b_bar;
    Vector p_u;
    double excess_ratio = 0.0;   // R
    double objective = 0.0;
    PriceMode mode = PriceMode::Support;
    bool no_equilibrium = false;
};

EquilibriumState assemble_equilibrium(const Technology& t, const Vector& b);

std::vector<Index> binding_rows(const Vector& b, const Vector& b_bar);

}  // namespace iomodel
