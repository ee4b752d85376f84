#pragma once

#include "iomodel/core_algebra.hpp"

#include <optional>
#include <vector>

namespace iomodel {

/// One-parameter family of tax rates that keep the economy in balance at its current prices.
struct TaxFamily {
    Vector v0;          // balanced eigenvector of the value technology, summing to one
    Vector intensity;   // (V0_i / X_i)(1 - Delta_i / X_i); pi(c0) = 1 - c0 * intensity
    double c0_max = 0.0;
    Vector best_pi;     // pi(c0_max), smallest component exactly zero

    Vector pi(double c0) const;
};

/// Value technology abar with gross outputs X and value added Delta.
TaxFamily tax_family(const Technology& abar, const Vector& x, const Vector& delta);

/// Largest relative violation of sum_i abar_ki (1 - pi_i) X_i / sum_s abar_si = (1 - pi_k) X_k.
double taxed_clearing_residual(const Technology& abar, const Vector& x, const Vector& pi);

struct TaxBoundsReport {
    double lower = 0.0;        // open end
    double upper = 0.0;
    bool upper_closed = true;  // false when the cap 1/max(1 - ratio) is the binding end
    bool feasible = false;
    double witness = 0.0;
    bool has_zero_rate = false;
    std::optional<Vector> reconstructed_x;
    std::optional<Vector> final_y;
};

/// Rates pi against ratios Delta_i / X_i; with a technology also rebuilds X and Y = X - abar X.
TaxBoundsReport tax_bounds(const Vector& pi, const Vector& ratios,
                           const std::optional<Technology>& abar = std::nullopt);

struct ValueAddedTax {
    Vector pi;    // 1 - column sums
    Vector x0;    // balanced eigenvector
    Vector base;  // (1 - column sums) o x0; Y(d) = d * base

    Vector final_product(double d) const { return d * base; }
};

ValueAddedTax value_added_tax(const Technology& abar);

/// Least-squares d0 with Y ~ d0 * base.
double fit_scale(const Vector& y, const Vector& base);

struct RealTaxVector {
    Vector pi;
    std::vector<Index> outside_unit_interval;  // rates not in (0, 1)
};

RealTaxVector real_tax_vector(const Vector& tax_revenue, const Vector& value_added);

}  // namespace iomodel
