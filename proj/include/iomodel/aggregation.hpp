#pragma once

#include "iomodel/core_algebra.hpp"

#include <string>
#include <vector>

namespace iomodel {

/// Surjection from m fine sectors onto n coarse sectors, stored 0-based.
class AggregationMap {
public:
    AggregationMap(std::vector<Index> target, Index coarse);

    Index fine() const { return static_cast<Index>(target_.size()); }
    Index coarse() const { return coarse_; }
    Index operator()(Index fine_sector) const { return target_[static_cast<std::size_t>(fine_sector)]; }
    const std::vector<Index>& targets() const { return target_; }

    /// Lines "fine coarse" with 1-based indices; '#' starts a comment.
    static AggregationMap parse(const std::string& text);
    static AggregationMap load(const std::string& path);

private:
    std::vector<Index> target_;
    Index coarse_;
};

struct AggregatedTable {
    Matrix a_bar;  // value technology, column sums equal 1 - Delta_i / X_i
    Vector x;      // gross output in value
    Vector c;      // final consumption in value
    Vector delta;  // value added

    Technology technology() const { return Technology(a_bar, Units::Value); }
};

/// Groups a natural-unit economy (A, prices p, outputs x) into value terms.
AggregatedTable aggregate(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f);

struct ScalingCheck {
    double matrix_error = 0.0;       // abar' vs p_hat_k abar_ki / p_hat_i
    double output_error = 0.0;       // X' vs p_hat_k X_hat_k X_k
    double consumption_error = 0.0;  // C' vs p_hat_k X_hat_k C_k, final consumption rescaled with x
    bool holds(double tolerance) const;
};

/// Rescales p_i by p_hat_f(i) and x_i by X_hat_f(i) and compares against the grouped identities.
ScalingCheck scaling_identity_check(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                    const Vector& p_hat, const Vector& x_hat);

/// p_hat with p_hat = abar^T p_hat + delta_hat.
Vector relative_prices(const AggregatedTable& table, const Vector& delta_hat);

/// Largest relative gap in sum_{f(i)=k} delta_i(p_hat) x_i = X_k delta_hat_k.
double aggregated_value_added_error(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                    const Vector& p_hat);

bool aggregated_value_added_check(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                  const Vector& p_hat, double tolerance = 1e-10);

}  // namespace iomodel
