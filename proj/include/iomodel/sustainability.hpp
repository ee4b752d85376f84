#pragma once

#include "iomodel/core_algebra.hpp"

#include <string>

namespace iomodel {

struct SustainabilityVerdict {
    bool sustainable = false;
    Vector alpha;    // (E - A) b1, the surplus certificate
    Vector b1;       // A b1 = x
    Vector prices;   // empty unless sustainable
    Vector margins;  // p_i - sum_s a_si p_s
    bool regularized = false;  // A was singular
    std::string reason;
};

SustainabilityVerdict check_sustainable(const Technology& t, const Vector& x);

/// sum_i a_ki x_i p_i / (sum_s a_si p_s) - x_k for every k.
Vector clearing_residual(const Technology& t, const Vector& x, const Vector& p);

}  // namespace iomodel
