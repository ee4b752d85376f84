#pragma once

#include <cstddef>

namespace iomodel::tol {

inline constexpr double rank_pivot = 1e-12;        // relative to the largest pivot
inline constexpr double positive = 1e-10;          // after normalization by the max component
inline constexpr double power_relative = 1e-12;
inline constexpr std::size_t max_iterations = 1'000'000;
inline constexpr double fixed_point = 1e-12;       // max-norm step
inline constexpr double balanced_residual = 1e-10;
inline constexpr double epsilon_successive = 1e-9;
inline constexpr double kkt = 1e-10;
inline constexpr double binding = 1e-8;            // scaled by max(1, b_i)
inline constexpr double singular_successive = 1e-7;
inline constexpr double table_balance = 1e-6;
inline constexpr double clearing = 1e-8;
inline constexpr int json_digits = 12;

}  // namespace iomodel::tol
