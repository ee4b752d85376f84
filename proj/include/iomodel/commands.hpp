#pragma once

#include "iomodel/report.hpp"
#include "iomodel/tolerances.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace iomodel {

struct CommandOptions {
    double tolerance = tol::table_balance;   // relative balance tolerance for loaded tables
    std::optional<Vector> alpha;
    std::optional<Vector> delta_hat;
    std::uint64_t seed = 20240917;
    int samples = 0;                        // random simplex points checked against the QP minimum
    bool tax_bounds = false;
    bool min_excess = false;
    std::optional<std::string> out;
};

Report cmd_check(const std::string& table_path, const CommandOptions& opt);
Report cmd_sustainable(const std::string& table_path, const CommandOptions& opt);
Report cmd_equilibrium(const std::string& table_path, const CommandOptions& opt);
/// mode is one of existing, best, bounds, value-added.
Report cmd_tax(const std::string& table_path, const std::string& mode, const CommandOptions& opt);
/// Writes the aggregated table to opt.out when set.
Report cmd_aggregate(const std::string& table_path, const std::string& map_path, const CommandOptions& opt);

/// Parses "a,b,c" into a vector.
Vector parse_vector_list(const std::string& text);

}  // namespace iomodel
