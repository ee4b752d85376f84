#pragma once

#include "iomodel/core_algebra.hpp"
#include "iomodel/equilibrium.hpp"
#include "iomodel/taxation.hpp"
#include "iomodel/tolerances.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iomodel {

/// Observed input-output table in value units; z(k, i) is the delivery from sector k to sector i.
struct IOTable {
    std::vector<std::string> names;
    Matrix z;
    Vector x;        // gross output
    Vector t1;       // taxes
    Vector z1;       // wages and other value added
    Vector c;        // final consumption
    Vector e;        // exports
    Vector imports;

    Index n() const { return static_cast<Index>(names.size()); }
    Vector value_added() const { return t1 + z1; }
    Vector final_demand() const { return c + e - imports; }
    Technology technology() const;  // abar_ki = z_ki / x_i
};

struct BalanceIssue {
    std::string sector;
    std::string identity;  // "row" or "column"
    double observed = 0.0;
    double expected = 0.0;
};

/// Structure only: header `sector,<names...>,C,E,I,X`, one row per sector, then T1 and Z1 rows.
IOTable parse_table(const std::string& csv);

/// Row and column balances whose relative gap exceeds `tolerance`.
std::vector<BalanceIssue> balance_issues(const IOTable& table, double tolerance = tol::table_balance);

/// Parses and enforces the balances.
IOTable load_table(const std::string& path, double tolerance = tol::table_balance);
IOTable table_from_csv(const std::string& csv, double tolerance = tol::table_balance);

std::string serialize_table(const IOTable& table);

RealTaxVector real_tax_vector(const IOTable& table);

struct RealEconomyReport {
    Vector pi0;
    std::vector<Index> pi0_outside_unit_interval;
    bool sustainable_at_unit_prices = false;
    double sustainability_residual = 0.0;
    TaxBoundsReport bounds;
    Vector psi;  // (1 - pi0) o X, the supply that must be absorbed
    std::optional<EquilibriumState> equilibrium;
    std::string equilibrium_error;
    double excess_ratio = 0.0;
};

struct AnalyzeOptions {
    std::optional<Vector> relative_prices;  // evaluate the existing tax at p_hat instead of unit prices
    double sustainability_tolerance = 1e-8;
};

RealEconomyReport analyze(const IOTable& table, const AnalyzeOptions& options = {});

}  // namespace iomodel
