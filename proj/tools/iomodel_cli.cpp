#include "iomodel/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace iomodel;

int main(int argc, char** argv) {
    CLI::App app{"Input-output economy analysis: sustainability, equilibrium, taxation and aggregation"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string format = "text";
    std::string alpha_text;
    std::string delta_hat_text;
    std::string out_path;
    app.add_option("--tol", opt.tolerance, "Relative balance tolerance for loaded tables")->capture_default_str();
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    app.add_option("--seed", opt.seed, "Seed for sampled checks")->capture_default_str();
    app.add_option("--out", out_path, "Write the report (or the aggregated table) to this path");

    std::string table;
    std::string map_path;
    std::string tax_mode;

    auto* check = app.add_subcommand("check", "Validate balances, productivity and indecomposability");
    check->add_option("table", table, "Input-output table (CSV)")->required();

    auto* sustainable = app.add_subcommand("sustainable", "Test whether the taxed output is sustainable");
    sustainable->add_option("table", table, "Input-output table (CSV)")->required();
    sustainable->add_flag("--tax-bounds", opt.tax_bounds, "Also report the feasible tax-rate interval");
    sustainable->add_option("--delta-hat", delta_hat_text, "Comma-separated value-added rates for relative prices");

    auto* equilibrium = app.add_subcommand("equilibrium", "Minimum-excess equilibrium and excess-supply ratio");
    equilibrium->add_option("table", table, "Input-output table (CSV)")->required();
    equilibrium->add_flag("--min-excess", opt.min_excess, "Report the quadratic program details");
    equilibrium->add_option("--alpha", alpha_text, "Comma-separated simplex point to evaluate");
    equilibrium->add_option("--samples", opt.samples, "Random simplex points checked against the minimum");

    auto* tax = app.add_subcommand("tax", "Tax-rate analyses");
    tax->add_option("mode", tax_mode, "existing | best | bounds | value-added")
        ->required()
        ->check(CLI::IsMember({"existing", "best", "bounds", "value-added"}));
    tax->add_option("table", table, "Input-output table (CSV)")->required();

    auto* agg = app.add_subcommand("aggregate", "Aggregate a table with a sector map");
    agg->add_option("table", table, "Input-output table (CSV)")->required();
    agg->add_option("map", map_path, "Lines of 'fine coarse', 1-based")->required();
    agg->add_option("--delta-hat", delta_hat_text, "Comma-separated coarse value-added rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitOk : ExitInputError;
    }

    Report report;
    try {
        if (!alpha_text.empty()) opt.alpha = parse_vector_list(alpha_text);
        if (!delta_hat_text.empty()) opt.delta_hat = parse_vector_list(delta_hat_text);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return ExitInputError;
    }
    if (!out_path.empty()) opt.out = out_path;

    if (*check) {
        report = cmd_check(table, opt);
    } else if (*sustainable) {
        report = cmd_sustainable(table, opt);
    } else if (*equilibrium) {
        report = cmd_equilibrium(table, opt);
    } else if (*tax) {
        report = cmd_tax(table, tax_mode, opt);
    } else {
        report = cmd_aggregate(table, map_path, opt);
    }

    const std::string rendered = report.render(format);
    if (opt.out && !*agg) {
        std::ofstream out(*opt.out, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << *opt.out << '\n';
            return ExitInputError;
        }
        out << rendered;
    } else {
        std::cout << rendered;
    }
    return report.exit_code;
}
