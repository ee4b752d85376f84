#include "iomodel/commands.hpp"

#include "iomodel/aggregation.hpp"
#include "iomodel/balance_solvers.hpp"
#include "iomodel/equilibrium.hpp"
#include "iomodel/real_economy.hpp"
#include "iomodel/sustainability.hpp"
#include "iomodel/taxation.hpp"

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace iomodel {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string canonical_options(const CommandOptions& opt) {
    std::ostringstream s;
    s << "tol=" << round_significant(opt.tolerance, 12);
    const auto list = [&](const char* name, const std::optional<Vector>& v) {
        if (!v) return;
        s << ';' << name << '=';
        for (Index i = 0; i < v->size(); ++i) s << (i ? "," : "") << round_significant((*v)(i), 12);
    };
    list("alpha", opt.alpha);
    list("delta_hat", opt.delta_hat);
    if (opt.samples > 0) s << ";samples=" << opt.samples << ";seed=" << opt.seed;
    return s.str();
}

// Digest over the raw input files and the options that change the results.
std::string digest_inputs(const std::vector<std::string>& paths, const CommandOptions& opt) {
    std::string blob;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (in) {
            std::stringstream buf;
            buf << in.rdbuf();
            blob += buf.str();
        }
        blob.push_back('\0');
    }
    blob += canonical_options(opt);
    return sha256_hex(blob);
}

Report run(const std::string& command, const std::vector<std::string>& paths, const CommandOptions& opt,
           const std::function<void(Report&)>& body) {
    Report r;
    r.command = command;
    r.inputs_digest = digest_inputs(paths, opt);
    try {
        body(r);
    } catch (const Error& e) {
        return error_report(command, r.inputs_digest, e);
    }
    return r;
}

Json names_json(const IOTable& t) {
    Json out = Json::array();
    for (const auto& n : t.names) out.push_back(n);
    return out;
}

AggregatedTable as_value_table(const IOTable& t) {
    return AggregatedTable{t.technology().a(), t.x, t.final_demand(), t.value_added()};
}

Json bounds_json(const TaxBoundsReport& b) {
    Json j;
    j["lower"] = json_number(b.lower);
    j["upper"] = json_number(b.upper);
    j["upper_closed"] = b.upper_closed;
    j["feasible"] = b.feasible;
    j["witness"] = b.feasible ? json_number(b.witness) : Json(nullptr);
    j["has_zero_rate"] = b.has_zero_rate;
    j["reconstructed_x"] = b.reconstructed_x ? json_vector(*b.reconstructed_x) : Json(nullptr);
    j["final_y"] = b.final_y ? json_vector(*b.final_y) : Json(nullptr);
    return j;
}

Json state_json(const EquilibriumState& st, bool details) {
    Json j;
    j["mode"] = std::string(to_string(st.mode));
    j["binding"] = json_indices(st.binding);
    j["slack"] = json_indices(st.slack);
    j["no_equilibrium"] = st.no_equilibrium;
    j["objective"] = json_number(st.objective);
    j["p"] = json_vector(st.p);
    j["p_u"] = json_vector(st.p_u);
    j["b_bar"] = json_vector(st.b_bar);
    if (details) j["z"] = json_vector(st.z);
    j["excess_ratio"] = json_number(st.excess_ratio);
    return j;
}

Vector dirichlet(std::mt19937_64& rng, Index n) {
    std::gamma_distribution<double> g(1.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = g(rng);
    return v / v.sum();
}

}  // namespace

Vector parse_vector_list(const std::string& text) {
    std::vector<double> vals;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "'" + cell + "' is not a number");
        }
    }
    if (vals.empty()) throw Error(ErrorKind::InvalidArgument, "empty list");
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

Report cmd_check(const std::string& table_path, const CommandOptions& opt) {
    return run("check", {table_path}, opt, [&](Report& r) {
        const IOTable t = parse_table(read_file(table_path));
        const auto issues = balance_issues(t, opt.tolerance);
        const Technology a = t.technology();
        const double rho = spectral_radius(a.a());
        const bool productive = is_productive(a);
        const bool indecomposable = is_indecomposable(a);

        r.results["sectors"] = t.n();
        r.results["names"] = names_json(t);
        Json bal;
        bal["ok"] = issues.empty();
        bal["tolerance"] = json_number(opt.tolerance);
        bal["issues"] = Json::array();
        for (const auto& is : issues)
            bal["issues"].push_back({{"sector", is.sector}, {"identity", is.identity}, {"observed", json_number(is.observed)},
                                     {"expected", json_number(is.expected)}});
        r.results["balance"] = bal;
        r.results["spectral_radius"] = json_number(rho);
        r.results["productive"] = productive;
        r.results["indecomposable"] = indecomposable;
        for (const auto& is : issues) r.diagnostics.push_back("sector " + is.sector + " fails the " + is.identity + " balance");
        if (!productive) r.diagnostics.push_back("technology is not productive");
        if (!indecomposable) r.diagnostics.push_back("technology is decomposable");
        r.exit_code = issues.empty() && productive && indecomposable ? ExitOk : ExitNegative;
    });
}

Report cmd_sustainable(const std::string& table_path, const CommandOptions& opt) {
    return run("sustainable", {table_path}, opt, [&](Report& r) {
        const IOTable t = load_table(table_path, opt.tolerance);
        const Technology a = t.technology();
        AnalyzeOptions ao;
        if (opt.delta_hat) ao.relative_prices = relative_prices(as_value_table(t), *opt.delta_hat);
        const RealEconomyReport rep = analyze(t, ao);

        Json existing;
        existing["pi0"] = json_vector(rep.pi0);
        existing["relative_prices"] = ao.relative_prices ? json_vector(*ao.relative_prices) : Json(nullptr);
        existing["sustainable"] = rep.sustainable_at_unit_prices;
        existing["residual"] = json_number(rep.sustainability_residual);
        r.results["existing_tax"] = existing;

        const SustainabilityVerdict v = check_sustainable(a, rep.psi.cwiseMax(0.0));
        Json crit;
        crit["sustainable"] = v.sustainable;
        crit["output"] = json_vector(rep.psi);
        crit["b1"] = json_vector(v.b1);
        crit["alpha"] = json_vector(v.alpha);
        crit["prices"] = v.sustainable ? json_vector(v.prices) : Json(nullptr);
        crit["margins"] = v.sustainable ? json_vector(v.margins) : Json(nullptr);
        crit["regularized"] = v.regularized;
        if (!v.sustainable) crit["reason"] = v.reason;
        r.results["criterion"] = crit;
        if (opt.tax_bounds) r.results["tax_bounds"] = bounds_json(rep.bounds);
        for (Index i : rep.pi0_outside_unit_interval)
            r.diagnostics.push_back("tax rate of sector " + t.names[static_cast<std::size_t>(i)] + " is outside (0, 1)");
        r.exit_code = v.sustainable ? ExitOk : ExitNegative;
    });
}

Report cmd_equilibrium(const std::string& table_path, const CommandOptions& opt) {
    return run("equilibrium", {table_path}, opt, [&](Report& r) {
        const IOTable t = load_table(table_path, opt.tolerance);
        const Technology a = t.technology();
        const RealTaxVector rtv = real_tax_vector(t);
        const Vector psi = (Vector::Ones(t.n()) - rtv.pi).cwiseProduct(t.x);
        r.results["supply"] = json_vector(psi);
        const EquilibriumState st = assemble_equilibrium(a, psi);
        r.results["equilibrium"] = state_json(st, opt.min_excess);
        if (opt.min_excess) {
            const QpResult qp = min_excess_qp(a, psi);
            r.results["qp"] = {{"objective", json_number(qp.objective)},
                               {"iterations", qp.iterations},
                               {"regularized", qp.regularized},
                               {"kkt_residual", json_number(qp.kkt_residual)}};
        }
        if (opt.alpha) {
            const AlphaPoint ap = solution_from_alpha(a, psi, *opt.alpha);
            r.results["alpha_point"] = {{"alpha", json_vector(ap.alpha)},
                                        {"scale", json_number(ap.scale)},
                                        {"z", json_vector(ap.z)},
                                        {"excess", json_number(ap.excess)}};
        }
        if (opt.samples > 0) {
            std::mt19937_64 rng(opt.seed);
            double best = std::numeric_limits<double>::infinity();
            for (int s = 0; s < opt.samples; ++s)
                best = std::min(best, solution_from_alpha(a, psi, dirichlet(rng, t.n())).excess);
            r.results["sampled_min_excess"] = json_number(best);
            if (best < st.objective - 1e-6) r.diagnostics.push_back("a sampled point beats the quadratic program minimum");
        }
        if (st.no_equilibrium) r.diagnostics.push_back("slack goods carry positive activity; prices clear consumption only");
        r.exit_code = ExitOk;
    });
}

Report cmd_tax(const std::string& table_path, const std::string& mode, const CommandOptions& opt) {
    return run("tax " + mode, {table_path}, opt, [&](Report& r) {
        const IOTable t = load_table(table_path, opt.tolerance);
        const Technology a = t.technology();
        const Vector delta = t.value_added();
        if (mode == "existing") {
            const RealEconomyReport rep = analyze(t);
            r.results["pi0"] = json_vector(rep.pi0);
            r.results["outside_unit_interval"] = json_indices(rep.pi0_outside_unit_interval);
            r.results["sustainable"] = rep.sustainable_at_unit_prices;
            r.results["residual"] = json_number(rep.sustainability_residual);
            r.results["bounds"] = bounds_json(rep.bounds);
            r.exit_code = rep.sustainable_at_unit_prices ? ExitOk : ExitNegative;
        } else if (mode == "best") {
            const TaxFamily f = tax_family(a, t.x, delta);
            r.results["v0"] = json_vector(f.v0);
            r.results["intensity"] = json_vector(f.intensity);
            r.results["c0_max"] = json_number(f.c0_max);
            r.results["best_pi"] = json_vector(f.best_pi);
            r.results["residual"] = json_number(taxed_clearing_residual(a, t.x, f.best_pi));
        } else if (mode == "bounds") {
            const RealTaxVector rtv = real_tax_vector(t);
            const TaxBoundsReport b = tax_bounds(rtv.pi, delta.cwiseQuotient(t.x), a);
            r.results["pi0"] = json_vector(rtv.pi);
            r.results["bounds"] = bounds_json(b);
            if (b.has_zero_rate) r.diagnostics.push_back("some tax rate is zero");
            r.exit_code = b.feasible ? ExitOk : ExitNegative;
        } else if (mode == "value-added") {
            const ValueAddedTax v = value_added_tax(a);
            const double d0 = fit_scale(t.final_demand(), v.base);
            r.results["pi"] = json_vector(v.pi);
            r.results["x0"] = json_vector(v.x0);
            r.results["base"] = json_vector(v.base);
            r.results["scale"] = json_number(d0);
            r.results["fitted_final_product"] = json_vector(v.final_product(d0));
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown tax mode " + mode);
        }
    });
}

Report cmd_aggregate(const std::string& table_path, const std::string& map_path, const CommandOptions& opt) {
    return run("aggregate", {table_path, map_path}, opt, [&](Report& r) {
        const IOTable t = load_table(table_path, opt.tolerance);
        const AggregationMap f = AggregationMap::parse(read_file(map_path));
        const Index n = f.coarse();
        const AggregatedTable agg = aggregate(t.technology(), Vector::Ones(t.n()), t.x, f);
        const Vector delta_hat = opt.delta_hat ? *opt.delta_hat : agg.delta.cwiseQuotient(agg.x);
        const Vector p_hat = relative_prices(agg, delta_hat);

        IOTable coarse;
        coarse.names.assign(static_cast<std::size_t>(n), std::string());
        for (Index l = 0; l < f.fine(); ++l) {
            auto& name = coarse.names[static_cast<std::size_t>(f(l))];
            name += (name.empty() ? "" : "+") + t.names[static_cast<std::size_t>(l)];
        }
        Matrix s = Matrix::Zero(f.fine(), n);
        for (Index l = 0; l < f.fine(); ++l) s(l, f(l)) = 1.0;
        coarse.z = agg.a_bar * agg.x.asDiagonal();
        coarse.x = agg.x;
        coarse.c = s.transpose() * t.c;
        coarse.e = s.transpose() * t.e;
        coarse.imports = s.transpose() * t.imports;
        coarse.t1 = s.transpose() * t.t1;
        coarse.z1 = s.transpose() * t.z1;

        r.results["fine_sectors"] = f.fine();
        r.results["coarse_sectors"] = n;
        r.results["names"] = names_json(coarse);
        r.results["a_bar"] = json_matrix(agg.a_bar);
        r.results["x"] = json_vector(agg.x);
        r.results["c"] = json_vector(agg.c);
        r.results["delta"] = json_vector(agg.delta);
        r.results["relative_prices"] = json_vector(p_hat);
        r.results["balance"] = {{"sum_c", json_number(agg.c.sum())}, {"sum_delta", json_number(agg.delta.sum())}};
        const auto issues = balance_issues(coarse, opt.tolerance);
        for (const auto& is : issues) r.diagnostics.push_back("aggregated sector " + is.sector + " fails the " + is.identity + " balance");
        const std::string csv = serialize_table(coarse);
        if (opt.out) {
            std::ofstream out(*opt.out, std::ios::binary);
            if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + *opt.out);
            out << csv;
            r.results["output"] = *opt.out;
        } else {
            r.results["csv"] = csv;
        }
    });
}

}  // namespace iomodel
