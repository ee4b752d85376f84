#include "iomodel/aggregation.hpp"
#include "iomodel/balance_solvers.hpp"
#include "iomodel/equilibrium.hpp"
#include "iomodel/error.hpp"
#include "iomodel/real_economy.hpp"
#include "iomodel/sustainability.hpp"
#include "iomodel/taxation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace iomodel;

namespace {

Technology tech(const Matrix& a) { return Technology(a); }

std::vector<Index> zero_based(const std::vector<Index>& one_based) {
    std::vector<Index> out;
    for (Index i : one_based) out.push_back(i - 1);
    return out;
}

std::vector<Index> one_based(const std::vector<Index>& idx) {
    std::vector<Index> out;
    for (Index i : idx) out.push_back(i + 1);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Input-output economy analysis";

    // Messages start with the error kind, e.g. "NotProductive: ...".
    py::register_exception<Error>(m, "IOModelError", PyExc_ValueError);

    m.def("is_productive", [](const Matrix& a) { return is_productive(tech(a)); }, "a"_a);
    m.def("is_indecomposable", [](const Matrix& a) { return is_indecomposable(a); }, "a"_a);
    m.def("spectral_radius", &spectral_radius, "a"_a);
    m.def("leontief_solve", [](const Matrix& a, const Vector& c) { return leontief_solve(tech(a), c); }, "a"_a, "c"_a);

    m.def(
        "cone_membership",
        [](const Matrix& generators, const Vector& b) {
            ConeMembership cm = cone_membership(generators, b);
            return py::make_tuple(std::string(to_string(cm.status)), cm.coefficients);
        },
        "generators"_a, "b"_a);

    m.def(
        "positive_solution_family",
        [](const Matrix& c, const Vector& psi) {
            SolutionFamily f = positive_solution_family(c, psi);
            py::dict d;
            d["rank"] = f.rank;
            d["basis_columns"] = one_based(f.basis_columns);
            d["free_columns"] = one_based(f.free_columns);
            d["step"] = f.step;
            d["generators"] = f.generators;
            d["centroid"] = f.centroid();
            return d;
        },
        "c"_a, "psi"_a);

    m.def("balanced_eigenvector", [](const Matrix& b1) { return balanced_eigenvector(b1).d; }, "b1"_a);
    m.def("supply_demand_factor", &supply_demand_factor, "c"_a, "b"_a);
    m.def(
        "clearing_equilibrium",
        [](const Matrix& c, const Matrix& b) -> py::object {
            ClearingResult r = clearing_equilibrium(c, b);
            if (r.prices) return py::cast(*r.prices);
            return py::none();
        },
        "c"_a, "b"_a);
    m.def("inequality_solution", [](const Matrix& a, const Vector& b) { return inequality_solution(tech(a), b).z; }, "a"_a, "b"_a);

    m.def("min_ratios", [](const Matrix& a, const Vector& b) { return min_ratios(tech(a), b); }, "a"_a, "b"_a);
    m.def(
        "solution_from_alpha",
        [](const Matrix& a, const Vector& b, const Vector& alpha) {
            AlphaPoint p = solution_from_alpha(tech(a), b, alpha);
            return py::make_tuple(p.scale, p.z);
        },
        "a"_a, "b"_a, "alpha"_a);
    m.def(
        "min_excess_qp",
        [](const Matrix& a, const Vector& b) {
            QpResult q = min_excess_qp(tech(a), b);
            return py::make_tuple(q.z, q.objective);
        },
        "a"_a, "b"_a);
    m.def(
        "prices_on_support",
        [](const Matrix& a, const Vector& b, const Vector& z, const std::vector<Index>& support) {
            return prices_on_support(tech(a), b, z, zero_based(support)).p;
        },
        "a"_a, "b"_a, "z"_a, "support"_a);
    m.def("prices_from_consumption", [](const Matrix& a, const Vector& z) { return prices_from_consumption(tech(a), z).p; },
          "a"_a, "z"_a);
    m.def("excess_supply", &excess_supply, "b"_a, "b_bar"_a, "p_u"_a);
    m.def(
        "assemble_equilibrium",
        [](const Matrix& a, const Vector& b) {
            EquilibriumState s = assemble_equilibrium(tech(a), b);
            py::dict d;
            d["z"] = s.z;
            d["binding"] = one_based(s.binding);
            d["slack"] = one_based(s.slack);
            d["p"] = s.p;
            d["b_bar"] = s.b_bar;
            d["p_u"] = s.p_u;
            d["R"] = s.excess_ratio;
            d["mode"] = std::string(to_string(s.mode));
            return d;
        },
        "a"_a, "b"_a);

    m.def(
        "check_sustainable",
        [](const Matrix& a, const Vector& x) {
            SustainabilityVerdict v = check_sustainable(tech(a), x);
            py::dict d;
            d["sustainable"] = v.sustainable;
            d["alpha"] = v.alpha;
            d["b1"] = v.b1;
            d["prices"] = v.prices;
            d["margins"] = v.margins;
            return d;
        },
        "a"_a, "x"_a);

    m.def(
        "tax_family",
        [](const Matrix& abar, const Vector& x, const Vector& delta) {
            TaxFamily f = tax_family(Technology(abar, Units::Value), x, delta);
            py::dict d;
            d["v0"] = f.v0;
            d["c0_max"] = f.c0_max;
            d["best_pi"] = f.best_pi;
            d["intensity"] = f.intensity;
            return d;
        },
        "abar"_a, "x"_a, "delta"_a);
    m.def(
        "tax_bounds",
        [](const Vector& pi, const Vector& ratios) {
            TaxBoundsReport b = tax_bounds(pi, ratios);
            py::dict d;
            d["lower"] = b.lower;
            d["upper"] = b.upper;
            d["feasible"] = b.feasible;
            d["witness"] = b.witness;
            return d;
        },
        "pi"_a, "ratios"_a);
    m.def(
        "value_added_tax",
        [](const Matrix& abar) {
            ValueAddedTax v = value_added_tax(Technology(abar, Units::Value));
            return py::make_tuple(v.pi, v.x0, v.base);
        },
        "abar"_a);
    m.def("fit_scale", &fit_scale, "y"_a, "base"_a);

    m.def(
        "aggregate",
        [](const Matrix& a, const Vector& p, const Vector& x, const std::vector<Index>& target) {
            std::vector<Index> zb = zero_based(target);
            Index n = 0;
            for (Index k : zb) n = std::max(n, k + 1);
            AggregatedTable t = aggregate(tech(a), p, x, AggregationMap(zb, n));
            py::dict d;
            d["a_bar"] = t.a_bar;
            d["x"] = t.x;
            d["c"] = t.c;
            d["delta"] = t.delta;
            return d;
        },
        "a"_a, "p"_a, "x"_a, "target"_a);

    m.def(
        "load_table",
        [](const std::string& path, double tolerance) {
            IOTable t = load_table(path, tolerance);
            py::dict d;
            d["names"] = t.names;
            d["z"] = t.z;
            d["x"] = t.x;
            d["t1"] = t.t1;
            d["z1"] = t.z1;
            return d;
        },
        "path"_a, "tolerance"_a = tol::table_balance);
}
