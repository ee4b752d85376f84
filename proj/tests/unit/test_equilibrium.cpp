#include "iomodel/equilibrium.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace iomodel;

namespace {

Matrix sym() { return (Matrix(2, 2) << 0.2, 0.3, 0.3, 0.2).finished(); }

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool contains(const std::vector<Index>& v, Index i) { return std::find(v.begin(), v.end(), i) != v.end(); }

/// sum_{i in I} a_ki b_i p_i / (sum_s a_si p_s) - b_k for k in I.
Vector support_clearing_residual(const Matrix& a, const Vector& b, const Vector& p, const std::vector<Index>& support) {
    Vector r(static_cast<Index>(support.size()));
    for (std::size_t kk = 0; kk < support.size(); ++kk) {
        const Index k = support[kk];
        double lhs = 0.0;
        for (Index i : support) {
            double cost = 0.0;
            for (Index s : support) cost += a(s, i) * p(s);
            lhs += a(k, i) * b(i) * p(i) / cost;
        }
        r(static_cast<Index>(kk)) = lhs - b(k);
    }
    return r;
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("min_ratios examples") {
    const Vector d = min_ratios(Technology(sym()), Vector::Ones(2));
    CHECK(max_abs(d - Vector::Constant(2, 10.0 / 3.0)) < 1e-14);
    const Vector b = (Vector(2) << 2, 5).finished();
    CHECK(max_abs(min_ratios(Technology(Matrix::Identity(2, 2)), b) - b) == 0.0);
    CHECK(max_abs(min_ratios(Technology(sym()), 3.0 * Vector::Ones(2)) - 3.0 * d) < 1e-14);
    CHECK(kind_of([] { min_ratios(Technology((Matrix(2, 2) << 1, 0, 1, 0).finished()), Vector::Ones(2)); }) ==
          ErrorKind::ZeroColumn);
}

TEST_CASE("solution_from_alpha examples") {
    const Technology t(sym());
    const AlphaPoint mid = solution_from_alpha(t, Vector::Ones(2), Vector::Constant(2, 0.5));
    CHECK(mid.scale == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(max_abs(mid.z - Vector::Constant(2, 2.0)) < 1e-12);
    for (Index i = 0; i < 2; ++i) {
        const AlphaPoint e = solution_from_alpha(t, Vector::Ones(2), Vector::Unit(2, i));
        CHECK(e.scale == 1.0);
    }
    CHECK(kind_of([&] { solution_from_alpha(t, Vector::Ones(2), Vector::Ones(2)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("property: a(alpha) is at least one and alpha vertices give exactly one") {
    std::mt19937_64 rng(oracle::kSeed + 20);
    std::uniform_int_distribution<int> dim(2, 4);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = dim(rng);
        const Matrix a = oracle::positive_technology(rng, n, 0.5);
        const Vector b = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const Technology t(a);
        for (Index i = 0; i < n; ++i) CHECK(solution_from_alpha(t, b, Vector::Unit(n, i)).scale == 1.0);
        double worst = 1e300;
        for (int s = 0; s < 1000; ++s) {
            const AlphaPoint ap = solution_from_alpha(t, b, oracle::dirichlet(rng, n));
            worst = std::min(worst, ap.scale);
            CHECK(((a * ap.z - b).array() <= 1e-12 * b.maxCoeff()).all());
        }
        CHECK(worst >= 1.0 - 1e-12);
    }
}

TEST_CASE("min_excess_qp examples") {
    const QpResult sym_fit = min_excess_qp(Technology(sym()), Vector::Ones(2));
    CHECK(sym_fit.objective < 1e-20);
    CHECK(max_abs(sym() * sym_fit.z - Vector::Ones(2)) < 1e-12);

    const Matrix a = 0.1 * (Matrix(2, 2) << 1, 2, 2, 1).finished();
    const Vector b = (Vector(2) << 1, 3).finished();
    const QpResult qp = min_excess_qp(Technology(a), b);
    CHECK(qp.objective > 0.0);
    CHECK_FALSE(binding_rows(b, a * qp.z).empty());
    CHECK(qp.kkt_residual < 1e-10);

    // Independent oracle: z in [0,20]^2 at step 1e-3, then local refinement.
    const auto excess = [&](const Vector& z) {
        if ((z.array() < 0.0).any() || ((a * z - b).array() > 0.0).any()) return 1e300;
        return (b - a * z).squaredNorm();
    };
    double grid_best = 1e300;
    Vector grid_arg = Vector::Zero(2);
    for (int i = 0; i <= 20000; i += 10) {
        for (int j = 0; j <= 20000; j += 10) {
            const Vector z = (Vector(2) << i * 1e-3, j * 1e-3).finished();
            const double v = excess(z);
            if (v < grid_best) {
                grid_best = v;
                grid_arg = z;
            }
        }
    }
    const double refined = oracle::zoom_minimize({grid_arg}, 1e-2, excess, [](const Vector& z) { return z; });
    CHECK(std::abs(qp.objective - refined) < 1e-8);
}

TEST_CASE("min_excess_qp returns zero for supply inside the cone image") {
    std::mt19937_64 rng(oracle::kSeed + 21);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + trial % 4;
        const Matrix a = oracle::positive_technology(rng, n, 0.7);
        const Vector b = a * oracle::uniform_vector(rng, n, 0.1, 1.0);
        const QpResult qp = min_excess_qp(Technology(a), b);
        CHECK(qp.objective < 1e-18 * std::max(1.0, b.squaredNorm()));
        CHECK((qp.z.array() >= 0.0).all());
    }
}

TEST_CASE("property: QP minimum lies below every alpha point") {
    std::mt19937_64 rng(oracle::kSeed + 22);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = 2 + trial % 2;
        const Matrix a = oracle::positive_technology(rng, n, 0.6);
        Vector b = oracle::uniform_vector(rng, n, 0.1, 1.0);
        b(0) *= 5.0;  // push b away from the cone image
        const Technology t(a);
        const QpResult qp = min_excess_qp(t, b);
        CHECK((qp.z.array() >= 0.0).all());
        CHECK(((a * qp.z - b).array() <= 1e-10).all());
        double grid = 1e300;
        oracle::simplex_grid(n, oracle::simplex_steps_for(n, 10000),
                             [&](const Vector& alpha) { grid = std::min(grid, solution_from_alpha(t, b, alpha).excess); });
        CHECK(grid >= qp.objective - 1e-6);
    }
}

TEST_CASE("property: QP matches exhaustive face enumeration") {
    std::mt19937_64 rng(oracle::kSeed + 23);
    for (int trial = 0; trial < 40; ++trial) {
        const Index n = 2 + trial % 3;
        const Matrix a = oracle::positive_technology(rng, n, 0.6);
        const Vector b = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const QpResult qp = min_excess_qp(Technology(a), b);
        const oracle::FaceMinimum exact = oracle::enumerate_faces(a, b);
        CHECK(std::abs(qp.objective - exact.objective) < 1e-12 * std::max(1.0, exact.objective));
    }
}

TEST_CASE("prices_on_support examples") {
    const Technology t(sym());
    const SupportPrices sp = prices_on_support(t, Vector::Ones(2), Vector::Constant(2, 2.0), {0, 1});
    CHECK(max_abs(sp.p - Vector::Constant(2, 0.5)) < 1e-12);
    CHECK(std::abs(sp.lambda - 1.0) < 1e-10);
    CHECK(max_abs(support_clearing_residual(sym(), Vector::Ones(2), sp.p, {0, 1})) < 1e-12);

    const Vector b = Vector::Ones(2);
    const Vector z = (Vector(2) << 0.0, 5.0).finished();
    const SupportPrices single = prices_on_support(t, b, z, {1});
    CHECK(max_abs(single.p - Vector::Unit(2, 1)) == 0.0);

    CHECK(kind_of([] {
              const Matrix a = (Matrix(2, 2) << 0.5, 0, 0.1, 0.5).finished();
              prices_on_support(Technology(a), Vector::Ones(2), Vector::Ones(2), {0, 1});
          }) == ErrorKind::DecomposableMinor);
}

TEST_CASE("property: prices_on_support contracts") {
    std::mt19937_64 rng(oracle::kSeed + 23);
    std::uniform_int_distribution<int> dim(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = dim(rng);
        const Matrix a = oracle::positive_technology(rng, n, 0.6);
        std::vector<Index> support;
        std::vector<Index> slack;
        for (Index i = 0; i < n; ++i) (u(rng) < 0.6 || i == 0 ? support : slack).push_back(i);
        Vector z = Vector::Zero(n);
        for (Index i : support) z(i) = 0.1 + u(rng);
        const Vector az = a * z;
        Vector b = az;
        for (Index j : slack) b(j) = az(j) * (1.1 + u(rng));
        const SupportPrices sp = prices_on_support(Technology(a), b, z, support);
        CHECK(std::abs(sp.lambda - 1.0) < 1e-10);
        CHECK(std::abs(sp.p.sum() - 1.0) < 1e-12);
        for (Index j : slack) CHECK(sp.p(j) == 0.0);
        for (Index i : support) CHECK(sp.p(i) > 0.0);
        const Vector r = support_clearing_residual(a, b, sp.p, support);
        CHECK(max_abs(r) < 1e-8);
        double walras = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) walras += sp.p(support[k]) * r(static_cast<Index>(k));
        CHECK(std::abs(walras) < 1e-10);
    }
}

TEST_CASE("prices_from_consumption examples") {
    const SupportPrices sp = prices_from_consumption(Technology(sym()), Vector::Ones(2));
    CHECK(max_abs(sp.p - Vector::Constant(2, 0.5)) < 1e-12);
    CHECK(kind_of([] { prices_from_consumption(Technology(sym()), Vector::Zero(2)); }) == ErrorKind::HypothesisViolated);
}

TEST_CASE("property: prices_from_consumption round trip") {
    std::mt19937_64 rng(oracle::kSeed + 24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 3;
        const Matrix a = oracle::uniform_matrix(rng, n, n, 0.05, 1.0);
        Vector z = oracle::uniform_vector(rng, n, 0.0, 1.0);
        if (trial % 4 == 0) z(trial % 3) = 0.0;
        const SupportPrices sp = prices_from_consumption(Technology(a), z);
        const Vector b_bar = a * z;
        const Vector cost = a.transpose() * sp.p;
        Vector rebuilt(n);
        for (Index i = 0; i < n; ++i) rebuilt(i) = b_bar(i) * sp.p(i) / cost(i);
        CHECK(max_abs(rebuilt - z) < 1e-8 * std::max(1.0, z.maxCoeff()));
        CHECK(max_abs(a * rebuilt - b_bar) < 1e-8);
    }
}

TEST_CASE("no_equilibrium_certificate examples") {
    CHECK_FALSE(no_equilibrium_certificate(Vector::Ones(2), {}));
    CHECK_FALSE(no_equilibrium_certificate((Vector(2) << 10.0 / 3.0, 0.0).finished(), {1}));
    CHECK(no_equilibrium_certificate((Vector(2) << 1.0, 2.0).finished(), {1}));
}

TEST_CASE("excess_supply examples") {
    const Vector b = Vector::Ones(2);
    CHECK(excess_supply(b, b, Vector::Constant(2, 0.5)) == 0.0);
    CHECK(excess_supply(b, (Vector(2) << 1, 0.5).finished(), Vector::Constant(2, 0.5)) == doctest::Approx(0.25));
    CHECK(excess_supply(b, (Vector(2) << 1, 0.1).finished(), (Vector(2) << 1, 0).finished()) == 0.0);
    CHECK(kind_of([&] { excess_supply(b, b, Vector::Zero(2)); }) == ErrorKind::ZeroValue);
}

TEST_CASE("assemble_equilibrium examples") {
    const EquilibriumState s = assemble_equilibrium(Technology(sym()), Vector::Ones(2));
    CHECK(s.slack.empty());
    CHECK(std::abs(s.excess_ratio) < 1e-12);
    CHECK(max_abs(s.p - Vector::Constant(2, 0.5)) < 1e-10);

    const Matrix a = 0.1 * (Matrix(2, 2) << 1, 2, 2, 1).finished();
    const EquilibriumState q = assemble_equilibrium(Technology(a), (Vector(2) << 1, 3).finished());
    CHECK(q.excess_ratio > 0.0);
    CHECK_FALSE(q.slack.empty());
    CHECK_FALSE(q.binding.empty());
}

TEST_CASE("property: equilibrium state invariants") {
    std::mt19937_64 rng(oracle::kSeed + 25);
    std::uniform_int_distribution<int> dim(2, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = dim(rng);
        const Matrix a = oracle::positive_technology(rng, n, 0.6);
        const Vector b = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const EquilibriumState s = assemble_equilibrium(Technology(a), b);
        CHECK(((s.b_bar - b).array() <= 1e-8 * std::max(1.0, b.maxCoeff())).all());
        for (Index i : s.binding) CHECK(std::abs(s.b_bar(i) - b(i)) <= 1e-8 * std::max(1.0, b(i)));
        CHECK(s.binding.size() + s.slack.size() == static_cast<std::size_t>(n));
        CHECK((s.p.array() >= 0.0).all());
        CHECK(std::abs(s.p.sum() - 1.0) < 1e-10);
        if (s.mode == PriceMode::Support)
            for (Index j : s.slack) CHECK(s.p(j) == 0.0);
        CHECK(s.excess_ratio >= -1e-12);
        CHECK(s.excess_ratio < 1.0);
        CHECK(std::abs(s.excess_ratio - excess_supply(b, s.b_bar, s.p_u)) < 1e-15);
        for (Index i = 0; i < n; ++i) CHECK((contains(s.binding, i) != contains(s.slack, i)));
    }
}

}  // TEST_SUITE
