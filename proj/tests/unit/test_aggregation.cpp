#include "iomodel/aggregation.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace iomodel;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix fine3() { return (Matrix(3, 3) << 0.1, 0.1, 0.2, 0.1, 0.1, 0.2, 0.2, 0.2, 0.1).finished(); }

AggregationMap map3to2() { return AggregationMap({0, 0, 1}, 2); }

struct FineEconomy {
    Matrix a;
    Vector p;
    Vector x;
    AggregationMap f;
};

FineEconomy random_economy(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> fine_count(2, 12);
    const Index m = fine_count(rng);
    std::uniform_int_distribution<int> coarse_count(1, static_cast<int>(m));
    const Index n = coarse_count(rng);
    std::vector<Index> target(static_cast<std::size_t>(m));
    for (Index l = 0; l < m; ++l) target[static_cast<std::size_t>(l)] = l < n ? l : std::uniform_int_distribution<Index>(0, n - 1)(rng);
    std::shuffle(target.begin(), target.end(), rng);
    const Matrix a = oracle::positive_technology(rng, m, 0.7);
    const Vector c = oracle::uniform_vector(rng, m, 0.1, 1.0);
    // Half the draws use cost-covering prices so that value added is positive.
    const Vector p = std::bernoulli_distribution(0.5)(rng)
                         ? oracle::neumann_solve(a.transpose(), oracle::uniform_vector(rng, m, 0.1, 1.0))
                         : oracle::uniform_vector(rng, m, 0.5, 2.0);
    return FineEconomy{a, p, oracle::neumann_solve(a, c), AggregationMap(target, n)};
}

/// Loop-based grouping used as an independent reference.
AggregatedTable reference_aggregate(const Matrix& a, const Vector& p, const Vector& x, const AggregationMap& f) {
    const Index n = f.coarse();
    AggregatedTable t{Matrix::Zero(n, n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    Matrix flow = Matrix::Zero(n, n);
    for (Index l = 0; l < f.fine(); ++l) {
        t.x(f(l)) += p(l) * x(l);
        double used = 0.0;
        double cost = 0.0;
        for (Index s = 0; s < f.fine(); ++s) {
            flow(f(l), f(s)) += p(l) * a(l, s) * x(s);
            used += a(l, s) * x(s);
            cost += a(s, l) * p(s);
        }
        t.c(f(l)) += p(l) * (x(l) - used);
        t.delta(f(l)) += (p(l) - cost) * x(l);
    }
    for (Index k = 0; k < n; ++k)
        for (Index i = 0; i < n; ++i) t.a_bar(k, i) = flow(k, i) / t.x(i);
    return t;
}

}  // namespace

TEST_SUITE("aggregation") {

TEST_CASE("map parsing") {
    const AggregationMap f = AggregationMap::parse("# fine coarse\n1 1\n2 1\n3 2\n");
    CHECK(f.fine() == 3);
    CHECK(f.coarse() == 2);
    CHECK(f.targets() == std::vector<Index>{0, 0, 1});
    CHECK(kind_of([] { AggregationMap::parse("1 1\n1 2\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { AggregationMap::parse("1 x\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { AggregationMap::parse("1 1\n3 1\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { AggregationMap::parse("1 2\n2 2\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { AggregationMap::load("/nonexistent/map.txt"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { AggregationMap({0, 2}, 3); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("three to two aggregation example") {
    const AggregatedTable t = aggregate(Technology(fine3()), Vector::Ones(3), Vector::Ones(3), map3to2());
    CHECK(max_abs(t.a_bar - (Matrix(2, 2) << 0.2, 0.4, 0.2, 0.1).finished()) < 1e-14);
    CHECK(max_abs(t.x - (Vector(2) << 2, 1).finished()) < 1e-14);
    CHECK(max_abs(t.c - (Vector(2) << 1.2, 0.5).finished()) < 1e-14);
    CHECK(max_abs(t.delta - (Vector(2) << 1.2, 0.5).finished()) < 1e-14);
    CHECK(std::abs(t.c.sum() - t.delta.sum()) < 1e-14);
    CHECK(is_productive(t.technology()));
}

TEST_CASE("identity map recodes the economy in value units") {
    const Vector p = (Vector(3) << 1, 2, 4).finished();
    const Vector x = (Vector(3) << 1.2, 1.1, 1.0).finished();
    const AggregatedTable t = aggregate(Technology(fine3()), p, x, AggregationMap({0, 1, 2}, 3));
    CHECK(max_abs(t.x - p.cwiseProduct(x)) < 1e-14);
    const Matrix expected = p.asDiagonal() * fine3() * p.cwiseInverse().asDiagonal();
    CHECK(max_abs(t.a_bar - expected) < 1e-14);
}

TEST_CASE("aggregate rejects a fine economy with negative final consumption") {
    CHECK(kind_of([] {
              aggregate(Technology(fine3()), Vector::Ones(3), (Vector(3) << 1, 1, 10).finished(), map3to2());
          }) == ErrorKind::BalanceViolation);
}

TEST_CASE("scaling identities on the three to two example") {
    const Technology t(fine3());
    CHECK(scaling_identity_check(t, Vector::Ones(3), Vector::Ones(3), map3to2(), Vector::Ones(2), Vector::Ones(2))
              .holds(1e-15));
    const ScalingCheck doubled = scaling_identity_check(t, Vector::Ones(3), Vector::Ones(3), map3to2(),
                                                        (Vector(2) << 2, 1).finished(), Vector::Ones(2));
    CHECK(doubled.holds(1e-14));
    // Row 1 doubles and column 1 halves.
    const AggregatedTable base = aggregate(t, Vector::Ones(3), Vector::Ones(3), map3to2());
    const AggregatedTable moved = aggregate(t, (Vector(3) << 2, 2, 1).finished(), Vector::Ones(3), map3to2());
    CHECK(moved.a_bar(0, 1) == doctest::Approx(2.0 * base.a_bar(0, 1)));
    CHECK(moved.a_bar(1, 0) == doctest::Approx(0.5 * base.a_bar(1, 0)));
    CHECK(moved.a_bar(0, 0) == doctest::Approx(base.a_bar(0, 0)));

    std::mt19937_64 rng(oracle::kSeed + 50);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalingCheck sc = scaling_identity_check(t, Vector::Ones(3), Vector::Ones(3), map3to2(),
                                                       oracle::uniform_vector(rng, 2, 0.2, 5.0),
                                                       oracle::uniform_vector(rng, 2, 0.2, 5.0));
        CHECK(sc.holds(1e-10));
    }
}

TEST_CASE("relative_prices examples") {
    const AggregatedTable t = aggregate(Technology(fine3()), Vector::Ones(3), Vector::Ones(3), map3to2());
    const Vector unit = relative_prices(t, t.delta.cwiseQuotient(t.x));
    CHECK(max_abs(unit - Vector::Ones(2)) < 1e-12);

    const AggregatedTable zero{Matrix::Zero(2, 2), Vector::Ones(2), Vector::Ones(2), Vector::Ones(2)};
    const Vector dh = (Vector(2) << 0.3, 0.7).finished();
    CHECK(max_abs(relative_prices(zero, dh) - dh) == 0.0);

    const Vector p_hat = relative_prices(t, dh);
    CHECK(max_abs(p_hat - t.a_bar.transpose() * p_hat - dh) < 1e-12);
}

TEST_CASE("aggregated value added examples") {
    const Technology t(fine3());
    CHECK(aggregated_value_added_check(t, Vector::Ones(3), Vector::Ones(3), map3to2(), Vector::Ones(2)));
    CHECK(aggregated_value_added_check(t, Vector::Ones(3), Vector::Ones(3), map3to2(), (Vector(2) << 1.5, 0.7).finished()));
}

TEST_CASE("zero value-added economy keeps both sides at zero") {
    // Column-stochastic A with the uniform price eigenvector: p = A^T p.
    const Matrix a = (Matrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
    const Vector x = Vector::Ones(2);
    CHECK(aggregated_value_added_error(Technology(a), Vector::Ones(2), x, AggregationMap({0, 0}, 1), Vector::Ones(1)) ==
          0.0);
}

TEST_CASE("property: aggregation identities on random fine economies") {
    std::mt19937_64 rng(oracle::kSeed + 51);
    int priced = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const FineEconomy e = random_economy(rng);
        const Technology t(e.a);
        const AggregatedTable agg = aggregate(t, e.p, e.x, e.f);
        const AggregatedTable ref = reference_aggregate(e.a, e.p, e.x, e.f);
        const double scale = agg.x.maxCoeff();
        CHECK(max_abs(agg.a_bar - ref.a_bar) < 1e-12);
        CHECK(max_abs(agg.x - ref.x) < 1e-12 * scale);
        CHECK(max_abs(agg.c - ref.c) < 1e-10 * scale);
        CHECK(max_abs(agg.delta - ref.delta) < 1e-10 * scale);
        CHECK(std::abs(agg.c.sum() - agg.delta.sum()) < 1e-10 * scale);
        CHECK(oracle::spectral_radius(agg.a_bar) < 1.0);
        if (agg.delta.minCoeff() >= 0.0) {
            ++priced;
            CHECK(max_abs(relative_prices(agg, agg.delta.cwiseQuotient(agg.x)) - Vector::Ones(agg.x.size())) < 1e-10);
        }
        const Index n = e.f.coarse();
        CHECK(scaling_identity_check(t, e.p, e.x, e.f, oracle::uniform_vector(rng, n, 0.2, 5.0),
                                     oracle::uniform_vector(rng, n, 0.2, 5.0))
                  .holds(1e-10));
        CHECK(aggregated_value_added_check(t, e.p, e.x, e.f, oracle::uniform_vector(rng, n, 0.2, 5.0)));
    }
    CHECK(priced >= 20);
}

}  // TEST_SUITE
