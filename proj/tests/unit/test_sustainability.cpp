#include "iomodel/sustainability.hpp"

#include "expect_error.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace iomodel;

namespace {

Matrix sym() { return (Matrix(2, 2) << 0.2, 0.3, 0.3, 0.2).finished(); }

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

Vector output_for(const Matrix& a, const Vector& alpha) {
    const Index n = a.rows();
    return a * (Matrix::Identity(n, n) - a).partialPivLu().solve(alpha);
}

}  // namespace

TEST_SUITE("sustainability") {

TEST_CASE("check_sustainable symmetric example") {
    const SustainabilityVerdict v = check_sustainable(Technology(sym()), Vector::Ones(2));
    REQUIRE(v.sustainable);
    CHECK_FALSE(v.regularized);
    CHECK(max_abs(v.b1 - Vector::Constant(2, 2.0)) < 1e-12);
    CHECK(max_abs(v.alpha - Vector::Ones(2)) < 1e-12);
    CHECK(max_abs(v.prices - Vector::Constant(2, 0.5)) < 1e-10);
    CHECK(max_abs(v.margins - Vector::Constant(2, 0.25)) < 1e-10);
    CHECK(max_abs(clearing_residual(Technology(sym()), Vector::Ones(2), v.prices)) < 1e-10);
}

TEST_CASE("check_sustainable rejects an output the technology cannot absorb") {
    const SustainabilityVerdict v = check_sustainable(Technology(sym()), (Vector(2) << 1, 0).finished());
    CHECK_FALSE(v.sustainable);
    CHECK(v.b1(1) == doctest::Approx(-1.5 * v.b1(0)));
    CHECK_FALSE(v.reason.empty());
}

TEST_CASE("check_sustainable preconditions") {
    CHECK(kind_of([] { check_sustainable(Technology(Matrix::Ones(2, 2)), Vector::Ones(2)); }) == ErrorKind::NotProductive);
    CHECK(kind_of([] { check_sustainable(Technology(Matrix(Vector::Constant(2, 0.5).asDiagonal())), Vector::Ones(2)); }) ==
          ErrorKind::HypothesisViolated);
    CHECK(kind_of([] { check_sustainable(Technology(sym()), Vector::Zero(2)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("clearing_residual examples") {
    const Technology t(sym());
    CHECK(max_abs(clearing_residual(t, Vector::Ones(2), Vector::Constant(2, 0.5))) < 1e-15);
    CHECK(max_abs(clearing_residual(t, Vector::Ones(2), (Vector(2) << 0.6, 0.4).finished())) > 1e-3);
}

TEST_CASE("property: sustainable round trip recovers alpha") {
    std::mt19937_64 rng(oracle::kSeed + 30);
    std::uniform_int_distribution<int> dim(2, 6);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = dim(rng);
        const Matrix a = oracle::positive_technology(rng, n, 0.7);
        const Vector alpha = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const Vector x = output_for(a, alpha);
        const SustainabilityVerdict v = check_sustainable(Technology(a), x);
        REQUIRE(v.sustainable);
        CHECK(max_abs(v.alpha - alpha) < 1e-9 * alpha.maxCoeff());
        CHECK((v.margins.array() > 0.0).all());
        CHECK(max_abs(clearing_residual(Technology(a), x, v.prices)) < 1e-8 * std::max(1.0, x.maxCoeff()));
    }
}

TEST_CASE("property: singular technologies use the regularized preimage") {
    std::mt19937_64 rng(oracle::kSeed + 31);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 3 + trial % 3;
        // Rank two, strictly positive.
        Matrix a = oracle::uniform_matrix(rng, n, 2, 0.1, 1.0) * oracle::uniform_matrix(rng, 2, n, 0.1, 1.0);
        a *= 0.6 / oracle::spectral_radius(a);
        const Vector alpha = oracle::uniform_vector(rng, n, 0.1, 1.0);
        const Vector x = output_for(a, alpha);
        const SustainabilityVerdict v = check_sustainable(Technology(a), x);
        CHECK(v.regularized);
        REQUIRE(v.sustainable);
        CHECK(max_abs(a * v.b1 - x) < 1e-7 * x.maxCoeff());
        CHECK((v.margins.array() > 0.0).all());
        CHECK(max_abs(clearing_residual(Technology(a), x, v.prices)) < 1e-8 * std::max(1.0, x.maxCoeff()));
    }
}

TEST_CASE("property: a surplus with a negative component is rejected") {
    std::mt19937_64 rng(oracle::kSeed + 32);
    std::uniform_int_distribution<int> dim(2, 6);
    int tested = 0;
    while (tested < 50) {
        const Index n = dim(rng);
        const Matrix a = oracle::positive_technology(rng, n, 0.5);
        Vector alpha = oracle::uniform_vector(rng, n, 0.1, 1.0);
        alpha(0) = -0.05;
        const Vector x = output_for(a, alpha);
        if ((x.array() < 0.0).any()) continue;
        ++tested;
        CHECK_FALSE(check_sustainable(Technology(a), x).sustainable);
    }
}

}  // TEST_SUITE
