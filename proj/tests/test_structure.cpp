#include "doctest.h"

#include "support.hpp"
#include "thirdq/structure.hpp"

using namespace thirdq;
using namespace thirdq::testing;

TEST_SUITE("structure") {

TEST_CASE("single oscillator X and Y")
{
    // u = 1, v = 0.5, w = 0.25, omega = 1
    const StructureMatrices s = build_structure(validate_model(single_oscillator()));
    CMatrix X(2, 2), Y(2, 2);
    X << cplx(0.25, 0.5), 0.0, 0.0, cplx(0.25, -0.5);
    Y << -0.25, 0.5, 0.5, -0.25;
    CHECK((s.X - X).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((s.Y - Y).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(std::abs(s.S0 - cplx(0.5)) <= 1e-15);
}

TEST_CASE("closed system")
{
    const StructureMatrices s = build_structure(validate_model(closed_oscillator(1.0)));
    CHECK(std::abs(s.X(0, 0) - cplx(0.0, 0.5)) <= 1e-15);
    CHECK(std::abs(s.X(1, 1) - cplx(0.0, -0.5)) <= 1e-15);
    CHECK(s.Y.isZero(0.0));
}

TEST_CASE("trace identity")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const BosonicModel m = validate_model(random_model(rng, 3, trial % 4));
        const StructureMatrices s = build_structure(m);
        const cplx expected = s.bath.M.trace().real() - s.bath.N.trace().real();
        CHECK(std::abs(s.X.trace() - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("realify")
{
    const StructureMatrices s = build_structure(validate_model(single_oscillator()));
    RMatrix expected(2, 2);
    expected << 0.25, 0.5, -0.5, 0.25;
    CHECK((realify(s.X) - expected).cwiseAbs().maxCoeff() <= 1e-15);

    CHECK(realify(CMatrix::Zero(2, 2)).isZero(0.0));

    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = kI;
    bad(1, 1) = kI;
    CHECK_THROWS_AS(realify(bad), Error);
    try {
        realify(bad);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotRealSimilar);
    }
}

TEST_CASE("random models: Y symmetric, trace identity, real similarity")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 5;
        const BosonicModel m = validate_model(random_model(rng, n, trial % 5));
        const StructureMatrices s = build_structure(m);
        CHECK((s.Y - s.Y.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, s.Y.norm()));

        const double tr = s.bath.M.trace().real() - s.bath.N.trace().real();
        CHECK(std::abs(s.X.trace() - tr) <= 1e-12 * std::max(1.0, std::abs(tr)));

        const RMatrix rx = realify(s.X);
        const RMatrix ry = realify(s.Y);
        CHECK(ry.rows() == 2 * n);

        std::vector<cplx> ex, er;
        const CVector a = Eigen::ComplexEigenSolver<CMatrix>(s.X).eigenvalues();
        const CVector b = Eigen::EigenSolver<RMatrix>(rx).eigenvalues();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            ex.push_back(a(i));
            er.push_back(b(i));
        }
        CHECK(multiset_distance(ex, er) <= 1e-9 * std::max(1.0, s.X.norm()));
    }
}

}  // TEST_SUITE
