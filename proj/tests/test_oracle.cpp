#include "doctest.h"

#include "support.hpp"
#include "thirdq/lyapunov.hpp"
#include "thirdq/ness.hpp"
#include "thirdq/oracle.hpp"

using namespace thirdq;
using namespace thirdq::testing;
namespace orc = thirdq::oracle;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

template <class F>
ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidInput;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("ladder operators")
{
    const orc::FockOperators ops = orc::build_fock_operators(1, 3);
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 1) = 1.0;
    a(1, 2) = std::sqrt(2.0);
    CHECK(max_abs(ops.a[0] - a) == 0.0);
    CHECK(max_abs(ops.b(1) - a.adjoint()) == 0.0);

    const CMatrix number = ops.a[0].adjoint() * ops.a[0];
    for (int k = 0; k < 3; ++k) CHECK(std::abs(number(k, k) - cplx(k)) <= 1e-14);

    // [a, a^dag] = 1 except on the top level
    const CMatrix comm = ops.a[0] * ops.a[0].adjoint() - ops.a[0].adjoint() * ops.a[0];
    CHECK(std::abs(comm(0, 0) - 1.0) <= 1e-14);
    CHECK(std::abs(comm(1, 1) - 1.0) <= 1e-14);
    CHECK(std::abs(comm(2, 2) + 2.0) <= 1e-14);
}

TEST_CASE("two-mode operators commute")
{
    const orc::FockOperators ops = orc::build_fock_operators(2, 2);
    CHECK(ops.dim == 4);
    CHECK(max_abs(ops.a[0] * ops.a[1] - ops.a[1] * ops.a[0]) == 0.0);
    // a_1 a_2 |1,1> = |0,0>, with mode 1 the leftmost factor: index 1*2 + 1
    CHECK((ops.a[0] * ops.a[1])(0, 3) == cplx(1.0));
    CHECK(max_abs(ops.a[0] * ops.a[1].adjoint() - ops.a[1].adjoint() * ops.a[0]) == 0.0);
}

TEST_CASE("pure decay Liouvillean at cutoff 2")
{
    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(loss_gain_oscillator(0.0, 1.0, 0.0), 2);
    // vec order (rho00, rho10, rho01, rho11)
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 3) = 2.0;
    expected(1, 1) = -1.0;
    expected(2, 2) = -1.0;
    expected(3, 3) = -2.0;
    CHECK(max_abs(L.Lmat - expected) <= 1e-15);
    const auto ev = orc::oracle_spectrum(L.Lmat);
    CHECK(std::abs(ev.back() - cplx(-2.0)) <= 1e-12);
}

TEST_CASE("Liouvillean preserves the trace")
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        BosonicModel m = random_model(rng, 1 + trial % 2, 1 + trial % 3);
        if (trial % 2) m.forces = random_vector(rng, m.n, 0.3);
        for (auto& c : m.channels) c.offset = random_complex(rng, 0.2);
        const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(validate_model(m), 4);
        CHECK(orc::trace_preservation_residual(L.Lmat) <= 1e-12);
    }
}

TEST_CASE("closed and empty models")
{
    const orc::DenseLiouvillean closed = orc::build_liouvillean_matrix(closed_oscillator(1.0), 6);
    for (cplx z : orc::oracle_spectrum(closed.Lmat)) CHECK(std::abs(z.real()) <= 1e-10);
    CHECK(kind_of([&] { orc::oracle_steady_state(closed); }) == ErrorKind::DegenerateZeroEigenvalue);

    BosonicModel zero;
    zero.n = 1;
    zero.H = CMatrix::Zero(1, 1);
    zero.K = CMatrix::Zero(1, 1);
    const orc::DenseLiouvillean z = orc::build_liouvillean_matrix(zero, 4);
    CHECK(z.Lmat.isZero(0.0));
}

TEST_CASE("memory cap")
{
    CHECK(kind_of([] { orc::build_fock_operators(2, 10, 1000); }) == ErrorKind::DimensionCap);
    CHECK(kind_of([] { orc::build_liouvillean_matrix(single_oscillator(), 40, 1'000'000); }) ==
          ErrorKind::DimensionCap);
}

TEST_CASE("truncation gate")
{
    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(single_oscillator(), 4);
    CHECK(kind_of([&] { orc::oracle_steady_state(L); }) == ErrorKind::TruncationInsufficient);
}

TEST_CASE("single oscillator steady state and spectrum")
{
    const BosonicModel model = validate_model(single_oscillator());
    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(model, 30);
    const auto spectrum = orc::oracle_spectrum(L.Lmat);
    const orc::SteadyState ss = orc::oracle_steady_state(L, &spectrum);

    CHECK(std::abs(ss.eigenvalue) <= 1e-8);
    CHECK(std::abs(ss.moments.trace - 1.0) <= 1e-12);
    CHECK(ss.moments.C(0, 1).real() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(ss.moments.C(0, 0) - cplx(-0.1, 0.2)) <= 1e-6);
    CHECK(std::abs(orc::normal_moment(L.ops, ss.rho, {1, 1, 0, 0}) - cplx(2.05)) <= 1e-5);
    CHECK(ss.hermiticity_defect <= 1e-10);
    CHECK(ss.min_eigenvalue >= -1e-10);

    const StructureMatrices st = build_structure(model);
    const RapiditySpectrum rs = rapidities(st.X);
    const auto modes = liouville_spectrum(rs.beta, 2);
    std::vector<cplx> analytic, top(spectrum.begin(), spectrum.begin() + 6);
    for (const auto& d : modes) analytic.push_back(d.lambda);
    CHECK(multiset_distance(analytic, top) <= 1e-4);
}

TEST_CASE("moments converge with the cutoff")
{
    const BosonicModel model = validate_model(single_oscillator());
    const orc::SteadyState a = orc::oracle_steady_state(orc::build_liouvillean_matrix(model, 30), nullptr);
    const orc::SteadyState b = orc::oracle_steady_state(orc::build_liouvillean_matrix(model, 40), nullptr);
    CHECK(max_abs(a.moments.C - b.moments.C) <= 1e-6);
}

TEST_CASE("pure decay relaxes to the vacuum")
{
    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(loss_gain_oscillator(1.0, 1.0, 0.0), 6);
    const orc::SteadyState ss = orc::oracle_steady_state(L);
    CHECK(max_abs(ss.rho - orc::vacuum_state(L.ops)) <= 1e-10);
}

TEST_CASE("evolution matches the analytic transient")
{
    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(single_oscillator(), 25);
    std::vector<double> t;
    for (int i = 0; i <= 10; ++i) t.push_back(0.5 * i);
    const orc::Evolution ev = orc::oracle_evolve(L, orc::vacuum_state(L.ops), t);
    CHECK(ev.moments[0].C.isZero(0.0));
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(ev.moments[i].trace - 1.0) <= 1e-10);
        CHECK(ev.moments[i].C(0, 1).real() == doctest::Approx(1.0 - std::exp(-t[i])).epsilon(1e-5));
    }
}

TEST_CASE("linear drive terms match the mean equation")
{
    BosonicModel raw = single_oscillator();
    raw.forces = CVector::Constant(1, cplx(0.15, -0.1));
    raw.channels[0].offset = cplx(0.1, 0.05);
    raw.channels[1].offset = cplx(-0.05, 0.1);
    const BosonicModel model = validate_model(raw);
    const StructureMatrices st = build_structure(model);
    const RapiditySpectrum rs = rapidities(st.X);
    const CVector g = mean_source(model);
    const CVector mstar = steady_mean(st.X, g, rs);
    const CMatrix Z = solve(st.X, st.Y, rs).Z;

    const orc::DenseLiouvillean L = orc::build_liouvillean_matrix(model, 40);
    const orc::SteadyState ss = orc::oracle_steady_state(L, nullptr);
    CHECK((ss.moments.m - mstar).norm() <= 1e-6);
    CHECK(max_abs(ss.moments.C - (Z + mstar * mstar.transpose())) <= 1e-6);

    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    const orc::Evolution ev = orc::oracle_evolve(L, orc::vacuum_state(L.ops), t);
    const auto traj = covariance_trajectory(st.X, st.Y, CMatrix::Zero(2, 2), t, MeanDrive{g, CVector::Zero(2)});
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(((*traj.m)[i] - ev.moments[i].m).norm() <= 1e-6);
        CHECK(max_abs(traj.C[i] - ev.moments[i].C) <= 1e-6);
    }
}

TEST_CASE("two-mode pair coupling matches the oracle")
{
    BosonicModel raw = two_mode();
    raw.K(0, 1) = raw.K(1, 0) = cplx(0.03, 0.01);
    raw.K(0, 0) = 0.02;
    const BosonicModel model = validate_model(raw);
    const StructureMatrices st = build_structure(model);
    const RapiditySpectrum rs = rapidities(st.X);
    REQUIRE(rs.stability == Stability::Stable);
    const CMatrix Z = solve(st.X, st.Y, rs).Z;
    const orc::SteadyState ss = orc::oracle_steady_state(orc::build_liouvillean_matrix(model, 7), nullptr);
    CHECK(max_abs(ss.moments.C - Z) <= 1e-6);
}

}  // TEST_SUITE
