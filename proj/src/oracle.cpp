// oracle.cpp - Dense Liouvillean on a truncated Fock space

#include "thirdq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace thirdq::oracle {

std::size_t memory_cap()
{
    if (const char* env = std::getenv("THIRDQ_MEMCAP")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return static_cast<std::size_t>(v);
    }
    return kDefaultMemoryCap;
}

namespace {

std::size_t checked_power(std::size_t base, int exp, std::size_t cap)
{
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > cap / base) return cap + 1;
        out *= base;
    }
    return out;
}

}  // namespace

CMatrix FockOperators::b(int r) const
{
    return r < n ? a[static_cast<std::size_t>(r)] : CMatrix(a[static_cast<std::size_t>(r - n)].adjoint());
}

FockOperators build_fock_operators(int n, int cutoff, std::size_t cap)
{
    if (n < 1 || cutoff < 2) {
        throw Error(ErrorKind::InvalidInput, "oracle needs n >= 1 and cutoff >= 2");
    }
    const std::size_t dim = checked_power(static_cast<std::size_t>(cutoff), n, cap);
    if (dim > cap || dim * dim > cap) {
        throw Error(ErrorKind::DimensionCap,
                    "truncated Fock space cutoff^n = " + std::to_string(dim) +
                        " exceeds the oracle memory cap " + std::to_string(cap));
    }

    CMatrix single = CMatrix::Zero(cutoff, cutoff);
    for (int m = 0; m + 1 < cutoff; ++m) single(m, m + 1) = std::sqrt(static_cast<double>(m + 1));

    FockOperators ops;
    ops.n = n;
    ops.cutoff = cutoff;
    ops.dim = static_cast<Eigen::Index>(dim);
    for (int j = 0; j < n; ++j) {
        CMatrix op = CMatrix::Identity(1, 1);
        for (int site = 0; site < n; ++site) {
            const CMatrix factor = site == j ? single : CMatrix(CMatrix::Identity(cutoff, cutoff));
            op = Eigen::kroneckerProduct(op, factor).eval();
        }
        ops.a.push_back(std::move(op));
    }
    return ops;
}

DenseLiouvillean build_liouvillean_matrix(const BosonicModel& model, int cutoff, std::size_t cap)
{
    const int n = model.n;
    const std::size_t dim = checked_power(static_cast<std::size_t>(cutoff), n, cap);
    const std::size_t side = dim > cap ? cap + 1 : dim * dim;
    if (side > cap || side * side > cap) {
        throw Error(ErrorKind::DimensionCap,
                    "dense Liouvillean with cutoff " + std::to_string(cutoff) + " and " +
                        std::to_string(n) + " modes exceeds the oracle memory cap " +
                        std::to_string(cap) + " (set THIRDQ_MEMCAP to raise it)");
    }

    DenseLiouvillean L;
    L.ops = build_fock_operators(n, cutoff, cap);
    const auto d = L.ops.dim;
    const auto& a = L.ops.a;

    L.H = CMatrix::Zero(d, d);
    for (int p = 0; p < n; ++p) {
        const CMatrix ap_dag = a[p].adjoint();
        for (int q = 0; q < n; ++q) {
            const CMatrix aq_dag = a[q].adjoint();
            L.H += model.H(p, q) * ap_dag * a[q];
            L.H += model.K(p, q) * a[p] * a[q];
            L.H += std::conj(model.K(p, q)) * ap_dag * aq_dag;
        }
        if (model.forces) {
            const cplx f = (*model.forces)(p);
            L.H += f * a[p] + std::conj(f) * ap_dag;
        }
    }

    for (const auto& c : model.channels) {
        CMatrix J = c.offset * CMatrix::Identity(d, d);
        for (int j = 0; j < n; ++j) J += c.l(j) * a[j] + c.k(j) * a[j].adjoint();
        L.jump.push_back(std::move(J));
    }

    const CMatrix Id = CMatrix::Identity(d, d);
    L.Lmat = -kI * (Eigen::kroneckerProduct(Id, L.H) - Eigen::kroneckerProduct(CMatrix(L.H.transpose()), Id)).eval();
    for (const auto& J : L.jump) {
        const CMatrix JdJ = J.adjoint() * J;
        L.Lmat += 2.0 * Eigen::kroneckerProduct(CMatrix(J.conjugate()), J).eval();
        L.Lmat -= Eigen::kroneckerProduct(Id, JdJ).eval();
        L.Lmat -= Eigen::kroneckerProduct(CMatrix(JdJ.transpose()), Id).eval();
    }
    return L;
}

double trace_preservation_residual(const CMatrix& Lmat)
{
    const auto side = Lmat.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(side))));
    Eigen::RowVectorXcd left = Eigen::RowVectorXcd::Zero(side);
    for (Eigen::Index i = 0; i < d; ++i) left(i + i * d) = 1.0;
    const double scale = Lmat.norm();
    const double r = (left * Lmat).norm();
    return scale > 0.0 ? r / scale : r;
}

std::vector<cplx> oracle_spectrum(const CMatrix& Lmat, std::size_t count)
{
    Eigen::ComplexEigenSolver<CMatrix> solver(Lmat, false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidInput, "oracle eigensolver did not converge");
    }
    std::vector<cplx> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(values.begin(), values.end(), [](const cplx& x, const cplx& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() < y.imag();
    });
    if (count > 0 && count < values.size()) values.resize(count);
    return values;
}

namespace {

CMatrix normal_product(const FockOperators& ops, std::vector<int> slots)
{
    // Creation operators commute among themselves, as do annihilators, so a
    // stable partition puts the product in normal order.
    std::stable_partition(slots.begin(), slots.end(), [&](int r) { return r >= ops.n; });
    CMatrix out = CMatrix::Identity(ops.dim, ops.dim);
    for (int r : slots) out = (out * ops.b(r)).eval();
    return out;
}

}  // namespace

Moments moments_of(const FockOperators& ops, const CMatrix& rho)
{
    const int m = 2 * ops.n;
    Moments out;
    out.C = CMatrix::Zero(m, m);
    out.m = CVector::Zero(m);
    out.trace = rho.trace();
    for (int r = 0; r < m; ++r) {
        out.m(r) = (ops.b(r) * rho).trace();
        for (int s = r; s < m; ++s) {
            const cplx v = (normal_product(ops, {r, s}) * rho).trace();
            out.C(r, s) = v;
            out.C(s, r) = v;
        }
    }
    return out;
}

cplx normal_moment(const FockOperators& ops, const CMatrix& rho, const std::array<int, 4>& slots)
{
    for (int s : slots) {
        if (s < 0 || s >= 2 * ops.n) {
            throw Error(ErrorKind::IndexOutOfRange, "moment slot out of range");
        }
    }
    return (normal_product(ops, {slots.begin(), slots.end()}) * rho).trace();
}

double top_level_population(const FockOperators& ops, const CMatrix& rho)
{
    double worst = 0.0;
    for (int j = 0; j < ops.n; ++j) {
        Eigen::Index stride = 1;
        for (int s = j + 1; s < ops.n; ++s) stride *= ops.cutoff;
        double pop = 0.0;
        for (Eigen::Index i = 0; i < ops.dim; ++i) {
            if ((i / stride) % ops.cutoff == ops.cutoff - 1) pop += rho(i, i).real();
        }
        worst = std::max(worst, std::abs(pop));
    }
    return worst;
}

SteadyState oracle_steady_state(const DenseLiouvillean& L, const std::vector<cplx>* spectrum,
                                double truncation_tol)
{
    std::vector<cplx> computed;
    if (!spectrum) {
        computed = oracle_spectrum(L.Lmat);
        spectrum = &computed;
    }
    std::vector<cplx> by_modulus = *spectrum;
    std::sort(by_modulus.begin(), by_modulus.end(),
              [](const cplx& x, const cplx& y) { return std::abs(x) < std::abs(y); });
    const double radius = std::max(1.0, std::abs(by_modulus.back()));
    if (by_modulus.size() > 1 && std::abs(by_modulus[1]) <= 1e-6 * radius) {
        throw Error(ErrorKind::DegenerateZeroEigenvalue,
                    "oracle Liouvillean has more than one eigenvalue at zero");
    }
    const cplx lambda0 = by_modulus.front();

    // Inverse iteration with a shift just off the target eigenvalue.
    const auto side = L.Lmat.rows();
    const auto d = L.ops.dim;
    const cplx shift = lambda0 + cplx{1e-9 * radius, 0.0};
    Eigen::PartialPivLU<CMatrix> lu(L.Lmat - shift * CMatrix::Identity(side, side));
    CVector v = CVector::Zero(side);
    for (Eigen::Index i = 0; i < d; ++i) v(i + i * d) = 1.0;
    v.normalize();
    for (int it = 0; it < 4; ++it) {
        v = lu.solve(v);
        v.normalize();
    }

    CMatrix rho = Eigen::Map<CMatrix>(v.data(), d, d);
    SteadyState out;
    out.eigenvalue = lambda0;
    const cplx tr = rho.trace();
    rho /= tr;
    out.hermiticity_defect = (rho - rho.adjoint()).norm();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    rho /= rho.trace();
    out.rho = rho;

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    out.top_level_population = top_level_population(L.ops, rho);
    if (!(out.top_level_population < truncation_tol)) {
        throw Error(ErrorKind::TruncationInsufficient,
                    "top Fock level holds population " + fmt::format("{:.3g}", out.top_level_population) +
                        " at cutoff " + std::to_string(L.ops.cutoff) + "; raise --cutoff");
    }
    out.moments = moments_of(L.ops, rho);
    return out;
}

CMatrix vacuum_state(const FockOperators& ops)
{
    CMatrix rho = CMatrix::Zero(ops.dim, ops.dim);
    rho(0, 0) = 1.0;
    return rho;
}

Evolution oracle_evolve(const DenseLiouvillean& L, const CMatrix& rho0,
                        const std::vector<double>& times)
{
    if (!std::is_sorted(times.begin(), times.end())) {
        throw Error(ErrorKind::InvalidInput, "times must be sorted ascending");
    }
    const auto d = L.ops.dim;
    if (rho0.rows() != d || rho0.cols() != d) {
        throw Error(ErrorKind::DimensionMismatch, "initial density matrix has the wrong size");
    }
    Evolution out;
    out.times = times;
    CVector state = Eigen::Map<const CVector>(rho0.data(), d * d);
    double current = 0.0;
    double cached_step = -1.0;
    CMatrix propagator;
    for (double t : times) {
        const double step = t - current;
        if (step != 0.0) {
            if (std::abs(step - cached_step) > 1e-14 * std::max(1.0, std::abs(step))) {
                propagator = (L.Lmat * step).exp();
                cached_step = step;
            }
            state = propagator * state;
            current = t;
        }
        const CMatrix rho = Eigen::Map<const CMatrix>(state.data(), d, d);
        out.moments.push_back(moments_of(L.ops, rho));
    }
    return out;
}

}  // namespace thirdq::oracle
