// lyapunov.cpp - Eigenbasis and Bartels–Stewart solvers for the NESS correlator

#include "thirdq/lyapunov.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace thirdq {

const char* to_string(LyapunovMethod m)
{
    switch (m) {
    case LyapunovMethod::Eigenbasis: return "Eigenbasis";
    case LyapunovMethod::SchurBartelsStewart: return "SchurBartelsStewart";
    }
    return "Unknown";
}

namespace {

void check_shapes(const CMatrix& X, const CMatrix& Y)
{
    if (X.rows() != X.cols() || Y.rows() != X.rows() || Y.cols() != X.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "X and Y must be square and of equal size");
    }
}

CMatrix symmetrize(const CMatrix& A) { return 0.5 * (A + A.transpose()); }

}  // namespace

double lyapunov_residual(const CMatrix& X, const CMatrix& Y, const CMatrix& Z)
{
    const double r = (X.transpose() * Z + Z * X - Y).norm();
    const double scale = Y.norm();
    return scale > 0.0 ? r / scale : r;
}

LyapunovSolution solve_eigenbasis(const CMatrix& X, const CMatrix& Y,
                                  const RapiditySpectrum& spectrum, const Tolerances& tol)
{
    check_shapes(X, Y);
    if (!(spectrum.cond_P <= tol.ill_conditioned)) {
        throw Error(ErrorKind::IllConditioned,
                    "eigenvector matrix too ill-conditioned for the eigenbasis solve (cond = " +
                        std::to_string(spectrum.cond_P) + ")");
    }
    const auto m = X.rows();
    const CVector& beta = spectrum.beta;
    const CMatrix& P = spectrum.P;
    const CMatrix Pinv = P.partialPivLu().inverse();

    CMatrix Zt = P.transpose() * Y * P;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            const cplx denom = beta(j) + beta(k);
            if (std::abs(denom) < tol.marginal) {
                throw Error(ErrorKind::ResonantSpectrum,
                            "rapidities " + std::to_string(j) + " and " + std::to_string(k) +
                                " sum to zero: Lyapunov solution not unique");
            }
            Zt(j, k) /= denom;
        }
    }
    CMatrix Z = symmetrize(Pinv.transpose() * Zt * Pinv);
    const double res = lyapunov_residual(X, Y, Z);
    return LyapunovSolution{std::move(Z), res, LyapunovMethod::Eigenbasis};
}

LyapunovSolution solve_schur(const CMatrix& X, const CMatrix& Y, const Tolerances& tol)
{
    check_shapes(X, Y);
    const auto m = X.rows();
    Eigen::ComplexSchur<CMatrix> schur(X, true);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorKind::DefectiveX, "Schur factorization of X did not converge");
    }
    const CMatrix& T = schur.matrixT();
    const CMatrix& Q = schur.matrixU();

    // X = Q T Q^dag turns the equation into T^T W + W T = Q^T Y Q with
    // W = Q^T Z Q. T^T is lower triangular, so W(j, k) depends only on
    // entries above it in column k and left of it in row j.
    const CMatrix F = Q.transpose() * Y * Q;
    CMatrix W = CMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            const cplx pivot = T(j, j) + T(k, k);
            if (std::abs(pivot) < tol.marginal) {
                throw Error(ErrorKind::ResonantSpectrum,
                            "Schur pivot T(j,j)+T(k,k) vanishes: Lyapunov solution not unique");
            }
            cplx rhs = F(j, k);
            for (Eigen::Index i = 0; i < j; ++i) rhs -= T(i, j) * W(i, k);
            for (Eigen::Index i = 0; i < k; ++i) rhs -= W(j, i) * T(i, k);
            W(j, k) = rhs / pivot;
        }
    }
    CMatrix Z = symmetrize(Q.conjugate() * W * Q.adjoint());
    const double res = lyapunov_residual(X, Y, Z);
    return LyapunovSolution{std::move(Z), res, LyapunovMethod::SchurBartelsStewart};
}

LyapunovSolution solve(const CMatrix& X, const CMatrix& Y, const RapiditySpectrum& spectrum,
                       const Tolerances& tol)
{
    if (spectrum.stability != Stability::Stable) {
        throw Error(ErrorKind::NotStable,
                    std::string(to_string(spectrum.stability)) +
                        " spectrum: Lyapunov solution not unique or no steady state");
    }
    try {
        return solve_eigenbasis(X, Y, spectrum, tol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::IllConditioned) throw;
    }
    return solve_schur(X, Y, tol);
}

}  // namespace thirdq
