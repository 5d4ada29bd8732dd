// structure.cpp - Builds X, Y and S0 from a validated model

#include "thirdq/structure.hpp"

#include <algorithm>
#include <cmath>

namespace thirdq {

StructureMatrices build_structure(const BosonicModel& model)
{
    const int n = model.n;
    BathMatrices bath = bath_matrices(model.channels, n);
    const CMatrix& H = model.H;
    const CMatrix& K = model.K;
    const CMatrix& M = bath.M;
    const CMatrix& N = bath.N;
    const CMatrix& L = bath.L;

    CMatrix X(2 * n, 2 * n);
    X.topLeftCorner(n, n) = kI * H.conjugate() - N.conjugate() + M;
    X.topRightCorner(n, n) = -2.0 * kI * K - L + L.transpose();
    X.bottomLeftCorner(n, n) = 2.0 * kI * K.conjugate() - L.conjugate() + L.adjoint();
    X.bottomRightCorner(n, n) = -kI * H - N + M.conjugate();
    X *= 0.5;

    CMatrix Y(2 * n, 2 * n);
    Y.topLeftCorner(n, n) = -2.0 * kI * K.conjugate() - L.conjugate() - L.adjoint();
    Y.topRightCorner(n, n) = 2.0 * N;
    Y.bottomLeftCorner(n, n) = 2.0 * N.transpose();
    Y.bottomRightCorner(n, n) = 2.0 * kI * K - L - L.transpose();
    Y *= 0.5;
    Y = (0.5 * (Y + Y.transpose())).eval();

    const cplx S0 = M.trace() - N.trace();
    return StructureMatrices{std::move(X), std::move(Y), S0, std::move(bath)};
}

RMatrix realify(const CMatrix& A)
{
    if (A.rows() != A.cols() || A.rows() % 2 != 0) {
        throw Error(ErrorKind::DimensionMismatch, "realify expects a 2n x 2n matrix");
    }
    const Eigen::Index n = A.rows() / 2;
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix U(2 * n, 2 * n);
    U << CMatrix::Identity(n, n), kI * CMatrix::Identity(n, n),
         kI * CMatrix::Identity(n, n), CMatrix::Identity(n, n);
    U *= s;
    const CMatrix B = U * A * U.adjoint();
    const double scale = A.norm();
    const double remainder = B.imag().norm();
    if (remainder > 1e-9 * std::max(scale, 1e-300) && remainder > 0.0) {
        throw Error(ErrorKind::NotRealSimilar,
                    "matrix is not similar to a real matrix under the particle/hole rotation");
    }
    return B.real();
}

}  // namespace thirdq
