// support.hpp - Model builders, random generators and independent oracles for tests

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "thirdq/model.hpp"
#include "thirdq/spectral.hpp"
#include "thirdq/structure.hpp"

namespace thirdq::testing {

/// Single oscillator H = omega a^dag a with the two channels
/// (l = 1, k = 0.25) and (l = 0, k = sqrt(0.4375)): u = 1, v = 0.5, w = 0.25.
inline BosonicModel single_oscillator()
{
    BosonicModel m;
    m.n = 1;
    m.H = CMatrix::Constant(1, 1, 1.0);
    m.K = CMatrix::Zero(1, 1);
    m.channels.push_back({CVector::Constant(1, 1.0), CVector::Constant(1, 0.25), {}});
    m.channels.push_back({CVector::Zero(1), CVector::Constant(1, std::sqrt(0.4375)), {}});
    return m;
}

/// Single oscillator with loss rate u and gain rate v realized by one
/// channel each (w = 0).
inline BosonicModel loss_gain_oscillator(double omega, double u, double v)
{
    BosonicModel m;
    m.n = 1;
    m.H = CMatrix::Constant(1, 1, omega);
    m.K = CMatrix::Zero(1, 1);
    m.channels.push_back({CVector::Constant(1, std::sqrt(u)), CVector::Zero(1), {}});
    m.channels.push_back({CVector::Zero(1), CVector::Constant(1, std::sqrt(v)), {}});
    return m;
}

inline BosonicModel closed_oscillator(double omega)
{
    BosonicModel m;
    m.n = 1;
    m.H = CMatrix::Constant(1, 1, omega);
    m.K = CMatrix::Zero(1, 1);
    return m;
}

/// Two hopping modes, per-mode loss/gain plus weak pair coupling on mode 1.
inline BosonicModel two_mode()
{
    BosonicModel m;
    m.n = 2;
    m.H.resize(2, 2);
    m.H << 1.0, 0.3, 0.3, 1.3;
    m.K = CMatrix::Zero(2, 2);
    auto e = [](int j, double x) {
        CVector v = CVector::Zero(2);
        v(j) = x;
        return v;
    };
    m.channels.push_back({e(0, 1.0), e(0, 0.02), {}});
    m.channels.push_back({CVector::Zero(2), e(0, 0.1), {}});
    m.channels.push_back({e(1, 0.8), CVector::Zero(2), {}});
    m.channels.push_back({CVector::Zero(2), e(1, 0.1), {}});
    return m;
}

inline cplx random_complex(std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> g(0.0, scale);
    return {g(rng), g(rng)};
}

inline CMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale)
{
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = random_complex(rng, scale);
    return m;
}

inline CVector random_vector(std::mt19937_64& rng, int n, double scale)
{
    return random_matrix(rng, n, 1, scale).col(0);
}

/// A random valid model: Hermitian H, symmetric K, `channels` random baths.
inline BosonicModel random_model(std::mt19937_64& rng, int n, int channels)
{
    BosonicModel m;
    m.n = n;
    const CMatrix h = random_matrix(rng, n, n, 1.0);
    m.H = 0.5 * (h + h.adjoint());
    const CMatrix k = random_matrix(rng, n, n, 0.15);
    m.K = 0.5 * (k + k.transpose());
    for (int c = 0; c < channels; ++c) {
        m.channels.push_back({random_vector(rng, n, 0.8), random_vector(rng, n, 0.25), {}});
    }
    return m;
}

/// Random model drawn until its rapidity spectrum is Stable.
inline BosonicModel random_stable_model(std::mt19937_64& rng, int n, int max_channels = 4)
{
    std::uniform_int_distribution<int> pick(1, max_channels);
    for (;;) {
        const int channels = std::max(pick(rng), std::min(n, max_channels));
        BosonicModel m = random_model(rng, n, channels);
        const auto s = build_structure(m);
        try {
            if (rapidities(s.X).stability == Stability::Stable) return m;
        } catch (const Error&) {
        }
    }
}

/// Kronecker-vectorized dense solve of X^T Z + Z X = Y (column-major vec).
inline CMatrix lyapunov_by_kronecker(const CMatrix& X, const CMatrix& Y)
{
    const auto m = X.rows();
    const CMatrix Id = CMatrix::Identity(m, m);
    CMatrix A = CMatrix::Zero(m * m, m * m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            // column j of (1 (x) X^T) + (X^T (x) 1) in block form
            if (i == j) A.block(i * m, j * m, m, m) += X.transpose();
            A.block(i * m, j * m, m, m) += X(j, i) * Id;
        }
    }
    const CVector y = Eigen::Map<const CVector>(Y.data(), m * m);
    const CVector z = A.fullPivLu().solve(y);
    return Eigen::Map<const CMatrix>(z.data(), m, m);
}

/// Physically realized n = 2 model whose nu = 0 block of X is
/// [[b, 1], [0, b + eps]] exactly below the diagonal: for small eps the
/// eigenvector matrix has condition number ~ 2 / eps.
inline BosonicModel near_defective_model(cplx b, double eps)
{
    CMatrix A(2, 2);
    A << b, 1.0, 0.0, b + eps;
    // X_00 = (i conj(H) - conj(N) + M) / 2 with N = c 1: M = A + A^dag + c 1,
    // conj(H) = -i (A - A^dag).
    const double c = 1.0;
    const CMatrix Hc = cplx{0.0, -1.0} * (A - A.adjoint());
    BosonicModel m;
    m.n = 2;
    m.H = Hc.conjugate();
    m.K = CMatrix::Zero(2, 2);
    const CMatrix M = A + A.adjoint() + c * CMatrix::Identity(2, 2);
    // M = (1, 1)(1, 1)^T + diag(M00 - 1, M11 - 1); off-diagonal of M is 1.
    CVector ones = CVector::Ones(2);
    m.channels.push_back({ones, CVector::Zero(2), {}});
    CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
    e0(0) = std::sqrt(M(0, 0).real() - 1.0);
    e1(1) = std::sqrt(M(1, 1).real() - 1.0);
    m.channels.push_back({e0, CVector::Zero(2), {}});
    m.channels.push_back({e1, CVector::Zero(2), {}});
    CVector g0 = CVector::Zero(2), g1 = CVector::Zero(2);
    g0(0) = std::sqrt(c);
    g1(1) = std::sqrt(c);
    m.channels.push_back({CVector::Zero(2), g0, {}});
    m.channels.push_back({CVector::Zero(2), g1, {}});
    return m;
}

/// Sorted-multiset distance between two complex lists of equal length
/// (greedy nearest matching).
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b)
{
    double worst = 0.0;
    for (const auto& x : a) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < b.size(); ++i) {
            if (std::abs(b[i] - x) < std::abs(b[best] - x)) best = i;
        }
        worst = std::max(worst, std::abs(b[best] - x));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

}  // namespace thirdq::testing
