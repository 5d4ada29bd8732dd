// ness.cpp - Steady-state correlators, Wick moments and moment dynamics

#include "thirdq/ness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace thirdq {

NessSolution physical_correlators(const CMatrix& Z, int n)
{
    if (Z.rows() != 2 * n || Z.cols() != 2 * n) {
        throw Error(ErrorKind::DimensionMismatch, "Z must be 2n x 2n");
    }
    const double asym = (Z - Z.transpose()).norm();
    if (asym > 1e-8 * std::max(1.0, Z.norm())) {
        throw Error(ErrorKind::AsymmetricZ, "Z is not symmetric (||Z - Z^T||_F = " +
                                                std::to_string(asym) + ")");
    }
    NessSolution s;
    s.Z = Z;
    s.pair_aa = Z.topLeftCorner(n, n);
    s.pair_adad = Z.bottomRightCorner(n, n);
    s.normal_ad_a = Z.topRightCorner(n, n);
    s.occupations = s.normal_ad_a.diagonal().real();
    return s;
}

cplx wick_moment(const CMatrix& Z, const std::array<int, 4>& slots)
{
    for (int s : slots) {
        if (s < 0 || s >= Z.rows()) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "correlator slot " + std::to_string(s) + " outside [0, " +
                            std::to_string(Z.rows()) + ")");
        }
    }
    const auto [p, q, r, s] = slots;
    return Z(p, q) * Z(r, s) + Z(p, r) * Z(q, s) + Z(p, s) * Z(q, r);
}

CVector mean_source(const BosonicModel& model)
{
    const int n = model.n;
    CVector ga = CVector::Zero(n);
    if (model.forces) ga -= kI * model.forces->conjugate();
    for (const auto& c : model.channels) {
        ga += c.k * std::conj(c.offset) - c.l.conjugate() * c.offset;
    }
    CVector g(2 * n);
    g << ga, ga.conjugate();
    return g;
}

CVector steady_mean(const CMatrix& X, const CVector& g, const RapiditySpectrum& spectrum)
{
    if (spectrum.stability != Stability::Stable) {
        throw Error(ErrorKind::NotStable, "steady mean requires a stable rapidity spectrum");
    }
    return (2.0 * X.transpose()).partialPivLu().solve(g);
}

std::vector<CVector> mean_trajectory(const CMatrix& X, const CVector& g, const CVector& m0,
                                     const std::vector<double>& times)
{
    const auto m = X.rows();
    if (g.size() != m || m0.size() != m) {
        throw Error(ErrorKind::DimensionMismatch, "g and m0 must have length 2n");
    }
    // Augmented generator acting on (m, 1).
    CMatrix A = CMatrix::Zero(m + 1, m + 1);
    A.topLeftCorner(m, m) = -2.0 * X.transpose();
    A.topRightCorner(m, 1) = g;
    CVector state(m + 1);
    state << m0, cplx{1.0, 0.0};

    std::vector<CVector> out;
    out.reserve(times.size());
    for (double t : times) {
        const CMatrix E = (A * t).exp();
        out.push_back((E * state).head(m));
    }
    return out;
}

namespace {

struct BlockPropagator {
    CMatrix E;  // exp(-2 X h)
    CMatrix W;  // int_0^h E(s)^T 2Y E(s) ds
};

BlockPropagator block_propagator(const CMatrix& X, const CMatrix& Y, double h)
{
    // dC/dt = A^T C + C A + Q with A = -2X, Q = 2Y. exp([[-A^T, Q], [0, A]] h)
    // has blocks F12 = int exp(-A^T (h-s)) Q exp(A s) ds and F22 = exp(A h).
    const auto m = X.rows();
    CMatrix G = CMatrix::Zero(2 * m, 2 * m);
    G.topLeftCorner(m, m) = 2.0 * X.transpose();
    G.topRightCorner(m, m) = 2.0 * Y;
    G.bottomRightCorner(m, m) = -2.0 * X;
    const CMatrix F = (G * h).exp();
    BlockPropagator p{F.bottomRightCorner(m, m), CMatrix()};
    p.W = p.E.transpose() * F.topRightCorner(m, m);
    return p;
}

/// Advances C over `dt` in substeps short enough that the growing block
/// exp(2 X^T h) stays O(1).
class BlockStepper {
public:
    BlockStepper(const CMatrix& X, const CMatrix& Y)
        : X_(X), Y_(Y), rate_(2.0 * X.cwiseAbs().rowwise().sum().maxCoeff()) {}

    CMatrix advance(const CMatrix& C, double dt)
    {
        if (dt == 0.0) return C;
        const double substeps = std::max(1.0, std::ceil(std::abs(dt) * rate_));
        const double h = dt / substeps;
        if (!cached_ || h != cached_h_) {
            cached_ = block_propagator(X_, Y_, h);
            cached_h_ = h;
        }
        CMatrix out = C;
        for (int k = 0; k < static_cast<int>(substeps); ++k) {
            out = cached_->E.transpose() * out * cached_->E + cached_->W;
        }
        return out;
    }

private:
    const CMatrix& X_;
    const CMatrix& Y_;
    double rate_;
    std::optional<BlockPropagator> cached_;
    double cached_h_ = 0.0;
};

}  // namespace

CovarianceTrajectory covariance_trajectory(const CMatrix& X, const CMatrix& Y, const CMatrix& C0,
                                           const std::vector<double>& times,
                                           const std::optional<MeanDrive>& drive,
                                           TrajectoryMethod method, const Tolerances& tol)
{
    const auto m = X.rows();
    if (Y.rows() != m || C0.rows() != m || C0.cols() != m) {
        throw Error(ErrorKind::DimensionMismatch, "X, Y and C0 must be 2n x 2n");
    }
    if ((C0 - C0.transpose()).norm() > 1e-12 * std::max(1.0, C0.norm())) {
        throw Error(ErrorKind::NonSymmetricInitial, "initial correlator C0 must be symmetric");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw Error(ErrorKind::InvalidInput, "times must be sorted ascending");
    }

    // Second moments split into the connected part, which obeys the
    // homogeneous equation, plus m m^T.
    CMatrix connected0 = C0;
    std::optional<std::vector<CVector>> means;
    if (drive) {
        connected0 -= drive->m0 * drive->m0.transpose();
        means = mean_trajectory(X, drive->g, drive->m0, times);
    }

    std::optional<CMatrix> Z;
    if (method != TrajectoryMethod::BlockExponential) {
        const RapiditySpectrum spec = rapidities(X, tol);
        if (spec.stability == Stability::Stable) {
            Z = solve(X, Y, spec, tol).Z;
        } else if (method == TrajectoryMethod::ClosedForm) {
            throw Error(ErrorKind::NotStable, "closed-form trajectory requires a stable model");
        }
    }

    CovarianceTrajectory out;
    out.times = times;
    out.C.reserve(times.size());
    BlockStepper stepper(X, Y);
    CMatrix current = connected0;
    double now = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        CMatrix C;
        if (Z) {
            const CMatrix E = (-2.0 * t * X).exp();
            C = *Z + E.transpose() * (connected0 - *Z) * E;
        } else {
            current = stepper.advance(current, t - now);
            now = t;
            C = current;
        }
        if (means) C += (*means)[i] * (*means)[i].transpose();
        out.C.push_back(0.5 * (C + C.transpose()));
    }
    out.m = std::move(means);
    return out;
}

}  // namespace thirdq
