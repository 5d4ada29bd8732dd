// ness.hpp - Physical observables of the steady state and transient moments

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "thirdq/lyapunov.hpp"
#include "thirdq/model.hpp"

namespace thirdq {

/// Correlators of the steady state. With b = (a_1..a_n, a_1^dag..a_n^dag),
/// Z(r, s) = <:b_r b_s:>, so Z(j, n+k) = <a_k^dag a_j>.
struct NessSolution {
    CMatrix Z;
    CMatrix pair_aa;      // <a_j a_k>
    CMatrix pair_adad;    // <a_j^dag a_k^dag>
    CMatrix normal_ad_a;  // (j, k) -> <a_k^dag a_j>
    RVector occupations;  // <a_j^dag a_j>
};

NessSolution physical_correlators(const CMatrix& Z, int n);

/// <:b_p b_q b_r b_s:> of a zero-mean Gaussian state (sum over the three pairings).
cplx wick_moment(const CMatrix& Z, const std::array<int, 4>& slots);

/// Inhomogeneous term g of dm/dt = -2 X^T m + g for m = <b>, assembled from
/// the forces and the channel offsets.
CVector mean_source(const BosonicModel& model);

/// Solves 2 X^T m = g. Throws NotStable unless the spectrum is Stable.
CVector steady_mean(const CMatrix& X, const CVector& g, const RapiditySpectrum& spectrum);

/// m(t) for dm/dt = -2 X^T m + g, exact for any X.
std::vector<CVector> mean_trajectory(const CMatrix& X, const CVector& g, const CVector& m0,
                                     const std::vector<double>& times);

enum class TrajectoryMethod {
    Auto,              // closed form when Stable, block exponential otherwise
    ClosedForm,        // Z + E^T (C0 - Z) E, E = exp(-2 X t)
    BlockExponential,  // Van Loan block exponential, valid for any X
};

struct MeanDrive {
    CVector g;
    CVector m0;
};

struct CovarianceTrajectory {
    std::vector<double> times;
    std::vector<CMatrix> C;                  // <:b_r b_s:>(t)
    std::optional<std::vector<CVector>> m;   // <b_r>(t), when driven
};

/// Normal-ordered second moments under dC/dt = 2 (Y - X^T C - C X) (plus the
/// m g^T + g m^T source when `drive` is given).
CovarianceTrajectory covariance_trajectory(const CMatrix& X, const CMatrix& Y, const CMatrix& C0,
                                           const std::vector<double>& times,
                                           const std::optional<MeanDrive>& drive = std::nullopt,
                                           TrajectoryMethod method = TrajectoryMethod::Auto,
                                           const Tolerances& tol = {});

}  // namespace thirdq
