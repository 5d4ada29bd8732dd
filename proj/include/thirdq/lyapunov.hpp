// lyapunov.hpp - Solvers for X^T Z + Z X = Y

#pragma once

#include "thirdq/spectral.hpp"

namespace thirdq {

enum class LyapunovMethod { Eigenbasis, SchurBartelsStewart };

const char* to_string(LyapunovMethod m);

struct LyapunovSolution {
    CMatrix Z;        // symmetric
    double residual;  // ||X^T Z + Z X - Y||_F / ||Y||_F, absolute when Y = 0
    LyapunovMethod method;
};

double lyapunov_residual(const CMatrix& X, const CMatrix& Y, const CMatrix& Z);

/// Diagonal solve in the eigenbasis of X. Throws ResonantSpectrum or
/// IllConditioned (cond(P) above tol.ill_conditioned).
LyapunovSolution solve_eigenbasis(const CMatrix& X, const CMatrix& Y,
                                  const RapiditySpectrum& spectrum, const Tolerances& tol = {});

/// Complex Schur factorization followed by triangular back-substitution.
LyapunovSolution solve_schur(const CMatrix& X, const CMatrix& Y, const Tolerances& tol = {});

/// Eigenbasis first, Schur when the eigenbasis is ill-conditioned.
/// Requires a Stable spectrum.
LyapunovSolution solve(const CMatrix& X, const CMatrix& Y, const RapiditySpectrum& spectrum,
                       const Tolerances& tol = {});

}  // namespace thirdq
