// spectral.hpp - Rapidities, stability, decay-mode spectrum and the symplectic eigenbasis

#pragma once

#include <cstddef>
#include <vector>

#include "thirdq/types.hpp"

namespace thirdq {

enum class Stability { Stable, Unstable, Marginal };

const char* to_string(Stability s);

struct RapiditySpectrum {
    CVector beta;   // sorted by (Re asc, Im asc)
    CMatrix P;      // X = P diag(beta) P^-1, unit-norm columns
    double cond_P = 1.0;
    Stability stability = Stability::Marginal;
};

/// Eigen-decomposes X. Throws DefectiveX when cond(P) exceeds tol.defective.
RapiditySpectrum rapidities(const CMatrix& X, const Tolerances& tol = {});

Stability classify_stability(const CVector& beta, double tol_marginal = Tolerances{}.marginal);

/// 2 min Re beta, the slowest relaxation rate. Throws NotStable.
double spectral_gap(const CVector& beta, double tol_marginal = Tolerances{}.marginal);

struct DecayMode {
    std::vector<int> m;
    cplx lambda;
};

inline constexpr std::size_t kDefaultSpectrumLimit = 1'000'000;

/// Number of multi-indices of length `slots` with total at most `max_total`.
/// Saturates at SIZE_MAX.
std::size_t decay_mode_count(int slots, int max_total);

/// All modes lambda_m = -2 sum m_r beta_r with |m| <= max_total_excitation,
/// slowest decay first, ties by ascending lexicographic m.
std::vector<DecayMode> liouville_spectrum(const CVector& beta, int max_total_excitation,
                                          std::size_t limit = kDefaultSpectrumLimit,
                                          double tol_marginal = Tolerances{}.marginal);

struct SymplecticV {
    CMatrix V;        // 4n x 4n
    CMatrix Z_used;
    double symplectic_residual = 0.0;   // ||V^T J V - J||_F
    double similarity_residual = 0.0;   // ||V (J S) V^-1 - (-D + D)||_F / max(1, ||J S||_F)
};

/// Symplectic unit J = i sigma_y (x) 1_m, of size 2m.
CMatrix symplectic_unit(Eigen::Index m);

/// V = (P^T + P^-1) [[1, -Z], [0, 1]]. Checks V^T J V = J and that V
/// diagonalizes J S built from X and Y.
SymplecticV build_V(const RapiditySpectrum& spectrum, const CMatrix& X, const CMatrix& Y,
                    const CMatrix& Z);

}  // namespace thirdq
