// oracle.hpp - Brute-force truncated-Fock Lindblad superoperator
//
// Density matrices are column-vectorized: vec(A rho B) = (B^T (x) A) vec(rho).
// Mode j is the j-th Kronecker factor from the left.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "thirdq/model.hpp"

namespace thirdq::oracle {

/// Entries of the dense Liouvillean allowed by default; THIRDQ_MEMCAP overrides.
inline constexpr std::size_t kDefaultMemoryCap = 13'000'000;

std::size_t memory_cap();

struct FockOperators {
    int n = 0;
    int cutoff = 0;
    Eigen::Index dim = 0;
    std::vector<CMatrix> a;

    /// b_r = a_r for r < n, a_{r-n}^dag otherwise.
    CMatrix b(int r) const;
};

FockOperators build_fock_operators(int n, int cutoff, std::size_t cap = memory_cap());

struct DenseLiouvillean {
    FockOperators ops;
    CMatrix H;                // system Hamiltonian on the truncated space
    std::vector<CMatrix> jump;
    CMatrix Lmat;             // dim^2 x dim^2
};

DenseLiouvillean build_liouvillean_matrix(const BosonicModel& model, int cutoff,
                                          std::size_t cap = memory_cap());

/// ||vec(1)^dag Lmat|| / ||Lmat||.
double trace_preservation_residual(const CMatrix& Lmat);

/// All eigenvalues, sorted by real part descending (ties by imaginary part
/// ascending); the first `count` when count > 0.
std::vector<cplx> oracle_spectrum(const CMatrix& Lmat, std::size_t count = 0);

/// Normal-ordered moments of a density matrix.
struct Moments {
    CMatrix C;   // tr(:b_r b_s: rho)
    CVector m;   // tr(b_r rho)
    cplx trace;
};

Moments moments_of(const FockOperators& ops, const CMatrix& rho);

/// tr(:b_p b_q b_r b_s: rho).
cplx normal_moment(const FockOperators& ops, const CMatrix& rho, const std::array<int, 4>& slots);

struct SteadyState {
    CMatrix rho;
    cplx eigenvalue;               // eigenvalue of Lmat the state belongs to
    Moments moments;
    double top_level_population;   // max over modes of the weight on level cutoff-1
    double min_eigenvalue;         // of rho
    double hermiticity_defect;     // ||rho - rho^dag|| before Hermitization
};

/// Right eigenvector at the eigenvalue nearest zero. `spectrum` may carry
/// precomputed eigenvalues of Lmat. Throws TruncationInsufficient when the
/// top Fock level holds at least `truncation_tol` of the population.
SteadyState oracle_steady_state(const DenseLiouvillean& L,
                                const std::vector<cplx>* spectrum = nullptr,
                                double truncation_tol = 1e-8);

CMatrix vacuum_state(const FockOperators& ops);

struct Evolution {
    std::vector<double> times;
    std::vector<Moments> moments;
};

/// vec(rho(t)) = exp(Lmat t) vec(rho0). Equal consecutive time steps reuse one
/// propagator.
Evolution oracle_evolve(const DenseLiouvillean& L, const CMatrix& rho0,
                        const std::vector<double>& times);

/// Population of the top Fock level, maximized over modes.
double top_level_population(const FockOperators& ops, const CMatrix& rho);

}  // namespace thirdq::oracle
