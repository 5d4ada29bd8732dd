// model.hpp - Problem statement for a quadratic n-boson Lindblad system

#pragma once

#include <optional>
#include <vector>

#include "thirdq/types.hpp"

namespace thirdq {

/// One bath coupling L = l.a + k.a^dag + offset.
struct LindbladChannel {
    CVector l;
    CVector k;
    cplx offset{0.0, 0.0};
};

/// H_sys = a^dag.H a + a.K a + a^dag.conj(K) a^dag + f.a + conj(f).a^dag
struct BosonicModel {
    int n = 0;
    CMatrix H;
    CMatrix K;
    std::vector<LindbladChannel> channels;
    std::optional<CVector> forces;

    /// Set by validate_model when H or K had to be averaged back onto
    /// the Hermitian / symmetric subspace.
    bool symmetrized = false;

    bool has_linear_terms() const;
};

struct BathMatrices {
    CMatrix M;  // sum l (x) conj(l)
    CMatrix N;  // sum k (x) conj(k)
    CMatrix L;  // sum l (x) conj(k)
};

BosonicModel validate_model(BosonicModel raw, double tol_input = Tolerances{}.input);

BathMatrices bath_matrices(const std::vector<LindbladChannel>& channels, int n);

}  // namespace thirdq
