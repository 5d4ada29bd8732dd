// structure.hpp - Quadratic-form representation of the Liouvillean

#pragma once

#include "thirdq/model.hpp"

namespace thirdq {

/// Liouvillean structure matrices.
///
/// Index convention used by every module: rows/columns [0, n) belong to the
/// left-annihilation sector (nu = 0, acting like a_j), rows/columns [n, 2n)
/// to the nu = 1 sector (acting like a_j^dag). The full symmetric form is
/// [[0, -X], [-X^T, Y]] over (a_0, a_1, a'_0, a'_1) and is never stored.
struct StructureMatrices {
    CMatrix X;
    CMatrix Y;
    cplx S0;  // tr M - tr N; reported only
    BathMatrices bath;
};

StructureMatrices build_structure(const BosonicModel& model);

/// Real part of U A U^-1 with U = (1 + i sigma_x)/sqrt(2) (x) 1_n.
/// Throws NotRealSimilar if the imaginary remainder exceeds 1e-9 relative.
RMatrix realify(const CMatrix& A);

}  // namespace thirdq
