// spectral.cpp - Diagonalization of X and the decay-mode spectrum

#include "thirdq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace thirdq {

const char* to_string(Stability s)
{
    switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
    }
    return "Unknown";
}

namespace {

// Sorts `order` by primary key, then re-sorts runs whose primary keys agree
// within `eps` by the secondary comparison. Keeps the ordering deterministic
// when conjugate pairs differ only by rounding in the primary key.
template <class Primary, class Secondary>
void cluster_sort(std::vector<std::size_t>& order, Primary primary, double eps,
                  Secondary secondary_less)
{
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return primary(a) < primary(b); });
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t stop = start + 1;
        while (stop < order.size() &&
               std::abs(primary(order[stop]) - primary(order[stop - 1])) <= eps) {
            ++stop;
        }
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(stop), secondary_less);
        start = stop;
    }
}

double condition_number(const CMatrix& P)
{
    Eigen::JacobiSVD<CMatrix> svd(P);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

}  // namespace

Stability classify_stability(const CVector& beta, double tol_marginal)
{
    bool all_stable = true;
    for (const auto& b : beta) {
        if (b.real() < -tol_marginal) return Stability::Unstable;
        if (b.real() <= tol_marginal) all_stable = false;
    }
    return all_stable ? Stability::Stable : Stability::Marginal;
}

RapiditySpectrum rapidities(const CMatrix& X, const Tolerances& tol)
{
    if (X.rows() != X.cols() || X.rows() == 0) {
        throw Error(ErrorKind::DimensionMismatch, "X must be a non-empty square matrix");
    }
    Eigen::ComplexEigenSolver<CMatrix> solver(X, true);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::DefectiveX, "eigen-decomposition of X did not converge");
    }
    const CVector& values = solver.eigenvalues();
    const CMatrix& vectors = solver.eigenvectors();

    const auto size = static_cast<std::size_t>(values.size());
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    const double eps = 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff());
    cluster_sort(
        order, [&](std::size_t i) { return values(static_cast<Eigen::Index>(i)).real(); }, eps,
        [&](std::size_t a, std::size_t b) {
            return values(static_cast<Eigen::Index>(a)).imag() <
                   values(static_cast<Eigen::Index>(b)).imag();
        });

    RapiditySpectrum out;
    out.beta.resize(values.size());
    out.P.resize(X.rows(), X.cols());
    for (std::size_t r = 0; r < size; ++r) {
        const auto src = static_cast<Eigen::Index>(order[r]);
        const auto dst = static_cast<Eigen::Index>(r);
        out.beta(dst) = values(src);
        out.P.col(dst) = vectors.col(src).normalized();
    }
    out.cond_P = condition_number(out.P);
    if (!(out.cond_P <= tol.defective)) {
        throw Error(ErrorKind::DefectiveX, "X not diagonalizable within tolerance (cond(P) = " +
                                               std::to_string(out.cond_P) + ")");
    }
    out.stability = classify_stability(out.beta, tol.marginal);
    return out;
}

double spectral_gap(const CVector& beta, double tol_marginal)
{
    if (classify_stability(beta, tol_marginal) != Stability::Stable) {
        throw Error(ErrorKind::NotStable, "spectral gap requires a stable rapidity spectrum");
    }
    return 2.0 * beta.real().minCoeff();
}

std::size_t decay_mode_count(int slots, int max_total)
{
    // C(slots + max_total, slots), built incrementally to stay exact.
    if (max_total < 0) return 0;
    const std::size_t cap = std::numeric_limits<std::size_t>::max();
    std::size_t count = 1;
    const int k = std::min(slots, max_total);
    const int top = slots + max_total;
    for (int i = 1; i <= k; ++i) {
        const std::size_t num = static_cast<std::size_t>(top - k + i);
        const std::size_t g = std::gcd(count, static_cast<std::size_t>(i));
        const std::size_t reduced = count / g;
        const std::size_t div = static_cast<std::size_t>(i) / g;
        if (reduced > cap / num) return cap;
        count = reduced * num / div;
    }
    return count;
}

std::vector<DecayMode> liouville_spectrum(const CVector& beta, int max_total_excitation,
                                          std::size_t limit, double tol_marginal)
{
    if (max_total_excitation < 0) {
        throw Error(ErrorKind::InvalidInput, "maximum total excitation must be non-negative");
    }
    if (classify_stability(beta, tol_marginal) != Stability::Stable) {
        throw Error(ErrorKind::NotStable, "decay-mode spectrum requires a stable rapidity spectrum");
    }
    const int slots = static_cast<int>(beta.size());
    const std::size_t count = decay_mode_count(slots, max_total_excitation);
    if (count > limit) {
        throw Error(ErrorKind::CutoffTooLarge,
                    "decay-mode enumeration would produce " + std::to_string(count) +
                        " entries (limit " + std::to_string(limit) + ")");
    }

    std::vector<DecayMode> modes;
    modes.reserve(count);
    std::vector<int> m(static_cast<std::size_t>(slots), 0);
    // Lexicographic enumeration: the slot r cycles through the remaining budget.
    auto recurse = [&](auto&& self, int slot, int budget) -> void {
        if (slot == slots) {
            cplx lambda{0.0, 0.0};
            for (int r = 0; r < slots; ++r) lambda += static_cast<double>(m[static_cast<std::size_t>(r)]) * beta(r);
            modes.push_back(DecayMode{m, -2.0 * lambda});
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            m[static_cast<std::size_t>(slot)] = v;
            self(self, slot + 1, budget - v);
        }
        m[static_cast<std::size_t>(slot)] = 0;
    };
    recurse(recurse, 0, max_total_excitation);

    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    const double scale = std::max(1.0, 2.0 * max_total_excitation * beta.cwiseAbs().maxCoeff());
    cluster_sort(
        order, [&](std::size_t i) { return -modes[i].lambda.real(); }, 1e-9 * scale,
        [](std::size_t a, std::size_t b) { return a < b; });

    std::vector<DecayMode> sorted;
    sorted.reserve(modes.size());
    for (auto i : order) sorted.push_back(std::move(modes[i]));
    return sorted;
}

CMatrix symplectic_unit(Eigen::Index m)
{
    CMatrix J = CMatrix::Zero(2 * m, 2 * m);
    J.topRightCorner(m, m).setIdentity();
    J.bottomLeftCorner(m, m) = -CMatrix::Identity(m, m);
    return J;
}

SymplecticV build_V(const RapiditySpectrum& spectrum, const CMatrix& X, const CMatrix& Y,
                    const CMatrix& Z)
{
    const Eigen::Index m = spectrum.P.rows();
    if (X.rows() != m || Y.rows() != m || Z.rows() != m || Z.cols() != m) {
        throw Error(ErrorKind::DimensionMismatch, "P, X, Y and Z must share one dimension");
    }
    const CMatrix& P = spectrum.P;
    const CMatrix Pinv = P.partialPivLu().inverse();

    SymplecticV out;
    out.Z_used = Z;
    out.V = CMatrix::Zero(2 * m, 2 * m);
    out.V.topLeftCorner(m, m) = P.transpose();
    out.V.topRightCorner(m, m) = -P.transpose() * Z;
    out.V.bottomRightCorner(m, m) = Pinv;

    // Closed-form inverse [[P^-T, Z P], [0, P]] avoids a 4n x 4n inversion.
    CMatrix Vinv = CMatrix::Zero(2 * m, 2 * m);
    Vinv.topLeftCorner(m, m) = Pinv.transpose();
    Vinv.topRightCorner(m, m) = Z * P;
    Vinv.bottomRightCorner(m, m) = P;

    const CMatrix J = symplectic_unit(m);
    out.symplectic_residual = (out.V.transpose() * J * out.V - J).norm();

    // J S with S = [[0, -X], [-X^T, Y]].
    CMatrix JS = CMatrix::Zero(2 * m, 2 * m);
    JS.topLeftCorner(m, m) = -X.transpose();
    JS.topRightCorner(m, m) = Y;
    JS.bottomRightCorner(m, m) = X;
    CMatrix D = CMatrix::Zero(2 * m, 2 * m);
    D.diagonal().head(m) = -spectrum.beta;
    D.diagonal().tail(m) = spectrum.beta;
    out.similarity_residual = (out.V * JS * Vinv - D).norm() / std::max(1.0, JS.norm());

    const double slack = std::max(1.0, spectrum.cond_P);
    if (out.symplectic_residual > 1e-9 * slack) {
        throw Error(ErrorKind::SymplecticityViolation,
                    "V^T J V deviates from J by " + std::to_string(out.symplectic_residual));
    }
    if (out.similarity_residual > 1e-8 * slack) {
        throw Error(ErrorKind::SymplecticityViolation,
                    "V does not diagonalize J S (relative residual " +
                        std::to_string(out.similarity_residual) + ")");
    }
    return out;
}

}  // namespace thirdq
