// model.cpp - Validation of the model and construction of the bath matrices

#include "thirdq/model.hpp"

#include <algorithm>
#include <string>

namespace thirdq {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::HermiticityViolation: return "HermiticityViolation";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotRealSimilar: return "NotRealSimilar";
    case ErrorKind::DefectiveX: return "DefectiveX";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::CutoffTooLarge: return "CutoffTooLarge";
    case ErrorKind::SymplecticityViolation: return "SymplecticityViolation";
    case ErrorKind::ResonantSpectrum: return "ResonantSpectrum";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::AsymmetricZ: return "AsymmetricZ";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonSymmetricInitial: return "NonSymmetricInitial";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::DegenerateZeroEigenvalue: return "DegenerateZeroEigenvalue";
    }
    return "Unknown";
}

bool BosonicModel::has_linear_terms() const
{
    if (forces && forces->norm() > 0.0) return true;
    return std::any_of(channels.begin(), channels.end(),
                       [](const LindbladChannel& c) { return c.offset != cplx{0.0, 0.0}; });
}

namespace {

void require_shape(const CMatrix& m, int n, const char* name)
{
    if (m.rows() != n || m.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (!m.allFinite()) {
        throw Error(ErrorKind::InvalidInput, std::string(name) + " has non-finite entries");
    }
}

void require_length(const CVector& v, int n, const std::string& name)
{
    if (v.size() != n) {
        throw Error(ErrorKind::DimensionMismatch,
                    name + " must have length " + std::to_string(n));
    }
    if (!v.allFinite()) {
        throw Error(ErrorKind::InvalidInput, name + " has non-finite entries");
    }
}

}  // namespace

BosonicModel validate_model(BosonicModel raw, double tol_input)
{
    const int n = raw.n;
    if (n < 1) {
        throw Error(ErrorKind::DimensionMismatch, "number of modes must be at least 1");
    }
    if (raw.K.size() == 0) raw.K = CMatrix::Zero(n, n);
    require_shape(raw.H, n, "H");
    require_shape(raw.K, n, "K");
    for (std::size_t mu = 0; mu < raw.channels.size(); ++mu) {
        const auto tag = "channel " + std::to_string(mu);
        require_length(raw.channels[mu].l, n, tag + " l");
        require_length(raw.channels[mu].k, n, tag + " k");
    }
    if (raw.forces) require_length(*raw.forces, n, "forces");

    const double h_dev = (raw.H - raw.H.adjoint()).norm();
    if (h_dev > tol_input * std::max(1.0, raw.H.norm())) {
        throw Error(ErrorKind::HermiticityViolation,
                    "H is not Hermitian: ||H - H^dag||_F = " + std::to_string(h_dev));
    }
    const double k_dev = (raw.K - raw.K.transpose()).norm();
    if (k_dev > tol_input * std::max(1.0, raw.K.norm())) {
        throw Error(ErrorKind::SymmetryViolation,
                    "K is not symmetric: ||K - K^T||_F = " + std::to_string(k_dev));
    }
    if (h_dev > 0.0) {
        raw.H = (0.5 * (raw.H + raw.H.adjoint())).eval();
        raw.symmetrized = true;
    }
    if (k_dev > 0.0) {
        raw.K = (0.5 * (raw.K + raw.K.transpose())).eval();
        raw.symmetrized = true;
    }
    return raw;
}

BathMatrices bath_matrices(const std::vector<LindbladChannel>& channels, int n)
{
    BathMatrices bath{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    for (const auto& c : channels) {
        if (c.l.size() != n || c.k.size() != n) {
            throw Error(ErrorKind::DimensionMismatch, "channel vectors must have length n");
        }
        bath.M += c.l * c.l.adjoint();
        bath.N += c.k * c.k.adjoint();
        bath.L += c.l * c.k.adjoint();
    }
    bath.M = (0.5 * (bath.M + bath.M.adjoint())).eval();
    bath.N = (0.5 * (bath.N + bath.N.adjoint())).eval();
    return bath;
}

}  // namespace thirdq
