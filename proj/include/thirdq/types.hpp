// types.hpp - Shared numeric aliases, tolerances and the error type

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace thirdq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Failure categories. The CLI maps each category onto an exit code.
enum class ErrorKind {
    DimensionMismatch,
    HermiticityViolation,
    SymmetryViolation,
    InvalidInput,
    NotRealSimilar,
    DefectiveX,
    NotStable,
    CutoffTooLarge,
    SymplecticityViolation,
    ResonantSpectrum,
    IllConditioned,
    AsymmetricZ,
    IndexOutOfRange,
    NonSymmetricInitial,
    DimensionCap,
    TruncationInsufficient,
    DegenerateZeroEigenvalue,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct Tolerances {
    double input = 1e-9;         // relative Hermiticity/symmetry repair band
    double marginal = 1e-10;     // |Re beta| band classified as Marginal
    double defective = 1e12;     // cond(P) above which X counts as defective
    double ill_conditioned = 1e8;  // eigenbasis Lyapunov gives up above this
};

}  // namespace thirdq
