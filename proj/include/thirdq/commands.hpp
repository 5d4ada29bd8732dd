// commands.hpp - Analysis commands behind the thirdq CLI
//
// Each command takes a parsed model document and returns its output text
// and exit code; the executable only handles argument parsing and I/O.

#pragma once

#include <optional>
#include <string>

#include "thirdq/model_io.hpp"
#include "thirdq/spectral.hpp"

namespace thirdq::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
    kOk = 0,
    kSchemaError = 2,
    kNumericalFailure = 3,
    kNotStable = 4,
    kLimitExceeded = 5,
    kVerificationFailed = 6,
};

int exit_code_for(ErrorKind kind);

struct CommandResult {
    int exit_code = kOk;
    std::string out;
    std::string err;
};

struct CommonOptions {
    Tolerances tol;
};

enum class Emit { Csv, Json };

struct SpectrumOptions {
    int max_excitation = 2;
    std::size_t limit = kDefaultSpectrumLimit;
    Emit emit = Emit::Csv;
};

struct DynamicsOptions {
    double t0 = 0.0;
    double t1 = 10.0;
    int steps = 101;
    /// "vacuum" or a path to {"C": 2n x 2n, "m": 2n (optional)}.
    std::string initial = "vacuum";
    bool with_mean = false;
};

struct VerifyOptions {
    std::optional<int> cutoff;
    double t1 = 10.0;
    int steps = 21;
    /// Multiplies every comparison tolerance.
    double tolerance_scale = 1.0;
};

struct SweepOptions {
    std::string param;
    double from = 0.0;
    double to = 1.0;
    int steps = 11;
    unsigned threads = 0;  // 0: hardware concurrency
};

CommandResult run_analyze(const io::json& doc, const CommonOptions& common);
CommandResult run_ness(const io::json& doc, const CommonOptions& common);
CommandResult run_spectrum(const io::json& doc, const CommonOptions& common,
                           const SpectrumOptions& opts);
CommandResult run_dynamics(const io::json& doc, const CommonOptions& common,
                           const DynamicsOptions& opts);
CommandResult run_verify(const io::json& doc, const CommonOptions& common,
                         const VerifyOptions& opts);
CommandResult run_sweep(const io::json& doc, const CommonOptions& common,
                        const SweepOptions& opts);

/// Default oracle cutoff: max(10, ceil(8 (1 + max occupation))), lowered to
/// the largest cutoff the memory cap admits.
int default_cutoff(int n, double max_occupation, std::size_t cap);

/// Formats a double with 17 significant digits.
std::string format_number(double x);

}  // namespace thirdq::cli
