// commands.cpp - Implementation of the analyze/ness/spectrum/dynamics/verify/sweep commands

#include "thirdq/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "thirdq/lyapunov.hpp"
#include "thirdq/ness.hpp"
#include "thirdq/oracle.hpp"
#include "thirdq/spectral.hpp"
#include "thirdq/structure.hpp"

namespace thirdq::cli {

using ojson = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::HermiticityViolation:
    case ErrorKind::SymmetryViolation:
    case ErrorKind::InvalidInput:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::NonSymmetricInitial:
        return kSchemaError;
    case ErrorKind::NotStable:
        return kNotStable;
    case ErrorKind::CutoffTooLarge:
    case ErrorKind::DimensionCap:
    case ErrorKind::TruncationInsufficient:
        return kLimitExceeded;
    case ErrorKind::NotRealSimilar:
    case ErrorKind::DefectiveX:
    case ErrorKind::SymplecticityViolation:
    case ErrorKind::ResonantSpectrum:
    case ErrorKind::IllConditioned:
    case ErrorKind::AsymmetricZ:
    case ErrorKind::DegenerateZeroEigenvalue:
        return kNumericalFailure;
    }
    return kNumericalFailure;
}

std::string format_number(double x) { return fmt::format("{:.17g}", x == 0.0 ? 0.0 : x); }

int default_cutoff(int n, double max_occupation, std::size_t cap)
{
    int cutoff = std::max(10, static_cast<int>(std::ceil(8.0 * (1.0 + std::max(0.0, max_occupation)))));
    auto entries = [n](int c) {
        double e = 1.0;
        for (int i = 0; i < 4 * n; ++i) e *= c;
        return e;
    };
    while (cutoff > 2 && entries(cutoff) > static_cast<double>(cap)) --cutoff;
    return cutoff;
}

namespace {

struct Pipeline {
    BosonicModel model;
    StructureMatrices structure;
    RapiditySpectrum spectrum;
};

Pipeline run_pipeline(const io::json& doc, const Tolerances& tol)
{
    Pipeline p;
    p.model = validate_model(io::parse_model(doc), tol.input);
    p.structure = build_structure(p.model);
    p.spectrum = rapidities(p.structure.X, tol);
    return p;
}

CommandResult guarded(const std::function<CommandResult()>& body)
{
    try {
        return body();
    } catch (const Error& e) {
        return CommandResult{exit_code_for(e.kind()), "",
                             fmt::format("error: {}: {}\n", to_string(e.kind()), e.what())};
    } catch (const nlohmann::json::exception& e) {
        return CommandResult{kSchemaError, "", fmt::format("error: InvalidInput: {}\n", e.what())};
    }
}

ojson header(const char* command, const io::json& doc, const Tolerances& tol)
{
    ojson j;
    j["tool"] = "thirdq";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["model_sha256"] = io::document_hash(doc);
    j["tolerances"] = ojson{{"input", tol.input},
                            {"marginal", tol.marginal},
                            {"defective", tol.defective},
                            {"ill_conditioned", tol.ill_conditioned}};
    return j;
}

ojson cjson(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson vjson(const CVector& v)
{
    ojson out = ojson::array();
    for (const auto& z : v) out.push_back(cjson(z));
    return out;
}

ojson mjson(const CMatrix& m)
{
    ojson out = ojson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vjson(m.row(r).transpose()));
    return out;
}

ojson rjson(const RVector& v)
{
    ojson out = ojson::array();
    for (double x : v) out.push_back(x);
    return out;
}

void add_summary(ojson& j, const Pipeline& p, const Tolerances& tol)
{
    const auto& X = p.structure.X;
    const auto& bath = p.structure.bath;
    const cplx trace_x = X.trace();
    const cplx trace_mn = bath.M.trace() - bath.N.trace();
    j["n"] = p.model.n;
    j["symmetrized"] = p.model.symmetrized;
    j["rapidities"] = vjson(p.spectrum.beta);
    j["stability"] = to_string(p.spectrum.stability);
    j["min_re_beta"] = p.spectrum.beta.real().minCoeff();
    if (p.spectrum.stability == Stability::Stable) {
        j["spectral_gap"] = spectral_gap(p.spectrum.beta, tol.marginal);
    } else {
        j["spectral_gap"] = nullptr;
    }
    j["cond_P"] = p.spectrum.cond_P;
    j["cond_P_warning"] = p.spectrum.cond_P > tol.ill_conditioned;
    j["S0"] = cjson(p.structure.S0);
    j["trace_X"] = cjson(trace_x);
    j["trace_identity_residual"] = std::abs(trace_x - trace_mn) / std::max(1.0, std::abs(trace_mn));
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void require_stable(const RapiditySpectrum& spec)
{
    switch (spec.stability) {
    case Stability::Stable: return;
    case Stability::Marginal:
        throw Error(ErrorKind::NotStable, "marginal spectrum: Lyapunov solution not unique");
    case Stability::Unstable:
        throw Error(ErrorKind::NotStable,
                    "unstable spectrum: a rapidity lies left of the imaginary axis, no steady state");
    }
}

std::vector<double> time_grid(double t0, double t1, int steps)
{
    if (steps < 1) throw Error(ErrorKind::InvalidInput, "--steps must be at least 1");
    if (t1 < t0) throw Error(ErrorKind::InvalidInput, "--t1 must not precede --t0");
    if (steps == 1 || t0 == t1) return {t0};
    std::vector<double> times(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        times[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (steps - 1);
    }
    return times;
}

std::string slot_name(int r, int n)
{
    return r < n ? fmt::format("a{}", r + 1) : fmt::format("a{}^dag", r - n + 1);
}

}  // namespace

CommandResult run_analyze(const io::json& doc, const CommonOptions& common)
{
    return guarded([&] {
        const Pipeline p = run_pipeline(doc, common.tol);
        ojson j = header("analyze", doc, common.tol);
        add_summary(j, p, common.tol);
        return CommandResult{kOk, dump(j), ""};
    });
}

CommandResult run_ness(const io::json& doc, const CommonOptions& common)
{
    return guarded([&] {
        const Pipeline p = run_pipeline(doc, common.tol);
        require_stable(p.spectrum);
        const auto& st = p.structure;
        const LyapunovSolution sol = solve(st.X, st.Y, p.spectrum, common.tol);
        const NessSolution ness = physical_correlators(sol.Z, p.model.n);

        ojson j = header("ness", doc, common.tol);
        add_summary(j, p, common.tol);
        j["lyapunov"] = ojson{{"method", to_string(sol.method)}, {"residual", sol.residual}};
        j["Z"] = mjson(ness.Z);
        j["pair_aa"] = mjson(ness.pair_aa);
        j["pair_adad"] = mjson(ness.pair_adad);
        j["normal_ad_a"] = mjson(ness.normal_ad_a);
        j["occupations"] = rjson(ness.occupations);
        if (p.model.has_linear_terms()) {
            j["steady_mean"] = vjson(steady_mean(st.X, mean_source(p.model), p.spectrum));
        }
        return CommandResult{kOk, dump(j), ""};
    });
}

CommandResult run_spectrum(const io::json& doc, const CommonOptions& common,
                           const SpectrumOptions& opts)
{
    return guarded([&] {
        const Pipeline p = run_pipeline(doc, common.tol);
        require_stable(p.spectrum);
        const auto modes =
            liouville_spectrum(p.spectrum.beta, opts.max_excitation, opts.limit, common.tol.marginal);
        const int slots = 2 * p.model.n;
        if (opts.emit == Emit::Json) {
            ojson j = header("spectrum", doc, common.tol);
            add_summary(j, p, common.tol);
            j["max_excitation"] = opts.max_excitation;
            ojson list = ojson::array();
            for (const auto& mode : modes) list.push_back(ojson{{"m", mode.m}, {"lambda", cjson(mode.lambda)}});
            j["modes"] = std::move(list);
            return CommandResult{kOk, dump(j), ""};
        }
        std::string out;
        for (int r = 0; r < slots; ++r) out += fmt::format("m_{},", r + 1);
        out += "re_lambda,im_lambda\n";
        for (const auto& mode : modes) {
            for (int v : mode.m) out += fmt::format("{},", v);
            out += format_number(mode.lambda.real()) + "," + format_number(mode.lambda.imag()) + "\n";
        }
        return CommandResult{kOk, out, ""};
    });
}

CommandResult run_dynamics(const io::json& doc, const CommonOptions& common,
                           const DynamicsOptions& opts)
{
    return guarded([&] {
        const Pipeline p = run_pipeline(doc, common.tol);
        const int n = p.model.n;
        const auto& st = p.structure;
        const std::vector<double> times = time_grid(opts.t0, opts.t1, opts.steps);

        CMatrix C0 = CMatrix::Zero(2 * n, 2 * n);
        CVector m0 = CVector::Zero(2 * n);
        bool initial_mean = false;
        if (opts.initial != "vacuum") {
            const io::json init = io::load_json_file(opts.initial);
            if (!init.is_object() || !init.contains("C")) {
                throw Error(ErrorKind::InvalidInput, "initial-state file needs a \"C\" matrix");
            }
            C0 = io::matrix_from_json(init["C"], 2 * n, 2 * n, "C");
            if (init.contains("m")) {
                m0 = io::vector_from_json(init["m"], 2 * n, "m");
                initial_mean = true;
            }
        }
        const bool with_mean = opts.with_mean || initial_mean || p.model.has_linear_terms();
        std::optional<MeanDrive> drive;
        if (with_mean) drive = MeanDrive{mean_source(p.model), m0};

        std::vector<double> elapsed;
        elapsed.reserve(times.size());
        for (double t : times) elapsed.push_back(t - opts.t0);
        const CovarianceTrajectory traj =
            covariance_trajectory(st.X, st.Y, C0, elapsed, drive, TrajectoryMethod::Auto, common.tol);

        std::string err;
        if (p.spectrum.stability == Stability::Unstable) {
            err = "warning: model is Unstable (a rapidity has negative real part); "
                  "moments grow without bound\n";
        }

        std::string out = "t";
        for (int j = 0; j < n; ++j) out += fmt::format(",occ_{}", j + 1);
        for (int j = 0; j < n; ++j) {
            for (int k = j; k < n; ++k) out += fmt::format(",re_aa_{0}_{1},im_aa_{0}_{1}", j + 1, k + 1);
        }
        for (int d = 0; d < n; ++d) {
            for (int a = 0; a < n; ++a) {
                if (d != a) out += fmt::format(",re_ada_{0}_{1},im_ada_{0}_{1}", d + 1, a + 1);
            }
        }
        if (with_mean) {
            for (int j = 0; j < n; ++j) out += fmt::format(",re_a_{0},im_a_{0}", j + 1);
        }
        out += "\n";

        for (std::size_t i = 0; i < times.size(); ++i) {
            const CMatrix& C = traj.C[i];
            out += format_number(times[i]);
            for (int j = 0; j < n; ++j) out += "," + format_number(C(j, n + j).real());
            for (int j = 0; j < n; ++j) {
                for (int k = j; k < n; ++k) {
                    out += "," + format_number(C(j, k).real()) + "," + format_number(C(j, k).imag());
                }
            }
            // Column ada_d_a holds <a_d^dag a_a> = C(a, n + d).
            for (int d = 0; d < n; ++d) {
                for (int a = 0; a < n; ++a) {
                    if (d == a) continue;
                    out += "," + format_number(C(a, n + d).real()) + "," + format_number(C(a, n + d).imag());
                }
            }
            if (with_mean) {
                const CVector& m = (*traj.m)[i];
                for (int j = 0; j < n; ++j) {
                    out += "," + format_number(m(j).real()) + "," + format_number(m(j).imag());
                }
            }
            out += "\n";
        }
        return CommandResult{kOk, out, err};
    });
}

namespace {

struct Check {
    std::string quantity;
    double deviation;
    double tolerance;
    bool pass() const { return deviation <= tolerance; }
};

}  // namespace

CommandResult run_verify(const io::json& doc, const CommonOptions& common, const VerifyOptions& opts)
{
    return guarded([&] {
        const Pipeline p = run_pipeline(doc, common.tol);
        require_stable(p.spectrum);
        const int n = p.model.n;
        const auto& st = p.structure;
        const LyapunovSolution sol = solve(st.X, st.Y, p.spectrum, common.tol);
        const NessSolution ness = physical_correlators(sol.Z, n);
        const bool linear = p.model.has_linear_terms();
        const CVector g = mean_source(p.model);
        const CVector mean = linear ? steady_mean(st.X, g, p.spectrum) : CVector(CVector::Zero(2 * n));
        const CMatrix second = sol.Z + mean * mean.transpose();

        const std::size_t cap = oracle::memory_cap();
        const int cutoff = opts.cutoff ? *opts.cutoff
                                       : default_cutoff(n, ness.occupations.maxCoeff(), cap);
        const oracle::DenseLiouvillean L = oracle::build_liouvillean_matrix(p.model, cutoff, cap);
        const std::vector<cplx> spectrum = oracle::oracle_spectrum(L.Lmat);
        const oracle::SteadyState ss = oracle::oracle_steady_state(L, &spectrum);

        const double moment_tol = opts.tolerance_scale * (n == 1 ? 1e-6 : 1e-3);
        const double wick_tol = opts.tolerance_scale * (n == 1 ? 1e-5 : 1e-3);
        const double spectrum_tol = opts.tolerance_scale * (n == 1 ? 1e-4 : 1e-3);
        const double trajectory_tol = opts.tolerance_scale * (n == 1 ? 1e-5 : 1e-3);
        const double trace_tol = opts.tolerance_scale * 1e-10;
        std::vector<Check> checks;

        checks.push_back({"trace preservation", oracle::trace_preservation_residual(L.Lmat), trace_tol});

        ojson moments = ojson::array();
        double worst_moment = 0.0;
        std::string worst_moment_name = "none";
        auto record = [&](const std::string& name, cplx analytic, cplx brute) {
            const double delta = std::abs(analytic - brute);
            moments.push_back(ojson{{"name", name}, {"analytic", cjson(analytic)},
                                    {"oracle", cjson(brute)}, {"delta", delta}});
            if (delta > worst_moment) {
                worst_moment = delta;
                worst_moment_name = name;
            }
        };
        for (int r = 0; r < 2 * n; ++r) {
            for (int s = r; s < 2 * n; ++s) {
                record(fmt::format("<:{} {}:>", slot_name(r, n), slot_name(s, n)), second(r, s),
                       ss.moments.C(r, s));
            }
        }
        for (int r = 0; r < n; ++r) record(fmt::format("<{}>", slot_name(r, n)), mean(r), ss.moments.m(r));
        checks.push_back({"steady-state moment " + worst_moment_name, worst_moment, moment_tol});

        ojson wick = ojson::array();
        if (!linear) {
            double worst = 0.0;
            std::string worst_name = "none";
            for (int j = 0; j < n; ++j) {
                const std::array<int, 4> slots{n + j, n + j, j, j};
                const cplx analytic = wick_moment(sol.Z, slots);
                const cplx brute = oracle::normal_moment(L.ops, ss.rho, slots);
                const double delta = std::abs(analytic - brute);
                const std::string name = fmt::format("<a{0}^dag a{0}^dag a{0} a{0}>", j + 1);
                wick.push_back(ojson{{"name", name}, {"analytic", cjson(analytic)},
                                     {"oracle", cjson(brute)}, {"delta", delta}});
                if (delta >= worst) {
                    worst = delta;
                    worst_name = name;
                }
            }
            checks.push_back({"Wick moment " + worst_name, worst, wick_tol});
        }

        // Greedy nearest-neighbour match of the low-lying analytic modes.
        const auto modes = liouville_spectrum(p.spectrum.beta, 2, kDefaultSpectrumLimit, common.tol.marginal);
        std::vector<bool> used(spectrum.size(), false);
        ojson spec_rows = ojson::array();
        double worst_spec = 0.0;
        for (const auto& mode : modes) {
            std::size_t best = spectrum.size();
            double best_d = 0.0;
            for (std::size_t i = 0; i < spectrum.size(); ++i) {
                if (used[i]) continue;
                const double d = std::abs(spectrum[i] - mode.lambda);
                if (best == spectrum.size() || d < best_d) {
                    best = i;
                    best_d = d;
                }
            }
            if (best == spectrum.size()) break;
            used[best] = true;
            worst_spec = std::max(worst_spec, best_d);
            spec_rows.push_back(ojson{{"m", mode.m}, {"analytic", cjson(mode.lambda)},
                                      {"oracle", cjson(spectrum[best])}, {"delta", best_d}});
        }
        checks.push_back({"decay-mode spectrum", worst_spec, spectrum_tol});

        const std::vector<double> times = time_grid(0.0, opts.t1, opts.steps);
        std::optional<MeanDrive> drive;
        if (linear) drive = MeanDrive{g, CVector::Zero(2 * n)};
        const CovarianceTrajectory traj = covariance_trajectory(
            st.X, st.Y, CMatrix::Zero(2 * n, 2 * n), times, drive, TrajectoryMethod::Auto, common.tol);
        const oracle::Evolution evo = oracle::oracle_evolve(L, oracle::vacuum_state(L.ops), times);
        double worst_traj = 0.0;
        double worst_trace = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            worst_traj = std::max(worst_traj, (traj.C[i] - evo.moments[i].C).cwiseAbs().maxCoeff());
            if (traj.m) {
                worst_traj = std::max(worst_traj, ((*traj.m)[i] - evo.moments[i].m).cwiseAbs().maxCoeff());
            }
            worst_trace = std::max(worst_trace, std::abs(evo.moments[i].trace - 1.0));
        }
        checks.push_back({"transient moments", worst_traj, trajectory_tol});
        checks.push_back({"transient trace", worst_trace, trace_tol});

        bool pass = true;
        const Check* worst = nullptr;
        ojson check_rows = ojson::array();
        for (const auto& c : checks) {
            check_rows.push_back(ojson{{"quantity", c.quantity}, {"deviation", c.deviation},
                                       {"tolerance", c.tolerance}, {"pass", c.pass()}});
            if (!c.pass()) {
                const double ratio = c.deviation / c.tolerance;
                if (pass || ratio > worst->deviation / worst->tolerance) worst = &c;
                pass = false;
            }
        }

        ojson j = header("verify", doc, common.tol);
        add_summary(j, p, common.tol);
        j["verdict"] = pass ? "PASS" : "FAIL";
        j["cutoff"] = cutoff;
        j["truncation"] = ojson{{"top_level_population", ss.top_level_population},
                                {"rho_min_eigenvalue", ss.min_eigenvalue},
                                {"rho_hermiticity_defect", ss.hermiticity_defect},
                                {"null_eigenvalue", cjson(ss.eigenvalue)}};
        j["checks"] = std::move(check_rows);
        j["max_moment_delta"] = worst_moment;
        j["moments"] = std::move(moments);
        j["wick"] = std::move(wick);
        j["spectrum"] = std::move(spec_rows);
        j["trajectory"] = ojson{{"t_max", opts.t1}, {"steps", static_cast<int>(times.size())},
                                {"max_delta", worst_traj}};

        CommandResult result{pass ? kOk : kVerificationFailed, dump(j), ""};
        if (!pass) {
            result.err = fmt::format("verification failed: {} deviates by {} (tolerance {})\n",
                                     worst->quantity, worst->deviation, worst->tolerance);
        }
        return result;
    });
}

CommandResult run_sweep(const io::json& doc, const CommonOptions& common, const SweepOptions& opts)
{
    return guarded([&] {
        if (opts.steps < 1) throw Error(ErrorKind::InvalidInput, "--steps must be at least 1");
        {
            io::json probe = doc;
            io::set_parameter(probe, opts.param, opts.from);
        }
        const int n = validate_model(io::parse_model(doc), common.tol.input).n;

        struct Row {
            double value = 0.0;
            std::string text;
            std::exception_ptr error;
        };
        std::vector<Row> rows(static_cast<std::size_t>(opts.steps));
        for (int i = 0; i < opts.steps; ++i) {
            rows[static_cast<std::size_t>(i)].value =
                opts.steps == 1 ? opts.from
                                : opts.from + (opts.to - opts.from) * static_cast<double>(i) / (opts.steps - 1);
        }

        auto evaluate = [&](Row& row) {
            io::json point = doc;
            io::set_parameter(point, opts.param, row.value);
            std::string text = format_number(row.value);
            try {
                const Pipeline p = run_pipeline(point, common.tol);
                text += "," + format_number(p.spectrum.beta.real().minCoeff());
                text += std::string(",") + to_string(p.spectrum.stability);
                if (p.spectrum.stability == Stability::Stable) {
                    text += "," + format_number(spectral_gap(p.spectrum.beta, common.tol.marginal));
                    const auto sol = solve(p.structure.X, p.structure.Y, p.spectrum, common.tol);
                    const NessSolution ness = physical_correlators(sol.Z, n);
                    for (int j = 0; j < n; ++j) text += "," + format_number(ness.occupations(j));
                } else {
                    text += ",";
                    for (int j = 0; j < n; ++j) text += ",";
                }
            } catch (const Error& e) {
                if (exit_code_for(e.kind()) == kSchemaError) throw;
                text = format_number(row.value) + ",," + to_string(e.kind()) + ",";
                for (int j = 0; j < n; ++j) text += ",";
            }
            row.text = std::move(text);
        };

        // Rows are computed in any order and emitted in grid order.
        unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, static_cast<unsigned>(rows.size()));
        std::atomic<std::size_t> next{0};
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < rows.size(); i = next++) {
                        try {
                            evaluate(rows[i]);
                        } catch (...) {
                            rows[i].error = std::current_exception();
                        }
                    }
                });
            }
        }
        for (const auto& row : rows) {
            if (row.error) std::rethrow_exception(row.error);
        }

        std::string out = "value,min_re_beta,stability,gap";
        for (int j = 0; j < n; ++j) out += fmt::format(",occ_{}", j + 1);
        out += "\n";
        for (const auto& row : rows) out += row.text + "\n";
        return CommandResult{kOk, out, ""};
    });
}

}  // namespace thirdq::cli
