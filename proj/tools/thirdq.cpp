// thirdq.cpp - Command-line front end

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "thirdq/commands.hpp"

namespace {

using namespace thirdq;

struct Shared {
    std::string model_path;
    double tol_input = Tolerances{}.input;
    std::string output;
};

void add_shared(CLI::App* sub, Shared& shared)
{
    sub->add_option("--model", shared.model_path, "Model JSON file")->required();
    sub->add_option("--tol", shared.tol_input, "Relative Hermiticity/symmetry tolerance for H and K");
    sub->add_option("--output", shared.output, "Write the result to this file instead of stdout");
}

int emit(const cli::CommandResult& result, const Shared& shared)
{
    std::cerr << result.err;
    if (result.out.empty()) return result.exit_code;
    if (shared.output.empty()) {
        std::cout << result.out;
    } else {
        std::ofstream file(shared.output, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot write " << shared.output << "\n";
            return cli::kSchemaError;
        }
        file << result.out;
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"thirdq: exact Liouvillean analysis of quadratic bosonic Lindblad systems"};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);

    Shared shared;
    cli::SpectrumOptions spectrum_opts;
    cli::DynamicsOptions dynamics_opts;
    cli::VerifyOptions verify_opts;
    cli::SweepOptions sweep_opts;
    std::string emit_format = "csv";
    int verify_cutoff = 0;

    auto* analyze = app.add_subcommand("analyze", "Rapidities, stability class and spectral gap");
    add_shared(analyze, shared);

    auto* ness = app.add_subcommand("ness", "Steady-state correlators from the Lyapunov equation");
    add_shared(ness, shared);

    auto* spectrum = app.add_subcommand("spectrum", "Decay-mode spectrum of the Liouvillean");
    add_shared(spectrum, shared);
    spectrum->add_option("--max-excitation", spectrum_opts.max_excitation, "Largest total excitation |m|")
        ->check(CLI::NonNegativeNumber);
    spectrum->add_option("--limit", spectrum_opts.limit, "Maximum number of modes to enumerate");
    spectrum->add_option("--emit", emit_format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* dynamics = app.add_subcommand("dynamics", "Moment trajectories from an initial Gaussian state");
    add_shared(dynamics, shared);
    dynamics->add_option("--t0", dynamics_opts.t0, "Start time");
    dynamics->add_option("--t1", dynamics_opts.t1, "End time");
    dynamics->add_option("--steps", dynamics_opts.steps, "Number of time points");
    dynamics->add_option("--initial", dynamics_opts.initial, "\"vacuum\" or a JSON file with C (and m)");
    dynamics->add_flag("--mean", dynamics_opts.with_mean, "Emit first moments <a_j>");

    auto* verify = app.add_subcommand("verify", "Cross-check against the truncated-Fock oracle");
    add_shared(verify, shared);
    verify->add_option("--cutoff", verify_cutoff, "Fock levels per mode (default: heuristic)");
    verify->add_option("--t1", verify_opts.t1, "Trajectory comparison horizon");
    verify->add_option("--steps", verify_opts.steps, "Trajectory comparison points");
    verify->add_option("--tol-scale", verify_opts.tolerance_scale, "Multiplier on all comparison tolerances")
        ->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Stability and occupations over a parameter grid");
    add_shared(sweep, shared);
    sweep->add_option("--param", sweep_opts.param, "Path of a real scalar, e.g. channels[1].rate")->required();
    sweep->add_option("--from", sweep_opts.from, "First grid value")->required();
    sweep->add_option("--to", sweep_opts.to, "Last grid value")->required();
    sweep->add_option("--steps", sweep_opts.steps, "Number of grid points");
    sweep->add_option("--threads", sweep_opts.threads, "Worker threads (0: all cores)");
    sweep->add_option("--emit", emit_format, "Output format")->check(CLI::IsMember({"csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kSchemaError;
    }

    cli::CommonOptions common;
    common.tol.input = shared.tol_input;

    io::json doc;
    try {
        doc = io::load_json_file(shared.model_path);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return cli::kSchemaError;
    }

    cli::CommandResult result;
    if (analyze->parsed()) {
        result = cli::run_analyze(doc, common);
    } else if (ness->parsed()) {
        result = cli::run_ness(doc, common);
    } else if (spectrum->parsed()) {
        spectrum_opts.emit = emit_format == "json" ? cli::Emit::Json : cli::Emit::Csv;
        result = cli::run_spectrum(doc, common, spectrum_opts);
    } else if (dynamics->parsed()) {
        result = cli::run_dynamics(doc, common, dynamics_opts);
    } else if (verify->parsed()) {
        if (verify_cutoff > 0) verify_opts.cutoff = verify_cutoff;
        result = cli::run_verify(doc, common, verify_opts);
    } else {
        result = cli::run_sweep(doc, common, sweep_opts);
    }
    return emit(result, shared);
}
