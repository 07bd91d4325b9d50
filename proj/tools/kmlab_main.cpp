// kmlab - instrumented Lloyd clustering on perturbed instances.
//
// Subcommands:
//   run       generate/load an instance, perturb it, run the engine,
//             classify every transition component, run all checks,
//             write the trace file and print a summary
//   sweep     run a grid of cells from a config file into a CSV
//   classify  re-classify a stored trace into a CSV
//   verify    re-run all checks on a stored trace (exit 0 iff all pass)

#include <array>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kmlab/blueprint.hpp"
#include "kmlab/sweep.hpp"
#include "kmlab/trace_io.hpp"
#include "kmlab/verify.hpp"

namespace {

struct RunOptions {
    std::string kind = "uniform";
    std::string instance_path;
    int n = 100;
    int d = 2;
    int k = 3;
    double sigma = 0.1;
    std::uint64_t seed = 0;
    long max_iters = 1000000;
    double eps = -1.0; // <0 means per-iteration natural scale
    std::string mode = "actual";
    std::string out = "trace.json";
};

int cmd_run(const RunOptions& opt) {
    kmlab::PipelineParams params;
    if (!opt.instance_path.empty()) {
        params.instance_path = opt.instance_path;
    } else {
        params.kind = kmlab::instance_kind_from_string(opt.kind);
        params.n = opt.n;
        params.d = opt.d;
    }
    params.k = opt.k;
    if (opt.sigma < 0.0) throw std::runtime_error("sigma must be nonnegative");
    params.sigma = opt.sigma;
    params.seed = opt.seed;
    params.max_iterations = opt.max_iters;
    if (opt.eps >= 0.0) params.epsilon_override = opt.eps;
    params.mode = kmlab::center_mode_from_string(opt.mode);

    const kmlab::PipelineResult res = kmlab::run_pipeline(params);
    kmlab::write_trace_file(opt.out, res.trace);

    const kmlab::Trace& tr = res.trace;
    std::cout << "trace " << tr.id << " -> " << opt.out << "\n";
    std::cout << "n=" << tr.n << " d=" << tr.d << " k=" << tr.k_initial
              << " k_final=" << tr.k_final << " sigma=" << kmlab::fmt17(tr.sigma)
              << " seed=" << tr.seed << "\n";
    std::cout << "cube_side=" << kmlab::fmt17(tr.cube_side)
              << " in_cube=" << (tr.in_cube ? "true" : "false") << "\n";
    std::cout << "iterations=" << tr.iterations() << " termination="
              << (tr.termination == kmlab::Termination::converged ? "converged"
                                                                  : "max_iterations")
              << " final_potential=" << kmlab::fmt17(tr.records.back().post.potential)
              << "\n";
    std::array<int, 6> histogram{};
    for (const auto& cc : res.classification)
        ++histogram[static_cast<std::size_t>(static_cast<int>(cc.report.primary) - 1)];
    std::cout << "components=" << res.classification.size() << " categories=";
    for (int c = 0; c < 6; ++c) std::cout << (c ? "/" : "") << histogram[static_cast<std::size_t>(c)];
    std::cout << "\n";
    kmlab::write_verification_summary(std::cout, tr, res.verification);
    return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<int> threads,
              std::optional<std::string> out) {
    kmlab::SweepConfig cfg = kmlab::read_sweep_config_file(config_path);
    if (threads) cfg.threads = *threads;
    if (out) cfg.out = *out;
    const kmlab::SweepResult res = kmlab::run_sweep(cfg);
    std::ofstream f(cfg.out);
    if (!f) throw std::runtime_error("cannot write sweep output: " + cfg.out);
    f << res.csv;
    std::cout << "sweep -> " << cfg.out << "\n" << res.summary;
    return 0;
}

int cmd_classify(const std::string& trace_path, double eps, const std::string& mode,
                 const std::string& out) {
    const kmlab::Trace tr = kmlab::read_trace_file(trace_path);
    std::optional<double> eps_override;
    if (eps >= 0.0) eps_override = eps;
    const auto rows =
        kmlab::classify_trace(tr, eps_override, kmlab::center_mode_from_string(mode));
    if (out.empty()) {
        kmlab::write_classification_csv(std::cout, tr.id, rows);
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write classification output: " + out);
        kmlab::write_classification_csv(f, tr.id, rows);
        std::cout << "classification -> " << out << " (" << rows.size() << " rows)\n";
    }
    return 0;
}

int cmd_verify(const std::string& trace_path) {
    const kmlab::Trace tr = kmlab::read_trace_file(trace_path);
    const auto reports = kmlab::run_all_checks(tr);
    kmlab::write_verification_summary(std::cout, tr, reports);
    for (const auto& rep : reports)
        if (rep.applicable && !rep.pass()) return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"instrumented Lloyd clustering on perturbed instances"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run one seeded pipeline");
    run->add_option("--kind", run_opt.kind, "instance kind: uniform|grid|clustered");
    run->add_option("--instance", run_opt.instance_path, "instance file instead of a generator");
    run->add_option("--n", run_opt.n, "number of points");
    run->add_option("--d", run_opt.d, "dimension");
    run->add_option("--k", run_opt.k, "number of clusters");
    run->add_option("--sigma", run_opt.sigma, "perturbation deviation");
    run->add_option("--seed", run_opt.seed, "master seed");
    run->add_option("--max-iters", run_opt.max_iters, "iteration cap");
    run->add_option("--eps", run_opt.eps, "blueprint scale override");
    run->add_option("--mode", run_opt.mode, "balanced-center mode: lattice|actual");
    run->add_option("--out", run_opt.out, "trace output path");

    std::string sweep_config;
    std::optional<int> sweep_threads;
    std::optional<std::string> sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep from a config file");
    sweep->add_option("config", sweep_config, "sweep config (JSON)")->required();
    sweep->add_option("--threads", sweep_threads, "worker threads");
    sweep->add_option("--out", sweep_out, "CSV output path");

    std::string classify_trace_path;
    double classify_eps = -1.0;
    std::string classify_mode = "actual";
    std::string classify_out;
    CLI::App* classify = app.add_subcommand("classify", "classify a stored trace");
    classify->add_option("trace", classify_trace_path, "trace file")->required();
    classify->add_option("--eps", classify_eps, "blueprint scale override");
    classify->add_option("--mode", classify_mode, "balanced-center mode: lattice|actual");
    classify->add_option("--out", classify_out, "CSV output path (stdout when omitted)");

    std::string verify_trace_path;
    CLI::App* verify = app.add_subcommand("verify", "re-run all checks on a stored trace");
    verify->add_option("trace", verify_trace_path, "trace file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!run_opt.instance_path.empty() &&
                (run->count("--kind") || run->count("--n") || run->count("--d")))
                throw std::runtime_error("--instance excludes --kind/--n/--d");
            return cmd_run(run_opt);
        }
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_threads, sweep_out);
        if (classify->parsed())
            return cmd_classify(classify_trace_path, classify_eps, classify_mode, classify_out);
        if (verify->parsed()) return cmd_verify(verify_trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
