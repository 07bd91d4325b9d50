#ifndef KMLAB_SWEEP_HPP
#define KMLAB_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmlab/blueprint.hpp"
#include "kmlab/engine.hpp"
#include "kmlab/instances.hpp"
#include "kmlab/verify.hpp"

namespace kmlab {

/// One seeded generate -> perturb -> run -> classify -> verify pipeline.
struct PipelineParams {
    InstanceKind kind = InstanceKind::uniform;
    std::optional<std::string> instance_path; // replaces the generator when set
    int n = 0;
    int d = 0;
    int k = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    long max_iterations = 1000000;
    std::optional<double> epsilon_override;
    CenterMode mode = CenterMode::actual;
    double spread = 0.05;
};

struct PipelineResult {
    Trace trace;
    std::vector<ClassifiedComponent> classification;
    std::vector<VerificationReport> verification;
};

PipelineResult run_pipeline(const PipelineParams& params);

/// Grid of cells (n x d x k x sigma x replicate). Each cell's seed is
/// derived from the master seed and the cell's own parameters, so a cell's
/// row never depends on which other cells the config mentions.
struct SweepConfig {
    InstanceKind kind = InstanceKind::uniform;
    double spread = 0.05;
    std::vector<int> n;
    std::vector<int> d;
    std::vector<int> k;
    std::vector<double> sigma;
    int seeds = 1;
    std::uint64_t master_seed = 0;
    long max_iterations = 1000000;
    std::optional<double> epsilon_override;
    CenterMode mode = CenterMode::actual;
    int threads = 1;
    std::string out = "sweep.csv";
};

SweepConfig read_sweep_config(std::istream& is);
SweepConfig read_sweep_config_file(const std::string& path);

std::uint64_t cell_seed(std::uint64_t master_seed, int n, int d, int k, double sigma,
                        int replicate);

struct SweepResult {
    std::string csv;     // header + one row per cell, fixed order
    std::string summary; // median iteration count per sigma
};

/// Cells run independently (config.threads workers); the output is assembled
/// in cell order afterwards, so the bytes do not depend on the thread count.
SweepResult run_sweep(const SweepConfig& config);

} // namespace kmlab

#endif
