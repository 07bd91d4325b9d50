#include "kmlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kmlab/rng.hpp"
#include "kmlab/trace_io.hpp"

namespace kmlab {

namespace {

constexpr std::uint64_t kTagGenerate = 1;
constexpr std::uint64_t kTagPerturb = 2;
constexpr std::uint64_t kTagInit = 3;

std::string short_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string basename_of(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

} // namespace

PipelineResult run_pipeline(const PipelineParams& params) {
    AdversarialInstance inst;
    std::string source;
    if (params.instance_path) {
        inst = read_instance_file(*params.instance_path);
        for (const Vec& p : inst.points)
            for (int j = 0; j < inst.d; ++j)
                if (p[j] < 0.0 || p[j] > 1.0)
                    throw std::runtime_error("instance coordinate outside [0,1]");
        source = "file-" + basename_of(*params.instance_path);
    } else {
        inst = generate(params.kind, params.n, params.d, substream(params.seed, kTagGenerate),
                        {{"spread", params.spread}});
        source = to_string(params.kind);
    }

    PerturbedDataset ds = perturb(inst, params.sigma, substream(params.seed, kTagPerturb));
    const int n = ds.n();
    const int d = ds.d();
    if (n >= 3 && params.k >= 2 && d >= 2)
        check_in_cube(ds, cube_bound(n, params.k, d));

    PipelineResult result;
    result.trace = run(ds.points, params.k, Init::sample_points, params.max_iterations,
                       substream(params.seed, kTagInit));
    result.trace.sigma = params.sigma;
    result.trace.seed = params.seed;
    result.trace.cube_side = ds.cube_side;
    result.trace.in_cube = ds.in_cube;
    result.trace.id = source + "-n" + std::to_string(n) + "-d" + std::to_string(d) + "-k" +
                      std::to_string(params.k) + "-sig" + short_double(params.sigma) + "-seed" +
                      std::to_string(params.seed);

    result.classification =
        classify_trace(result.trace, params.epsilon_override, params.mode);
    result.verification = run_all_checks(result.trace);
    return result;
}

SweepConfig read_sweep_config(std::istream& is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed sweep config: ") + e.what());
    }
    SweepConfig cfg;
    try {
        cfg.kind = instance_kind_from_string(j.value("kind", "uniform"));
        if (j.contains("params") && j.at("params").contains("spread"))
            cfg.spread = j.at("params").at("spread").get<double>();
        cfg.n = j.at("n").get<std::vector<int>>();
        cfg.d = j.at("d").get<std::vector<int>>();
        cfg.k = j.at("k").get<std::vector<int>>();
        cfg.sigma = j.at("sigma").get<std::vector<double>>();
        cfg.seeds = j.at("seeds").get<int>();
        cfg.master_seed = j.value("master_seed", std::uint64_t{0});
        cfg.max_iterations = j.value("max_iterations", 1000000L);
        if (j.contains("eps")) cfg.epsilon_override = j.at("eps").get<double>();
        cfg.mode = center_mode_from_string(j.value("mode", "actual"));
        cfg.threads = j.value("threads", 1);
        cfg.out = j.value("out", std::string("sweep.csv"));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed sweep config: ") + e.what());
    }
    if (cfg.n.empty() || cfg.d.empty() || cfg.k.empty() || cfg.sigma.empty() || cfg.seeds < 1)
        throw std::runtime_error("sweep config lists must be nonempty and seeds >= 1");
    return cfg;
}

SweepConfig read_sweep_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open sweep config: " + path);
    return read_sweep_config(f);
}

std::uint64_t cell_seed(std::uint64_t master_seed, int n, int d, int k, double sigma,
                        int replicate) {
    std::uint64_t sigma_bits = 0;
    static_assert(sizeof(sigma_bits) == sizeof(sigma));
    std::memcpy(&sigma_bits, &sigma, sizeof(sigma));
    const std::uint64_t base =
        substream(master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d),
                  static_cast<std::uint64_t>(k));
    return substream(base, sigma_bits, static_cast<std::uint64_t>(replicate));
}

namespace {

struct Cell {
    int n, d, k;
    double sigma;
    int replicate;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string sweep_row(const SweepConfig& cfg, const Cell& cell, double& iterations_out) {
    PipelineParams params;
    params.kind = cfg.kind;
    params.spread = cfg.spread;
    params.n = cell.n;
    params.d = cell.d;
    params.k = cell.k;
    params.sigma = cell.sigma;
    params.seed = cell_seed(cfg.master_seed, cell.n, cell.d, cell.k, cell.sigma, cell.replicate);
    params.max_iterations = cfg.max_iterations;
    params.epsilon_override = cfg.epsilon_override;
    params.mode = cfg.mode;

    const PipelineResult res = run_pipeline(params);
    const Trace& tr = res.trace;

    const int last = tr.last_active();
    std::optional<double> min_drop;
    for (int i = 2; i <= last; ++i) {
        const double drop = tr.records[static_cast<std::size_t>(i - 1)].total_drop();
        if (!min_drop || drop < *min_drop) min_drop = drop;
    }
    std::optional<double> min_window;
    for (int i = 2; i + 2 <= last; ++i) {
        const double drop = tr.pre_state(i).potential -
                            tr.records[static_cast<std::size_t>(i + 1)].post.potential;
        if (!min_window || drop < *min_window) min_window = drop;
    }
    std::optional<double> deps;
    if (min_drop) deps = delta_eps(tr, *min_drop);
    std::optional<double> max_lambda;
    std::array<int, 6> histogram{};
    for (const ClassifiedComponent& cc : res.classification) {
        ++histogram[static_cast<std::size_t>(static_cast<int>(cc.report.primary) - 1)];
        if (cc.lam && (!max_lambda || *cc.lam > *max_lambda)) max_lambda = *cc.lam;
    }

    auto opt17 = [](const std::optional<double>& v) {
        return v ? fmt17(*v) : std::string("NA");
    };
    iterations_out = static_cast<double>(tr.iterations());
    std::ostringstream row;
    row << cell.n << ',' << cell.d << ',' << cell.k << ',' << fmt17(cell.sigma) << ','
        << params.seed << ',' << tr.iterations() << ','
        << (tr.termination == Termination::converged ? 1 : 0) << ','
        << fmt17(tr.records.back().post.potential) << ',' << opt17(min_drop) << ','
        << opt17(min_window) << ',' << opt17(deps) << ',' << opt17(max_lambda);
    for (int c = 0; c < 6; ++c) row << ',' << histogram[static_cast<std::size_t>(c)];
    row << ',' << (tr.in_cube ? 1 : 0);
    return row.str();
}

} // namespace

SweepResult run_sweep(const SweepConfig& config) {
    std::vector<Cell> cells;
    for (int n : config.n)
        for (int d : config.d)
            for (int k : config.k)
                for (double sigma : config.sigma)
                    for (int r = 0; r < config.seeds; ++r)
                        cells.push_back({n, d, k, sigma, r});

    std::vector<std::string> rows(cells.size());
    std::vector<double> iteration_counts(cells.size(), -1.0);
    const int workers = std::max(1, config.threads);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            try {
                rows[i] = sweep_row(config, cells[i], iteration_counts[i]);
            } catch (const std::exception& e) {
                // cell-level failures are recorded in-row, the sweep goes on
                std::ostringstream row;
                const Cell& c = cells[i];
                row << c.n << ',' << c.d << ',' << c.k << ',' << fmt17(c.sigma) << ','
                    << cell_seed(config.master_seed, c.n, c.d, c.k, c.sigma, c.replicate)
                    << ",ERROR:" << e.what();
                rows[i] = row.str();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::ostringstream csv;
    csv << "n,d,k,sigma,seed,iterations,converged,final_potential,min_drop,"
           "min_window3_drop,delta_eps,max_lambda,cat1,cat2,cat3,cat4,cat5,cat6,in_cube\n";
    for (const std::string& row : rows) csv << row << '\n';

    // median iteration count per sigma, in config order
    std::ostringstream summary;
    std::vector<double> seen;
    for (double sigma : config.sigma) {
        if (std::find(seen.begin(), seen.end(), sigma) != seen.end()) continue;
        seen.push_back(sigma);
        std::vector<double> iters;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].sigma == sigma && iteration_counts[i] >= 0.0)
                iters.push_back(iteration_counts[i]);
        summary << "sigma=" << fmt17(sigma) << " cells=" << iters.size()
                << " median_iterations=" << (iters.empty() ? "NA" : fmt17(median(iters)))
                << "\n";
    }
    return {csv.str(), summary.str()};
}

} // namespace kmlab
