#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kmlab/instances.hpp"
#include "kmlab/sweep.hpp"
#include "kmlab/trace_io.hpp"
#include "kmlab/verify.hpp"

using namespace kmlab;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path("harness_tmp");

struct TmpDir {
    TmpDir() { fs::create_directories(kTmp); }
};

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string cli() { return KMLAB_CLI_PATH; }

} // namespace

TEST_CASE("trace files round-trip exactly") {
    PipelineParams params;
    params.kind = InstanceKind::clustered;
    params.n = 30;
    params.d = 2;
    params.k = 4;
    params.sigma = 0.1;
    params.seed = 11;
    const Trace tr = run_pipeline(params).trace;

    std::stringstream ss;
    write_trace(ss, tr);
    const Trace back = read_trace(ss);

    CHECK(back.id == tr.id);
    CHECK(back.n == tr.n);
    CHECK(back.d == tr.d);
    CHECK(back.k_initial == tr.k_initial);
    CHECK(back.k_final == tr.k_final);
    CHECK(back.sigma == tr.sigma);
    CHECK(back.seed == tr.seed);
    CHECK(back.cube_side == tr.cube_side);
    CHECK(back.in_cube == tr.in_cube);
    CHECK(back.termination == tr.termination);
    REQUIRE(back.records.size() == tr.records.size());
    for (std::size_t i = 0; i < tr.points.size(); ++i) CHECK(back.points[i] == tr.points[i]);
    for (std::size_t r = 0; r < tr.records.size(); ++r) {
        CHECK(back.records[r].post.assignment == tr.records[r].post.assignment);
        CHECK(back.records[r].post.potential == tr.records[r].post.potential);
        CHECK(back.records[r].assignment_drop == tr.records[r].assignment_drop);
        CHECK(back.records[r].move_drop == tr.records[r].move_drop);
        CHECK(back.records[r].reassignments == tr.records[r].reassignments);
        CHECK(back.records[r].removed == tr.records[r].removed);
    }
    // a reloaded trace verifies exactly like the original
    for (const auto& rep : run_all_checks(back))
        if (rep.applicable) CHECK(rep.pass());
}

TEST_CASE("cli run is byte-deterministic") {
    TmpDir tmp;
    const std::string base =
        " run --kind grid --n 16 --d 2 --k 3 --sigma 0.1 --seed 7 --out harness_tmp/x.json";
    CHECK(run_cmd(cli() + base + " > harness_tmp/a.txt 2>&1") == 0);
    fs::copy_file(kTmp / "x.json", kTmp / "a.json", fs::copy_options::overwrite_existing);
    CHECK(run_cmd(cli() + base + " > harness_tmp/b.txt 2>&1") == 0);
    CHECK(slurp(kTmp / "a.json") == slurp(kTmp / "x.json"));
    CHECK(slurp(kTmp / "a.txt") == slurp(kTmp / "b.txt"));
    CHECK_FALSE(slurp(kTmp / "a.json").empty());
}

TEST_CASE("cli rejects bad flags") {
    TmpDir tmp;
    CHECK(run_cmd(cli() + " run --sigma -1 --out harness_tmp/x.json > /dev/null 2>&1") != 0);
    CHECK(run_cmd(cli() + " run --instance nosuchfile.txt --k 2 --sigma 0.1 "
                          "--out harness_tmp/x.json > /dev/null 2>&1") != 0);
    CHECK(run_cmd(cli() + " run --instance some.txt --kind grid --k 2 "
                          "--out harness_tmp/x.json > /dev/null 2>&1") != 0);
}

TEST_CASE("cli run from an instance file") {
    TmpDir tmp;
    write_instance_file((kTmp / "corners.txt").string(), generate(InstanceKind::grid, 4, 2, 0));
    CHECK(run_cmd(cli() + " run --instance harness_tmp/corners.txt --k 2 --sigma 0.05 "
                          "--seed 1 --out harness_tmp/corners.json > /dev/null 2>&1") == 0);
    const Trace tr = read_trace_file((kTmp / "corners.json").string());
    CHECK(tr.n == 4);
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.k_final <= 2);
    CHECK(tr.k_final >= 1);
}

TEST_CASE("sweep produces one row per cell, identically across thread counts") {
    SweepConfig cfg;
    cfg.kind = InstanceKind::uniform;
    cfg.n = {20};
    cfg.d = {2};
    cfg.k = {3};
    cfg.sigma = {0.1};
    cfg.seeds = 1;
    cfg.master_seed = 4;

    cfg.threads = 1;
    const SweepResult one = run_sweep(cfg);
    // header + single row
    CHECK(std::count(one.csv.begin(), one.csv.end(), '\n') == 2);

    cfg.seeds = 3;
    cfg.sigma = {0.05, 0.2};
    const SweepResult serial = run_sweep(cfg);
    cfg.threads = 8;
    const SweepResult parallel = run_sweep(cfg);
    CHECK(serial.csv == parallel.csv);
    CHECK(serial.summary == parallel.summary);
    CHECK(std::count(serial.csv.begin(), serial.csv.end(), '\n') == 1 + 2 * 3);
}

TEST_CASE("cell seeds depend on content, not position") {
    const std::uint64_t a = cell_seed(1, 20, 2, 3, 0.1, 0);
    CHECK(a == cell_seed(1, 20, 2, 3, 0.1, 0));
    CHECK(a != cell_seed(1, 20, 2, 3, 0.1, 1));
    CHECK(a != cell_seed(1, 20, 2, 3, 0.2, 0));
    CHECK(a != cell_seed(2, 20, 2, 3, 0.1, 0));
}

TEST_CASE("dropping a cell leaves the remaining rows untouched") {
    SweepConfig cfg;
    cfg.kind = InstanceKind::uniform;
    cfg.n = {20};
    cfg.d = {2};
    cfg.k = {3};
    cfg.sigma = {0.05, 0.2};
    cfg.seeds = 2;
    cfg.master_seed = 12;
    const SweepResult full = run_sweep(cfg);
    cfg.sigma = {0.2};
    const SweepResult trimmed = run_sweep(cfg);

    // every row of the trimmed sweep appears verbatim in the full one
    std::stringstream ss(trimmed.csv);
    std::string line;
    std::getline(ss, line); // header
    while (std::getline(ss, line)) {
        CHECK(full.csv.find(line + "\n") != std::string::npos);
    }
}

TEST_CASE("sweep config parses and validates") {
    std::stringstream ss(R"({"kind":"grid","n":[16],"d":[2],"k":[3],
        "sigma":[0.1,0.2],"seeds":2,"master_seed":9,"mode":"lattice",
        "params":{"spread":0.1},"out":"x.csv"})");
    const SweepConfig cfg = read_sweep_config(ss);
    CHECK(cfg.kind == InstanceKind::grid);
    CHECK(cfg.sigma.size() == 2);
    CHECK(cfg.seeds == 2);
    CHECK(cfg.mode == CenterMode::lattice);
    CHECK(cfg.spread == 0.1);
    CHECK(cfg.out == "x.csv");

    std::stringstream bad(R"({"kind":"grid","n":[],"d":[2],"k":[3],"sigma":[0.1],"seeds":1})");
    CHECK_THROWS_AS(read_sweep_config(bad), std::runtime_error);
    std::stringstream garbage("not json");
    CHECK_THROWS_AS(read_sweep_config(garbage), std::runtime_error);
}

TEST_CASE("cli sweep writes the configured csv") {
    TmpDir tmp;
    std::ofstream((kTmp / "sweep.json"))
        << R"({"kind":"uniform","n":[16],"d":[2],"k":[3],"sigma":[0.1],
               "seeds":2,"master_seed":3,"out":"harness_tmp/sweep.csv"})";
    CHECK(run_cmd(cli() + " sweep harness_tmp/sweep.json --threads 2 "
                          "> harness_tmp/sweep1.txt 2>&1") == 0);
    const std::string first = slurp(kTmp / "sweep.csv");
    CHECK(std::count(first.begin(), first.end(), '\n') == 3);
    CHECK(run_cmd(cli() + " sweep harness_tmp/sweep.json --threads 1 "
                          "> harness_tmp/sweep2.txt 2>&1") == 0);
    CHECK(slurp(kTmp / "sweep.csv") == first);
    CHECK(slurp(kTmp / "sweep1.txt") == slurp(kTmp / "sweep2.txt"));
}

TEST_CASE("classify command output") {
    TmpDir tmp;
    // a converged-at-start run has no transitions: header-only CSV
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    Trace stable = run_from_centers(pts, {Vec{0.5}, Vec{8.5}}, 10);
    stable.id = "stable";
    write_trace_file((kTmp / "stable.json").string(), stable);
    CHECK(run_cmd(cli() + " classify harness_tmp/stable.json --out harness_tmp/stable.csv "
                          "> /dev/null 2>&1") == 0);
    const std::string csv = slurp(kTmp / "stable.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);

    // a busy run yields rows matching the library classification
    PipelineParams params;
    params.n = 40;
    params.d = 2;
    params.k = 4;
    params.sigma = 0.1;
    params.seed = 5;
    const PipelineResult res = run_pipeline(params);
    write_trace_file((kTmp / "busy.json").string(), res.trace);
    CHECK(run_cmd(cli() + " classify harness_tmp/busy.json --out harness_tmp/busy.csv "
                          "> /dev/null 2>&1") == 0);
    const std::string busy = slurp(kTmp / "busy.csv");
    CHECK(std::count(busy.begin(), busy.end(), '\n') ==
          1 + static_cast<long>(res.classification.size()));

    // malformed trace file: error exit
    std::ofstream((kTmp / "corrupt.json")) << "{not json";
    CHECK(run_cmd(cli() + " classify harness_tmp/corrupt.json > /dev/null 2>&1") != 0);
}

TEST_CASE("verify command exit codes") {
    TmpDir tmp;
    PipelineParams params;
    params.n = 30;
    params.d = 2;
    params.k = 3;
    params.sigma = 0.1;
    params.seed = 6;
    Trace tr = run_pipeline(params).trace;
    write_trace_file((kTmp / "good.json").string(), tr);
    CHECK(run_cmd(cli() + " verify harness_tmp/good.json > /dev/null 2>&1") == 0);

    // corrupt one drop field: the identity check must fail with exit 1
    bool corrupted = false;
    for (IterationRecord& rec : tr.records) {
        if (rec.assignment_drop > 1e-6) {
            rec.assignment_drop *= 1.01;
            corrupted = true;
            break;
        }
    }
    REQUIRE(corrupted);
    write_trace_file((kTmp / "bad.json").string(), tr);
    CHECK(run_cmd(cli() + " verify harness_tmp/bad.json > harness_tmp/bad.txt 2>&1") == 1);
    const std::string out = slurp(kTmp / "bad.txt");
    CHECK(out.find("drop-identities") != std::string::npos);
    CHECK(out.find("FAIL") != std::string::npos);
}

TEST_CASE("out-of-cube runs report the ceiling check as not applicable") {
    TmpDir tmp;
    PipelineParams params;
    params.n = 30;
    params.d = 2;
    params.k = 3;
    params.sigma = 0.1;
    params.seed = 8;
    Trace tr = run_pipeline(params).trace;
    tr.in_cube = false; // simulate a run that escaped the cube
    write_trace_file((kTmp / "outcube.json").string(), tr);
    CHECK(run_cmd(cli() + " verify harness_tmp/outcube.json > harness_tmp/outcube.txt 2>&1") ==
          0);
    const std::string out = slurp(kTmp / "outcube.txt");
    CHECK(out.find("potential-ceiling not-applicable") != std::string::npos);
}
