#include "kmlab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kmlab/rng.hpp"

namespace kmlab {

namespace {

// Tags separating the substream namespaces of the generator.
constexpr std::uint64_t kTagUniform = 0x756e6966;
constexpr std::uint64_t kTagAnchor = 0x616e6368;
constexpr std::uint64_t kTagBallDir = 0x62646972;
constexpr std::uint64_t kTagBallRad = 0x62726164;
constexpr std::uint64_t kTagPerturb = 0x70657274;

int grid_points_per_axis(int n, int d) {
    // smallest g with g^d >= n, computed in integers
    int g = 1;
    while (true) {
        long long cells = 1;
        bool enough = false;
        for (int i = 0; i < d; ++i) {
            cells *= g;
            if (cells >= n) { enough = true; break; }
        }
        if (enough) return g;
        ++g;
    }
}

} // namespace

double standard_normal(std::uint64_t s) {
    // u1 in (0,1], u2 in [0,1)
    const double u1 = (static_cast<double>(mix64(s ^ 1) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(mix64(s ^ 2) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

InstanceKind instance_kind_from_string(const std::string& s) {
    if (s == "uniform") return InstanceKind::uniform;
    if (s == "grid") return InstanceKind::grid;
    if (s == "clustered") return InstanceKind::clustered;
    throw std::invalid_argument("unknown instance kind: " + s);
}

std::string to_string(InstanceKind k) {
    switch (k) {
        case InstanceKind::uniform: return "uniform";
        case InstanceKind::grid: return "grid";
        case InstanceKind::clustered: return "clustered";
    }
    return "?";
}

AdversarialInstance generate(InstanceKind kind, int n, int d, std::uint64_t seed,
                             const std::map<std::string, double>& params) {
    if (n < 1 || d < 1) throw std::invalid_argument("empty instance");
    AdversarialInstance inst;
    inst.d = d;
    inst.points.reserve(static_cast<std::size_t>(n));

    switch (kind) {
        case InstanceKind::uniform: {
            for (int i = 0; i < n; ++i) {
                Vec p = zeros(d);
                for (int j = 0; j < d; ++j)
                    p[j] = uniform01(substream(seed, kTagUniform, static_cast<std::uint64_t>(i),
                                               static_cast<std::uint64_t>(j)));
                inst.points.push_back(std::move(p));
            }
            break;
        }
        case InstanceKind::grid: {
            const int g = grid_points_per_axis(n, d);
            std::vector<int> idx(static_cast<std::size_t>(d), 0);
            for (int t = 0; t < n; ++t) {
                Vec p = zeros(d);
                for (int j = 0; j < d; ++j)
                    p[j] = (g == 1) ? 0.0
                                    : static_cast<double>(idx[static_cast<std::size_t>(j)]) /
                                          static_cast<double>(g - 1);
                inst.points.push_back(std::move(p));
                // advance the tuple lexicographically (last axis fastest)
                for (int j = d - 1; j >= 0; --j) {
                    if (++idx[static_cast<std::size_t>(j)] < g) break;
                    idx[static_cast<std::size_t>(j)] = 0;
                }
            }
            break;
        }
        case InstanceKind::clustered: {
            double spread = 0.05;
            if (auto it = params.find("spread"); it != params.end()) spread = it->second;
            const int anchors = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
            std::vector<Vec> anchor_pts;
            anchor_pts.reserve(static_cast<std::size_t>(anchors));
            for (int a = 0; a < anchors; ++a) {
                Vec p = zeros(d);
                for (int j = 0; j < d; ++j)
                    p[j] = uniform01(substream(seed, kTagAnchor, static_cast<std::uint64_t>(a),
                                               static_cast<std::uint64_t>(j)));
                anchor_pts.push_back(std::move(p));
            }
            for (int i = 0; i < n; ++i) {
                const Vec& base = anchor_pts[static_cast<std::size_t>(i % anchors)];
                // uniform direction from normalized gaussians, radius ~ U^(1/d)
                Vec dir = zeros(d);
                for (int j = 0; j < d; ++j)
                    dir[j] = standard_normal(substream(seed, kTagBallDir,
                                                       static_cast<std::uint64_t>(i),
                                                       static_cast<std::uint64_t>(j)));
                double len = norm(dir);
                if (len < 1e-300) { dir[0] = 1.0; len = 1.0; }
                const double u = uniform01(substream(seed, kTagBallRad,
                                                     static_cast<std::uint64_t>(i), 0));
                const double r = spread * std::pow(u, 1.0 / static_cast<double>(d));
                Vec p = base + (r / len) * dir;
                for (int j = 0; j < d; ++j) p[j] = std::clamp(p[j], 0.0, 1.0);
                inst.points.push_back(std::move(p));
            }
            break;
        }
    }
    return inst;
}

double normal_deviate(std::uint64_t seed, int point, int coord) {
    return standard_normal(substream(seed, kTagPerturb, static_cast<std::uint64_t>(point),
                                     static_cast<std::uint64_t>(coord)));
}

PerturbedDataset perturb(const AdversarialInstance& instance, double sigma,
                         std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("negative sigma");
    PerturbedDataset ds;
    ds.sigma = sigma;
    ds.master_seed = seed;
    ds.points = instance.points;
    for (int i = 0; i < ds.n(); ++i)
        for (int j = 0; j < instance.d; ++j)
            ds.points[static_cast<std::size_t>(i)][j] += sigma * normal_deviate(seed, i, j);
    return ds;
}

double cube_bound(int n, int k, int d) {
    if (n < 3 || k < 2 || d < 2) throw std::invalid_argument("outside model assumptions");
    return std::sqrt(90.0 * static_cast<double>(k) * static_cast<double>(d) *
                     std::log(static_cast<double>(n)));
}

bool check_in_cube(PerturbedDataset& ds, double side) {
    if (!(side > 0.0)) throw std::invalid_argument("cube side must be positive");
    const double half = side / 2.0;
    bool inside = true;
    for (const Vec& p : ds.points)
        for (int j = 0; j < p.dim(); ++j)
            if (p[j] < -half || p[j] > half) { inside = false; break; }
    ds.cube_side = side;
    ds.in_cube = inside;
    return inside;
}

void write_instance(std::ostream& os, const AdversarialInstance& inst) {
    os << inst.n() << " " << inst.d << "\n";
    char buf[64];
    for (const Vec& p : inst.points) {
        for (int j = 0; j < inst.d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
            os << (j ? " " : "") << buf;
        }
        os << "\n";
    }
}

AdversarialInstance read_instance(std::istream& is) {
    int n = 0, d = 0;
    if (!(is >> n >> d) || n < 1 || d < 1)
        throw std::runtime_error("malformed instance header");
    AdversarialInstance inst;
    inst.d = d;
    inst.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vec p = zeros(d);
        for (int j = 0; j < d; ++j) {
            if (!(is >> p[j])) throw std::runtime_error("truncated instance file");
        }
        if (!all_finite(p)) throw std::runtime_error("non-finite coordinate in instance");
        inst.points.push_back(std::move(p));
    }
    return inst;
}

AdversarialInstance read_instance_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open instance file: " + path);
    return read_instance(f);
}

void write_instance_file(const std::string& path, const AdversarialInstance& inst) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write instance file: " + path);
    write_instance(f, inst);
}

} // namespace kmlab
