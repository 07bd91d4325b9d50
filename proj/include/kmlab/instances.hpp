#ifndef KMLAB_INSTANCES_HPP
#define KMLAB_INSTANCES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kmlab/geometry.hpp"

namespace kmlab {

/// Adversarial input: n points inside the unit cube [0,1]^d.
struct AdversarialInstance {
    std::vector<Vec> points;
    int d = 0;

    int n() const { return static_cast<int>(points.size()); }
};

/// The same points after independent Gaussian noise of deviation sigma was
/// added to every coordinate. cube_side/in_cube are filled by check_in_cube.
struct PerturbedDataset {
    std::vector<Vec> points;
    double sigma = 0.0;
    std::uint64_t master_seed = 0;
    double cube_side = 0.0;
    bool in_cube = false;

    int n() const { return static_cast<int>(points.size()); }
    int d() const { return points.empty() ? 0 : points.front().dim(); }
};

enum class InstanceKind { uniform, grid, clustered };

InstanceKind instance_kind_from_string(const std::string& s);
std::string to_string(InstanceKind k);

/// Deterministic instance generator. For a fixed argument tuple the output
/// is always byte-identical.
///   uniform   - i.i.d. uniform coordinates
///   grid      - ceil(n^(1/d)) evenly spaced values per axis, first n lattice
///               points in lexicographic order
///   clustered - ceil(sqrt(n)) uniform anchors; each point uniform in a ball
///               of radius params["spread"] (default 0.05) around its
///               round-robin anchor, clamped to the cube
AdversarialInstance generate(InstanceKind kind, int n, int d, std::uint64_t seed,
                             const std::map<std::string, double>& params = {});

/// The deviate added to coordinate j of point i, as a pure function of
/// (seed, i, j). Exposed so order-invariance is directly testable.
double normal_deviate(std::uint64_t seed, int point, int coord);

/// Adds sigma * normal_deviate(seed,i,j) to every coordinate. sigma = 0
/// reproduces the input exactly.
PerturbedDataset perturb(const AdversarialInstance& instance, double sigma,
                         std::uint64_t seed);

/// Side length sqrt(90 k d ln n) of the reference hypercube; valid for
/// n >= 3, k >= 2, d >= 2.
double cube_bound(int n, int k, int d);

/// True iff every coordinate lies in [-side/2, side/2]; records side and the
/// verdict on the dataset.
bool check_in_cube(PerturbedDataset& ds, double side);

/// Text format: first line "n d", then n lines of d coordinates written with
/// 17 significant digits.
void write_instance(std::ostream& os, const AdversarialInstance& inst);
AdversarialInstance read_instance(std::istream& is);
AdversarialInstance read_instance_file(const std::string& path);
void write_instance_file(const std::string& path, const AdversarialInstance& inst);

} // namespace kmlab

#endif
