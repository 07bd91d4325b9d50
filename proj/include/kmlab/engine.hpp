#ifndef KMLAB_ENGINE_HPP
#define KMLAB_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmlab/geometry.hpp"

namespace kmlab {

/// One clustering configuration: per-point cluster ids, the center of every
/// live cluster (retired ids keep their slot as nullopt and are never
/// reused), and the potential of the configuration, i.e. the sum over points
/// of the squared distance to the center they are assigned to.
struct ClusteringState {
    std::vector<int> assignment;
    std::vector<std::optional<Vec>> centers;
    double potential = 0.0;

    int live_count() const;
    std::vector<int> live_ids() const;
    /// Member point indices (ascending) of cluster c.
    std::vector<int> members(int c) const;
};

struct Reassignment {
    int point = 0;
    int from = 0;
    int to = 0;
    bool operator==(const Reassignment&) const = default;
};

/// Everything observed in one iteration: the configuration before and after,
/// which points moved, how the potential drop splits into the reassignment
/// part and the recentering part, and the per-point / per-cluster terms the
/// two drops decompose into.
struct IterationRecord {
    int index = 0; // 1-based
    ClusteringState pre;
    ClusteringState post;
    std::vector<Reassignment> reassignments;
    double assignment_drop = 0.0;
    double move_drop = 0.0;
    std::vector<int> removed;                          // cluster ids retired this iteration
    std::vector<double> point_terms;                   // parallel to reassignments
    std::vector<std::pair<int, double>> cluster_terms; // (cluster id, term)

    double total_drop() const { return pre.potential - post.potential; }
};

enum class Init { sample_points, first_k, explicit_centers };
enum class Termination { converged, max_iterations };

struct Trace {
    std::string id;
    int n = 0;
    int d = 0;
    int k_initial = 0;
    int k_final = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double cube_side = 0.0;
    bool in_cube = false;
    long max_iterations = 0;
    std::vector<Vec> points;
    ClusteringState initial;
    std::vector<IterationRecord> records;
    Termination termination = Termination::converged;

    int iterations() const { return static_cast<int>(records.size()); }
    const ClusteringState& pre_state(int index) const; // index 1-based
    /// Index of the last record that is a real iteration: converged runs end
    /// with a detection record in which nothing changes, which is excluded.
    int last_active() const;
};

/// Each point to a nearest live center; ties go to the lowest cluster index.
std::vector<int> assign(const std::vector<Vec>& points,
                        const std::vector<std::optional<Vec>>& centers);

/// Each surviving center to the centroid of its members; clusters left with
/// no members are retired and their ids reported.
std::pair<std::vector<std::optional<Vec>>, std::vector<int>>
recenter(const std::vector<Vec>& points, const std::vector<int>& assignment,
         const std::vector<std::optional<Vec>>& centers);

/// Sum over points of the squared distance to the nearest live center.
double potential(const std::vector<Vec>& points,
                 const std::vector<std::optional<Vec>>& centers);

/// Sum over points of the squared distance to their assigned center.
double assigned_potential(const std::vector<Vec>& points,
                          const std::vector<std::optional<Vec>>& centers,
                          const std::vector<int>& assignment);

/// State with the given centers and the nearest-center assignment for them.
ClusteringState initial_state(const std::vector<Vec>& points,
                              std::vector<std::optional<Vec>> centers);

/// One assignment + recentering pass from the given state. Potentials of the
/// returned record are recomputed from scratch, never updated incrementally.
IterationRecord step(const ClusteringState& state, const std::vector<Vec>& points);

/// Recomputes the drop decompositions of a record from its pre/post states:
/// one term 2*|c_i - c_j|*dist(x, bisector) per reassigned point (pre-move
/// centers) and one term |C|*|c_pre - centroid(C)|^2 per surviving cluster.
std::pair<std::vector<double>, std::vector<std::pair<int, double>>>
drop_decompositions(const IterationRecord& record, const std::vector<Vec>& points);

Trace run(const std::vector<Vec>& points, int k, Init init, long max_iterations,
          std::uint64_t seed);
Trace run_from_centers(const std::vector<Vec>& points, const std::vector<Vec>& centers,
                       long max_iterations);

} // namespace kmlab

#endif
