#ifndef KMLAB_BLUEPRINT_HPP
#define KMLAB_BLUEPRINT_HPP

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kmlab/engine.hpp"
#include "kmlab/geometry.hpp"

namespace kmlab {

struct TransitionEdge {
    int from = 0;
    int to = 0;
    int point = 0;
    bool operator==(const TransitionEdge&) const = default;
};

/// Directed labeled multigraph of one iteration: a vertex per cluster that
/// exchanged points, one edge per point that switched clusters.
struct TransitionGraph {
    std::set<int> vertices;
    std::vector<TransitionEdge> edges;

    struct Degree {
        int in = 0;
        int out = 0;
        int total() const { return in + out; }
    };
    std::map<int, Degree> degrees() const;
    int max_total_degree() const;
};

TransitionGraph transition_graph(const std::vector<int>& prev_assignment,
                                 const std::vector<int>& next_assignment);
TransitionGraph transition_graph(const IterationRecord& record);

/// Weakly connected components (edge direction ignored), ordered by their
/// smallest vertex id; edge order within a component follows the input.
std::vector<TransitionGraph> components(const TransitionGraph& graph);

/// Vertices whose in-degree equals their out-degree.
std::set<int> balanced_vertices(const TransitionGraph& graph);

/// Center position implied by an unbalanced exchange: a cluster gaining the
/// point multiset A and losing B sits at (sum(B) - sum(A)) / (|B| - |A|).
Vec approx_center(const std::vector<Vec>& gained, const std::vector<Vec>& lost);

/// Nearest point of the axis-aligned lattice with per-axis spacing
/// sqrt(n*epsilon/d), anchored at the cube corner -side/2. The snap distance
/// is at most sqrt(d)/2 times the spacing, i.e. at most sqrt(n*epsilon)/2.
Vec lattice_point(const Vec& center, double epsilon, int n, int d, double side);

enum class CenterMode { lattice, actual };
CenterMode center_mode_from_string(const std::string& s);
std::string to_string(CenterMode m);

/// Structural categories a component falls into, in the fixed reporting
/// order: small balanced vertex, degree-one vertex, >=3 disjoint adjacent
/// unbalanced degree-2 pairs, bounded degree (window candidate), degenerate,
/// general.
enum class Category {
    small_balanced = 1,
    degree_one = 2,
    degree_two_pairs = 3,
    bounded_degree = 4,
    degenerate = 5,
    general = 6,
};

struct CategoryReport {
    std::array<bool, 6> flags{};
    Category primary = Category::general;
    bool in_bounded_window = false;

    int flags_bitmask() const;
};

/// One weakly connected component together with everything needed to reason
/// about it: edge count m, balanced vertex count b, the approximate center
/// of every vertex, and whether two exchanging vertices collide.
struct Blueprint {
    TransitionGraph graph;
    int m = 0;
    int b = 0;
    double epsilon = 0.0;
    CenterMode mode = CenterMode::actual;
    std::map<int, Vec> approx_centers;
    bool degenerate = false;
};

/// Builds the blueprint of one component against the state at the beginning
/// of the iteration. Unbalanced vertices get the exchange-formula center;
/// balanced vertices get their actual center (mode actual) or its lattice
/// snap (mode lattice). Two exchanging vertices with centers closer than
/// 1e-12 mark the blueprint degenerate. With epsilon <= 0 the lattice has
/// zero spacing and the snap equals the actual center, so mode lattice falls
/// back to the actual position.
Blueprint build_blueprint(const TransitionGraph& component, const ClusteringState& pre,
                          const std::vector<Vec>& points, double epsilon, CenterMode mode,
                          double cube_side);

/// Largest distance between a switching point and the bisector of the two
/// approximate centers it switches between. Undefined on degenerate
/// blueprints.
double lambda(const Blueprint& bp, const std::vector<Vec>& points);

/// Maximum number of disjoint adjacent pairs among unbalanced vertices of
/// total degree 2. The induced graph has maximum degree 2, so each of its
/// paths/cycles with h vertices contributes floor(h/2).
int degree2_pair_count(const TransitionGraph& graph);

CategoryReport classify(const Blueprint& bp, bool in_bounded_window, int dim,
                        int const1 = 8, int const2 = 7);

/// Vertex-count ceiling for components meeting the structural hypotheses
/// checked by node_bound_applies.
double node_bound(int m, int b, int dim, int const1 = 8, int const2 = 7);
bool node_bound_applies(const TransitionGraph& graph, int dim, int const1 = 8,
                        int const2 = 7);

/// Minimum distance between the pre-iteration centers of two clusters that
/// exchange a point in some iteration after the first whose total drop is at
/// most epsilon; absent when no iteration qualifies.
std::optional<double> delta_eps(const Trace& trace, double epsilon);

/// One classified component of one iteration.
struct ClassifiedComponent {
    int iteration = 0;
    int component = 0;
    Blueprint bp;
    CategoryReport report;
    std::optional<double> lam; // absent when degenerate
};

/// True at index i (1-based record index) when records i..i+2 all have
/// maximum total degree <= const2; only records after the first and before
/// the convergence-detection record are eligible.
std::vector<bool> bounded_degree_window_flags(const Trace& trace, int const2 = 7);

/// Blueprints + categories for every component of every iteration after the
/// first. epsilon_override fixes the blueprint scale; by default each
/// iteration is analyzed at its own observed drop.
std::vector<ClassifiedComponent> classify_trace(const Trace& trace,
                                                std::optional<double> epsilon_override,
                                                CenterMode mode, int const1 = 8,
                                                int const2 = 7);

/// CSV rows: trace id, iteration, component, m, b, degenerate, flags
/// bitmask, primary category, lambda (empty when degenerate).
void write_classification_csv(std::ostream& os, const std::string& trace_id,
                              const std::vector<ClassifiedComponent>& rows);

} // namespace kmlab

#endif
