#include "kmlab/engine.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "kmlab/rng.hpp"

namespace kmlab {

namespace {

constexpr std::uint64_t kTagSample = 0x73616d70;

bool any_live(const std::vector<std::optional<Vec>>& centers) {
    for (const auto& c : centers)
        if (c) return true;
    return false;
}

} // namespace

int ClusteringState::live_count() const {
    int c = 0;
    for (const auto& v : centers)
        if (v) ++c;
    return c;
}

std::vector<int> ClusteringState::live_ids() const {
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(centers.size()); ++i)
        if (centers[static_cast<std::size_t>(i)]) ids.push_back(i);
    return ids;
}

std::vector<int> ClusteringState::members(int c) const {
    std::vector<int> m;
    for (int i = 0; i < static_cast<int>(assignment.size()); ++i)
        if (assignment[static_cast<std::size_t>(i)] == c) m.push_back(i);
    return m;
}

const ClusteringState& Trace::pre_state(int index) const {
    if (index < 1 || index > iterations()) throw std::out_of_range("iteration index");
    return index == 1 ? initial : records[static_cast<std::size_t>(index - 2)].post;
}

int Trace::last_active() const {
    int last = iterations();
    if (termination == Termination::converged && last > 0) --last;
    return last;
}

std::vector<int> assign(const std::vector<Vec>& points,
                        const std::vector<std::optional<Vec>>& centers) {
    if (!any_live(centers)) throw std::invalid_argument("empty center list");
    std::vector<int> out(points.size(), -1);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = 0.0;
        int best_id = -1;
        for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
            const auto& cen = centers[static_cast<std::size_t>(c)];
            if (!cen) continue;
            const double d2 = squared_distance(points[i], *cen);
            if (best_id < 0 || d2 < best) {
                best = d2;
                best_id = c;
            }
        }
        out[i] = best_id;
    }
    return out;
}

std::pair<std::vector<std::optional<Vec>>, std::vector<int>>
recenter(const std::vector<Vec>& points, const std::vector<int>& assignment,
         const std::vector<std::optional<Vec>>& centers) {
    const int k = static_cast<int>(centers.size());
    std::vector<Vec> sums(static_cast<std::size_t>(k));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    const int d = points.empty() ? 0 : points.front().dim();
    for (int c = 0; c < k; ++c) sums[static_cast<std::size_t>(c)] = zeros(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int c = assignment[i];
        ++counts[static_cast<std::size_t>(c)];
        for (int j = 0; j < d; ++j) sums[static_cast<std::size_t>(c)][j] += points[i][j];
    }
    std::vector<std::optional<Vec>> result(static_cast<std::size_t>(k));
    std::vector<int> removed;
    for (int c = 0; c < k; ++c) {
        if (!centers[static_cast<std::size_t>(c)]) continue; // stays retired
        if (counts[static_cast<std::size_t>(c)] == 0) {
            removed.push_back(c);
            continue;
        }
        Vec mean = sums[static_cast<std::size_t>(c)];
        const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        for (int j = 0; j < d; ++j) mean[j] *= inv;
        result[static_cast<std::size_t>(c)] = std::move(mean);
    }
    return {std::move(result), std::move(removed)};
}

double potential(const std::vector<Vec>& points,
                 const std::vector<std::optional<Vec>>& centers) {
    if (!any_live(centers)) throw std::invalid_argument("empty center list");
    double psi = 0.0;
    for (const Vec& p : points) {
        double best = -1.0;
        for (const auto& cen : centers) {
            if (!cen) continue;
            const double d2 = squared_distance(p, *cen);
            if (best < 0.0 || d2 < best) best = d2;
        }
        psi += best;
    }
    return psi;
}

double assigned_potential(const std::vector<Vec>& points,
                          const std::vector<std::optional<Vec>>& centers,
                          const std::vector<int>& assignment) {
    double psi = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        psi += squared_distance(points[i], *centers[static_cast<std::size_t>(assignment[i])]);
    return psi;
}

ClusteringState initial_state(const std::vector<Vec>& points,
                              std::vector<std::optional<Vec>> centers) {
    ClusteringState st;
    st.assignment = assign(points, centers);
    st.centers = std::move(centers);
    st.potential = assigned_potential(points, st.centers, st.assignment);
    return st;
}

IterationRecord step(const ClusteringState& state, const std::vector<Vec>& points) {
    IterationRecord rec;
    rec.pre = state;

    std::vector<int> next = assign(points, state.centers);
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        const int from = state.assignment[static_cast<std::size_t>(i)];
        const int to = next[static_cast<std::size_t>(i)];
        if (from != to) rec.reassignments.push_back({i, from, to});
    }

    const double psi_mid = assigned_potential(points, state.centers, next);
    rec.assignment_drop = state.potential - psi_mid;

    auto [new_centers, removed] = recenter(points, next, state.centers);
    rec.removed = std::move(removed);

    rec.post.assignment = std::move(next);
    rec.post.centers = std::move(new_centers);
    rec.post.potential = assigned_potential(points, rec.post.centers, rec.post.assignment);
    rec.move_drop = psi_mid - rec.post.potential;

    auto [pt_terms, cl_terms] = drop_decompositions(rec, points);
    rec.point_terms = std::move(pt_terms);
    rec.cluster_terms = std::move(cl_terms);
    return rec;
}

std::pair<std::vector<double>, std::vector<std::pair<int, double>>>
drop_decompositions(const IterationRecord& record, const std::vector<Vec>& points) {
    std::vector<double> pt_terms;
    pt_terms.reserve(record.reassignments.size());
    for (const Reassignment& r : record.reassignments) {
        const Vec& ci = *record.pre.centers[static_cast<std::size_t>(r.from)];
        const Vec& cj = *record.pre.centers[static_cast<std::size_t>(r.to)];
        if (ci == cj) {
            // tie-break move between coincident centers; the potential
            // difference is exactly zero and there is no bisector
            pt_terms.push_back(0.0);
            continue;
        }
        const Hyperplane h = bisector(ci, cj);
        pt_terms.push_back(2.0 * distance(ci, cj) *
                           distance_to_hyperplane(points[static_cast<std::size_t>(r.point)], h));
    }

    std::vector<std::pair<int, double>> cl_terms;
    for (int c = 0; c < static_cast<int>(record.post.centers.size()); ++c) {
        const auto& post_center = record.post.centers[static_cast<std::size_t>(c)];
        if (!post_center) continue;
        int count = 0;
        for (int a : record.post.assignment)
            if (a == c) ++count;
        const Vec& pre_center = *record.pre.centers[static_cast<std::size_t>(c)];
        cl_terms.emplace_back(c, static_cast<double>(count) *
                                     squared_distance(pre_center, *post_center));
    }
    return {std::move(pt_terms), std::move(cl_terms)};
}

namespace {

std::vector<std::optional<Vec>> pick_initial_centers(const std::vector<Vec>& points, int k,
                                                     Init init, std::uint64_t seed) {
    const int n = static_cast<int>(points.size());
    std::vector<std::optional<Vec>> centers(static_cast<std::size_t>(k));
    switch (init) {
        case Init::first_k:
            for (int c = 0; c < k; ++c) centers[static_cast<std::size_t>(c)] = points[static_cast<std::size_t>(c)];
            break;
        case Init::sample_points: {
            // k distinct indices, drawn without replacement
            std::vector<int> pool(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
            for (int t = 0; t < k; ++t) {
                const std::uint64_t r = substream(seed, kTagSample, static_cast<std::uint64_t>(t));
                const int pick = t + static_cast<int>(mix64(r) % static_cast<std::uint64_t>(n - t));
                std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
                centers[static_cast<std::size_t>(t)] = points[static_cast<std::size_t>(pool[static_cast<std::size_t>(t)])];
            }
            break;
        }
        case Init::explicit_centers:
            throw std::invalid_argument("explicit init requires run_from_centers");
    }
    return centers;
}

bool centers_equal(const std::vector<std::optional<Vec>>& a,
                   const std::vector<std::optional<Vec>>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].has_value() != b[i].has_value()) return false;
        if (a[i] && !(*a[i] == *b[i])) return false;
    }
    return true;
}

Trace run_loop(const std::vector<Vec>& points, std::vector<std::optional<Vec>> centers,
               long max_iterations, std::uint64_t seed) {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    Trace tr;
    tr.n = static_cast<int>(points.size());
    tr.d = points.empty() ? 0 : points.front().dim();
    tr.k_initial = static_cast<int>(centers.size());
    tr.seed = seed;
    tr.max_iterations = max_iterations;
    tr.points = points;
    tr.initial = initial_state(points, std::move(centers));

    // On small runs the engine asserts the classic no-repeat guarantee: the
    // same (assignment, live set) pair must never come back once it changed.
    const bool track_repeats = tr.n <= 64;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    if (track_repeats) seen.insert({tr.initial.assignment, tr.initial.live_ids()});

    ClusteringState state = tr.initial;
    tr.termination = Termination::max_iterations;
    for (long it = 1; it <= max_iterations; ++it) {
        IterationRecord rec = step(state, points);
        rec.index = static_cast<int>(it);
        const bool changed_sets = !rec.reassignments.empty() || !rec.removed.empty();
        const bool converged = !changed_sets && centers_equal(rec.pre.centers, rec.post.centers);
        if (track_repeats && changed_sets) {
            auto key = std::make_pair(rec.post.assignment, rec.post.live_ids());
            if (!seen.insert(std::move(key)).second)
                throw std::logic_error("clustering repeated within a run");
        }
        state = rec.post;
        tr.records.push_back(std::move(rec));
        if (converged) {
            tr.termination = Termination::converged;
            break;
        }
    }
    tr.k_final = state.live_count();
    return tr;
}

} // namespace

Trace run(const std::vector<Vec>& points, int k, Init init, long max_iterations,
          std::uint64_t seed) {
    const int n = static_cast<int>(points.size());
    if (k < 1 || k > n) throw std::invalid_argument("k must satisfy 1 <= k <= n");
    return run_loop(points, pick_initial_centers(points, k, init, seed), max_iterations, seed);
}

Trace run_from_centers(const std::vector<Vec>& points, const std::vector<Vec>& centers,
                       long max_iterations) {
    if (centers.empty()) throw std::invalid_argument("empty center list");
    std::vector<std::optional<Vec>> cs(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) cs[i] = centers[i];
    return run_loop(points, std::move(cs), max_iterations, 0);
}

} // namespace kmlab
