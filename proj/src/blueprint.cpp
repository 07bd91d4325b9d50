#include "kmlab/blueprint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace kmlab {

std::map<int, TransitionGraph::Degree> TransitionGraph::degrees() const {
    std::map<int, Degree> deg;
    for (int v : vertices) deg[v]; // ensure every vertex appears
    for (const TransitionEdge& e : edges) {
        ++deg[e.from].out;
        ++deg[e.to].in;
    }
    return deg;
}

int TransitionGraph::max_total_degree() const {
    int best = 0;
    for (const auto& [v, d] : degrees()) best = std::max(best, d.total());
    return best;
}

TransitionGraph transition_graph(const std::vector<int>& prev_assignment,
                                 const std::vector<int>& next_assignment) {
    if (prev_assignment.size() != next_assignment.size())
        throw std::invalid_argument("assignments cover different point sets");
    TransitionGraph g;
    for (int i = 0; i < static_cast<int>(prev_assignment.size()); ++i) {
        const int from = prev_assignment[static_cast<std::size_t>(i)];
        const int to = next_assignment[static_cast<std::size_t>(i)];
        if (from == to) continue;
        g.edges.push_back({from, to, i});
        g.vertices.insert(from);
        g.vertices.insert(to);
    }
    return g;
}

TransitionGraph transition_graph(const IterationRecord& record) {
    TransitionGraph g;
    for (const Reassignment& r : record.reassignments) {
        g.edges.push_back({r.from, r.to, r.point});
        g.vertices.insert(r.from);
        g.vertices.insert(r.to);
    }
    return g;
}

namespace {

int find_root(std::map<int, int>& parent, int v) {
    while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    return v;
}

} // namespace

std::vector<TransitionGraph> components(const TransitionGraph& graph) {
    std::map<int, int> parent;
    for (int v : graph.vertices) parent[v] = v;
    for (const TransitionEdge& e : graph.edges) {
        const int a = find_root(parent, e.from);
        const int b = find_root(parent, e.to);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    // root = smallest vertex id of the component; map iteration gives the
    // deterministic order
    std::map<int, TransitionGraph> comps;
    for (int v : graph.vertices) comps[find_root(parent, v)].vertices.insert(v);
    for (const TransitionEdge& e : graph.edges)
        comps[find_root(parent, e.from)].edges.push_back(e);
    std::vector<TransitionGraph> out;
    out.reserve(comps.size());
    for (auto& [root, g] : comps) out.push_back(std::move(g));
    return out;
}

std::set<int> balanced_vertices(const TransitionGraph& graph) {
    std::set<int> out;
    for (const auto& [v, d] : graph.degrees())
        if (d.in == d.out) out.insert(v);
    return out;
}

Vec approx_center(const std::vector<Vec>& gained, const std::vector<Vec>& lost) {
    if (gained.size() == lost.size())
        throw std::invalid_argument("balanced cluster has no formula center");
    const int d = gained.empty() ? lost.front().dim() : gained.front().dim();
    Vec s = zeros(d);
    for (const Vec& p : lost)
        for (int j = 0; j < d; ++j) s[j] += p[j];
    for (const Vec& p : gained)
        for (int j = 0; j < d; ++j) s[j] -= p[j];
    const double denom = static_cast<double>(lost.size()) - static_cast<double>(gained.size());
    for (int j = 0; j < d; ++j) s[j] /= denom;
    return s;
}

Vec lattice_point(const Vec& center, double epsilon, int n, int d, double side) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("nonpositive epsilon");
    const double spacing = std::sqrt(static_cast<double>(n) * epsilon / static_cast<double>(d));
    const double anchor = -side / 2.0;
    Vec out = center;
    for (int j = 0; j < center.dim(); ++j)
        out[j] = anchor + std::round((center[j] - anchor) / spacing) * spacing;
    return out;
}

CenterMode center_mode_from_string(const std::string& s) {
    if (s == "lattice") return CenterMode::lattice;
    if (s == "actual") return CenterMode::actual;
    throw std::invalid_argument("unknown center mode: " + s);
}

std::string to_string(CenterMode m) {
    return m == CenterMode::lattice ? "lattice" : "actual";
}

int CategoryReport::flags_bitmask() const {
    int mask = 0;
    for (int i = 0; i < 6; ++i)
        if (flags[static_cast<std::size_t>(i)]) mask |= 1 << i;
    return mask;
}

Blueprint build_blueprint(const TransitionGraph& component, const ClusteringState& pre,
                          const std::vector<Vec>& points, double epsilon, CenterMode mode,
                          double cube_side) {
    if (component.edges.empty()) throw std::invalid_argument("empty component");
    Blueprint bp;
    bp.graph = component;
    bp.m = static_cast<int>(component.edges.size());
    bp.epsilon = epsilon;
    bp.mode = mode;

    const auto balanced = balanced_vertices(component);
    bp.b = static_cast<int>(balanced.size());
    const int n = static_cast<int>(points.size());
    const int d = points.empty() ? 0 : points.front().dim();

    for (int v : component.vertices) {
        if (balanced.count(v)) {
            const Vec& actual = *pre.centers[static_cast<std::size_t>(v)];
            if (mode == CenterMode::lattice && epsilon > 0.0)
                bp.approx_centers[v] = lattice_point(actual, epsilon, n, d, cube_side);
            else
                bp.approx_centers[v] = actual;
        } else {
            std::vector<Vec> gained, lost;
            for (const TransitionEdge& e : component.edges) {
                if (e.to == v) gained.push_back(points[static_cast<std::size_t>(e.point)]);
                if (e.from == v) lost.push_back(points[static_cast<std::size_t>(e.point)]);
            }
            bp.approx_centers[v] = approx_center(gained, lost);
        }
    }

    for (const TransitionEdge& e : component.edges) {
        if (distance(bp.approx_centers.at(e.from), bp.approx_centers.at(e.to)) < 1e-12) {
            bp.degenerate = true;
            break;
        }
    }
    return bp;
}

double lambda(const Blueprint& bp, const std::vector<Vec>& points) {
    if (bp.degenerate) throw std::invalid_argument("approximate bisector undefined");
    double best = 0.0;
    for (const TransitionEdge& e : bp.graph.edges) {
        const Hyperplane h = bisector(bp.approx_centers.at(e.from), bp.approx_centers.at(e.to));
        best = std::max(best,
                        distance_to_hyperplane(points[static_cast<std::size_t>(e.point)], h));
    }
    return best;
}

int degree2_pair_count(const TransitionGraph& graph) {
    const auto deg = graph.degrees();
    std::set<int> candidates;
    for (const auto& [v, d] : deg)
        if (d.total() == 2 && d.in != d.out) candidates.insert(v);
    if (candidates.empty()) return 0;

    // adjacency among candidates, simple & undirected
    std::map<int, std::set<int>> adj;
    for (const TransitionEdge& e : graph.edges) {
        if (e.from == e.to) continue;
        if (candidates.count(e.from) && candidates.count(e.to)) {
            adj[e.from].insert(e.to);
            adj[e.to].insert(e.from);
        }
    }
    // the induced graph has max degree 2; every path/cycle of h vertices
    // holds floor(h/2) disjoint pairs
    int pairs = 0;
    std::set<int> visited;
    for (int start : candidates) {
        if (visited.count(start)) continue;
        int h = 0;
        std::vector<int> stack{start};
        visited.insert(start);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++h;
            for (int w : adj[v])
                if (!visited.count(w)) {
                    visited.insert(w);
                    stack.push_back(w);
                }
        }
        pairs += h / 2;
    }
    return pairs;
}

CategoryReport classify(const Blueprint& bp, bool in_bounded_window, int dim, int const1,
                        int const2) {
    CategoryReport rep;
    rep.in_bounded_window = in_bounded_window;
    const auto deg = bp.graph.degrees();

    bool small_balanced = false;
    bool degree_one = false;
    int max_degree = 0;
    for (const auto& [v, d] : deg) {
        if (d.in == d.out && d.total() > 0 && d.in <= const1 * dim) small_balanced = true;
        if (d.total() == 1) degree_one = true;
        max_degree = std::max(max_degree, d.total());
    }

    rep.flags[0] = small_balanced;
    rep.flags[1] = degree_one;
    rep.flags[2] = !bp.degenerate && degree2_pair_count(bp.graph) >= 3;
    rep.flags[3] = max_degree <= const2;
    rep.flags[4] = bp.degenerate;
    rep.flags[5] = !(rep.flags[0] || rep.flags[1] || rep.flags[2] || rep.flags[4]) &&
                   !(rep.flags[3] && in_bounded_window);

    if (rep.flags[4]) rep.primary = Category::degenerate;
    else if (rep.flags[0]) rep.primary = Category::small_balanced;
    else if (rep.flags[1]) rep.primary = Category::degree_one;
    else if (rep.flags[2]) rep.primary = Category::degree_two_pairs;
    else if (rep.flags[3]) rep.primary = Category::bounded_degree;
    else rep.primary = Category::general;
    return rep;
}

double node_bound(int m, int b, int dim, int const1, int const2) {
    // evaluated over a common denominator so the unit fixtures come out exact
    const double offset = (b == 0)
                              ? static_cast<double>(const2 - 4)
                              : static_cast<double>((2 * const1 * dim - 1) * b - 2);
    return (5.0 * static_cast<double>(m) - 2.0 * offset) / 6.0;
}

bool node_bound_applies(const TransitionGraph& graph, int dim, int const1, int const2) {
    const auto deg = graph.degrees();
    if (deg.empty()) return false;
    int max_degree = 0;
    for (const auto& [v, d] : deg) {
        if (d.total() < 2) return false;
        if (d.in == d.out && d.total() < 2 * dim * const1 + 2) return false;
        max_degree = std::max(max_degree, d.total());
    }
    if (max_degree < const2 + 1) return false;
    return degree2_pair_count(graph) <= 2;
}

std::optional<double> delta_eps(const Trace& trace, double epsilon) {
    std::optional<double> best;
    for (const IterationRecord& rec : trace.records) {
        if (rec.index < 2) continue;
        if (rec.total_drop() > epsilon) continue;
        std::set<std::pair<int, int>> pairs;
        for (const Reassignment& r : rec.reassignments)
            pairs.insert({std::min(r.from, r.to), std::max(r.from, r.to)});
        for (const auto& [a, b] : pairs) {
            const double dist = distance(*rec.pre.centers[static_cast<std::size_t>(a)],
                                         *rec.pre.centers[static_cast<std::size_t>(b)]);
            if (!best || dist < *best) best = dist;
        }
    }
    return best;
}

std::vector<bool> bounded_degree_window_flags(const Trace& trace, int const2) {
    const int t = trace.iterations();
    std::vector<bool> eligible(static_cast<std::size_t>(t) + 1, false);
    std::vector<bool> in_window(static_cast<std::size_t>(t) + 1, false);
    const int last = trace.last_active();
    for (int i = 2; i <= last; ++i)
        eligible[static_cast<std::size_t>(i)] =
            transition_graph(trace.records[static_cast<std::size_t>(i - 1)]).max_total_degree() <=
            const2;
    for (int i = 2; i + 2 <= last; ++i) {
        if (eligible[static_cast<std::size_t>(i)] && eligible[static_cast<std::size_t>(i + 1)] &&
            eligible[static_cast<std::size_t>(i + 2)]) {
            in_window[static_cast<std::size_t>(i)] = true;
            in_window[static_cast<std::size_t>(i + 1)] = true;
            in_window[static_cast<std::size_t>(i + 2)] = true;
        }
    }
    return in_window;
}

std::vector<ClassifiedComponent> classify_trace(const Trace& trace,
                                                std::optional<double> epsilon_override,
                                                CenterMode mode, int const1, int const2) {
    std::vector<ClassifiedComponent> out;
    const auto window_flags = bounded_degree_window_flags(trace, const2);
    for (const IterationRecord& rec : trace.records) {
        if (rec.index < 2) continue;
        if (rec.reassignments.empty()) continue;
        const double eps = epsilon_override.value_or(std::max(rec.total_drop(), 0.0));
        const TransitionGraph graph = transition_graph(rec);
        int idx = 0;
        for (const TransitionGraph& comp : components(graph)) {
            ClassifiedComponent cc;
            cc.iteration = rec.index;
            cc.component = idx++;
            cc.bp = build_blueprint(comp, rec.pre, trace.points, eps, mode, trace.cube_side);
            cc.report = classify(cc.bp, window_flags[static_cast<std::size_t>(rec.index)],
                                 trace.d, const1, const2);
            if (!cc.bp.degenerate) cc.lam = lambda(cc.bp, trace.points);
            out.push_back(std::move(cc));
        }
    }
    return out;
}

void write_classification_csv(std::ostream& os, const std::string& trace_id,
                              const std::vector<ClassifiedComponent>& rows) {
    os << "trace_id,iteration,component,m,b,degenerate,flags,primary,lambda\n";
    char buf[64];
    for (const ClassifiedComponent& cc : rows) {
        os << trace_id << ',' << cc.iteration << ',' << cc.component << ',' << cc.bp.m << ','
           << cc.bp.b << ',' << (cc.bp.degenerate ? 1 : 0) << ',' << cc.report.flags_bitmask()
           << ',' << static_cast<int>(cc.report.primary) << ',';
        if (cc.lam) {
            std::snprintf(buf, sizeof(buf), "%.17g", *cc.lam);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace kmlab
