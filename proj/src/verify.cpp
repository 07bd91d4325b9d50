#include "kmlab/verify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace kmlab {

namespace {

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(const char* pattern, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

} // namespace

VerificationReport check_drop_identities(const Trace& trace, double rel_tol) {
    VerificationReport rep;
    rep.check = "drop-identities";
    for (const IterationRecord& rec : trace.records) {
        double pt_sum = 0.0;
        for (double t : rec.point_terms) pt_sum += t;
        double cl_sum = 0.0;
        for (const auto& [c, t] : rec.cluster_terms) cl_sum += t;

        rep.checked += 2;
        rep.max_slack = std::max({rep.max_slack, rel_dev(rec.assignment_drop, pt_sum),
                                  rel_dev(rec.move_drop, cl_sum)});
        if (!close_rel(rec.assignment_drop, pt_sum, rel_tol))
            rep.violations.push_back({trace.id, rec.index,
                                      fmt("assignment drop %.9g != point-term sum %.9g",
                                          rec.assignment_drop, pt_sum)});
        if (!close_rel(rec.move_drop, cl_sum, rel_tol))
            rep.violations.push_back({trace.id, rec.index,
                                      fmt("move drop %.9g != cluster-term sum %.9g",
                                          rec.move_drop, cl_sum)});
    }
    return rep;
}

VerificationReport check_far_from_approx(const Trace& trace) {
    VerificationReport rep;
    rep.check = "far-from-approx";
    rep.max_slack = -std::numeric_limits<double>::infinity();
    const int n = trace.n;
    for (const IterationRecord& rec : trace.records) {
        if (rec.index < 2 || rec.reassignments.empty()) continue;
        const double drop = rec.total_drop();
        const TransitionGraph graph = transition_graph(rec);
        for (int v : graph.vertices) {
            if (std::find(rec.removed.begin(), rec.removed.end(), v) != rec.removed.end())
                continue; // cluster died; the movement identity has no center to move to
            std::vector<Vec> gained, lost;
            for (const TransitionEdge& e : graph.edges) {
                if (e.to == v) gained.push_back(trace.points[static_cast<std::size_t>(e.point)]);
                if (e.from == v) lost.push_back(trace.points[static_cast<std::size_t>(e.point)]);
            }
            if (gained.size() == lost.size()) continue;
            const Vec mass = centroid(trace.points, rec.pre.members(v));
            const Vec approx = approx_center(gained, lost);
            const double bound = squared_distance(mass, approx) / static_cast<double>(n);
            ++rep.checked;
            rep.max_slack = std::max(rep.max_slack, bound - drop);
            if (drop < bound - 1e-9 * (1.0 + bound))
                rep.violations.push_back({trace.id, rec.index,
                                          fmt("drop %.9g below center-displacement bound %.9g",
                                              drop, bound)});
        }
    }
    if (rep.checked == 0) rep.max_slack = 0.0;
    return rep;
}

VerificationReport check_bisector_inequality(const Trace& trace, CenterMode mode) {
    VerificationReport rep;
    rep.check = mode == CenterMode::actual ? "bisector-inequality-actual"
                                           : "bisector-inequality-lattice";
    if (!(trace.cube_side > 0.0)) {
        rep.applicable = false;
        return rep;
    }
    rep.max_slack = -std::numeric_limits<double>::infinity();
    for (const IterationRecord& rec : trace.records) {
        if (rec.index < 2 || rec.reassignments.empty()) continue;
        const double eps = rec.total_drop();
        if (!(eps > 0.0)) continue;

        double min_pair = std::numeric_limits<double>::infinity();
        for (const Reassignment& r : rec.reassignments)
            min_pair = std::min(min_pair,
                                distance(*rec.pre.centers[static_cast<std::size_t>(r.from)],
                                         *rec.pre.centers[static_cast<std::size_t>(r.to)]));

        const double rhs = 6.0 * trace.cube_side *
                           std::sqrt(static_cast<double>(trace.n) *
                                     static_cast<double>(trace.d) * eps);
        for (const TransitionGraph& comp : components(transition_graph(rec))) {
            const Blueprint bp =
                build_blueprint(comp, rec.pre, trace.points, eps, mode, trace.cube_side);
            if (bp.degenerate) continue;
            const double lhs = min_pair * lambda(bp, trace.points);
            ++rep.checked;
            rep.max_slack = std::max(rep.max_slack, lhs - rhs);
            if (lhs > rhs + 1e-9 * (1.0 + rhs))
                rep.violations.push_back({trace.id, rec.index,
                                          fmt("pair distance * lambda %.9g exceeds %.9g", lhs,
                                              rhs)});
        }
    }
    if (rep.checked == 0) rep.max_slack = 0.0;
    return rep;
}

namespace {

// Subset sums for all masks over at most 14 points.
std::vector<Vec> subset_sums(const std::vector<Vec>& points) {
    const int n = static_cast<int>(points.size());
    const int d = points.front().dim();
    std::vector<Vec> sums(static_cast<std::size_t>(1) << n);
    sums[0] = zeros(d);
    for (unsigned mask = 1; mask < sums.size(); ++mask) {
        const int low = std::countr_zero(mask);
        sums[mask] = sums[mask & (mask - 1)] + points[static_cast<std::size_t>(low)];
    }
    return sums;
}

Vec subset_mass(const std::vector<Vec>& sums, unsigned mask) {
    return (1.0 / static_cast<double>(std::popcount(mask))) * sums[mask];
}

std::vector<unsigned> small_masks(int n, int c) {
    std::vector<unsigned> out;
    for (unsigned s = 1; s < (1u << n); ++s)
        if (std::popcount(s) <= c) out.push_back(s);
    return out;
}

void coarse_guard(const std::vector<Vec>& points, int c) {
    if (points.empty()) throw std::invalid_argument("empty point set");
    if (static_cast<int>(points.size()) > 14 || c > 3 || c < 1)
        throw std::invalid_argument("instance too large for exhaustive oracle");
}

} // namespace

bool is_coarse(const std::vector<Vec>& points, double eta, int c) {
    coarse_guard(points, c);
    const int n = static_cast<int>(points.size());
    const auto sums = subset_sums(points);
    const auto deltas = small_masks(n, c);
    for (unsigned mid = 1; mid < (1u << n); ++mid) {
        const Vec mid_mass = subset_mass(sums, mid);
        int hits = 0;
        for (unsigned s : deltas) {
            const unsigned other = mid ^ s;
            if (other == 0) continue;
            if (distance(subset_mass(sums, other), mid_mass) <= eta && ++hits >= 2)
                return false;
        }
    }
    return true;
}

double coarseness_threshold(const std::vector<Vec>& points, int c) {
    coarse_guard(points, c);
    const int n = static_cast<int>(points.size());
    const auto sums = subset_sums(points);
    const auto deltas = small_masks(n, c);
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mid = 1; mid < (1u << n); ++mid) {
        const Vec mid_mass = subset_mass(sums, mid);
        // min over distinct chains of max(d1, d2) = second-smallest distance
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        for (unsigned s : deltas) {
            const unsigned other = mid ^ s;
            if (other == 0) continue;
            const double dist = distance(subset_mass(sums, other), mid_mass);
            if (dist < d1) {
                d2 = d1;
                d1 = dist;
            } else if (dist < d2) {
                d2 = dist;
            }
        }
        best = std::min(best, d2);
    }
    return best;
}

namespace {

std::vector<std::vector<int>> member_sets(const ClusteringState& st, int k_slots) {
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(k_slots));
    for (int i = 0; i < static_cast<int>(st.assignment.size()); ++i)
        sets[static_cast<std::size_t>(st.assignment[static_cast<std::size_t>(i)])].push_back(i);
    return sets;
}

} // namespace

VerificationReport check_epoch_bound(const Trace& trace) {
    VerificationReport rep;
    rep.check = "epoch-bound";
    const int last = trace.last_active();
    const int k = trace.k_initial;
    for (int i = 2; i + 2 <= last; ++i) {
        // snapshots: start of i, i+1, i+2 and end of i+2
        const std::array<const ClusteringState*, 4> snaps = {
            &trace.pre_state(i), &trace.records[static_cast<std::size_t>(i - 1)].post,
            &trace.records[static_cast<std::size_t>(i)].post,
            &trace.records[static_cast<std::size_t>(i + 1)].post};
        std::array<std::vector<std::vector<int>>, 4> sets;
        for (int s = 0; s < 4; ++s) sets[static_cast<std::size_t>(s)] = member_sets(*snaps[static_cast<std::size_t>(s)], k);

        bool found = false;
        for (int c = 0; c < k && !found; ++c) {
            std::vector<const std::vector<int>*> distinct;
            for (int s = 0; s < 4; ++s) {
                const auto& cur = sets[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)];
                bool dup = false;
                for (const auto* seen : distinct)
                    if (*seen == cur) { dup = true; break; }
                if (!dup) distinct.push_back(&cur);
            }
            if (distinct.size() >= 3) found = true;
        }
        ++rep.checked;
        if (!found)
            rep.violations.push_back({trace.id, i,
                                      "no cluster in three distinct configurations over window"});
    }
    return rep;
}

VerificationReport check_coarse_drop(const std::vector<Vec>& points, const Trace& trace,
                                     double eta, int c) {
    if (!is_coarse(points, eta, c))
        throw std::invalid_argument("dataset not (eta,c)-coarse");
    VerificationReport rep;
    rep.check = "coarse-drop";
    rep.max_slack = -std::numeric_limits<double>::infinity();
    const int last = trace.last_active();

    // per-record: largest gained+lost over clusters, and whether one died
    std::vector<int> max_exchange(static_cast<std::size_t>(last) + 1, 0);
    std::vector<bool> removal(static_cast<std::size_t>(last) + 1, false);
    for (int i = 2; i <= last; ++i) {
        const IterationRecord& rec = trace.records[static_cast<std::size_t>(i - 1)];
        std::map<int, int> exchanged;
        for (const Reassignment& r : rec.reassignments) {
            ++exchanged[r.from];
            ++exchanged[r.to];
        }
        for (const auto& [v, cnt] : exchanged)
            max_exchange[static_cast<std::size_t>(i)] =
                std::max(max_exchange[static_cast<std::size_t>(i)], cnt);
        removal[static_cast<std::size_t>(i)] = !rec.removed.empty();
    }

    for (int i = 2; i + 2 <= last; ++i) {
        bool qualifies = true;
        for (int t = i; t <= i + 2; ++t)
            if (max_exchange[static_cast<std::size_t>(t)] > c || removal[static_cast<std::size_t>(t)])
                qualifies = false;
        if (!qualifies) continue;
        const double window_drop = trace.pre_state(i).potential -
                                   trace.records[static_cast<std::size_t>(i + 1)].post.potential;
        ++rep.checked;
        rep.max_slack = std::max(rep.max_slack, eta * eta - window_drop);
        if (window_drop < eta * eta - 1e-9)
            rep.violations.push_back({trace.id, i,
                                      fmt("window drop %.9g below eta^2 %.9g", window_drop,
                                          eta * eta)});
    }
    if (rep.checked == 0) rep.max_slack = 0.0;
    return rep;
}

VerificationReport check_potential_bound(const Trace& trace, double side) {
    VerificationReport rep;
    rep.check = "potential-ceiling";
    if (!trace.in_cube || !(side > 0.0) || trace.records.empty()) {
        rep.applicable = false;
        return rep;
    }
    const double ceiling =
        static_cast<double>(trace.n) * static_cast<double>(trace.d) * side * side;
    const double psi1 = trace.records.front().post.potential;
    rep.checked = 1;
    rep.max_slack = psi1 - ceiling;
    if (psi1 > ceiling * (1.0 + 1e-9))
        rep.violations.push_back({trace.id, 1,
                                  fmt("potential %.9g exceeds ceiling %.9g", psi1, ceiling)});
    return rep;
}

std::vector<VerificationReport> run_all_checks(const Trace& trace) {
    std::vector<VerificationReport> reports;
    reports.push_back(check_drop_identities(trace));
    reports.push_back(check_epoch_bound(trace));
    reports.push_back(check_far_from_approx(trace));
    reports.push_back(check_bisector_inequality(trace, CenterMode::actual));
    reports.push_back(check_bisector_inequality(trace, CenterMode::lattice));
    reports.push_back(check_potential_bound(trace, trace.cube_side));
    return reports;
}

void write_verification_summary(std::ostream& os, const Trace& trace,
                                const std::vector<VerificationReport>& reports) {
    char buf[64];
    for (const VerificationReport& rep : reports) {
        os << trace.id << " " << rep.check << " ";
        if (!rep.applicable) {
            os << "not-applicable\n";
            continue;
        }
        std::snprintf(buf, sizeof(buf), "%.9g", rep.max_slack);
        os << (rep.pass() ? "pass" : "FAIL") << " checked=" << rep.checked
           << " violations=" << rep.violations.size() << " max_slack=" << buf << "\n";
        for (const Violation& v : rep.violations)
            os << "  iteration " << v.iteration << ": " << v.details << "\n";
    }
}

} // namespace kmlab
