#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kmlab/engine.hpp"
#include "kmlab/instances.hpp"
#include "kmlab/rng.hpp"

using namespace kmlab;

namespace {

std::vector<std::optional<Vec>> live(std::vector<Vec> centers) {
    std::vector<std::optional<Vec>> out;
    for (Vec& c : centers) out.push_back(std::move(c));
    return out;
}

} // namespace

TEST_CASE("assign picks nearest, ties to lowest index") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{10.0}};
    CHECK(assign(pts, live({Vec{1.0}, Vec{9.0}})) == std::vector<int>{0, 1});
    CHECK(assign({Vec{5.0}}, live({Vec{1.0}, Vec{9.0}})) == std::vector<int>{0});
    CHECK(assign(pts, live({Vec{4.0}})) == std::vector<int>{0, 0});
    CHECK_THROWS_AS(assign(pts, {}), std::invalid_argument);
}

TEST_CASE("recenter moves to centroids and retires empty clusters") {
    const std::vector<Vec> pts = {Vec{0.0, 0.0}, Vec{2.0, 0.0}};
    auto [centers, removed] = recenter(pts, {0, 0}, live({Vec{5.0, 5.0}, Vec{-5.0, -5.0}}));
    REQUIRE(centers.size() == 2);
    CHECK(*centers[0] == Vec{1.0, 0.0});
    CHECK_FALSE(centers[1].has_value());
    CHECK(removed == std::vector<int>{1});

    // stable clustering: centers unchanged
    auto [again, removed2] = recenter(pts, {0, 0}, centers);
    CHECK(*again[0] == *centers[0]);
    CHECK(removed2.empty());
}

TEST_CASE("potential evaluates the nearest-center sum") {
    CHECK(potential({Vec{0.0, 0.0}, Vec{2.0, 0.0}}, live({Vec{1.0, 0.0}})) ==
          doctest::Approx(2.0));
    CHECK(potential({Vec{3.0}, Vec{-1.0}}, live({Vec{3.0}, Vec{-1.0}})) == doctest::Approx(0.0));
    // hand evaluation: four terms of 0.25
    CHECK(potential({Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}}, live({Vec{0.5}, Vec{8.5}})) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(potential({Vec{0.0}}, {}), std::invalid_argument);
}

TEST_CASE("step at a fixed point reports nothing") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    const ClusteringState st = initial_state(pts, live({Vec{0.5}, Vec{8.5}}));
    const IterationRecord rec = step(st, pts);
    CHECK(rec.reassignments.empty());
    CHECK(rec.removed.empty());
    CHECK(rec.assignment_drop == doctest::Approx(0.0));
    CHECK(rec.move_drop == doctest::Approx(0.0));
}

TEST_CASE("step moves centers to centroids with the expected drop") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    const ClusteringState st = initial_state(pts, live({Vec{1.0}, Vec{8.0}}));
    const IterationRecord rec = step(st, pts);
    CHECK(rec.reassignments.empty());
    CHECK(*rec.post.centers[0] == Vec{0.5});
    CHECK(*rec.post.centers[1] == Vec{8.5});
    CHECK(rec.assignment_drop == doctest::Approx(0.0));
    CHECK(rec.move_drop == doctest::Approx(1.0)); // 2*0.25 + 2*0.25
}

TEST_CASE("step resolves ties to the lower index and removes empty clusters") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}};
    const ClusteringState st = initial_state(pts, live({Vec{0.0}, Vec{0.5}, Vec{1.5}}));
    CHECK(st.assignment == std::vector<int>{0, 1}); // point 1 equidistant to 0.5 and 1.5
    const IterationRecord rec = step(st, pts);
    CHECK(rec.post.assignment == std::vector<int>{0, 1});
    CHECK(rec.removed == std::vector<int>{2});
    CHECK_FALSE(rec.post.centers[2].has_value());
}

TEST_CASE("run converges immediately from stable centroids") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    const Trace tr = run_from_centers(pts, {Vec{0.5}, Vec{8.5}}, 100);
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.iterations() == 1);
    CHECK(tr.records.back().post.potential == doctest::Approx(1.0));
}

TEST_CASE("run with k = n drives the potential to zero") {
    const AdversarialInstance inst = generate(InstanceKind::uniform, 12, 2, 3);
    const Trace tr = run(inst.points, 12, Init::sample_points, 1000, 17);
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.records.back().post.potential == doctest::Approx(0.0));
}

TEST_CASE("run from explicit seeds reaches the known optimum") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    const Trace tr = run_from_centers(pts, {Vec{0.0}, Vec{9.0}}, 100);
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.records.back().post.assignment == std::vector<int>{0, 0, 1, 1});
    CHECK(tr.records.back().post.potential == doctest::Approx(1.0));
}

TEST_CASE("run validates k") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}};
    CHECK_THROWS_AS(run(pts, 0, Init::first_k, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(run(pts, 3, Init::first_k, 10, 0), std::invalid_argument);
}

TEST_CASE("duplicate points retire a seed center in the first record") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{0.0}, Vec{1.0}};
    const Trace tr = run(pts, 3, Init::first_k, 100, 0);
    // centers 0 and 1 coincide; the tie rule starves center 1 immediately
    CHECK(tr.records.front().removed == std::vector<int>{1});
    CHECK(tr.k_final == 2);
    CHECK(tr.termination == Termination::converged);
    CHECK(tr.records.back().post.potential == doctest::Approx(0.0));
}

TEST_CASE("a hit iteration cap is reported, not silently absorbed") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{1.0}, Vec{8.0}, Vec{9.0}};
    const Trace tr = run_from_centers(pts, {Vec{0.0}, Vec{9.0}}, 1);
    CHECK(tr.termination == Termination::max_iterations);
    CHECK(tr.iterations() == 1);
    const Trace full = run_from_centers(pts, {Vec{0.0}, Vec{9.0}}, 10);
    CHECK(full.termination == Termination::converged);
}

TEST_CASE("reassignment term equals the direct potential difference") {
    // x = (1.5, 0) switches cluster 0 -> 1 with centers (0,0) and (2,0)
    const std::vector<Vec> pts = {Vec{1.5, 0.0}};
    ClusteringState st;
    st.assignment = {0};
    st.centers = live({Vec{0.0, 0.0}, Vec{2.0, 0.0}});
    st.potential = assigned_potential(pts, st.centers, st.assignment);
    const IterationRecord rec = step(st, pts);
    REQUIRE(rec.reassignments.size() == 1);
    CHECK(rec.reassignments[0] == Reassignment{0, 0, 1});
    REQUIRE(rec.point_terms.size() == 1);
    CHECK(rec.point_terms[0] == doctest::Approx(2.0));
    // oracle: recompute the drop straight from the definition
    const double direct = squared_distance(pts[0], Vec{0.0, 0.0}) -
                          squared_distance(pts[0], Vec{2.0, 0.0});
    CHECK(rec.assignment_drop == doctest::Approx(direct));
    CHECK(rec.point_terms[0] == doctest::Approx(direct));
}

TEST_CASE("movement term equals the direct potential difference") {
    const std::vector<Vec> pts = {Vec{0.0, 0.0}, Vec{2.0, 0.0}};
    ClusteringState st;
    st.assignment = {0, 0};
    st.centers = live({Vec{0.0, 0.0}});
    st.potential = assigned_potential(pts, st.centers, st.assignment); // 0 + 4
    const IterationRecord rec = step(st, pts);
    CHECK(rec.reassignments.empty());
    REQUIRE(rec.cluster_terms.size() == 1);
    CHECK(rec.cluster_terms[0].first == 0);
    CHECK(rec.cluster_terms[0].second == doctest::Approx(2.0));
    CHECK(rec.move_drop == doctest::Approx(4.0 - 2.0)); // psi 4 -> 2
}

TEST_CASE("tie-break moves between coincident centers carry a zero term") {
    // two centers at the same position; the tie rule pulls the point down to
    // the lower index without any potential change
    const std::vector<Vec> pts = {Vec{1.0}};
    ClusteringState st;
    st.assignment = {1};
    st.centers = {Vec{1.0}, Vec{1.0}};
    st.potential = assigned_potential(pts, st.centers, st.assignment);
    const IterationRecord rec = step(st, pts);
    REQUIRE(rec.reassignments.size() == 1);
    CHECK(rec.reassignments[0] == Reassignment{0, 1, 0});
    CHECK(rec.point_terms[0] == 0.0);
    CHECK(rec.assignment_drop == doctest::Approx(0.0));
    CHECK(rec.removed == std::vector<int>{1});
}

TEST_CASE("no reassignments means empty terms and zero drop") {
    const std::vector<Vec> pts = {Vec{0.0}, Vec{4.0}};
    const ClusteringState st = initial_state(pts, live({Vec{0.0}, Vec{4.0}}));
    const IterationRecord rec = step(st, pts);
    CHECK(rec.point_terms.empty());
    CHECK(rec.assignment_drop == doctest::Approx(0.0));
}

TEST_CASE("randomized runs keep the engine invariants") {
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 10 + static_cast<int>(mix64(substream(500, trial)) % 40);
        const int d = 1 + static_cast<int>(mix64(substream(501, trial)) % 3);
        const int k = 2 + static_cast<int>(mix64(substream(502, trial)) % 5);
        if (k > n) continue;
        const AdversarialInstance inst =
            generate(InstanceKind::uniform, n, d, substream(503, trial));
        const PerturbedDataset ds = perturb(inst, 0.1, substream(504, trial));
        const Trace tr = run(ds.points, k, Init::sample_points, 10000, substream(505, trial));
        CHECK(tr.termination == Termination::converged);

        double prev = tr.initial.potential;
        for (const IterationRecord& rec : tr.records) {
            // monotone within tolerance
            CHECK(rec.post.potential <= prev + 1e-9 * (1.0 + prev));
            prev = rec.post.potential;

            // drops decompose exactly into their terms
            double pt_sum = 0.0;
            for (double t : rec.point_terms) pt_sum += t;
            double cl_sum = 0.0;
            for (const auto& [c, t] : rec.cluster_terms) cl_sum += t;
            const double scale = std::max(1.0, rec.pre.potential);
            CHECK(std::abs(rec.assignment_drop - pt_sum) <= 1e-8 * scale);
            CHECK(std::abs(rec.move_drop - cl_sum) <= 1e-8 * scale);
            CHECK(std::abs(rec.assignment_drop + rec.move_drop -
                           (rec.pre.potential - rec.post.potential)) <= 1e-8 * scale);
            CHECK(rec.assignment_drop >= -1e-9 * (1.0 + rec.pre.potential));
            CHECK(rec.move_drop >= -1e-9 * (1.0 + rec.pre.potential));

            // the stored potential matches its definition
            CHECK(rec.post.potential ==
                  doctest::Approx(assigned_potential(ds.points, rec.post.centers,
                                                     rec.post.assignment))
                      .epsilon(1e-9));

            // the assignment phase sends every point to a nearest center
            // among the centers it ran against (the pre-move ones)
            for (std::size_t i = 0; i < ds.points.size(); ++i) {
                const double mine = distance(
                    ds.points[i],
                    *rec.pre.centers[static_cast<std::size_t>(rec.post.assignment[i])]);
                for (const auto& c : rec.pre.centers)
                    if (c) CHECK(mine <= distance(ds.points[i], *c) + 1e-12);
            }
        }

        // converged: the last record changes nothing
        const IterationRecord& last = tr.records.back();
        CHECK(last.reassignments.empty());
        CHECK(last.removed.empty());
        CHECK(last.total_drop() == doctest::Approx(0.0));
    }
}

TEST_CASE("potential stays under the cube ceiling after the first iteration") {
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 30, d = 2, k = 4;
        const AdversarialInstance inst =
            generate(InstanceKind::clustered, n, d, substream(600, trial));
        PerturbedDataset ds = perturb(inst, 0.2, substream(601, trial));
        const double side = cube_bound(n, k, d);
        if (!check_in_cube(ds, side)) continue;
        const Trace tr = run(ds.points, k, Init::sample_points, 10000, substream(602, trial));
        CHECK(tr.records.front().post.potential <= n * d * side * side);
    }
}

TEST_CASE("drop_decompositions recomputes the stored terms") {
    const AdversarialInstance inst = generate(InstanceKind::uniform, 20, 2, 11);
    const PerturbedDataset ds = perturb(inst, 0.15, 12);
    const Trace tr = run(ds.points, 3, Init::sample_points, 10000, 13);
    for (const IterationRecord& rec : tr.records) {
        const auto [pt, cl] = drop_decompositions(rec, ds.points);
        REQUIRE(pt.size() == rec.point_terms.size());
        for (std::size_t i = 0; i < pt.size(); ++i)
            CHECK(pt[i] == doctest::Approx(rec.point_terms[i]));
        REQUIRE(cl.size() == rec.cluster_terms.size());
        for (std::size_t i = 0; i < cl.size(); ++i) {
            CHECK(cl[i].first == rec.cluster_terms[i].first);
            CHECK(cl[i].second == doctest::Approx(rec.cluster_terms[i].second));
        }
    }
}
