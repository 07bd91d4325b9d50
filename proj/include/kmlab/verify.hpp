#ifndef KMLAB_VERIFY_HPP
#define KMLAB_VERIFY_HPP

#include <string>
#include <vector>

#include "kmlab/blueprint.hpp"
#include "kmlab/engine.hpp"
#include "kmlab/geometry.hpp"

namespace kmlab {

struct Violation {
    std::string trace_id;
    int iteration = 0;
    std::string details;
};

/// Outcome of one check over one trace. For identity checks max_slack is the
/// largest relative deviation seen; for inequality checks it is the largest
/// value of lhs - rhs (so anything above the tolerance is a violation).
struct VerificationReport {
    std::string check;
    bool applicable = true;
    long checked = 0;
    std::vector<Violation> violations;
    double max_slack = 0.0;

    bool pass() const { return violations.empty(); }
};

/// Per iteration: the reassignment part of the drop equals the sum of the
/// per-point terms and the recentering part equals the sum of the
/// per-cluster terms, both within rel_tol.
VerificationReport check_drop_identities(const Trace& trace, double rel_tol = 1e-8);

/// Per iteration after the first, for every surviving unbalanced cluster:
/// the total drop is at least |mass(C) - formula center|^2 / n.
VerificationReport check_far_from_approx(const Trace& trace);

/// Per iteration after the first with a positive drop eps: for every
/// non-degenerate component, (min exchanging-pair center distance) * lambda
/// is at most 6 * side * sqrt(n d eps).
VerificationReport check_bisector_inequality(const Trace& trace, CenterMode mode);

/// Exhaustive coarseness test: no chain of three pairwise-distinct nonempty
/// subsets with symmetric differences <= c has both consecutive centroid
/// distances <= eta. Guarded to n <= 14 and c <= 3.
bool is_coarse(const std::vector<Vec>& points, double eta, int c);

/// Largest threshold below which the set is coarse: the minimum over chains
/// of max(dist12, dist23). Infinity when no chain exists. Same guard as
/// is_coarse.
double coarseness_threshold(const std::vector<Vec>& points, int c);

/// Every window of three consecutive changing iterations (the first
/// iteration and the convergence-detection iteration excluded) must show
/// some cluster in three pairwise-distinct configurations across the
/// window's start states and end state.
VerificationReport check_epoch_bound(const Trace& trace);

/// On an (eta,c)-coarse dataset, every window of three consecutive
/// iterations after the first in which each cluster exchanges at most c
/// points (and none is removed) drops the potential by at least
/// eta^2 - 1e-9.
VerificationReport check_coarse_drop(const std::vector<Vec>& points, const Trace& trace,
                                     double eta, int c);

/// Potential after the first iteration is at most n*d*side^2 whenever the
/// dataset lies in the cube. Not applicable otherwise.
VerificationReport check_potential_bound(const Trace& trace, double side);

/// The checks that need no extra parameters, in reporting order.
std::vector<VerificationReport> run_all_checks(const Trace& trace);

/// One line per check: name, pass/fail or n/a, counts, max slack.
void write_verification_summary(std::ostream& os, const Trace& trace,
                                const std::vector<VerificationReport>& reports);

} // namespace kmlab

#endif
