#ifndef FTOPT_METRICS_HPP
#define FTOPT_METRICS_HPP

#include <string>
#include <vector>

#include "ftopt/engine.hpp"
#include "ftopt/protocol.hpp"
#include "ftopt/valid_set.hpp"

namespace ftopt {

struct MetricSeries {
    std::string name;
    std::vector<double> values;  // one value per trace round, index 0 = initial state
};

// spread of the live estimates, max - min
MetricSeries consensus_gap(const Trace& trace);

// largest distance from a live estimate to the valid set
MetricSeries max_dist_series(const Trace& trace, const ValidSet& vs);

struct WeightedGapSum {
    double total = 0;          // sum over t of lambda[t] * gap[t]
    double last_quarter = 0;   // increment contributed by the last quarter of rounds
};

WeightedGapSum weighted_gap_sum(const Trace& trace, const StepSchedule& sched);

// l(t) = sum_{r<t} lambda[r] * b^(t-r), evaluated for t = 0..T
MetricSeries geometric_tail(const StepSchedule& sched, double b, int T);

struct Violation {
    int t = 0;
    int receiver = 0;
    double value = 0;
    double bound_lo = 0;
    double bound_hi = 0;
};

// trimmed gradient midpoints must stay inside the hull of the true
// non-faulty gradients of that round
std::vector<Violation> check_gradient_hull(const Trace& trace, double tol = 1e-9);

// trimmed-mean estimates must stay inside the hull of the previous round's
// non-faulty estimates
std::vector<Violation> check_estimate_hull(const Trace& trace, double tol = 1e-9);

// every trimmed gradient midpoint must be expressible with at least |N|-f
// weights >= 1/(2(|N|-f)) over the true non-faulty gradients
std::vector<Violation> check_weight_bound(const Trace& trace, int f, double tol = 1e-9);

// per-round conformance with the single-step distance relation
// dist[t] <= max(lambda[t-1]*L, dist[t-1]) + slack; alg1 traces only
std::vector<Violation> check_iteration_relation(const Trace& trace, const ValidSet& vs, double L,
                                                double slack = 1e-9);

// does the gradient step from x jump out of or across the valid set in one
// stride
bool classify_resilient(double x, double g, double lambda, const ValidSet& vs);

}  // namespace ftopt

#endif
