#include "ftopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ftopt {

MetricSeries consensus_gap(const Trace& trace) {
    if (trace.rounds.empty()) throw std::invalid_argument("empty trace");
    MetricSeries s{"gap", {}};
    s.values.reserve(trace.rounds.size());
    for (const auto& r : trace.rounds) {
        if (r.estimates.empty()) {
            s.values.push_back(0);
            continue;
        }
        double lo = r.estimates.front().second, hi = lo;
        for (const auto& [id, x] : r.estimates) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        s.values.push_back(hi - lo);
    }
    return s;
}

MetricSeries max_dist_series(const Trace& trace, const ValidSet& vs) {
    if (trace.rounds.empty()) throw std::invalid_argument("empty trace");
    MetricSeries s{"max_dist", {}};
    s.values.reserve(trace.rounds.size());
    for (const auto& r : trace.rounds) {
        double d = 0;
        for (const auto& [id, x] : r.estimates) d = std::max(d, dist_to_set(x, vs));
        s.values.push_back(d);
    }
    return s;
}

WeightedGapSum weighted_gap_sum(const Trace& trace, const StepSchedule& sched) {
    const MetricSeries gap = consensus_gap(trace);
    const std::size_t T = gap.values.size();
    const std::size_t quarter_start = T - T / 4;
    WeightedGapSum out;
    for (std::size_t t = 0; t < T; ++t) {
        const double term = sched.stepsize(static_cast<int>(t)) * gap.values[t];
        out.total += term;
        if (t >= quarter_start) out.last_quarter += term;
    }
    return out;
}

MetricSeries geometric_tail(const StepSchedule& sched, double b, int T) {
    if (!(b >= 0 && b < 1)) throw std::invalid_argument("b must lie in [0, 1)");
    if (T < 0) throw std::invalid_argument("T must be >= 0");
    MetricSeries s{"geometric_tail", {}};
    s.values.reserve(T + 1);
    double l = 0;
    s.values.push_back(l);
    for (int t = 0; t < T; ++t) {
        l = b * (l + sched.stepsize(t));
        s.values.push_back(l);
    }
    return s;
}

namespace {

std::pair<double, double> hull(const std::vector<std::pair<int, double>>& values) {
    double lo = values.front().second, hi = lo;
    for (const auto& [id, v] : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

}  // namespace

std::vector<Violation> check_gradient_hull(const Trace& trace, double tol) {
    std::vector<Violation> out;
    for (const auto& r : trace.rounds) {
        if (r.trims.empty() || r.true_gradients.empty()) continue;
        auto [lo, hi] = hull(r.true_gradients);
        for (const auto& rec : r.trims) {
            const double g = rec.result.g_mid;
            if (g < lo - tol || g > hi + tol) out.push_back({r.t, rec.receiver, g, lo, hi});
        }
    }
    return out;
}

std::vector<Violation> check_estimate_hull(const Trace& trace, double tol) {
    std::vector<Violation> out;
    for (std::size_t i = 1; i < trace.rounds.size(); ++i) {
        const auto& r = trace.rounds[i];
        const auto& prev = trace.rounds[i - 1];
        if (r.trims.empty() || prev.estimates.empty()) continue;
        auto [lo, hi] = hull(prev.estimates);
        for (const auto& rec : r.trims) {
            const double w = rec.result.trimmed_mean;
            if (w < lo - tol || w > hi + tol) out.push_back({r.t, rec.receiver, w, lo, hi});
        }
    }
    return out;
}

std::vector<Violation> check_weight_bound(const Trace& trace, int f, double tol) {
    std::vector<Violation> out;
    for (const auto& r : trace.rounds) {
        if (r.trims.empty() || r.true_gradients.empty()) continue;
        std::vector<double> grads;
        grads.reserve(r.true_gradients.size());
        for (const auto& [id, g] : r.true_gradients) grads.push_back(g);
        const int nn = static_cast<int>(grads.size());
        const double beta = 1.0 / (2.0 * (nn - f));
        const int gamma = nn - f;
        for (const auto& rec : r.trims) {
            if (!weight_feasibility(grads, rec.result.g_mid, beta, gamma, tol))
                out.push_back({r.t, rec.receiver, rec.result.g_mid, 0, 0});
        }
    }
    return out;
}

std::vector<Violation> check_iteration_relation(const Trace& trace, const ValidSet& vs, double L,
                                                double slack) {
    const MetricSeries dist = max_dist_series(trace, vs);
    std::vector<Violation> out;
    for (std::size_t t = 1; t < trace.rounds.size(); ++t) {
        const double lambda = trace.rounds[t].lambda;
        const double bound = std::max(lambda * L, dist.values[t - 1]) + slack;
        if (dist.values[t] > bound)
            out.push_back({trace.rounds[t].t, -1, dist.values[t], 0, bound});
    }
    return out;
}

bool classify_resilient(double x, double g, double lambda, const ValidSet& vs) {
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    const double y = x - lambda * g;
    const bool x_in = x >= vs.lo && x <= vs.hi;
    const bool y_in = y >= vs.lo && y <= vs.hi;
    if (x_in) return !y_in;
    if (x > vs.hi) return y < vs.lo;
    return y > vs.hi;  // x < lo
}

}  // namespace ftopt
