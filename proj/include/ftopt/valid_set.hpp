#ifndef FTOPT_VALID_SET_HPP
#define FTOPT_VALID_SET_HPP

#include <span>
#include <vector>

#include "ftopt/functions.hpp"

namespace ftopt {

// Closed interval [lo, hi] of points achievable as minimizers of some
// admissible weighted objective.
struct ValidSet {
    double lo = 0;
    double hi = 0;
};

// max(0, lo - x, x - hi); zero iff x lies in the set
double dist_to_set(double x, const ValidSet& s);

// Partition of agent ids into non-faulty and (at most f) faulty.
struct FaultSplit {
    std::vector<int> non_faulty;
    std::vector<int> faulty;
    int f = 0;

    void validate(int n_functions) const;
};

struct WeightConstraint {
    double beta = 0;  // weight threshold
    int gamma = 0;    // minimum number of entries >= beta
};

enum class EnvelopeDirection { max, min };

// Envelope functions for the crash model: sum of non-faulty gradients plus
// the positive (resp. negative) parts of the faulty ones. Both are continuous
// and non-decreasing in x; their sign-change points bracket the valid set.
double aux_r_crash(std::span<const AdmissibleFunction> functions, const FaultSplit& split,
                   double x);
double aux_r_crash_min(std::span<const AdmissibleFunction> functions, const FaultSplit& split,
                       double x);

// Extreme weighted combination of the given gradient values over weight
// vectors alpha >= 0, sum alpha = 1, with at least gamma entries >= beta.
// Closed form: beta on the gamma most extreme entries, leftover mass on the
// single most extreme one.
double gradient_envelope(std::vector<double> gradients, const WeightConstraint& c,
                         EnvelopeDirection direction);

// Endpoint location by bisection on the monotone envelopes. tol bounds the
// bracket width at each endpoint.
ValidSet compute_valid_set_crash(std::span<const AdmissibleFunction> functions,
                                 const FaultSplit& split, double tol);
ValidSet compute_valid_set_byz(std::span<const AdmissibleFunction> non_faulty_functions, int f,
                               double tol);
ValidSet compute_valid_set_async(std::span<const AdmissibleFunction> functions, int n, int f,
                                 double tol);

struct BruteForceResult {
    ValidSet set;
    // true when a minimizer landed on the window edge, i.e. the window was
    // too small to contain the hull
    bool window_hit_boundary = false;
};

// Independent oracle: enumerate weight vectors on a simplex grid and locate
// each weighted objective's minimizer set on an x grid.
BruteForceResult brute_force_valid_set_crash(std::span<const AdmissibleFunction> functions,
                                             const FaultSplit& split, double weight_res,
                                             double x_lo, double x_hi, double x_res);
BruteForceResult brute_force_valid_set_constrained(std::span<const AdmissibleFunction> functions,
                                                   const WeightConstraint& c, double weight_res,
                                                   double x_lo, double x_hi, double x_res);

// Is `target` expressible as sum alpha_i * gradients[i] for a feasible
// weight vector? Equivalent to lying between the two envelopes; `tol`
// widens the interval test for floating-point boundary cases.
bool weight_feasibility(const std::vector<double>& gradients, double target, double beta,
                        int gamma, double tol = 0.0);

}  // namespace ftopt

#endif
