#include "ftopt/valid_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

namespace ftopt {

double dist_to_set(double x, const ValidSet& s) {
    return std::max({0.0, s.lo - x, x - s.hi});
}

void FaultSplit::validate(int n_functions) const {
    std::set<int> seen;
    for (int i : non_faulty) seen.insert(i);
    for (int i : faulty) {
        if (seen.count(i)) throw std::invalid_argument("FaultSplit: sets not disjoint");
        seen.insert(i);
    }
    for (int i : seen)
        if (i < 0 || i >= n_functions)
            throw std::invalid_argument("FaultSplit: agent id out of range");
    const int n = static_cast<int>(non_faulty.size() + faulty.size());
    if (static_cast<int>(faulty.size()) > f)
        throw std::invalid_argument("FaultSplit: more faulty agents than f");
    if (n <= 3 * f) throw std::invalid_argument("FaultSplit: requires n > 3f");
}

double aux_r_crash(std::span<const AdmissibleFunction> functions, const FaultSplit& split,
                   double x) {
    double r = 0;
    for (int i : split.non_faulty) r += functions[i].gradient(x);
    for (int i : split.faulty) {
        const double g = functions[i].gradient(x);
        if (g > 0) r += g;
    }
    return r;
}

double aux_r_crash_min(std::span<const AdmissibleFunction> functions, const FaultSplit& split,
                       double x) {
    double r = 0;
    for (int i : split.non_faulty) r += functions[i].gradient(x);
    for (int i : split.faulty) {
        const double g = functions[i].gradient(x);
        if (g < 0) r += g;
    }
    return r;
}

namespace {

void check_constraint(const WeightConstraint& c, std::size_t count) {
    if (c.gamma < 0 || c.beta < 0 || c.gamma > static_cast<int>(count) ||
        c.gamma * c.beta > 1.0 + 1e-12)
        throw std::invalid_argument("unsatisfiable weight constraint");
}

// hull of the argmin intervals of the listed functions
std::pair<double, double> argmin_hull(std::span<const AdmissibleFunction> functions,
                                      const std::vector<int>& ids) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i : ids) {
        auto [a, b] = functions[i].argmin_interval();
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    return {lo, hi};
}

// inf { x : env(x) >= 0 } for a non-decreasing env; bracket by doubling
double lower_endpoint(const std::function<double(double)>& env, double lo, double hi, double tol) {
    double a = lo - 1, b = hi + 1;
    double width = b - a;
    int tries = 0;
    while (env(a) >= 0) {
        a -= width;
        width *= 2;
        if (++tries > 64) throw std::runtime_error("bracket expansion failed (lower)");
    }
    width = b - a;
    tries = 0;
    while (env(b) < 0) {
        b += width;
        width *= 2;
        if (++tries > 64) throw std::runtime_error("bracket expansion failed (upper)");
    }
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (env(m) >= 0)
            b = m;
        else
            a = m;
    }
    return 0.5 * (a + b);
}

// sup { x : env(x) <= 0 }
double upper_endpoint(const std::function<double(double)>& env, double lo, double hi, double tol) {
    double a = lo - 1, b = hi + 1;
    double width = b - a;
    int tries = 0;
    while (env(a) > 0) {
        a -= width;
        width *= 2;
        if (++tries > 64) throw std::runtime_error("bracket expansion failed (lower)");
    }
    width = b - a;
    tries = 0;
    while (env(b) <= 0) {
        b += width;
        width *= 2;
        if (++tries > 64) throw std::runtime_error("bracket expansion failed (upper)");
    }
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (env(m) <= 0)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace

double gradient_envelope(std::vector<double> gradients, const WeightConstraint& c,
                         EnvelopeDirection direction) {
    if (gradients.empty()) throw std::invalid_argument("gradient_envelope: no gradients");
    check_constraint(c, gradients.size());
    if (direction == EnvelopeDirection::max)
        std::sort(gradients.begin(), gradients.end(), std::greater<double>());
    else
        std::sort(gradients.begin(), gradients.end());
    double value = 0;
    for (int i = 0; i < c.gamma; ++i) value += c.beta * gradients[i];
    value += std::max(0.0, 1.0 - c.gamma * c.beta) * gradients[0];
    return value;
}

ValidSet compute_valid_set_crash(std::span<const AdmissibleFunction> functions,
                                 const FaultSplit& split, double tol) {
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    split.validate(static_cast<int>(functions.size()));
    std::vector<int> all = split.non_faulty;
    all.insert(all.end(), split.faulty.begin(), split.faulty.end());
    auto [lo, hi] = argmin_hull(functions, all);

    auto env_max = [&](double x) { return aux_r_crash(functions, split, x); };
    auto env_min = [&](double x) { return aux_r_crash_min(functions, split, x); };
    ValidSet s;
    s.lo = lower_endpoint(env_max, lo, hi, tol);
    s.hi = upper_endpoint(env_min, lo, hi, tol);
    if (s.hi < s.lo) s.hi = s.lo = 0.5 * (s.lo + s.hi);  // bisection slack on a point set
    return s;
}

ValidSet compute_valid_set_byz(std::span<const AdmissibleFunction> non_faulty_functions, int f,
                               double tol) {
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    const int nn = static_cast<int>(non_faulty_functions.size());
    if (nn <= 2 * f) throw std::invalid_argument("need more than 2f non-faulty functions");
    WeightConstraint c{1.0 / (2.0 * (nn - f)), nn - f};

    std::vector<int> ids(nn);
    for (int i = 0; i < nn; ++i) ids[i] = i;
    auto [lo, hi] = argmin_hull(non_faulty_functions, ids);

    auto grads = [&](double x) {
        std::vector<double> g(nn);
        for (int i = 0; i < nn; ++i) g[i] = non_faulty_functions[i].gradient(x);
        return g;
    };
    auto env_max = [&](double x) {
        return gradient_envelope(grads(x), c, EnvelopeDirection::max);
    };
    auto env_min = [&](double x) {
        return gradient_envelope(grads(x), c, EnvelopeDirection::min);
    };
    ValidSet s;
    s.lo = lower_endpoint(env_max, lo, hi, tol);
    s.hi = upper_endpoint(env_min, lo, hi, tol);
    if (s.hi < s.lo) s.hi = s.lo = 0.5 * (s.lo + s.hi);
    return s;
}

ValidSet compute_valid_set_async(std::span<const AdmissibleFunction> functions, int n, int f,
                                 double tol) {
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    if (static_cast<int>(functions.size()) != n)
        throw std::invalid_argument("function count must equal n");
    if (n <= f || f < 0) throw std::invalid_argument("need n > f >= 0");
    WeightConstraint c{1.0 / n, n - f};

    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    auto [lo, hi] = argmin_hull(functions, ids);

    auto grads = [&](double x) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) g[i] = functions[i].gradient(x);
        return g;
    };
    auto env_max = [&](double x) {
        return gradient_envelope(grads(x), c, EnvelopeDirection::max);
    };
    auto env_min = [&](double x) {
        return gradient_envelope(grads(x), c, EnvelopeDirection::min);
    };
    ValidSet s;
    s.lo = lower_endpoint(env_max, lo, hi, tol);
    s.hi = upper_endpoint(env_min, lo, hi, tol);
    if (s.hi < s.lo) s.hi = s.lo = 0.5 * (s.lo + s.hi);
    return s;
}

namespace {

// gradient tables on the x grid, one row per function
struct GradGrid {
    std::vector<double> xs;
    std::vector<std::vector<double>> g;  // g[func][idx]

    GradGrid(std::span<const AdmissibleFunction> functions, double x_lo, double x_hi,
             double x_res) {
        if (x_res <= 0 || !(x_lo < x_hi)) throw std::invalid_argument("bad x grid");
        const int np = static_cast<int>(std::ceil((x_hi - x_lo) / x_res)) + 1;
        xs.resize(np);
        for (int i = 0; i < np; ++i) xs[i] = x_lo + i * x_res;
        xs.back() = x_hi;
        g.resize(functions.size());
        for (std::size_t k = 0; k < functions.size(); ++k) {
            g[k].resize(np);
            for (int i = 0; i < np; ++i) g[k][i] = functions[k].gradient(xs[i]);
        }
    }
};

// minimizer interval of one weighted objective on the grid; the weighted
// gradient is non-decreasing, so both boundaries are binary-searchable
void accumulate_minimizers(const GradGrid& grid, const std::vector<double>& alpha,
                           const std::vector<int>& ids, BruteForceResult& out, bool& first) {
    auto wgrad = [&](int idx) {
        double v = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) v += alpha[k] * grid.g[ids[k]][idx];
        return v;
    };
    const int np = static_cast<int>(grid.xs.size());

    // first idx with wgrad >= 0
    int lo = 0, hi = np - 1;
    if (wgrad(0) >= 0) {
        out.window_hit_boundary = out.window_hit_boundary || wgrad(0) > 0;
        hi = 0;
    } else if (wgrad(np - 1) < 0) {
        out.window_hit_boundary = true;
        lo = hi = np - 1;
    } else {
        while (hi - lo > 1) {
            const int m = (lo + hi) / 2;
            if (wgrad(m) >= 0)
                hi = m;
            else
                lo = m;
        }
    }
    const double left = grid.xs[hi];

    // last idx with wgrad <= 0
    lo = 0;
    hi = np - 1;
    if (wgrad(np - 1) <= 0) {
        out.window_hit_boundary = out.window_hit_boundary || wgrad(np - 1) < 0;
        lo = np - 1;
    } else if (wgrad(0) > 0) {
        lo = hi = 0;
    } else {
        while (hi - lo > 1) {
            const int m = (lo + hi) / 2;
            if (wgrad(m) <= 0)
                lo = m;
            else
                hi = m;
        }
    }
    const double right = grid.xs[lo];

    if (first) {
        out.set.lo = std::min(left, right);
        out.set.hi = std::max(left, right);
        first = false;
    } else {
        out.set.lo = std::min(out.set.lo, std::min(left, right));
        out.set.hi = std::max(out.set.hi, std::max(left, right));
    }
}

}  // namespace

BruteForceResult brute_force_valid_set_crash(std::span<const AdmissibleFunction> functions,
                                             const FaultSplit& split, double weight_res,
                                             double x_lo, double x_hi, double x_res) {
    if (weight_res <= 0) throw std::invalid_argument("weight_res must be positive");
    split.validate(static_cast<int>(functions.size()));
    GradGrid grid(functions, x_lo, x_hi, x_res);

    std::vector<int> ids = split.non_faulty;
    ids.insert(ids.end(), split.faulty.begin(), split.faulty.end());
    const std::size_t nn = split.non_faulty.size();
    const std::size_t nf = split.faulty.size();
    const int steps = static_cast<int>(std::lround(1.0 / weight_res));

    std::vector<double> alpha(ids.size(), 1.0);  // non-faulty weights fixed at 1
    BruteForceResult out;
    bool first = true;

    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == nf) {
            accumulate_minimizers(grid, alpha, ids, out, first);
            return;
        }
        for (int s = 0; s <= steps; ++s) {
            alpha[nn + k] = static_cast<double>(s) / steps;
            rec(k + 1);
        }
    };
    rec(0);
    return out;
}

BruteForceResult brute_force_valid_set_constrained(std::span<const AdmissibleFunction> functions,
                                                   const WeightConstraint& c, double weight_res,
                                                   double x_lo, double x_hi, double x_res) {
    if (weight_res <= 0) throw std::invalid_argument("weight_res must be positive");
    check_constraint(c, functions.size());
    GradGrid grid(functions, x_lo, x_hi, x_res);

    const std::size_t n = functions.size();
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<int>(i);
    const int K = static_cast<int>(std::lround(1.0 / weight_res));

    std::vector<double> alpha(n, 0.0);
    BruteForceResult out;
    bool first = true;

    // compositions of K into n parts
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int remaining) {
        if (k + 1 == n) {
            alpha[k] = static_cast<double>(remaining) / K;
            int count = 0;
            for (double a : alpha)
                if (a >= c.beta - 1e-12) ++count;
            if (count >= c.gamma) accumulate_minimizers(grid, alpha, ids, out, first);
            return;
        }
        for (int s = 0; s <= remaining; ++s) {
            alpha[k] = static_cast<double>(s) / K;
            rec(k + 1, remaining - s);
        }
    };
    rec(0, K);
    return out;
}

bool weight_feasibility(const std::vector<double>& gradients, double target, double beta,
                        int gamma, double tol) {
    WeightConstraint c{beta, gamma};
    const double lo = gradient_envelope(gradients, c, EnvelopeDirection::min);
    const double hi = gradient_envelope(gradients, c, EnvelopeDirection::max);
    return target >= lo - tol && target <= hi + tol;
}

}  // namespace ftopt
