#ifndef FTOPT_FUNCTIONS_HPP
#define FTOPT_FUNCTIONS_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ftopt {

struct AdmissibilityReport {
    bool gradient_bound_ok = true;   // |h'(x)| <= L on the grid and at +-1e6
    bool lipschitz_ok = true;        // |h'(x)-h'(y)| <= L_d |x-y| on adjacent pairs
    bool finite_diff_ok = true;      // analytic gradient matches central differences
    bool convexity_ok = true;        // midpoint inequality on adjacent triples

    bool all_ok() const {
        return gradient_bound_ok && lipschitz_ok && finite_diff_ok && convexity_ok;
    }
};

// Scalar convex cost with bounded gradient, Lipschitz derivative and compact
// argmin. Plain quadratics are excluded on purpose: their gradient is
// unbounded. The two base kinds below saturate, which keeps |h'| <= L
// globally while staying C^1 and strictly decreasing/increasing around the
// minimum.
class AdmissibleFunction {
public:
    enum class Kind { huber, smooth_abs, scaled_sum };

    // quadratic 0.5*curvature*(x-center)^2 inside |x-center| <= cap/curvature,
    // linear with slope +-cap outside
    static AdmissibleFunction huber(double center, double curvature, double cap);

    // scale * (sqrt((x-center)^2 + softness^2) - softness)
    static AdmissibleFunction smooth_abs(double center, double softness, double scale);

    // sum of weight_i * f_i, weights >= 0, at least one positive
    static AdmissibleFunction scaled_sum(std::vector<std::pair<double, AdmissibleFunction>> terms);

    double evaluate(double x) const;
    double gradient(double x) const;

    // exact minimizer set [lo, hi]; a point for the strictly convex kinds,
    // located by bisection on the summed gradient for scaled_sum
    std::pair<double, double> argmin_interval() const;

    double gradient_bound() const { return gradient_bound_; }
    double lipschitz_bound() const { return lipschitz_bound_; }
    Kind kind() const { return kind_; }

    AdmissibilityReport verify_admissible(double grid_lo, double grid_hi, int n_points) const;

    // parameter access for serialization
    double center() const { return center_; }
    double curvature() const { return curvature_; }
    double cap() const { return cap_; }
    double softness() const { return softness_; }
    double scale() const { return scale_; }
    const std::vector<std::pair<double, AdmissibleFunction>>& terms() const { return terms_; }

private:
    AdmissibleFunction() = default;

    Kind kind_ = Kind::huber;
    double center_ = 0, curvature_ = 0, cap_ = 0;  // huber
    double softness_ = 0, scale_ = 0;              // smooth_abs (center_ shared)
    std::vector<std::pair<double, AdmissibleFunction>> terms_;

    double gradient_bound_ = 0;
    double lipschitz_bound_ = 0;
};

}  // namespace ftopt

#endif
