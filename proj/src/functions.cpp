#include "ftopt/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftopt {

namespace {

void require_finite(double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite argument");
}

}  // namespace

AdmissibleFunction AdmissibleFunction::huber(double center, double curvature, double cap) {
    if (!std::isfinite(center) || curvature <= 0 || cap <= 0)
        throw std::invalid_argument("huber: need finite center, curvature > 0, cap > 0");
    AdmissibleFunction f;
    f.kind_ = Kind::huber;
    f.center_ = center;
    f.curvature_ = curvature;
    f.cap_ = cap;
    f.gradient_bound_ = cap;
    f.lipschitz_bound_ = curvature;
    return f;
}

AdmissibleFunction AdmissibleFunction::smooth_abs(double center, double softness, double scale) {
    if (!std::isfinite(center) || softness <= 0 || scale <= 0)
        throw std::invalid_argument("smooth_abs: need finite center, softness > 0, scale > 0");
    AdmissibleFunction f;
    f.kind_ = Kind::smooth_abs;
    f.center_ = center;
    f.softness_ = softness;
    f.scale_ = scale;
    f.gradient_bound_ = scale;
    // |g'| peaks at the center: scale / softness
    f.lipschitz_bound_ = scale / softness;
    return f;
}

AdmissibleFunction AdmissibleFunction::scaled_sum(
    std::vector<std::pair<double, AdmissibleFunction>> terms) {
    if (terms.empty()) throw std::invalid_argument("scaled_sum: no terms");
    double total_weight = 0;
    double gb = 0, lb = 0;
    for (const auto& [w, g] : terms) {
        if (!(w >= 0) || !std::isfinite(w))
            throw std::invalid_argument("scaled_sum: weights must be >= 0 and finite");
        total_weight += w;
        gb += w * g.gradient_bound();
        lb += w * g.lipschitz_bound();
    }
    if (total_weight <= 0)
        throw std::invalid_argument("scaled_sum: at least one weight must be positive");
    AdmissibleFunction f;
    f.kind_ = Kind::scaled_sum;
    f.terms_ = std::move(terms);
    f.gradient_bound_ = gb;
    f.lipschitz_bound_ = lb;
    return f;
}

double AdmissibleFunction::evaluate(double x) const {
    require_finite(x);
    switch (kind_) {
        case Kind::huber: {
            const double d = x - center_;
            const double knee = cap_ / curvature_;
            if (std::abs(d) <= knee) return 0.5 * curvature_ * d * d;
            return cap_ * std::abs(d) - 0.5 * cap_ * knee;
        }
        case Kind::smooth_abs: {
            const double d = x - center_;
            return scale_ * (std::hypot(d, softness_) - softness_);
        }
        case Kind::scaled_sum: {
            double v = 0;
            for (const auto& [w, g] : terms_) v += w * g.evaluate(x);
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

double AdmissibleFunction::gradient(double x) const {
    require_finite(x);
    switch (kind_) {
        case Kind::huber: {
            const double d = x - center_;
            return std::clamp(curvature_ * d, -cap_, cap_);
        }
        case Kind::smooth_abs: {
            const double d = x - center_;
            return scale_ * d / std::hypot(d, softness_);
        }
        case Kind::scaled_sum: {
            double v = 0;
            for (const auto& [w, g] : terms_) v += w * g.gradient(x);
            return v;
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<double, double> AdmissibleFunction::argmin_interval() const {
    if (kind_ != Kind::scaled_sum) return {center_, center_};

    // bracket from the hull of the term minimizers, then bisect the
    // monotone summed gradient for both ends of the flat bottom
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [w, g] : terms_) {
        if (w == 0) continue;
        auto [a, b] = g.argmin_interval();
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    const double tol = 1e-10;
    if (hi - lo < tol) return {lo, hi};

    auto grad = [this](double x) { return gradient(x); };

    // left endpoint: inf { x : grad(x) >= 0 }
    double a = lo, b = hi;
    while (b - a > tol) {
        double m = 0.5 * (a + b);
        if (grad(m) >= 0)
            b = m;
        else
            a = m;
    }
    const double left = 0.5 * (a + b);

    // right endpoint: sup { x : grad(x) <= 0 }
    a = lo;
    b = hi;
    while (b - a > tol) {
        double m = 0.5 * (a + b);
        if (grad(m) <= 0)
            a = m;
        else
            b = m;
    }
    const double right = 0.5 * (a + b);
    return {std::min(left, right), std::max(left, right)};
}

AdmissibilityReport AdmissibleFunction::verify_admissible(double grid_lo, double grid_hi,
                                                          int n_points) const {
    if (!(grid_lo < grid_hi) || n_points < 3)
        throw std::invalid_argument("verify_admissible: degenerate grid");

    AdmissibilityReport rep;
    const double step = (grid_hi - grid_lo) / (n_points - 1);

    std::vector<double> xs(n_points);
    for (int i = 0; i < n_points; ++i) xs[i] = grid_lo + i * step;

    std::vector<double> hs(n_points), gs(n_points);
    for (int i = 0; i < n_points; ++i) {
        hs[i] = evaluate(xs[i]);
        gs[i] = gradient(xs[i]);
    }

    const double fd_step = 1e-6;
    for (int i = 0; i < n_points; ++i) {
        if (std::abs(gs[i]) > gradient_bound_ * (1 + 1e-12) + 1e-12)
            rep.gradient_bound_ok = false;
        const double fd = (evaluate(xs[i] + fd_step) - evaluate(xs[i] - fd_step)) / (2 * fd_step);
        if (std::abs(fd - gs[i]) > 1e-4 * std::max(1.0, std::abs(hs[i])))
            rep.finite_diff_ok = false;
    }
    // far-field gradient bound
    for (double x : {-1e6, 1e6})
        if (std::abs(gradient(x)) > gradient_bound_ * (1 + 1e-12)) rep.gradient_bound_ok = false;

    for (int i = 0; i + 1 < n_points; ++i) {
        if (std::abs(gs[i + 1] - gs[i]) > lipschitz_bound_ * step * (1 + 1e-9) + 1e-12)
            rep.lipschitz_ok = false;
    }
    for (int i = 0; i + 2 < n_points; ++i) {
        // midpoint convexity on equally spaced triples
        if (hs[i + 1] > 0.5 * (hs[i] + hs[i + 2]) + 1e-9 * std::max(1.0, std::abs(hs[i + 1])))
            rep.convexity_ok = false;
    }
    return rep;
}

}  // namespace ftopt
