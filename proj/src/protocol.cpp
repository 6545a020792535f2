#include "ftopt/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace ftopt {

StepSchedule StepSchedule::harmonic(double scale) {
    if (!(scale > 0)) throw std::invalid_argument("stepsize scale must be positive");
    StepSchedule s;
    s.kind_ = Kind::harmonic;
    s.scale_ = scale;
    return s;
}

StepSchedule StepSchedule::power(double scale, double exponent) {
    if (!(scale > 0)) throw std::invalid_argument("stepsize scale must be positive");
    // exponent <= 0.5 breaks square summability, exponent > 1 breaks divergence
    if (!(exponent > 0.5 && exponent <= 1.0))
        throw std::invalid_argument("power exponent must lie in (0.5, 1]");
    StepSchedule s;
    s.kind_ = Kind::power;
    s.scale_ = scale;
    s.exponent_ = exponent;
    return s;
}

double StepSchedule::stepsize(int t) const {
    if (t < 0) throw std::invalid_argument("stepsize index must be >= 0");
    if (kind_ == Kind::harmonic) return scale_ / (t + 1);
    return scale_ / std::pow(t + 1, exponent_);
}

namespace protocol {

double alg1_step3_update(double x_prev, const std::vector<double>& received_gradients,
                         double lambda) {
    if (received_gradients.empty())
        throw std::runtime_error("protocol violation: no gradients received");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    double sum = 0;
    for (double g : received_gradients) sum += g;
    return x_prev - lambda * sum / static_cast<double>(received_gradients.size());
}

double alg1_step5_update(const std::vector<double>& received_aux) {
    if (received_aux.empty())
        throw std::runtime_error("protocol violation: no auxiliary values received");
    double sum = 0;
    for (double s : received_aux) sum += s;
    return sum / static_cast<double>(received_aux.size());
}

double alg2_update(const std::vector<std::pair<double, double>>& received_pairs, double lambda) {
    if (received_pairs.empty()) throw std::runtime_error("protocol violation: no pairs received");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    double sum = 0;
    for (const auto& [w, g] : received_pairs) sum += w - lambda * g;
    return sum / static_cast<double>(received_pairs.size());
}

std::vector<std::pair<int, double>> trim(std::vector<std::pair<int, double>> values, int f) {
    if (f < 0) throw std::invalid_argument("f must be >= 0");
    if (static_cast<int>(values.size()) < 2 * f + 1)
        throw std::runtime_error("protocol violation: too few values to trim");
    std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    return {values.begin() + f, values.end() - f};
}

Alg3Result alg3_update(const std::vector<std::tuple<int, double, double>>& received, int f,
                       double lambda) {
    const int n = static_cast<int>(received.size());
    if (n <= 3 * f) throw std::runtime_error("protocol violation: expected n > 3f tuples");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");

    std::vector<std::pair<int, double>> ests, grads;
    ests.reserve(n);
    grads.reserve(n);
    for (const auto& [id, w, g] : received) {
        ests.emplace_back(id, w);
        grads.emplace_back(id, g);
    }
    const auto est_surv = trim(std::move(ests), f);
    const auto grad_surv = trim(std::move(grads), f);

    Alg3Result r;
    double sum = 0;
    for (const auto& [id, w] : est_surv) {
        sum += w;
        r.est_survivors.push_back(id);
    }
    r.trimmed_mean = sum / static_cast<double>(est_surv.size());
    r.g_check = grad_surv.front().second;
    r.g_hat = grad_surv.back().second;
    for (const auto& [id, g] : grad_surv) r.grad_survivors.push_back(id);
    r.g_mid = 0.5 * (r.g_hat + r.g_check);
    r.x_new = r.trimmed_mean - lambda * r.g_mid;
    return r;
}

double alg4_update(const std::vector<std::tuple<double, double, int>>& received_triples,
                   int expected_count, int iteration, double lambda) {
    if (static_cast<int>(received_triples.size()) != expected_count)
        throw std::runtime_error("protocol violation: expected exactly n-f triples");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    double sum = 0;
    for (const auto& [w, g, tag] : received_triples) {
        if (tag != iteration)
            throw std::runtime_error("protocol violation: mismatched iteration tag");
        sum += w - lambda * g;
    }
    return sum / static_cast<double>(received_triples.size());
}

}  // namespace protocol
}  // namespace ftopt
