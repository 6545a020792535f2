#ifndef FTOPT_PROTOCOL_HPP
#define FTOPT_PROTOCOL_HPP

#include <utility>
#include <vector>

namespace ftopt {

// Diminishing stepsize sequence: non-increasing, summing to infinity with
// square-summable tail.
class StepSchedule {
public:
    enum class Kind { harmonic, power };

    // lambda[t] = scale / (t+1)
    static StepSchedule harmonic(double scale);
    // lambda[t] = scale / (t+1)^exponent, exponent in (0.5, 1]
    static StepSchedule power(double scale, double exponent);

    double stepsize(int t) const;

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    double exponent() const { return exponent_; }

private:
    Kind kind_ = Kind::harmonic;
    double scale_ = 1;
    double exponent_ = 1;
};

namespace protocol {

// two-round crash protocol: displaced estimate from the averaged requested
// gradients (new auxiliary value s)
double alg1_step3_update(double x_prev, const std::vector<double>& received_gradients,
                         double lambda);

// mean of received auxiliary values (new estimate x)
double alg1_step5_update(const std::vector<double>& received_aux);

// single-message crash protocol: mean of per-sender displaced estimates
double alg2_update(const std::vector<std::pair<double, double>>& received_pairs, double lambda);

// drop the f smallest and f largest entries, ties broken by agent id
std::vector<std::pair<int, double>> trim(std::vector<std::pair<int, double>> values, int f);

struct Alg3Result {
    double x_new = 0;
    double trimmed_mean = 0;  // mean of surviving estimates
    double g_hat = 0;         // largest surviving gradient
    double g_check = 0;       // smallest surviving gradient
    double g_mid = 0;         // 0.5 * (g_hat + g_check)
    std::vector<int> est_survivors;
    std::vector<int> grad_survivors;
};

// Byzantine-tolerant update: estimates and gradients trimmed independently,
// then trimmed-mean estimate minus lambda times the surviving-gradient
// midpoint.
Alg3Result alg3_update(const std::vector<std::tuple<int, double, double>>& received, int f,
                       double lambda);

// asynchronous crash protocol: same displaced-mean form as alg2 over exactly
// n-f triples tagged with the agent's current iteration
double alg4_update(const std::vector<std::tuple<double, double, int>>& received_triples,
                   int expected_count, int iteration, double lambda);

}  // namespace protocol
}  // namespace ftopt

#endif
