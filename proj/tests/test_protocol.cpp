#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "ftopt/protocol.hpp"
#include "ftopt/valid_set.hpp"

using namespace ftopt;
using namespace ftopt::protocol;

TEST_CASE("stepsize schedules") {
    auto h = StepSchedule::harmonic(1);
    CHECK(h.stepsize(3) == doctest::Approx(0.25));
    CHECK(h.stepsize(0) == doctest::Approx(1));
    auto p = StepSchedule::power(1, 0.75);
    CHECK(p.stepsize(15) == doctest::Approx(0.125));
    CHECK_THROWS_AS(StepSchedule::power(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::power(1, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::harmonic(0), std::invalid_argument);
}

TEST_CASE("stepsize is non-increasing and the partial sums diverge") {
    for (auto s : {StepSchedule::harmonic(1), StepSchedule::power(0.5, 0.6)}) {
        double sum = 0, prev = s.stepsize(0);
        for (int t = 0; t < 30000; ++t) {
            const double l = s.stepsize(t);
            CHECK(l <= prev + 1e-15);
            CHECK(l >= 0);
            sum += l;
            prev = l;
        }
        CHECK(sum > 10);
    }
}

TEST_CASE("alg1 step 3 displaced estimate") {
    CHECK(alg1_step3_update(2, {1, 1, -1}, 0.3) == doctest::Approx(1.9));
    CHECK(alg1_step3_update(7, {1, -1, 0.5}, 0) == doctest::Approx(7));
    CHECK(alg1_step3_update(0, {0.5}, 1) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(alg1_step3_update(0, {}, 1), std::runtime_error);
}

TEST_CASE("alg1 step 5 mean of auxiliaries") {
    CHECK(alg1_step5_update({1, 2, 3}) == doctest::Approx(2));
    CHECK(alg1_step5_update({5}) == doctest::Approx(5));
    CHECK(alg1_step5_update({-1, 1}) == doctest::Approx(0));
    CHECK_THROWS_AS(alg1_step5_update({}), std::runtime_error);
}

TEST_CASE("alg2 displaced mean") {
    CHECK(alg2_update({{1, 1}, {3, -1}}, 0.5) == doctest::Approx(2));
    CHECK(alg2_update({{1, 9}, {3, -4}}, 0) == doctest::Approx(2));
    CHECK(alg2_update({{0, 1}}, 1) == doctest::Approx(-1));
    CHECK_THROWS_AS(alg2_update({}, 0.5), std::runtime_error);
}

TEST_CASE("trim drops f from each end with id tie-break") {
    auto out = trim({{0, 0.0}, {1, 1.0}, {2, 2.0}, {3, 100.0}}, 1);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == std::pair<int, double>{1, 1.0});
    CHECK(out[1] == std::pair<int, double>{2, 2.0});

    auto tied = trim({{3, 5.0}, {0, 5.0}, {2, 5.0}, {1, 5.0}}, 1);
    REQUIRE(tied.size() == 2);
    CHECK(tied[0].first == 1);
    CHECK(tied[1].first == 2);

    auto id = trim({{0, 2.0}, {1, 1.0}}, 0);
    REQUIRE(id.size() == 2);
    CHECK(id[0].second == 1.0);
    CHECK(id[1].second == 2.0);

    CHECK_THROWS_AS(trim({{0, 1.0}, {1, 2.0}}, 1), std::runtime_error);
}

TEST_CASE("trim is permutation-invariant") {
    std::mt19937 rng(5);
    std::vector<std::pair<int, double>> vals{{0, 3.5}, {1, -2}, {2, 0}, {3, 0}, {4, 9}, {5, -2},
                                             {6, 4}};
    auto base = trim(vals, 2);
    for (int rep = 0; rep < 50; ++rep) {
        std::shuffle(vals.begin(), vals.end(), rng);
        CHECK(trim(vals, 2) == base);
    }
}

TEST_CASE("alg3 update, worked example") {
    std::vector<std::tuple<int, double, double>> in{
        {0, 0, -1}, {1, 1, 0.5}, {2, 2, 3}, {3, 100, 50}};
    auto r = alg3_update(in, 1, 0.2);
    CHECK(r.trimmed_mean == doctest::Approx(1.5));
    CHECK(r.g_check == doctest::Approx(0.5));
    CHECK(r.g_hat == doctest::Approx(3));
    CHECK(r.g_mid == doctest::Approx(1.75));
    CHECK(r.x_new == doctest::Approx(1.15));
}

TEST_CASE("alg3 degenerate cases") {
    std::vector<std::tuple<int, double, double>> same{
        {0, 4.5, 0}, {1, 4.5, 0}, {2, 4.5, 0}, {3, 4.5, 0}};
    CHECK(alg3_update(same, 1, 0.7).x_new == doctest::Approx(4.5));

    std::vector<std::tuple<int, double, double>> in{
        {0, 0, -1}, {1, 1, 0.5}, {2, 2, 3}, {3, 100, 50}};
    CHECK(alg3_update(in, 1, 0).x_new == doctest::Approx(1.5));

    CHECK_THROWS_AS(alg3_update({{0, 1.0, 0.0}, {1, 2.0, 0.0}, {2, 3.0, 0.0}}, 1, 0.1),
                    std::runtime_error);
}

TEST_CASE("alg3 hull and gradient-feasibility properties on random inputs") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ws(-5, 5), gs(-1, 1);
    const int n = 7, f = 2;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<std::tuple<int, double, double>> in;
        std::vector<double> nf_w, nf_g;
        for (int i = 0; i < n; ++i) {
            double w = ws(rng), g = gs(rng);
            if (i >= n - f) {
                // adversarial entries may be wild
                w *= 100;
                g *= 100;
            } else {
                nf_w.push_back(w);
                nf_g.push_back(g);
            }
            in.emplace_back(i, w, g);
        }
        auto r = alg3_update(in, f, 0.1);
        CHECK(r.trimmed_mean >= *std::min_element(nf_w.begin(), nf_w.end()) - 1e-12);
        CHECK(r.trimmed_mean <= *std::max_element(nf_w.begin(), nf_w.end()) + 1e-12);
        CHECK(r.g_mid >= *std::min_element(nf_g.begin(), nf_g.end()) - 1e-12);
        CHECK(r.g_mid <= *std::max_element(nf_g.begin(), nf_g.end()) + 1e-12);
        const int nn = n - f;
        CHECK(weight_feasibility(nf_g, r.g_mid, 1.0 / (2.0 * (nn - f)), nn - f, 1e-12));
    }
}

TEST_CASE("alg4 update") {
    std::vector<std::tuple<double, double, int>> in{{0, 1, 4}, {2, -1, 4}, {4, 0, 4}};
    CHECK(alg4_update(in, 3, 4, 1) == doctest::Approx(2));
    CHECK(alg4_update(in, 3, 4, 0) == doctest::Approx(2));

    std::vector<std::tuple<double, double, int>> same{{3, 0, 1}, {3, 0, 1}, {3, 0, 1}};
    CHECK(alg4_update(same, 3, 1, 0.9) == doctest::Approx(3));

    CHECK_THROWS_AS(alg4_update(in, 4, 4, 1), std::runtime_error);
    std::vector<std::tuple<double, double, int>> stale{{0, 1, 4}, {2, -1, 3}, {4, 0, 4}};
    CHECK_THROWS_AS(alg4_update(stale, 3, 4, 1), std::runtime_error);
}

TEST_CASE("mean updates stay within lambda*L of the input hull") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ws(-10, 10), gs(-2, 2);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<std::pair<double, double>> pairs;
        double wlo = 1e300, whi = -1e300;
        for (int i = 0; i < 5; ++i) {
            pairs.emplace_back(ws(rng), gs(rng));
            wlo = std::min(wlo, pairs.back().first);
            whi = std::max(whi, pairs.back().first);
        }
        const double lambda = 0.3, L = 2;
        const double x = alg2_update(pairs, lambda);
        CHECK(x >= wlo - lambda * L - 1e-12);
        CHECK(x <= whi + lambda * L + 1e-12);

        std::vector<double> aux;
        for (auto& [w, g] : pairs) aux.push_back(w - lambda * g);
        const double x1 = alg1_step5_update(aux);
        CHECK(x1 >= *std::min_element(aux.begin(), aux.end()) - 1e-12);
        CHECK(x1 <= *std::max_element(aux.begin(), aux.end()) + 1e-12);
    }
}
