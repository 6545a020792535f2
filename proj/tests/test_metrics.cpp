#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ftopt/metrics.hpp"

using namespace ftopt;

namespace {

Trace trace_from_gaps(const std::vector<double>& gaps) {
    Trace tr;
    for (std::size_t t = 0; t < gaps.size(); ++t) {
        RoundRecord r;
        r.t = static_cast<int>(t);
        r.estimates = {{0, 0.0}, {1, gaps[t]}};
        tr.rounds.push_back(std::move(r));
    }
    return tr;
}

RoundRecord alg3_round(int t, double g_mid, double trimmed_mean,
                       const std::vector<std::pair<int, double>>& true_grads,
                       const std::vector<std::pair<int, double>>& estimates) {
    RoundRecord r;
    r.t = t;
    r.estimates = estimates;
    r.true_gradients = true_grads;
    Alg3ReceiverRecord rec;
    rec.receiver = 0;
    rec.result.g_mid = g_mid;
    rec.result.trimmed_mean = trimmed_mean;
    r.trims.push_back(rec);
    return r;
}

}  // namespace

TEST_CASE("consensus_gap") {
    Trace tr;
    RoundRecord r;
    r.estimates = {{0, 1.0}, {1, 2.0}, {2, 5.0}};
    tr.rounds.push_back(r);
    RoundRecord single;
    single.t = 1;
    single.estimates = {{0, 3.0}};
    tr.rounds.push_back(single);
    RoundRecord same;
    same.t = 2;
    same.estimates = {{0, 2.0}, {1, 2.0}};
    tr.rounds.push_back(same);

    auto s = consensus_gap(tr);
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[0] == doctest::Approx(4));
    CHECK(s.values[1] == doctest::Approx(0));
    CHECK(s.values[2] == doctest::Approx(0));
    CHECK_THROWS_AS(consensus_gap(Trace{}), std::invalid_argument);
}

TEST_CASE("max_dist_series") {
    ValidSet vs{1, 2};
    Trace tr;
    RoundRecord inside;
    inside.estimates = {{0, 1.0}, {1, 1.5}};
    tr.rounds.push_back(inside);
    RoundRecord outside;
    outside.t = 1;
    outside.estimates = {{0, 5.0}};
    tr.rounds.push_back(outside);
    RoundRecord straddle;
    straddle.t = 2;
    straddle.estimates = {{0, 0.0}, {1, 3.0}};
    tr.rounds.push_back(straddle);

    auto s = max_dist_series(tr, vs);
    CHECK(s.values[0] == doctest::Approx(0));
    CHECK(s.values[1] == doctest::Approx(3));
    CHECK(s.values[2] == doctest::Approx(1));
}

TEST_CASE("weighted_gap_sum") {
    std::vector<double> gaps(40, 0.0);
    for (int t = 0; t < 10; ++t) gaps[t] = 1;
    auto w = weighted_gap_sum(trace_from_gaps(gaps), StepSchedule::harmonic(1));
    // harmonic number H_10
    CHECK(w.total == doctest::Approx(2.9289682539682538));
    CHECK(w.last_quarter == doctest::Approx(0));

    auto zero = weighted_gap_sum(trace_from_gaps(std::vector<double>(20, 0.0)),
                                 StepSchedule::harmonic(1));
    CHECK(zero.total == doctest::Approx(0));

    auto single = weighted_gap_sum(trace_from_gaps({2.0}), StepSchedule::harmonic(0.5));
    CHECK(single.total == doctest::Approx(1));
}

TEST_CASE("geometric_tail") {
    auto s = geometric_tail(StepSchedule::harmonic(1), 0.5, 2);
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[2] == doctest::Approx(0.5));

    auto z = geometric_tail(StepSchedule::harmonic(1), 0.0, 5);
    for (double v : z.values) CHECK(v == 0);

    CHECK(geometric_tail(StepSchedule::harmonic(1), 0.5, 40).values.back() < 0.06);

    // final value shrinks as the horizon grows
    const double a = geometric_tail(StepSchedule::harmonic(1), 0.5, 100).values.back();
    const double b = geometric_tail(StepSchedule::harmonic(1), 0.5, 1000).values.back();
    const double c = geometric_tail(StepSchedule::harmonic(1), 0.5, 10000).values.back();
    CHECK(b < a);
    CHECK(c < b);

    CHECK_THROWS_AS(geometric_tail(StepSchedule::harmonic(1), 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(geometric_tail(StepSchedule::harmonic(1), -0.1, 10), std::invalid_argument);
}

TEST_CASE("check_gradient_hull flags only out-of-hull midpoints") {
    Trace tr;
    tr.rounds.push_back(alg3_round(1, 0.5, 0, {{0, -1.0}, {1, 1.0}}, {{0, 0.0}, {1, 0.0}}));
    CHECK(check_gradient_hull(tr).empty());

    tr.rounds.push_back(alg3_round(2, 1.5, 0, {{0, -1.0}, {1, 1.0}}, {{0, 0.0}, {1, 0.0}}));
    auto v = check_gradient_hull(tr);
    REQUIRE(v.size() == 1);
    CHECK(v[0].t == 2);
    CHECK(v[0].value == doctest::Approx(1.5));
    CHECK(v[0].bound_hi == doctest::Approx(1));
}

TEST_CASE("check_estimate_hull compares against the previous round") {
    Trace tr;
    RoundRecord r0;
    r0.estimates = {{0, 0.0}, {1, 2.0}};
    tr.rounds.push_back(r0);
    tr.rounds.push_back(alg3_round(1, 0, 1.0, {{0, 0.0}}, {{0, 1.0}, {1, 1.0}}));
    CHECK(check_estimate_hull(tr).empty());

    tr.rounds.push_back(alg3_round(2, 0, 5.0, {{0, 0.0}}, {{0, 1.0}, {1, 1.0}}));
    auto v = check_estimate_hull(tr);
    REQUIRE(v.size() == 1);
    CHECK(v[0].t == 2);
    CHECK(v[0].value == doctest::Approx(5));
    CHECK(v[0].bound_hi == doctest::Approx(1));
}

TEST_CASE("check_weight_bound uses the constrained envelope") {
    // nn=3, f=1: beta=0.25, gamma=2; grads {-1, 0, 2} admit at most 1.5
    Trace ok;
    ok.rounds.push_back(
        alg3_round(1, 1.5, 0, {{0, -1.0}, {1, 0.0}, {2, 2.0}}, {{0, 0.0}, {1, 0.0}, {2, 0.0}}));
    CHECK(check_weight_bound(ok, 1, 1e-9).empty());

    Trace bad;
    bad.rounds.push_back(
        alg3_round(1, 1.6, 0, {{0, -1.0}, {1, 0.0}, {2, 2.0}}, {{0, 0.0}, {1, 0.0}, {2, 0.0}}));
    auto v = check_weight_bound(bad, 1, 1e-9);
    REQUIRE(v.size() == 1);
    CHECK(v[0].value == doctest::Approx(1.6));

    // identical agents: the midpoint equals the common gradient
    Trace same;
    same.rounds.push_back(
        alg3_round(1, 0.7, 0, {{0, 0.7}, {1, 0.7}, {2, 0.7}}, {{0, 0.0}, {1, 0.0}, {2, 0.0}}));
    CHECK(check_weight_bound(same, 1, 1e-9).empty());
}

TEST_CASE("checks on a live byzantine run come back empty") {
    ScenarioConfig cfg;
    cfg.n = 7;
    cfg.f = 2;
    cfg.protocol = Protocol::alg3;
    for (int i = 0; i < 7; ++i) {
        cfg.functions.push_back(AdmissibleFunction::huber(i - 3, 1, 1));
        cfg.init_estimates.push_back(static_cast<double>(i - 3));
    }
    cfg.faulty_ids = {5, 6};
    cfg.has_adversary = true;
    cfg.adversary.kind = ByzantineStrategy::Kind::opposite_extreme;
    cfg.schedule = StepSchedule::harmonic(0.5);
    cfg.max_iters = 500;
    cfg.seed = 7;
    Trace tr = run_sync(cfg);
    CHECK(check_gradient_hull(tr).empty());
    CHECK(check_estimate_hull(tr).empty());
    CHECK(check_weight_bound(tr, cfg.f).empty());

    cfg.adversary.kind = ByzantineStrategy::Kind::collude_shift;
    cfg.adversary.target = 10;
    Trace tr2 = run_sync(cfg);
    CHECK(check_weight_bound(tr2, cfg.f).empty());

    cfg.adversary.kind = ByzantineStrategy::Kind::constant;
    cfg.adversary.w = 0;
    cfg.adversary.g = 1e6;
    Trace tr3 = run_sync(cfg);
    CHECK(check_gradient_hull(tr3).empty());
}

TEST_CASE("check_iteration_relation on synthetic distance series") {
    ValidSet vs{0, 0};
    Trace ok;
    double lambda = 1;
    double d = 1;
    for (int t = 0; t < 5; ++t) {
        RoundRecord r;
        r.t = t;
        r.lambda = t == 0 ? 0 : lambda;
        r.estimates = {{0, d}};
        ok.rounds.push_back(r);
        d = std::max(lambda * 0.5, d - 0.3);  // shrink within the allowed bound, L=0.5
    }
    CHECK(check_iteration_relation(ok, vs, 0.5).empty());

    Trace bad = ok;
    bad.rounds[3].estimates = {{0, 50.0}};
    auto v = check_iteration_relation(bad, vs, 0.5);
    REQUIRE(!v.empty());
    CHECK(v[0].t == 3);
}

TEST_CASE("classify_resilient three-clause definition") {
    ValidSet y{1, 2};
    CHECK_FALSE(classify_resilient(1.5, 0, 1, y));
    CHECK(classify_resilient(3, 3, 1, y));       // jumps across from above
    CHECK(classify_resilient(0, -3, 1, y));      // jumps across from below
    CHECK_FALSE(classify_resilient(3, 0.5, 1, y));   // approaches but stays above
    CHECK(classify_resilient(1.5, 1, 1, y));     // steps out of the set
    CHECK_FALSE(classify_resilient(1.5, 0.4, 1, y));
    CHECK_THROWS_AS(classify_resilient(0, 0, -1, y), std::invalid_argument);
}
