#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ftopt/adversary.hpp"

using namespace ftopt;

namespace {

RoundView sample_view() {
    RoundView v;
    v.estimates = {{0, -1}, {1, 0}, {2, 2}};
    v.gradients = {{0, -0.5}, {1, 0.1}, {2, 1}};
    v.min_estimate = -1;
    v.max_estimate = 2;
    v.median_estimate = 0;
    v.gradient_cap = 1;
    return v;
}

}  // namespace

TEST_CASE("constant strategy reports its fixed tuple") {
    std::mt19937_64 rng(1);
    ByzantineStrategy s;
    s.kind = ByzantineStrategy::Kind::constant;
    s.w = 7;
    s.g = -3;
    auto t = apply_adversary(s, sample_view(), 0, 1, rng);
    CHECK_FALSE(t.silent);
    CHECK(t.w == 7);
    CHECK(t.g == -3);
}

TEST_CASE("random_uniform stays within its ranges and varies with the rng") {
    std::mt19937_64 rng(2);
    ByzantineStrategy s;
    s.kind = ByzantineStrategy::Kind::random_uniform;
    s.w_lo = -2;
    s.w_hi = 3;
    s.g_lo = 0.5;
    s.g_hi = 0.6;
    bool varied = false;
    double prev_w = 0;
    for (int i = 0; i < 100; ++i) {
        auto t = apply_adversary(s, sample_view(), 0, i, rng);
        CHECK(t.w >= -2);
        CHECK(t.w <= 3);
        CHECK(t.g >= 0.5);
        CHECK(t.g <= 0.6);
        if (i > 0 && t.w != prev_w) varied = true;
        prev_w = t.w;
    }
    CHECK(varied);
}

TEST_CASE("opposite_extreme pushes each receiver away from the median") {
    std::mt19937_64 rng(3);
    ByzantineStrategy s;
    s.kind = ByzantineStrategy::Kind::opposite_extreme;
    s.offset = 10;
    auto view = sample_view();
    // receiver 0 sits below the median: shoved upward with saturated gradient
    auto low = apply_adversary(s, view, 0, 1, rng);
    CHECK(low.w == doctest::Approx(12));
    CHECK(low.g == doctest::Approx(1));
    // receiver 2 sits above: shoved downward
    auto high = apply_adversary(s, view, 2, 1, rng);
    CHECK(high.w == doctest::Approx(-11));
    CHECK(high.g == doctest::Approx(-1));
}

TEST_CASE("collude_shift reports the target with zero gradient") {
    std::mt19937_64 rng(4);
    ByzantineStrategy s;
    s.kind = ByzantineStrategy::Kind::collude_shift;
    s.target = 1.5;
    auto t = apply_adversary(s, sample_view(), 1, 3, rng);
    CHECK(t.w == doctest::Approx(1.5));
    CHECK(t.g == 0);
}

TEST_CASE("silent and mimic strategies") {
    std::mt19937_64 rng(5);
    ByzantineStrategy s;
    s.kind = ByzantineStrategy::Kind::silent;
    CHECK(apply_adversary(s, sample_view(), 0, 1, rng).silent);

    ByzantineStrategy m;
    m.kind = ByzantineStrategy::Kind::mimic;
    m.victim = 2;
    auto t = apply_adversary(m, sample_view(), 0, 1, rng);
    CHECK(t.w == doctest::Approx(2));
    CHECK(t.g == doctest::Approx(1));
}

TEST_CASE("crash schedule validation") {
    CrashSchedule ok{{{4, 3, CrashPhase::before_send, {}}}};
    ok.validate({4, 5});
    CHECK(ok.event_for(4, 3) != nullptr);
    CHECK(ok.event_for(4, 2) == nullptr);
    CHECK(ok.event_for(5, 3) == nullptr);

    CrashSchedule bad_target{{{1, 3, CrashPhase::before_send, {}}}};
    CHECK_THROWS_AS(bad_target.validate({4, 5}), std::invalid_argument);

    CrashSchedule dup{{{4, 3, CrashPhase::before_send, {}}, {4, 7, CrashPhase::mid_send, {0}}}};
    CHECK_THROWS_AS(dup.validate({4, 5}), std::invalid_argument);

    CrashSchedule early{{{4, 0, CrashPhase::before_send, {}}}};
    CHECK_THROWS_AS(early.validate({4}), std::invalid_argument);
}

TEST_CASE("generate_crash_schedule") {
    std::mt19937_64 rng(6);
    CrashScheduleSpec none;
    CHECK(generate_crash_schedule(none, {2}, rng).events.empty());

    CrashScheduleSpec fixed;
    fixed.kind = CrashScheduleSpec::Kind::at_iterations;
    fixed.events = {{2, 3, CrashPhase::before_send, {}}};
    auto sched = generate_crash_schedule(fixed, {2}, rng);
    REQUIRE(sched.events.size() == 1);
    CHECK(sched.events[0].agent == 2);
    CHECK(sched.events[0].iteration == 3);

    CrashScheduleSpec certain;
    certain.kind = CrashScheduleSpec::Kind::random;
    certain.prob = 1;
    certain.horizon = 10;
    auto c = generate_crash_schedule(certain, {7}, rng);
    REQUIRE(c.events.size() == 1);
    CHECK(c.events[0].agent == 7);
    CHECK(c.events[0].iteration == 1);

    CrashScheduleSpec never;
    never.kind = CrashScheduleSpec::Kind::random;
    never.prob = 0;
    never.horizon = 10;
    CHECK(generate_crash_schedule(never, {7}, rng).events.empty());

    CrashScheduleSpec bad;
    bad.kind = CrashScheduleSpec::Kind::random;
    bad.prob = 1.5;
    CHECK_THROWS_AS(generate_crash_schedule(bad, {7}, rng), std::invalid_argument);

    CrashScheduleSpec outside;
    outside.kind = CrashScheduleSpec::Kind::at_iterations;
    outside.events = {{9, 1, CrashPhase::before_send, {}}};
    CHECK_THROWS_AS(generate_crash_schedule(outside, {2}, rng), std::invalid_argument);
}
