#ifndef FTOPT_ADVERSARY_HPP
#define FTOPT_ADVERSARY_HPP

#include <random>
#include <utility>
#include <vector>

namespace ftopt {

// Byzantine payload generators. The adversary sees the full round state and
// may equivocate (different payloads per receiver); it cannot touch
// non-faulty traffic.
struct ByzantineStrategy {
    enum class Kind { constant, random_uniform, opposite_extreme, collude_shift, silent, mimic };

    Kind kind = Kind::silent;
    double w = 0, g = 0;                          // constant
    double w_lo = 0, w_hi = 0, g_lo = 0, g_hi = 0;  // random_uniform
    double offset = 10;                           // opposite_extreme
    double target = 0;                            // collude_shift
    int victim = 0;                               // mimic
};

// Snapshot of the non-faulty side of a round, as visible to the adversary.
struct RoundView {
    std::vector<std::pair<int, double>> estimates;  // (id, x_i[t-1]), ascending id
    std::vector<std::pair<int, double>> gradients;  // (id, h_i'(x_i[t-1]))
    double min_estimate = 0;
    double max_estimate = 0;
    double median_estimate = 0;
    double gradient_cap = 0;  // largest L among all agents
};

struct AdversaryTuple {
    bool silent = false;
    double w = 0;
    double g = 0;
};

AdversaryTuple apply_adversary(const ByzantineStrategy& strategy, const RoundView& view,
                               int receiver, int t, std::mt19937_64& rng);

enum class CrashPhase { before_send, mid_send, after_step3_before_step4 };

struct CrashEvent {
    int agent = 0;
    int iteration = 0;
    CrashPhase phase = CrashPhase::before_send;
    std::vector<int> recipients;  // mid_send only: who still gets the message
};

struct CrashSchedule {
    std::vector<CrashEvent> events;

    // at most one event per agent, all targets within faulty_ids
    void validate(const std::vector<int>& faulty_ids) const;
    const CrashEvent* event_for(int agent, int iteration) const;
};

struct CrashScheduleSpec {
    enum class Kind { none, at_iterations, random };
    Kind kind = Kind::none;
    std::vector<CrashEvent> events;  // at_iterations
    double prob = 0;                 // random: per-iteration crash probability
    int horizon = 0;                 // random: last iteration considered
};

CrashSchedule generate_crash_schedule(const CrashScheduleSpec& spec,
                                      const std::vector<int>& faulty_ids, std::mt19937_64& rng);

}  // namespace ftopt

#endif
