#include "ftopt/adversary.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ftopt {

AdversaryTuple apply_adversary(const ByzantineStrategy& strategy, const RoundView& view,
                               int receiver, int /*t*/, std::mt19937_64& rng) {
    AdversaryTuple out;
    switch (strategy.kind) {
        case ByzantineStrategy::Kind::constant:
            out.w = strategy.w;
            out.g = strategy.g;
            return out;
        case ByzantineStrategy::Kind::random_uniform: {
            std::uniform_real_distribution<double> dw(strategy.w_lo, strategy.w_hi);
            std::uniform_real_distribution<double> dg(strategy.g_lo, strategy.g_hi);
            out.w = dw(rng);
            out.g = dg(rng);
            return out;
        }
        case ByzantineStrategy::Kind::opposite_extreme: {
            double rx = view.median_estimate;
            for (const auto& [id, x] : view.estimates)
                if (id == receiver) rx = x;
            if (rx < view.median_estimate) {
                out.w = view.max_estimate + strategy.offset;
                out.g = view.gradient_cap;
            } else {
                out.w = view.min_estimate - strategy.offset;
                out.g = -view.gradient_cap;
            }
            return out;
        }
        case ByzantineStrategy::Kind::collude_shift:
            // an in-range estimate with zero gradient survives both trims and
            // drags the midpoint rule toward the target
            out.w = strategy.target;
            out.g = 0;
            return out;
        case ByzantineStrategy::Kind::silent:
            out.silent = true;
            return out;
        case ByzantineStrategy::Kind::mimic: {
            for (const auto& [id, x] : view.estimates)
                if (id == strategy.victim) out.w = x;
            for (const auto& [id, g] : view.gradients)
                if (id == strategy.victim) out.g = g;
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

void CrashSchedule::validate(const std::vector<int>& faulty_ids) const {
    std::set<int> faulty(faulty_ids.begin(), faulty_ids.end());
    std::set<int> seen;
    for (const auto& e : events) {
        if (!faulty.count(e.agent))
            throw std::invalid_argument("crash schedule targets a non-faulty agent");
        if (seen.count(e.agent))
            throw std::invalid_argument("at most one crash event per agent");
        seen.insert(e.agent);
        if (e.iteration < 1) throw std::invalid_argument("crash iteration must be >= 1");
    }
}

const CrashEvent* CrashSchedule::event_for(int agent, int iteration) const {
    for (const auto& e : events)
        if (e.agent == agent && e.iteration == iteration) return &e;
    return nullptr;
}

CrashSchedule generate_crash_schedule(const CrashScheduleSpec& spec,
                                      const std::vector<int>& faulty_ids, std::mt19937_64& rng) {
    CrashSchedule out;
    switch (spec.kind) {
        case CrashScheduleSpec::Kind::none:
            break;
        case CrashScheduleSpec::Kind::at_iterations:
            out.events = spec.events;
            break;
        case CrashScheduleSpec::Kind::random: {
            if (!(spec.prob >= 0 && spec.prob <= 1))
                throw std::invalid_argument("crash probability must lie in [0, 1]");
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int agent : faulty_ids) {
                for (int t = 1; t <= spec.horizon; ++t) {
                    if (u(rng) < spec.prob) {
                        out.events.push_back({agent, t, CrashPhase::before_send, {}});
                        break;
                    }
                }
            }
            break;
        }
    }
    out.validate(faulty_ids);
    return out;
}

}  // namespace ftopt
