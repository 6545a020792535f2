#include "ftopt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>
#include <set>
#include <stdexcept>

namespace ftopt {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    if (v.size() % 2 == 1) return v[m];
    return 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(seed ^ 0x5bf03635aca1c2bbULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

void ScenarioConfig::validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (f < 0) throw std::invalid_argument("f must be >= 0");
    if (n <= 3 * f) throw std::invalid_argument("requires n > 3f");
    if (static_cast<int>(functions.size()) != n)
        throw std::invalid_argument("need exactly n functions");
    if (static_cast<int>(init_estimates.size()) != n)
        throw std::invalid_argument("need exactly n initial estimates");
    for (double x : init_estimates)
        if (!std::isfinite(x)) throw std::invalid_argument("initial estimates must be finite");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");

    std::set<int> faulty(faulty_ids.begin(), faulty_ids.end());
    if (faulty.size() != faulty_ids.size())
        throw std::invalid_argument("duplicate faulty ids");
    if (static_cast<int>(faulty.size()) > f)
        throw std::invalid_argument("more faulty ids than f");
    for (int i : faulty_ids)
        if (i < 0 || i >= n) throw std::invalid_argument("faulty id out of range");

    if (protocol == Protocol::alg3) {
        if (!has_adversary)
            throw std::invalid_argument("alg3 requires a Byzantine strategy");
        if (!crash_schedule.events.empty())
            throw std::invalid_argument("alg3 faults are Byzantine, not crashes");
    } else {
        if (has_adversary)
            throw std::invalid_argument("Byzantine strategies apply to alg3 only");
        crash_schedule.validate(faulty_ids);
        for (const auto& e : crash_schedule.events) {
            if (e.phase == CrashPhase::after_step3_before_step4 && protocol != Protocol::alg1)
                throw std::invalid_argument("after_step3 crash phase exists only in alg1");
            for (int r : e.recipients)
                if (r < 0 || r >= n)
                    throw std::invalid_argument("crash recipient out of range");
        }
    }
    if (protocol == Protocol::alg4 && !has_delay)
        throw std::invalid_argument("alg4 requires a delay model");
}

FaultSplit ScenarioConfig::split() const {
    FaultSplit s;
    std::set<int> faulty(faulty_ids.begin(), faulty_ids.end());
    for (int i = 0; i < n; ++i)
        if (!faulty.count(i)) s.non_faulty.push_back(i);
    s.faulty = faulty_ids;
    std::sort(s.faulty.begin(), s.faulty.end());
    s.f = f;
    return s;
}

std::uint64_t Trace::hash() const {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&](double d) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        std::memcpy(&bits, &d, sizeof(bits));
        mix(bits);
    };
    for (const auto& r : rounds) {
        mix(static_cast<std::uint64_t>(r.t));
        mixd(r.lambda);
        for (const auto& [id, x] : r.estimates) {
            mix(static_cast<std::uint64_t>(id));
            mixd(x);
        }
        for (const auto& e : r.crashes) {
            mix(static_cast<std::uint64_t>(e.agent));
            mix(static_cast<std::uint64_t>(e.iteration));
        }
        for (const auto& rec : r.trims) {
            mix(static_cast<std::uint64_t>(rec.receiver));
            mixd(rec.result.x_new);
            mixd(rec.result.g_mid);
        }
    }
    return h;
}

namespace {

RoundRecord initial_round(const ScenarioConfig& cfg, const std::vector<bool>& participates) {
    RoundRecord r0;
    r0.t = 0;
    r0.lambda = 0;
    for (int i = 0; i < cfg.n; ++i)
        if (participates[i]) r0.estimates.emplace_back(i, cfg.init_estimates[i]);
    return r0;
}

Trace run_sync_crash(const ScenarioConfig& cfg) {
    std::vector<double> x = cfg.init_estimates;
    std::vector<bool> alive(cfg.n, true);

    Trace trace;
    trace.rounds.reserve(cfg.max_iters + 1);
    trace.rounds.push_back(initial_round(cfg, alive));

    for (int t = 1; t <= cfg.max_iters; ++t) {
        const double lambda = cfg.schedule.stepsize(t - 1);
        RoundRecord rec;
        rec.t = t;
        rec.lambda = lambda;

        // before_send crashes take the agent out before it participates at all
        std::vector<const CrashEvent*> event(cfg.n, nullptr);
        for (int i = 0; i < cfg.n; ++i) {
            if (!alive[i]) continue;
            if (const CrashEvent* e = cfg.crash_schedule.event_for(i, t)) {
                event[i] = e;
                rec.crashes.push_back(*e);
                if (e->phase == CrashPhase::before_send) alive[i] = false;
            }
        }

        std::vector<int> participants;
        for (int i = 0; i < cfg.n; ++i)
            if (alive[i]) participants.push_back(i);

        // delivery filter for an agent's final broadcast of this round
        auto delivers_to = [&](int sender, int receiver) {
            const CrashEvent* e = event[sender];
            if (!e || e->phase == CrashPhase::before_send) return true;
            if (e->phase == CrashPhase::after_step3_before_step4) return false;
            return std::find(e->recipients.begin(), e->recipients.end(), receiver) !=
                   e->recipients.end();
        };

        std::vector<double> x_next = x;
        if (cfg.protocol == Protocol::alg1) {
            // round 1: everyone requests gradients at its own estimate and
            // every participant replies
            std::vector<double> s(cfg.n, 0);
            for (int j : participants) {
                std::vector<double> grads;
                grads.reserve(participants.size());
                for (int i : participants) grads.push_back(cfg.functions[i].gradient(x[j]));
                s[j] = protocol::alg1_step3_update(x[j], grads, lambda);
            }
            // round 2: exchange auxiliary values; crashing agents deliver
            // partially and never update
            for (int k : participants) {
                if (event[k]) continue;  // crashes before completing the round
                std::vector<double> received;
                for (int j : participants) {
                    if (!delivers_to(j, k)) continue;
                    received.push_back(s[j]);
                    if (cfg.record_messages) rec.delivered.push_back({j, k, s[j], 0, t});
                }
                x_next[k] = protocol::alg1_step5_update(received);
            }
        } else {  // alg2
            for (int k : participants) {
                if (event[k] ) continue;
                std::vector<std::pair<double, double>> pairs;
                for (int j : participants) {
                    if (!delivers_to(j, k)) continue;
                    const double g = cfg.functions[j].gradient(x[j]);
                    pairs.emplace_back(x[j], g);
                    if (cfg.record_messages) rec.delivered.push_back({j, k, x[j], g, t});
                }
                x_next[k] = protocol::alg2_update(pairs, lambda);
            }
        }

        for (int i = 0; i < cfg.n; ++i)
            if (event[i]) alive[i] = false;
        x = x_next;
        for (int i = 0; i < cfg.n; ++i)
            if (alive[i]) rec.estimates.emplace_back(i, x[i]);
        trace.rounds.push_back(std::move(rec));
    }
    return trace;
}

Trace run_sync_byz(const ScenarioConfig& cfg) {
    const FaultSplit split = cfg.split();
    std::set<int> faulty(split.faulty.begin(), split.faulty.end());

    std::vector<double> x = cfg.init_estimates;
    std::vector<bool> non_faulty(cfg.n, true);
    for (int i : split.faulty) non_faulty[i] = false;

    double cap = 0;
    for (const auto& fn : cfg.functions) cap = std::max(cap, fn.gradient_bound());

    Trace trace;
    trace.rounds.reserve(cfg.max_iters + 1);
    trace.rounds.push_back(initial_round(cfg, non_faulty));

    for (int t = 1; t <= cfg.max_iters; ++t) {
        const double lambda = cfg.schedule.stepsize(t - 1);
        RoundRecord rec;
        rec.t = t;
        rec.lambda = lambda;

        RoundView view;
        std::vector<double> est_values;
        for (int i : split.non_faulty) {
            view.estimates.emplace_back(i, x[i]);
            view.gradients.emplace_back(i, cfg.functions[i].gradient(x[i]));
            est_values.push_back(x[i]);
        }
        view.min_estimate = *std::min_element(est_values.begin(), est_values.end());
        view.max_estimate = *std::max_element(est_values.begin(), est_values.end());
        view.median_estimate = median_of(est_values);
        view.gradient_cap = cap;
        rec.true_gradients = view.gradients;

        std::vector<double> x_next = x;
        for (int j : split.non_faulty) {
            std::vector<std::tuple<int, double, double>> tuples;
            tuples.reserve(cfg.n);
            for (const auto& [i, xi] : view.estimates)
                tuples.emplace_back(i, xi, cfg.functions[i].gradient(xi));
            for (int k : split.faulty) {
                std::mt19937_64 rng(split_seed(cfg.seed, static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(t),
                                               static_cast<std::uint64_t>(j)));
                AdversaryTuple adv = apply_adversary(cfg.adversary, view, j, t, rng);
                if (adv.silent) {
                    // receiver substitutes its own previous estimate with a
                    // zero gradient
                    adv.w = x[j];
                    adv.g = 0;
                }
                tuples.emplace_back(k, adv.w, adv.g);
                rec.byz_payloads.emplace_back(k, j, adv.w, adv.g);
            }
            Alg3ReceiverRecord rr;
            rr.receiver = j;
            rr.result = protocol::alg3_update(tuples, cfg.f, lambda);
            x_next[j] = rr.result.x_new;
            rec.trims.push_back(std::move(rr));
        }
        x = x_next;
        for (int i : split.non_faulty) rec.estimates.emplace_back(i, x[i]);
        trace.rounds.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace

Trace run_sync(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.protocol == Protocol::alg4)
        throw std::invalid_argument("alg4 runs under run_async");
    if (cfg.protocol == Protocol::alg3) return run_sync_byz(cfg);
    return run_sync_crash(cfg);
}

namespace {

struct AsyncMsg {
    long long time = 0;
    long long seq = 0;
    int sender = 0;
    int receiver = 0;
    double w = 0, g = 0;
    int tag = 0;
};

struct MsgOrder {
    bool operator()(const AsyncMsg& a, const AsyncMsg& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

}  // namespace

Trace run_async(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.protocol != Protocol::alg4)
        throw std::invalid_argument("run_async handles alg4 only");

    constexpr long long kSlowDelay = 1000000;
    std::set<int> slow(cfg.delay.slow_agents.begin(), cfg.delay.slow_agents.end());

    auto delay_for = [&](int sender, int receiver, int tag) -> long long {
        switch (cfg.delay.kind) {
            case DelayModel::Kind::uniform_int: {
                if (cfg.delay.lo > cfg.delay.hi || cfg.delay.lo < 1)
                    throw std::invalid_argument("uniform_int delay needs 1 <= lo <= hi");
                std::mt19937_64 rng(split_seed(cfg.seed ^ 0xa5a5a5a5ULL,
                                               static_cast<std::uint64_t>(sender),
                                               static_cast<std::uint64_t>(receiver),
                                               static_cast<std::uint64_t>(tag)));
                std::uniform_int_distribution<int> d(cfg.delay.lo, cfg.delay.hi);
                return d(rng);
            }
            case DelayModel::Kind::fixed: {
                auto it = cfg.delay.per_agent.find(sender);
                return it == cfg.delay.per_agent.end() ? 1 : it->second;
            }
            case DelayModel::Kind::adversarial_slowest:
                return slow.count(sender) ? kSlowDelay : 1;
        }
        throw std::logic_error("unreachable");
    };

    std::vector<double> x = cfg.init_estimates;
    std::vector<bool> alive(cfg.n, true);
    std::vector<int> iter(cfg.n, 1);  // iteration each agent is working on
    const int quorum = cfg.n - cfg.f;

    std::priority_queue<AsyncMsg, std::vector<AsyncMsg>, MsgOrder> queue;
    long long seq = 0;
    // buffered[r][tag] = messages for receiver r tagged `tag`, pop order
    std::vector<std::map<int, std::vector<AsyncMsg>>> buffered(cfg.n);
    std::map<int, std::vector<std::pair<int, double>>> completions;
    std::map<int, std::vector<CrashEvent>> crashes_by_round;
    std::map<int, std::vector<WireTupleRec>> delivered_by_round;

    auto send = [&](int j, int tag, long long now) {
        if (const CrashEvent* e = cfg.crash_schedule.event_for(j, tag)) {
            crashes_by_round[tag].push_back(*e);
            alive[j] = false;
            if (e->phase == CrashPhase::before_send) return;
            const double g = cfg.functions[j].gradient(x[j]);
            for (int r : e->recipients)
                queue.push({now + delay_for(j, r, tag), seq++, j, r, x[j], g, tag});
            return;
        }
        const double g = cfg.functions[j].gradient(x[j]);
        for (int r = 0; r < cfg.n; ++r)
            queue.push({now + delay_for(j, r, tag), seq++, j, r, x[j], g, tag});
    };

    for (int j = 0; j < cfg.n; ++j)
        if (cfg.max_iters >= 1) send(j, 1, 0);

    auto all_done = [&]() {
        for (int j = 0; j < cfg.n; ++j)
            if (alive[j] && iter[j] <= cfg.max_iters) return false;
        return true;
    };

    while (!all_done()) {
        if (queue.empty()) throw std::runtime_error("async simulation stalled");
        AsyncMsg msg = queue.top();
        queue.pop();
        const int r = msg.receiver;
        if (!alive[r] || iter[r] > cfg.max_iters) continue;
        buffered[r][msg.tag].push_back(msg);

        while (alive[r] && iter[r] <= cfg.max_iters) {
            auto it = buffered[r].find(iter[r]);
            if (it == buffered[r].end() || static_cast<int>(it->second.size()) < quorum) break;
            // first-come selection, ties by sender id
            std::vector<AsyncMsg> avail = it->second;
            std::sort(avail.begin(), avail.end(), [](const AsyncMsg& a, const AsyncMsg& b) {
                if (a.time != b.time) return a.time < b.time;
                return a.sender < b.sender;
            });
            std::vector<std::tuple<double, double, int>> triples;
            for (int i = 0; i < quorum; ++i) {
                triples.emplace_back(avail[i].w, avail[i].g, avail[i].tag);
                if (cfg.record_messages)
                    delivered_by_round[iter[r]].push_back(
                        {avail[i].sender, r, avail[i].w, avail[i].g, avail[i].tag});
            }
            const int t = iter[r];
            x[r] = protocol::alg4_update(triples, quorum, t, cfg.schedule.stepsize(t - 1));
            completions[t].emplace_back(r, x[r]);
            buffered[r].erase(it);
            iter[r] = t + 1;
            if (iter[r] <= cfg.max_iters) send(r, iter[r], msg.time);
        }
    }

    Trace trace;
    trace.rounds.reserve(cfg.max_iters + 1);
    std::vector<bool> all(cfg.n, true);
    trace.rounds.push_back(initial_round(cfg, all));
    for (int t = 1; t <= cfg.max_iters; ++t) {
        RoundRecord rec;
        rec.t = t;
        rec.lambda = cfg.schedule.stepsize(t - 1);
        rec.estimates = completions[t];
        std::sort(rec.estimates.begin(), rec.estimates.end());
        rec.crashes = crashes_by_round[t];
        if (cfg.record_messages) rec.delivered = delivered_by_round[t];
        trace.rounds.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace ftopt
