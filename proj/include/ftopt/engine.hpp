#ifndef FTOPT_ENGINE_HPP
#define FTOPT_ENGINE_HPP

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "ftopt/adversary.hpp"
#include "ftopt/functions.hpp"
#include "ftopt/protocol.hpp"
#include "ftopt/valid_set.hpp"

namespace ftopt {

enum class Protocol { alg1, alg2, alg3, alg4 };

struct DelayModel {
    enum class Kind { uniform_int, fixed, adversarial_slowest };

    Kind kind = Kind::uniform_int;
    int lo = 1, hi = 1;            // uniform_int, in whole rounds
    std::map<int, int> per_agent;  // fixed: sender -> delay
    std::vector<int> slow_agents;  // adversarial_slowest: these always arrive last
};

struct ScenarioConfig {
    int n = 0;
    int f = 0;
    Protocol protocol = Protocol::alg2;
    std::vector<AdmissibleFunction> functions;  // indexed by agent id
    std::vector<int> faulty_ids;
    ByzantineStrategy adversary;  // alg3 only
    bool has_adversary = false;
    CrashSchedule crash_schedule;  // alg1/2/4
    StepSchedule schedule = StepSchedule::harmonic(1.0);
    std::vector<double> init_estimates;
    int max_iters = 0;
    std::uint64_t seed = 0;
    DelayModel delay;  // alg4 only
    bool has_delay = false;
    bool record_messages = false;

    void validate() const;
    FaultSplit split() const;
};

struct WireTupleRec {
    int sender = 0;
    int receiver = 0;
    double w = 0;
    double g = 0;
    int tag = 0;
};

struct Alg3ReceiverRecord {
    int receiver = 0;
    protocol::Alg3Result result;
};

struct RoundRecord {
    int t = 0;
    double lambda = 0;
    // estimates of agents alive at the end of the round (all non-faulty
    // agents, plus not-yet-crashed faulty ones in crash protocols)
    std::vector<std::pair<int, double>> estimates;
    std::vector<CrashEvent> crashes;
    // alg3 bookkeeping for the structural checks
    std::vector<Alg3ReceiverRecord> trims;
    std::vector<std::pair<int, double>> true_gradients;  // h_i'(x_i[t-1]) over non-faulty i
    std::vector<std::tuple<int, int, double, double>> byz_payloads;  // sender, receiver, w, g
    std::vector<WireTupleRec> delivered;  // populated only when record_messages
};

struct Trace {
    std::vector<RoundRecord> rounds;  // rounds[0] echoes the initial estimates

    std::uint64_t hash() const;
};

// Synchronous round loop for alg1-alg3. Deterministic: identical config
// gives a bit-identical trace.
Trace run_sync(const ScenarioConfig& config);

// Event-queue simulation for alg4; requires a delay model.
Trace run_async(const ScenarioConfig& config);

// Deterministic substream derivation so that adversary draws never perturb
// delay draws and vice versa.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace ftopt

#endif
