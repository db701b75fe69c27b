#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgesim/policy.hpp"
#include "edgesim/simulator.hpp"
#include "edgesim/workload.hpp"

namespace edgesim {

struct FleetRanges {
    double cpu_ghz_lo = 2.0, cpu_ghz_hi = 4.0;
    double ram_gb_lo = 4.0, ram_gb_hi = 16.0;
};

struct EnvConfig {
    SimConfig sim;
    MobilityConfig mobility;
    WorkloadStats workload;
    ObsNorm norm;
    FleetRanges fleet;
    double l_max_ms = 500.0;
    int episode_len = 100;             // decisions per vehicle per episode; 0 disables resets
    std::int64_t timeout_ticks = 600000;  // abort if nothing completes for this long
};

// What the environment consults at each decision point.
struct ActionSource {
    enum class Kind { Constant, Network };
    Kind kind = Kind::Constant;
    double constant = 0.0;
    const PolicyPair* policy = nullptr;
    bool explore = false;

    static ActionSource fixed(double a) { return {Kind::Constant, a, nullptr, false}; }
    static ActionSource network(const PolicyPair& p, bool explore) {
        return {Kind::Network, 0.0, &p, explore};
    }
};

struct RolloutTimeout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Asynchronous offloading environment: each vehicle decides its next split
// ratio the moment its previous offload completes. Episodes (when enabled)
// end after `episode_len` decisions per vehicle, after which mobility and
// demand streams are re-seeded.
class OffloadEnv {
public:
    OffloadEnv(EnvConfig cfg, std::uint64_t seed);

    void set_reservation(const ResourceReservation& r);
    const ResourceReservation& reservation() const { return reservation_; }

    // Advances the simulation until exactly `n_completions` offloads finish,
    // deciding every follow-up offload via `src`. Completed offloads are
    // returned in completion order; when `transitions` is non-null one RL
    // transition per completion is appended.
    std::vector<CompletedTask> run(int n_completions, const ActionSource& src,
                                   std::vector<Transition>* transitions = nullptr);

    Observation observe(int vehicle) const;
    Simulator& sim() { return *sim_; }
    const Simulator& sim() const { return *sim_; }
    const EnvConfig& config() const { return cfg_; }
    int episodes_started() const { return episode_; }

private:
    void rebuild_world();
    void make_decision(int vehicle, const ActionSource& src);

    struct Pending {
        Observation obs;
        double action = 0.0, log_prob = 0.0, value = 0.0;
        Tick decision_tick = 0;
        bool active = false;
    };

    EnvConfig cfg_;
    std::uint64_t seed_;
    int episode_ = 0;
    std::unique_ptr<MobilityTrace> trace_;
    std::unique_ptr<Simulator> sim_;
    ResourceReservation reservation_;
    std::vector<double> fleet_cpu_, fleet_ram_;
    std::vector<RngStream> demand_rng_, explore_rng_;
    std::vector<Pending> pending_;
    std::vector<int> decisions_done_;
    std::vector<bool> awaiting_reset_;
    bool world_ready_ = false;
};

// Frozen-policy experience collection; stops at exactly n_transitions.
std::vector<Transition> collect_rollouts(const PolicyPair& policy, OffloadEnv& env,
                                         int n_transitions, bool explore = true);

}  // namespace edgesim
