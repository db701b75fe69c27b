#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/gpr.hpp"
#include "edgesim/ppo.hpp"
#include "edgesim/reservation.hpp"
#include "edgesim/rollout.hpp"

namespace edgesim {

enum class ExperimentPhase { PolicyTraining, ReservationLearning, Evaluation };

// The comparison policies: always-offload, always-local, a fixed split, or a
// trained network snapshot.
struct BaselinePolicy {
    enum class Kind { FullOffload, FullLocal, StaticSplit, Trained };
    Kind kind = Kind::FullOffload;
    double split = 0.0;
    const PolicyPair* policy = nullptr;

    static BaselinePolicy full_offload() { return {Kind::FullOffload, 0.0, nullptr}; }
    static BaselinePolicy full_local() { return {Kind::FullLocal, 1.0, nullptr}; }
    static BaselinePolicy static_split(double a) { return {Kind::StaticSplit, a, nullptr}; }
    static BaselinePolicy trained(const PolicyPair& p) { return {Kind::Trained, 0.0, &p}; }

    ActionSource source() const {
        switch (kind) {
            case Kind::FullOffload: return ActionSource::fixed(0.0);
            case Kind::FullLocal: return ActionSource::fixed(1.0);
            case Kind::StaticSplit: return ActionSource::fixed(split);
            case Kind::Trained: return ActionSource::network(*policy, false);
        }
        return ActionSource::fixed(0.0);
    }
    std::string label() const;
};

struct EpochStats {
    int epoch = 0;
    double mean_latency_ms = 0.0;
    double mean_reward = 0.0;
    double clip_fraction = 0.0;
    double mean_ratio = 0.0;
    double value_loss = 0.0;
    double noise_std = 0.0;
    Eigen::Vector3d reservation{0, 0, 0};
    bool update_ok = true;
};

struct TrainResult {
    PolicyPair policy;
    std::vector<EpochStats> curve;
};

// Phase 1: train the shared policy under a fresh uniform reservation per
// epoch; each epoch centralizes transitions_per_epoch transitions and runs one
// clipped-surrogate update.
TrainResult train_policy(const ScenarioConfig& cfg, std::uint64_t seed,
                         std::ostream* progress = nullptr);

struct WindowRecord {
    int window = 0;
    bool warmup = false;
    Eigen::Vector3d x{0, 0, 0};
    double lambda = 0.0;
    double l_h_ms = 0.0;
    double usage = 0.0;
    double rolling_l_h_ms = 0.0;  // trailing mean over reserve.rolling_windows
};

struct ReservationRun {
    std::vector<WindowRecord> trajectory;
    ReservationState final_state;
    double converged_usage = 0.0;  // mean over the trailing rolling_windows
    double converged_l_h_ms = 0.0;
};

// Phase 2: frozen-policy reservation control. Warm-up windows draw uniform
// reservations to seed the GPR; guided windows follow the expected-gradient
// primal-dual update starting from the cheapest feasible warm-up point.
ReservationRun run_reservation_loop(const PolicyPair& policy, const ScenarioConfig& cfg,
                                    std::uint64_t seed, std::ostream* progress = nullptr);

// Same controller with the always-offload policy.
ReservationRun run_virtualedge(const ScenarioConfig& cfg, std::uint64_t seed,
                               std::ostream* progress = nullptr);

struct ProbeRecord {
    Eigen::Vector3d x{0, 0, 0};
    double l_h_ms = 0.0;
    bool feasible = false;
};

struct CalibrationResult {
    bool feasible = false;  // false when even (1,1,1) violates the bound
    Eigen::Vector3d reservation{1, 1, 1};
    double usage = 0.0;
    std::vector<ProbeRecord> probes;
};

// Shrinks all coordinates together on the grid while the windowed max latency
// stays within the bound, then refines one coordinate at a time.
CalibrationResult baseline_calibrate(const BaselinePolicy& policy, const ScenarioConfig& cfg,
                                     std::uint64_t seed);

struct EvalSummary {
    std::string label;
    std::vector<double> latencies_ms;  // every completed offload
    double mean_latency_ms = 0.0;
    // mean per-stage durations in ms (1 tick = 1 ms)
    double stage_local = 0.0, stage_uplink = 0.0, stage_queue = 0.0, stage_edge = 0.0,
           stage_broadcast = 0.0;
};

// Measures a policy under `evaluate.n_reservations` randomly drawn
// reservations, `offloads_each` completions per reservation. Seed-paired:
// every policy sees identical traces, demands and reservation draws.
EvalSummary evaluate_policy(const BaselinePolicy& policy, const ScenarioConfig& cfg,
                            std::uint64_t seed);

struct SweepRow {
    int n_vehicles = 0;
    double adaptive_usage = 0.0;
    double baseline_usage = 0.0;
    double virtualedge_usage = 0.0;
    double gap_vs_baseline = 0.0;
};

// Usage comparison across fleet sizes with the same trained policy (parameter
// sharing makes the checkpoint fleet-size agnostic).
std::vector<SweepRow> sweep_vehicles(const ScenarioConfig& cfg, const PolicyPair& policy,
                                     int n_from, int n_to, std::uint64_t seed,
                                     std::ostream* progress = nullptr);

// Kendall rank correlation; ties contribute zero. Used by the trend checks.
double kendall_tau(const std::vector<double>& series);

}  // namespace edgesim
