#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "edgesim/mlp.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

inline constexpr int kObsDim = 8;

// Normalized per-decision observation: [cpu, ram, speed, snr, server workload,
// x_uplink, x_downlink, x_compute], all mapped into [0,1].
struct Observation {
    Eigen::Matrix<double, kObsDim, 1> v = Eigen::Matrix<double, kObsDim, 1>::Zero();
};

struct ObsRange {
    double lo = 0.0, hi = 1.0;
    double normalize(double x) const {
        const double t = (x - lo) / (hi - lo);
        return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    }
};

struct ObsNorm {
    ObsRange cpu_ghz{1.0, 5.0};
    ObsRange ram_gb{0.0, 32.0};
    ObsRange speed_mps{0.0, 20.0};
    ObsRange snr_db{-10.0, 50.0};
    ObsRange workload_ms{0.0, 5000.0};
};

struct Transition {
    Observation obs;
    double action = 0.0;       // split ratio in [0,1]
    double reward = 0.0;
    Observation next_obs;
    double log_prob = 0.0;     // under the behaviour policy's pre-clip Gaussian
    double value = 0.0;        // V(obs)
    double next_value = 0.0;   // V(next_obs), used to bootstrap truncated tails
    bool done = false;
    int vehicle_id = -1;
    std::int64_t decision_tick = 0;
};

// Exploration noise std, decaying linearly over policy updates.
struct NoiseSchedule {
    double initial = 0.4;
    double final_std = 0.05;
    int decay_updates = 60;

    double std_at(int update_index) const {
        if (decay_updates <= 0) return final_std;
        const double f = static_cast<double>(update_index) / static_cast<double>(decay_updates);
        return f >= 1.0 ? final_std : initial + (final_std - initial) * f;
    }
};

// Shared actor-critic. Every agent consults the identical parameter snapshot
// within one rollout period.
struct PolicyPair {
    Mlp actor;   // sigmoid head: mean of the clipped-Gaussian action
    Mlp critic;  // identity head: V(s)
    NoiseSchedule schedule;
    double gamma = 0.95;
    double clip_eps = 0.2;
    int updates_done = 0;

    static PolicyPair make(int hidden, std::uint64_t seed);
    double current_std() const { return schedule.std_at(updates_done); }

    void save(std::ostream& out) const;
    static PolicyPair load(std::istream& in);
    bool same_parameters(const PolicyPair& other) const {
        return actor == other.actor && critic == other.critic;
    }
};

struct ActResult {
    double action;
    double log_prob;
    double value;
    double mean;
};

double gaussian_log_prob(double x, double mean, double stddev);

// action = clip(mean + std * z, 0, 1) when exploring, mean otherwise; the
// log-probability is evaluated for the pre-clip Gaussian at the stored action.
ActResult act(const PolicyPair& policy, const Observation& obs, bool explore, RngStream& rng);

// r = -latency / L_max
double reward_from_latency(double latency_ms, double l_max_ms);

struct AdvantageResult {
    std::vector<double> advantages;  // raw A_t = G_t - V(s_t)
    std::vector<double> returns;     // discounted Monte Carlo returns G_t
};

// Per-vehicle discounted Monte Carlo returns over each vehicle's own decision
// sequence; truncated tails bootstrap with the stored next_value. Throws on an
// empty batch.
AdvantageResult compute_advantages(const std::vector<Transition>& batch, double gamma);

// GAE(lambda) alternative, selectable by config.
AdvantageResult compute_advantages_gae(const std::vector<Transition>& batch, double gamma,
                                       double lambda);

// zero mean, unit std; degenerate spread leaves values centered only
std::vector<double> standardized(const std::vector<double>& values);

}  // namespace edgesim
