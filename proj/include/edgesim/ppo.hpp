#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesim/policy.hpp"

namespace edgesim {

// min(g*A, clip(g, 1-eps, 1+eps)*A) for one transition.
double clipped_surrogate(double ratio, double advantage, double eps);

struct PpoConfig {
    int epochs = 10;
    int minibatch = 256;
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    bool use_adam = true;
    bool use_gae = false;
    double gae_lambda = 0.95;
    std::uint64_t shuffle_seed = 0;
};

struct PpoDiagnostics {
    bool ok = false;
    std::string message;
    double mean_ratio = 0.0;     // over the final inner epoch
    double clip_fraction = 0.0;  // |g - 1| > eps
    double surrogate = 0.0;      // mean clipped surrogate, final inner epoch
    double value_loss = 0.0;
    int minibatches = 0;
};

// Holds optimizer state across updates for one policy pair.
struct PpoOptimizer {
    bool use_adam = true;
    AdamState actor;
    AdamState critic;

    static PpoOptimizer make(const PolicyPair& p, bool adam) {
        return {adam, AdamState(p.actor), AdamState(p.critic)};
    }
};

// Runs the clipped-surrogate update: the actor ascends the PPO objective, the
// critic descends squared error to the returns. A non-finite loss restores the
// entry snapshot and reports ok=false. On success, updates_done is advanced
// (moving the exploration schedule).
PpoDiagnostics ppo_update(PolicyPair& policy, const std::vector<Transition>& batch,
                          const PpoConfig& cfg, PpoOptimizer& opt);

}  // namespace edgesim
