#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgesim/gpr.hpp"
#include "edgesim/ppo.hpp"
#include "edgesim/reservation.hpp"
#include "edgesim/rollout.hpp"

namespace edgesim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingConfig {
    int epochs = 80;
    int transitions_per_epoch = 4000;
    int episode_len = 100;
    double actor_lr = 1e-4;
    double critic_lr = 3e-4;
    double gamma = 0.95;
    double clip_eps = 0.2;
    int ppo_epochs = 10;
    int minibatch = 256;
    std::string optimizer = "adam";  // adam | sgd
    bool use_gae = false;
    double gae_lambda = 0.95;
    int hidden = 128;
    NoiseSchedule noise;
};

struct ReserveConfig {
    int window_offloads = 100;
    int warmup_windows = 40;
    int guided_windows = 60;
    double eta1 = 0.02;
    double eta2 = 0.02;
    double tau = 0.05;
    double noise_var = 1e-4;
    int dataset_cap = 512;
    bool standardize_y = true;
    std::string drift_mode = "descent";  // descent | as_printed
    Eigen::Vector3d alpha{1.0, 1.0, 1.0};
    int rolling_windows = 10;  // trailing windows defining "converged" usage / rolling l_H
};

struct BaselineConfig {
    double grid_step = 0.02;
};

struct EvaluateConfig {
    int n_reservations = 20;   // random reservations to draw
    int offloads_each = 100;   // completed offloads measured per reservation
};

// Whole-experiment configuration; every field has a default and is
// overridable from the JSON scenario file.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    double l_max_ms = 500.0;
    EnvConfig env;  // n_vehicles etc. live in env.sim
    TrainingConfig training;
    ReserveConfig reserve;
    BaselineConfig baseline;
    EvaluateConfig evaluate;

    // Derived helpers
    PpoConfig ppo_config(std::uint64_t shuffle_seed) const;
    EnvConfig env_config() const;  // env with l_max/episode_len propagated

    std::string to_json_string() const;                     // canonical, sorted keys
    static ScenarioConfig from_json_string(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);

    // dotted.path=value assignments applied on top of the JSON document;
    // values parse as JSON literals, falling back to strings
    static ScenarioConfig from_file_with_overrides(const std::string& path,
                                                   const std::vector<std::string>& overrides);
    static ScenarioConfig defaults_with_overrides(const std::vector<std::string>& overrides);

    std::uint64_t config_hash() const;
};

}  // namespace edgesim
