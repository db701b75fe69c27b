#include "edgesim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace edgesim {

namespace {

std::string format_split(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", a);
    return buf;
}

}  // namespace

std::string BaselinePolicy::label() const {
    switch (kind) {
        case Kind::FullOffload: return "full_offload";
        case Kind::FullLocal: return "full_local";
        case Kind::StaticSplit: return "static_" + format_split(split);
        case Kind::Trained: return "trained";
    }
    return "?";
}

namespace {

Eigen::Vector3d uniform_reservation(RngStream& rng) {
    return {rng.uniform(), rng.uniform(), rng.uniform()};
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> latencies_of(const std::vector<CompletedTask>& done) {
    std::vector<double> out;
    out.reserve(done.size());
    for (const auto& c : done) out.push_back(c.latency_ms);
    return out;
}

}  // namespace

TrainResult train_policy(const ScenarioConfig& cfg, std::uint64_t seed, std::ostream* progress) {
    TrainResult res;
    res.policy = PolicyPair::make(cfg.training.hidden, mix_seed(seed, "policy"));
    res.policy.schedule = cfg.training.noise;
    res.policy.gamma = cfg.training.gamma;
    res.policy.clip_eps = cfg.training.clip_eps;

    if (cfg.training.epochs <= 0) return res;

    OffloadEnv env(cfg.env_config(), mix_seed(seed, "train-env"));
    RngStream resv_rng(mix_seed(seed, "train-resv"));
    PpoOptimizer opt = PpoOptimizer::make(res.policy, cfg.training.optimizer == "adam");

    for (int epoch = 0; epoch < cfg.training.epochs; ++epoch) {
        const Eigen::Vector3d x = uniform_reservation(resv_rng);
        env.set_reservation(ResourceReservation::from_vector(x));

        const std::vector<Transition> batch =
            collect_rollouts(res.policy, env, cfg.training.transitions_per_epoch, true);

        double mean_reward = 0.0;
        for (const auto& t : batch) mean_reward += t.reward;
        mean_reward /= static_cast<double>(batch.size());

        EpochStats stats;
        stats.epoch = epoch;
        stats.mean_reward = mean_reward;
        stats.mean_latency_ms = -mean_reward * cfg.l_max_ms;
        stats.noise_std = res.policy.current_std();
        stats.reservation = x;

        const PpoDiagnostics diag = ppo_update(
            res.policy, batch, cfg.ppo_config(mix_seed(mix_seed(seed, "shuffle"), static_cast<std::uint64_t>(epoch))),
            opt);
        stats.update_ok = diag.ok;
        stats.clip_fraction = diag.clip_fraction;
        stats.mean_ratio = diag.mean_ratio;
        stats.value_loss = diag.value_loss;
        res.curve.push_back(stats);

        if (progress)
            (*progress) << "epoch " << epoch << " latency " << stats.mean_latency_ms << " ms, reward "
                        << mean_reward << ", clip " << diag.clip_fraction
                        << (diag.ok ? "" : (" [" + diag.message + "]")) << "\n";
    }
    return res;
}

namespace {

// Shared phase-2 controller: warm-up then expected-gradient primal-dual.
ReservationRun reservation_core(const ActionSource& src, const ScenarioConfig& cfg,
                                std::uint64_t seed, std::ostream* progress) {
    EnvConfig env_cfg = cfg.env_config();
    env_cfg.episode_len = 0;  // phase 2 rolls out continuously
    OffloadEnv env(env_cfg, mix_seed(seed, "phase2-env"));
    RngStream warmup_rng(mix_seed(seed, "phase2-warmup"));

    const auto& rc = cfg.reserve;
    GprDataset dataset(rc.noise_var, static_cast<std::size_t>(rc.dataset_cap));

    ReservationRun run;
    std::vector<double> recent_lh;
    auto rolling = [&](double lh) {
        recent_lh.push_back(lh);
        const std::size_t keep = static_cast<std::size_t>(std::max(1, rc.rolling_windows));
        const std::size_t start = recent_lh.size() > keep ? recent_lh.size() - keep : 0;
        double s = 0.0;
        for (std::size_t i = start; i < recent_lh.size(); ++i) s += recent_lh[i];
        return s / static_cast<double>(recent_lh.size() - start);
    };

    auto run_window = [&](const Eigen::Vector3d& x) {
        env.set_reservation(ResourceReservation::from_vector(x));
        const auto done = env.run(rc.window_offloads, src);
        return observe_window(latencies_of(done));
    };

    int window = 0;
    Eigen::Vector3d x = uniform_reservation(warmup_rng);
    for (int w = 0; w < rc.warmup_windows; ++w, ++window) {
        const double lh = run_window(x);
        dataset.add(x, lh);
        run.trajectory.push_back({window, true, x, 0.0, lh, rc.alpha.dot(x), rolling(lh)});
        if (progress) (*progress) << "warmup " << w << " l_H " << lh << " ms\n";
        x = uniform_reservation(warmup_rng);
    }

    // Guided phase starts from the cheapest warm-up point that met the bound
    // (fallback: the lowest observed l_H).
    ReservationState state;
    state.eta1 = rc.eta1;
    state.eta2 = rc.eta2;
    state.tau = rc.tau;
    state.l_max_ms = cfg.l_max_ms;
    state.alpha = rc.alpha;
    state.latency_scale = cfg.l_max_ms;
    state.drift = rc.drift_mode == "as_printed" ? DriftMode::AsPrinted : DriftMode::Descent;
    state.lambda = 0.0;
    {
        double best_usage = std::numeric_limits<double>::infinity();
        double best_lh = std::numeric_limits<double>::infinity();
        Eigen::Vector3d best_x = Eigen::Vector3d::Ones();
        bool any_feasible = false;
        for (const auto& rec : run.trajectory) {
            if (rec.l_h_ms <= cfg.l_max_ms && rec.usage < best_usage) {
                best_usage = rec.usage;
                best_x = rec.x;
                any_feasible = true;
            }
            if (rec.l_h_ms < best_lh) {
                best_lh = rec.l_h_ms;
                if (!any_feasible) best_x = rec.x;
            }
        }
        state.x = run.trajectory.empty() ? x : best_x;
    }

    for (int w = 0; w < rc.guided_windows; ++w, ++window) {
        const double lh = run_window(state.x);
        dataset.add(state.x, lh);
        run.trajectory.push_back(
            {window, false, state.x, state.lambda, lh, rc.alpha.dot(state.x), rolling(lh)});
        if (progress)
            (*progress) << "window " << w << " x (" << state.x.transpose() << ") lambda "
                        << state.lambda << " l_H " << lh << " ms\n";

        const GprModel model = GprModel::fit(dataset, rc.standardize_y);
        const Eigen::Vector3d grad = expected_gradient(model, state.x, rc.tau);
        state = update_reservation(state, grad, lh);
    }

    run.final_state = state;
    const int tail = std::min<int>(rc.rolling_windows, rc.guided_windows);
    if (tail > 0) {
        double usage = 0.0, lh = 0.0;
        for (std::size_t i = run.trajectory.size() - static_cast<std::size_t>(tail);
             i < run.trajectory.size(); ++i) {
            usage += run.trajectory[i].usage;
            lh += run.trajectory[i].l_h_ms;
        }
        run.converged_usage = usage / tail;
        run.converged_l_h_ms = lh / tail;
    }
    return run;
}

}  // namespace

ReservationRun run_reservation_loop(const PolicyPair& policy, const ScenarioConfig& cfg,
                                    std::uint64_t seed, std::ostream* progress) {
    return reservation_core(ActionSource::network(policy, false), cfg, seed, progress);
}

ReservationRun run_virtualedge(const ScenarioConfig& cfg, std::uint64_t seed,
                               std::ostream* progress) {
    return reservation_core(ActionSource::fixed(0.0), cfg, seed, progress);
}

CalibrationResult baseline_calibrate(const BaselinePolicy& policy, const ScenarioConfig& cfg,
                                     std::uint64_t seed) {
    const double step = cfg.baseline.grid_step;
    CalibrationResult res;

    auto probe = [&](const Eigen::Vector3d& x) {
        EnvConfig env_cfg = cfg.env_config();
        env_cfg.episode_len = 0;
        OffloadEnv env(env_cfg, mix_seed(seed, "calibrate"));
        env.set_reservation(ResourceReservation::from_vector(x));
        double lh;
        try {
            const auto done = env.run(cfg.reserve.window_offloads, policy.source());
            lh = observe_window(latencies_of(done));
        } catch (const RolloutTimeout&) {
            lh = std::numeric_limits<double>::infinity();
        }
        const bool feasible = lh <= cfg.l_max_ms;
        res.probes.push_back({x, lh, feasible});
        return feasible;
    };

    if (!probe(Eigen::Vector3d::Ones())) {
        res.feasible = false;
        res.reservation = Eigen::Vector3d::Ones();
        res.usage = cfg.reserve.alpha.dot(res.reservation);
        return res;
    }
    res.feasible = true;

    // uniform shrink along the diagonal
    double c_feasible = 1.0;
    const int max_k = static_cast<int>(std::floor(1.0 / step + 1e-9));
    for (int k = 1; k < max_k; ++k) {
        const double c = 1.0 - step * k;
        if (probe(Eigen::Vector3d::Constant(c)))
            c_feasible = c;
        else
            break;
    }
    Eigen::Vector3d x = Eigen::Vector3d::Constant(c_feasible);

    // per-coordinate refinement, greedy in resource order
    for (int m = 0; m < 3; ++m) {
        while (x(m) - step > step * 0.5) {
            Eigen::Vector3d trial = x;
            trial(m) -= step;
            if (probe(trial))
                x = trial;
            else
                break;
        }
    }

    res.reservation = x;
    res.usage = cfg.reserve.alpha.dot(x);
    return res;
}

EvalSummary evaluate_policy(const BaselinePolicy& policy, const ScenarioConfig& cfg,
                            std::uint64_t seed) {
    EvalSummary sum;
    sum.label = policy.label();

    EnvConfig env_cfg = cfg.env_config();
    env_cfg.episode_len = 0;
    OffloadEnv env(env_cfg, mix_seed(seed, "eval-env"));
    RngStream resv_rng(mix_seed(seed, "eval-resv"));

    double local = 0, uplink = 0, queue = 0, edge = 0, broadcast = 0;
    for (int r = 0; r < cfg.evaluate.n_reservations; ++r) {
        env.set_reservation(ResourceReservation::from_vector(uniform_reservation(resv_rng)));
        const auto done = env.run(cfg.evaluate.offloads_each, policy.source());
        for (const auto& c : done) {
            sum.latencies_ms.push_back(c.latency_ms);
            local += static_cast<double>(c.ticks_local);
            uplink += static_cast<double>(c.ticks_uplink);
            queue += static_cast<double>(c.ticks_queue);
            edge += static_cast<double>(c.ticks_edge);
            broadcast += static_cast<double>(c.ticks_broadcast);
        }
    }
    const double n = std::max<std::size_t>(1, sum.latencies_ms.size());
    sum.mean_latency_ms = mean_of(sum.latencies_ms);
    sum.stage_local = local / n;
    sum.stage_uplink = uplink / n;
    sum.stage_queue = queue / n;
    sum.stage_edge = edge / n;
    sum.stage_broadcast = broadcast / n;
    return sum;
}

std::vector<SweepRow> sweep_vehicles(const ScenarioConfig& cfg, const PolicyPair& policy,
                                     int n_from, int n_to, std::uint64_t seed,
                                     std::ostream* progress) {
    std::vector<SweepRow> rows;
    for (int n = n_from; n <= n_to; ++n) {
        ScenarioConfig c = cfg;
        c.env.sim.n_vehicles = n;
        SweepRow row;
        row.n_vehicles = n;
        row.baseline_usage = baseline_calibrate(BaselinePolicy::full_offload(), c, seed).usage;
        row.adaptive_usage = run_reservation_loop(policy, c, seed).converged_usage;
        row.virtualedge_usage = run_virtualedge(c, seed).converged_usage;
        row.gap_vs_baseline = row.baseline_usage - row.adaptive_usage;
        rows.push_back(row);
        if (progress)
            (*progress) << "n=" << n << " baseline " << row.baseline_usage << " adaptive "
                        << row.adaptive_usage << " virtualedge " << row.virtualedge_usage << "\n";
    }
    return rows;
}

double kendall_tau(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 2) return 0.0;
    long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = series[j] - series[i];
            if (d > 0) ++concordant;
            else if (d < 0) ++discordant;
        }
    const double total = static_cast<double>(n * (n - 1)) / 2.0;
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) / total;
}

}  // namespace edgesim
