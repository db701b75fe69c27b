#include "edgesim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edgesim {

double clipped_surrogate(double ratio, double advantage, double eps) {
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    return std::min(ratio * advantage, clipped * advantage);
}

PpoDiagnostics ppo_update(PolicyPair& policy, const std::vector<Transition>& batch,
                          const PpoConfig& cfg, PpoOptimizer& opt) {
    PpoDiagnostics diag;
    if (batch.empty()) {
        diag.message = "empty batch";
        return diag;
    }

    const AdvantageResult adv_raw =
        cfg.use_gae ? compute_advantages_gae(batch, policy.gamma, cfg.gae_lambda)
                    : compute_advantages(batch, policy.gamma);
    const std::vector<double> adv = standardized(adv_raw.advantages);
    const std::vector<double>& returns = adv_raw.returns;

    const double stddev = policy.current_std();
    const double var = stddev * stddev;
    const double eps = policy.clip_eps;
    const auto n = batch.size();

    // snapshot for rollback on a non-finite loss
    const Mlp actor_snapshot = policy.actor;
    const Mlp critic_snapshot = policy.critic;

    RngStream shuffle_rng(mix_seed(cfg.shuffle_seed, "ppo-shuffle"));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    double sum_ratio = 0.0, sum_clip = 0.0, sum_surr = 0.0, sum_vloss = 0.0;
    std::int64_t count = 0;
    int minibatches = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the explicit stream for reproducibility
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        const bool last_epoch = (epoch == cfg.epochs - 1);
        if (last_epoch) {
            sum_ratio = sum_clip = sum_surr = sum_vloss = 0.0;
            count = 0;
        }

        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
            const auto bsize = static_cast<Eigen::Index>(stop - start);

            Eigen::MatrixXd obs(bsize, kObsDim);
            Eigen::VectorXd actions(bsize), old_logp(bsize), advantage(bsize), ret(bsize);
            for (Eigen::Index k = 0; k < bsize; ++k) {
                const Transition& t = batch[order[start + static_cast<std::size_t>(k)]];
                obs.row(k) = t.obs.v.transpose();
                actions(k) = t.action;
                old_logp(k) = t.log_prob;
                advantage(k) = adv[order[start + static_cast<std::size_t>(k)]];
                ret(k) = returns[order[start + static_cast<std::size_t>(k)]];
            }

            // actor: maximize the clipped surrogate
            GradientTape actor_tape;
            const Eigen::MatrixXd mean = policy.actor.forward(obs, actor_tape);
            Eigen::VectorXd dmean(bsize);
            double batch_surr = 0.0;
            for (Eigen::Index k = 0; k < bsize; ++k) {
                const double new_logp = gaussian_log_prob(actions(k), mean(k, 0), stddev);
                const double g = std::exp(new_logp - old_logp(k));
                const double s1 = g * advantage(k);
                const double s2 = std::clamp(g, 1.0 - eps, 1.0 + eps) * advantage(k);
                const double surr = std::min(s1, s2);
                batch_surr += surr;
                // gradient of min(s1, s2) wrt the Gaussian mean; zero when the
                // clipped branch is active and g sits outside the trust region
                const double dsurr_dg = (s1 <= s2) ? advantage(k) : 0.0;
                const double dg_dmean = g * (actions(k) - mean(k, 0)) / var;
                dmean(k) = -(dsurr_dg * dg_dmean) / static_cast<double>(bsize);

                if (epoch == cfg.epochs - 1) {
                    sum_ratio += g;
                    sum_clip += (std::abs(g - 1.0) > eps) ? 1.0 : 0.0;
                    sum_surr += surr;
                    ++count;
                }
            }
            if (!std::isfinite(batch_surr)) {
                policy.actor = actor_snapshot;
                policy.critic = critic_snapshot;
                diag.ok = false;
                diag.message = "non-finite actor loss; update aborted";
                return diag;
            }
            const Gradients actor_grads = policy.actor.backward(actor_tape, dmean);

            // critic: minimize squared error to returns
            GradientTape critic_tape;
            const Eigen::MatrixXd value = policy.critic.forward(obs, critic_tape);
            Eigen::VectorXd dvalue(bsize);
            double vloss = 0.0;
            for (Eigen::Index k = 0; k < bsize; ++k) {
                const double err = value(k, 0) - ret(k);
                vloss += err * err;
                dvalue(k) = 2.0 * err / static_cast<double>(bsize);
            }
            vloss /= static_cast<double>(bsize);
            if (!std::isfinite(vloss)) {
                policy.actor = actor_snapshot;
                policy.critic = critic_snapshot;
                diag.ok = false;
                diag.message = "non-finite critic loss; update aborted";
                return diag;
            }
            const Gradients critic_grads = policy.critic.backward(critic_tape, dvalue);

            if (opt.use_adam) {
                opt.actor.apply(policy.actor, actor_grads, cfg.actor_lr);
                opt.critic.apply(policy.critic, critic_grads, cfg.critic_lr);
            } else {
                sgd_step(policy.actor, actor_grads, cfg.actor_lr);
                sgd_step(policy.critic, critic_grads, cfg.critic_lr);
            }
            if (last_epoch) sum_vloss += vloss;
            ++minibatches;
        }
    }

    diag.ok = true;
    diag.mean_ratio = sum_ratio / static_cast<double>(count);
    diag.clip_fraction = sum_clip / static_cast<double>(count);
    diag.surrogate = sum_surr / static_cast<double>(count);
    diag.value_loss = sum_vloss / std::max(1.0, std::ceil(static_cast<double>(n) / cfg.minibatch));
    diag.minibatches = minibatches;
    ++policy.updates_done;
    return diag;
}

}  // namespace edgesim
