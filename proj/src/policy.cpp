#include "edgesim/policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace edgesim {

PolicyPair PolicyPair::make(int hidden, std::uint64_t seed) {
    PolicyPair p;
    p.actor = Mlp({kObsDim, hidden, hidden, 1}, OutputActivation::Sigmoid, mix_seed(seed, "actor"));
    p.critic = Mlp({kObsDim, hidden, hidden, 1}, OutputActivation::Identity, mix_seed(seed, "critic"));
    return p;
}

void PolicyPair::save(std::ostream& out) const {
    out.write("POLCKPT1", 8);
    actor.save(out);
    critic.save(out);
    out.write(reinterpret_cast<const char*>(&schedule), sizeof(schedule));
    out.write(reinterpret_cast<const char*>(&gamma), sizeof(gamma));
    out.write(reinterpret_cast<const char*>(&clip_eps), sizeof(clip_eps));
    out.write(reinterpret_cast<const char*>(&updates_done), sizeof(updates_done));
}

PolicyPair PolicyPair::load(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != "POLCKPT1")
        throw std::runtime_error("policy checkpoint: bad magic");
    PolicyPair p;
    p.actor = Mlp::load(in);
    p.critic = Mlp::load(in);
    in.read(reinterpret_cast<char*>(&p.schedule), sizeof(p.schedule));
    in.read(reinterpret_cast<char*>(&p.gamma), sizeof(p.gamma));
    in.read(reinterpret_cast<char*>(&p.clip_eps), sizeof(p.clip_eps));
    in.read(reinterpret_cast<char*>(&p.updates_done), sizeof(p.updates_done));
    if (!in) throw std::runtime_error("policy checkpoint: truncated");
    return p;
}

double gaussian_log_prob(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(2.0 * M_PI);
}

ActResult act(const PolicyPair& policy, const Observation& obs, bool explore, RngStream& rng) {
    const double mean = policy.actor.forward_vec(obs.v)(0);
    const double value = policy.critic.forward_vec(obs.v)(0);
    const double stddev = policy.current_std();
    double action = mean;
    if (explore) action = std::clamp(mean + stddev * rng.normal(), 0.0, 1.0);
    return {action, gaussian_log_prob(action, mean, stddev), value, mean};
}

double reward_from_latency(double latency_ms, double l_max_ms) {
    return -latency_ms / l_max_ms;
}

namespace {

// transition indices grouped per vehicle, preserving decision order
std::map<int, std::vector<std::size_t>> group_by_vehicle(const std::vector<Transition>& batch) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < batch.size(); ++i) groups[batch[i].vehicle_id].push_back(i);
    return groups;
}

}  // namespace

AdvantageResult compute_advantages(const std::vector<Transition>& batch, double gamma) {
    if (batch.empty()) throw std::invalid_argument("compute_advantages: empty batch");
    AdvantageResult out;
    out.advantages.resize(batch.size());
    out.returns.resize(batch.size());
    for (const auto& [vehicle, idx] : group_by_vehicle(batch)) {
        (void)vehicle;
        double carry = 0.0;
        bool tail = true;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            const Transition& t = batch[*it];
            double g;
            if (t.done)
                g = t.reward;  // episode ends here
            else if (tail)
                g = t.reward + gamma * t.next_value;  // truncated tail bootstraps
            else
                g = t.reward + gamma * carry;
            carry = g;
            tail = false;
            out.returns[*it] = g;
            out.advantages[*it] = g - t.value;
        }
    }
    return out;
}

AdvantageResult compute_advantages_gae(const std::vector<Transition>& batch, double gamma,
                                       double lambda) {
    if (batch.empty()) throw std::invalid_argument("compute_advantages_gae: empty batch");
    AdvantageResult out;
    out.advantages.resize(batch.size());
    out.returns.resize(batch.size());
    for (const auto& [vehicle, idx] : group_by_vehicle(batch)) {
        (void)vehicle;
        double gae = 0.0;
        double next_value = 0.0;
        bool at_tail = true;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            const Transition& t = batch[*it];
            const double v_next = t.done ? 0.0 : (at_tail ? t.next_value : next_value);
            const double delta = t.reward + gamma * v_next - t.value;
            gae = t.done ? delta : delta + gamma * lambda * gae;
            out.advantages[*it] = gae;
            out.returns[*it] = gae + t.value;
            next_value = t.value;
            at_tail = false;
        }
    }
    return out;
}

std::vector<double> standardized(const std::vector<double>& values) {
    if (values.empty()) return {};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double std = std::sqrt(var / n);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = (values[i] - mean) / (std > 1e-8 ? std : 1.0);
    return out;
}

}  // namespace edgesim
