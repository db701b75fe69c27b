#include "edgesim/rollout.hpp"

#include <algorithm>
#include <sstream>

namespace edgesim {

OffloadEnv::OffloadEnv(EnvConfig cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
    const auto n = static_cast<std::size_t>(cfg_.sim.n_vehicles);
    RngStream fleet_rng(mix_seed(seed_, "fleet"));
    fleet_cpu_.resize(n);
    fleet_ram_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        fleet_cpu_[v] = fleet_rng.uniform(cfg_.fleet.cpu_ghz_lo, cfg_.fleet.cpu_ghz_hi);
        fleet_ram_[v] = fleet_rng.uniform(cfg_.fleet.ram_gb_lo, cfg_.fleet.ram_gb_hi);
    }
    pending_.resize(n);
    decisions_done_.assign(cfg_.sim.n_vehicles, 0);
    awaiting_reset_.assign(n, false);
}

void OffloadEnv::set_reservation(const ResourceReservation& r) {
    reservation_ = r;
    if (sim_) sim_->set_reservation(r);
}

void OffloadEnv::rebuild_world() {
    const auto n = static_cast<std::size_t>(cfg_.sim.n_vehicles);
    trace_ = std::make_unique<MobilityTrace>(MobilityTrace::generate(
        cfg_.sim.n_vehicles, 0, mix_seed(mix_seed(seed_, "trace"), static_cast<std::uint64_t>(episode_)),
        cfg_.mobility));
    sim_ = std::make_unique<Simulator>(cfg_.sim, trace_.get());
    sim_->set_reservation(reservation_);
    demand_rng_.clear();
    explore_rng_.clear();
    for (std::size_t v = 0; v < n; ++v) {
        demand_rng_.push_back(RngStream(
            mix_seed(mix_seed(mix_seed(seed_, "demand"), v), static_cast<std::uint64_t>(episode_))));
        explore_rng_.push_back(RngStream(
            mix_seed(mix_seed(mix_seed(seed_, "explore"), v), static_cast<std::uint64_t>(episode_))));
    }
    decisions_done_.assign(cfg_.sim.n_vehicles, 0);
    awaiting_reset_.assign(n, false);
    for (auto& p : pending_) p.active = false;
    world_ready_ = true;
    ++episode_;
}

Observation OffloadEnv::observe(int vehicle) const {
    const auto v = static_cast<std::size_t>(vehicle);
    Observation o;
    o.v << cfg_.norm.cpu_ghz.normalize(fleet_cpu_[v]),
        cfg_.norm.ram_gb.normalize(fleet_ram_[v]),
        cfg_.norm.speed_mps.normalize(trace_->speed_mps(vehicle, sim_->now())),
        cfg_.norm.snr_db.normalize(sim_->snr_db_for(vehicle)),
        cfg_.norm.workload_ms.normalize(sim_->server_workload_ms()),
        reservation_.uplink, reservation_.downlink, reservation_.compute;
    return o;
}

void OffloadEnv::make_decision(int vehicle, const ActionSource& src) {
    const auto v = static_cast<std::size_t>(vehicle);
    const Observation obs = observe(vehicle);
    ActResult r{};
    if (src.kind == ActionSource::Kind::Network) {
        r = act(*src.policy, obs, src.explore, explore_rng_[v]);
    } else {
        r = {src.constant, 0.0, 0.0, src.constant};
    }
    const RawDemand raw = sample_demands(cfg_.workload, demand_rng_[v]);
    const TaskDemands demands = split_demand(raw, r.action, cfg_.workload);
    sim_->start_offload(vehicle, r.action, demands);
    pending_[v] = {obs, r.action, r.log_prob, r.value, sim_->now(), true};
    ++decisions_done_[v];
}

std::vector<CompletedTask> OffloadEnv::run(int n_completions, const ActionSource& src,
                                           std::vector<Transition>* transitions) {
    if (!world_ready_) rebuild_world();
    const int n_vehicles = cfg_.sim.n_vehicles;

    // make sure every idle vehicle has an offload in flight
    for (int v = 0; v < n_vehicles; ++v)
        if (!sim_->vehicle_busy(v) && !pending_[static_cast<std::size_t>(v)].active)
            make_decision(v, src);

    std::vector<CompletedTask> collected;
    collected.reserve(static_cast<std::size_t>(n_completions));
    Tick last_progress = sim_->now();

    while (static_cast<int>(collected.size()) < n_completions) {
        const auto completions = sim_->step();
        if (!completions.empty()) last_progress = sim_->now();
        if (sim_->now() - last_progress > cfg_.timeout_ticks) {
            std::ostringstream msg;
            msg << "rollout stalled: no completion for " << cfg_.timeout_ticks
                << " ticks at tick " << sim_->now() << " under reservation ("
                << reservation_.uplink << "," << reservation_.downlink << ","
                << reservation_.compute << ")";
            throw RolloutTimeout(msg.str());
        }

        for (const auto& done_task : completions) {
            const int vehicle = done_task.vehicle_id;
            const auto v = static_cast<std::size_t>(vehicle);
            const Pending p = pending_[v];
            pending_[v].active = false;

            const bool episode_over =
                cfg_.episode_len > 0 && decisions_done_[v] >= cfg_.episode_len;

            Transition tr;
            if (transitions) {
                tr.obs = p.obs;
                tr.action = p.action;
                tr.log_prob = p.log_prob;
                tr.value = p.value;
                tr.reward = reward_from_latency(done_task.latency_ms, cfg_.l_max_ms);
                tr.next_obs = observe(vehicle);
                tr.done = episode_over;
                tr.vehicle_id = vehicle;
                tr.decision_tick = p.decision_tick;
            }

            if (episode_over) {
                awaiting_reset_[v] = true;
            } else {
                make_decision(vehicle, src);
                if (transitions) tr.next_value = pending_[v].value;
            }
            if (transitions) {
                if (episode_over && src.kind == ActionSource::Kind::Network)
                    tr.next_value = src.policy->critic.forward_vec(tr.next_obs.v)(0);
                transitions->push_back(tr);
            }
            collected.push_back(done_task);
        }

        if (cfg_.episode_len > 0 &&
            std::all_of(awaiting_reset_.begin(), awaiting_reset_.end(), [](bool b) { return b; })) {
            rebuild_world();
            for (int v = 0; v < n_vehicles; ++v) make_decision(v, src);
        }
    }

    if (static_cast<int>(collected.size()) > n_completions) collected.resize(static_cast<std::size_t>(n_completions));
    return collected;
}

std::vector<Transition> collect_rollouts(const PolicyPair& policy, OffloadEnv& env,
                                         int n_transitions, bool explore) {
    std::vector<Transition> batch;
    batch.reserve(static_cast<std::size_t>(n_transitions));
    env.run(n_transitions, ActionSource::network(policy, explore), &batch);
    if (static_cast<int>(batch.size()) > n_transitions) batch.resize(static_cast<std::size_t>(n_transitions));
    return batch;
}

}  // namespace edgesim
