#include "edgesim/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>

#include "edgesim/csv.hpp"

namespace edgesim {

namespace {
constexpr double kDoneEps = 1e-9;
}

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::LocalCompute: return "local_compute";
        case Stage::Uplink: return "uplink";
        case Stage::EdgeQueue: return "edge_queue";
        case Stage::EdgeCompute: return "edge_compute";
        case Stage::Broadcast: return "broadcast";
        case Stage::Done: return "done";
    }
    return "?";
}

std::string_view event_name(EventType t) {
    switch (t) {
        case EventType::TaskCreated: return "created";
        case EventType::StageEntered: return "entered";
        case EventType::StageExited: return "exited";
        case EventType::TaskCompleted: return "completed";
    }
    return "?";
}

void EventLog::export_csv(std::ostream& out) const {
    CsvWriter w(out);
    w.row("tick", "task_id", "vehicle_id", "stage", "event");
    for (const auto& e : events_)
        w.row(e.tick, e.task_id, e.vehicle_id, std::string(stage_name(e.stage)),
              std::string(event_name(e.type)));
}

EventLog::StageBreakdown EventLog::replay_task(int task_id) const {
    StageBreakdown b;
    Tick entered = 0;
    for (const auto& e : events_) {
        if (e.task_id != task_id) continue;
        if (e.type == EventType::StageEntered) entered = e.tick;
        if (e.type == EventType::StageExited) {
            const Tick d = e.tick - entered;
            switch (e.stage) {
                case Stage::LocalCompute: b.local += d; break;
                case Stage::Uplink: b.uplink += d; break;
                case Stage::EdgeQueue: b.queue += d; break;
                case Stage::EdgeCompute: b.edge += d; break;
                case Stage::Broadcast: b.broadcast += d; break;
                case Stage::Done: break;
            }
        }
    }
    return b;
}

double EdgeServer::queue_load_ms(const std::vector<Task>& tasks, int q) const {
    double load = 0.0;
    for (int id : queues[static_cast<std::size_t>(q)])
        load += tasks[static_cast<std::size_t>(id)].remaining_edge_ms_unit;
    return load;
}

int schedule_edge(const Task& task, const EdgeServer& server, const std::vector<Task>& tasks) {
    assert(task.stage == Stage::EdgeQueue);
    (void)task;
    int best = 0;
    double best_load = server.queue_load_ms(tasks, 0);
    for (int q = 1; q < server.n_queues; ++q) {
        const double load = server.queue_load_ms(tasks, q);
        if (load < best_load) {
            best = q;
            best_load = load;
        }
    }
    return best;
}

Simulator::Simulator(SimConfig cfg, const MobilityTrace* trace)
    : cfg_(cfg), trace_(trace) {
    if (trace_ == nullptr) throw std::invalid_argument("simulator: null trace");
    if (trace_->n_vehicles() < cfg_.n_vehicles)
        throw std::invalid_argument("simulator: trace covers fewer vehicles than configured");
    server_.n_queues = cfg_.n_queues;
    server_.max_speedup = cfg_.max_speedup;
    server_.queues.resize(static_cast<std::size_t>(cfg_.n_queues));
    inflight_.assign(static_cast<std::size_t>(cfg_.n_vehicles), -1);
}

void Simulator::set_reservation(const ResourceReservation& r) {
    reservation_ = r;
    server_.compute_capacity = r.compute;
}

void Simulator::enter_stage(Task& t, Stage s, Tick tick) {
    t.stage = s;
    log_.record(tick, t.id, t.vehicle_id, s, EventType::StageEntered);
}

// Moves a task past its just-finished stage into the next stage with demand,
// skipping empty stages entirely.
void Simulator::advance_from(Task& t, Tick boundary, std::vector<CompletedTask>& out) {
    const Stage from = t.stage;
    if (from != Stage::Done)
        log_.record(boundary, t.id, t.vehicle_id, from, EventType::StageExited);

    auto finish = [&] {
        t.stage = Stage::Done;
        t.completed_at = boundary;
        log_.record(boundary, t.id, t.vehicle_id, Stage::Done, EventType::TaskCompleted);
        if (t.vehicle_id >= 0) inflight_[static_cast<std::size_t>(t.vehicle_id)] = -1;
        out.push_back({t.id, t.vehicle_id, t.created_at, boundary, t.latency_ms(), t.split_ratio,
                       t.ticks_local, t.ticks_uplink, t.ticks_queue, t.ticks_edge,
                       t.ticks_broadcast});
    };

    auto enqueue = [&] {
        enter_stage(t, Stage::EdgeQueue, boundary);
        const int q = schedule_edge(t, server_, tasks_);
        t.queue_index = q;
        auto& queue = server_.queues[static_cast<std::size_t>(q)];
        queue.push_back(t.id);
        if (queue.front() == t.id) {
            // empty queue: service starts with the next tick, no queue wait
            log_.record(boundary, t.id, t.vehicle_id, Stage::EdgeQueue, EventType::StageExited);
            enter_stage(t, Stage::EdgeCompute, boundary);
        }
    };

    switch (from) {
        case Stage::LocalCompute:
            if (t.uplink_bytes_remaining > kDoneEps) { enter_stage(t, Stage::Uplink, boundary); return; }
            [[fallthrough]];
        case Stage::Uplink:
            if (t.remaining_edge_ms_unit > kDoneEps) { enqueue(); return; }
            [[fallthrough]];
        case Stage::EdgeCompute:
            if (t.broadcast_bytes_remaining > kDoneEps) { enter_stage(t, Stage::Broadcast, boundary); return; }
            [[fallthrough]];
        case Stage::Broadcast:
            finish();
            return;
        default:
            throw std::logic_error("advance_from: unexpected stage");
    }
}

int Simulator::start_offload(int vehicle_id, double split_ratio, const TaskDemands& demands) {
    if (vehicle_id < 0 || vehicle_id >= cfg_.n_vehicles)
        throw std::invalid_argument("start_offload: bad vehicle id");
    if (inflight_[static_cast<std::size_t>(vehicle_id)] >= 0)
        throw std::logic_error("start_offload: vehicle already has a task in flight");

    Task t;
    t.id = static_cast<int>(tasks_.size());
    t.vehicle_id = vehicle_id;
    t.created_at = clock_.now;
    t.split_ratio = split_ratio;
    t.remaining_local_ms = demands.local_ms;
    t.uplink_bytes_remaining = demands.uplink_bytes;
    t.remaining_edge_ms_unit = demands.edge_ms_unit;
    t.broadcast_bytes_remaining = demands.broadcast_bytes;
    log_.record(clock_.now, t.id, vehicle_id, Stage::LocalCompute, EventType::TaskCreated);

    tasks_.push_back(t);
    Task& task = tasks_.back();
    inflight_[static_cast<std::size_t>(vehicle_id)] = task.id;

    if (task.remaining_local_ms > kDoneEps) {
        enter_stage(task, Stage::LocalCompute, clock_.now);
    } else if (task.uplink_bytes_remaining > kDoneEps) {
        enter_stage(task, Stage::Uplink, clock_.now);
    } else if (task.remaining_edge_ms_unit > kDoneEps) {
        enter_stage(task, Stage::EdgeQueue, clock_.now);
        const int q = schedule_edge(task, server_, tasks_);
        task.queue_index = q;
        auto& queue = server_.queues[static_cast<std::size_t>(q)];
        queue.push_back(task.id);
        if (queue.front() == task.id) {
            log_.record(clock_.now, task.id, vehicle_id, Stage::EdgeQueue, EventType::StageExited);
            enter_stage(task, Stage::EdgeCompute, clock_.now);
        }
    } else if (task.broadcast_bytes_remaining > kDoneEps) {
        enter_stage(task, Stage::Broadcast, clock_.now);
    } else {
        // degenerate all-zero task: completes at creation, reported next step
        task.stage = Stage::Done;
        task.completed_at = clock_.now;
        log_.record(clock_.now, task.id, vehicle_id, Stage::Done, EventType::TaskCompleted);
        inflight_[static_cast<std::size_t>(vehicle_id)] = -1;
        pending_immediate_.push_back(task.id);
    }
    return task.id;
}

std::vector<Eigen::Vector2d> Simulator::positions_now() const {
    std::vector<Eigen::Vector2d> pos(static_cast<std::size_t>(cfg_.n_vehicles));
    for (int v = 0; v < cfg_.n_vehicles; ++v) pos[static_cast<std::size_t>(v)] = trace_->position(v, clock_.now);
    return pos;
}

std::vector<CompletedTask> Simulator::step() {
    std::vector<CompletedTask> out;
    for (int id : pending_immediate_) {
        const Task& t = tasks_[static_cast<std::size_t>(id)];
        out.push_back({t.id, t.vehicle_id, t.created_at, *t.completed_at, t.latency_ms(),
                       t.split_ratio, 0, 0, 0, 0, 0});
    }
    pending_immediate_.clear();

    const Tick t_now = clock_.now;
    const Tick boundary = t_now + 1;
    const auto positions = positions_now();

    // gather in-flight tasks (at most one per vehicle)
    std::vector<int> active;
    active.reserve(inflight_.size());
    for (int id : inflight_)
        if (id >= 0) active.push_back(id);
    std::sort(active.begin(), active.end());

    // service phase: every active task gets one tick in its current stage
    std::vector<int> uplink_vehicles;
    int broadcast_flows = 0;
    for (int id : active) {
        Task& t = tasks_[static_cast<std::size_t>(id)];
        switch (t.stage) {
            case Stage::LocalCompute:
                t.remaining_local_ms -= SimClock::tick_length_ms;
                ++t.ticks_local;
                break;
            case Stage::Uplink:
                uplink_vehicles.push_back(t.vehicle_id);
                ++t.ticks_uplink;
                break;
            case Stage::EdgeQueue:
                ++t.ticks_queue;
                break;
            case Stage::EdgeCompute:
                t.remaining_edge_ms_unit -= server_.service_speed() * SimClock::tick_length_ms;
                ++t.ticks_edge;
                break;
            case Stage::Broadcast:
                ++broadcast_flows;
                ++t.ticks_broadcast;
                break;
            case Stage::Done:
                break;
        }
    }

    if (!uplink_vehicles.empty()) {
        const auto rates = per_vehicle_rate(uplink_vehicles, reservation_.uplink, positions,
                                            trace_->bs_position(), cfg_.channel,
                                            cfg_.channel.max_bandwidth_uplink_hz);
        for (const auto& r : rates) {
            const int id = inflight_[static_cast<std::size_t>(r.vehicle)];
            Task& t = tasks_[static_cast<std::size_t>(id)];
            t.uplink_bytes_remaining -= r.rate_bps * SimClock::tick_length_ms * 1e-3 / 8.0;
        }
    }
    if (broadcast_flows > 0) {
        const double rate = broadcast_rate_bps(broadcast_flows, reservation_.downlink, positions,
                                               trace_->bs_position(), cfg_.channel);
        const double bytes = rate * SimClock::tick_length_ms * 1e-3 / 8.0;
        for (int id : active) {
            Task& t = tasks_[static_cast<std::size_t>(id)];
            if (t.stage == Stage::Broadcast) t.broadcast_bytes_remaining -= bytes;
        }
    }

    // boundary phase: finished tasks leave their stage and enter the next one
    for (int id : active) {
        Task& t = tasks_[static_cast<std::size_t>(id)];
        switch (t.stage) {
            case Stage::Broadcast:
                if (t.broadcast_bytes_remaining <= kDoneEps) {
                    t.broadcast_bytes_remaining = 0.0;
                    advance_from(t, boundary, out);
                }
                break;
            case Stage::EdgeCompute:
                if (t.remaining_edge_ms_unit <= kDoneEps) {
                    t.remaining_edge_ms_unit = 0.0;
                    auto& queue = server_.queues[static_cast<std::size_t>(t.queue_index)];
                    assert(!queue.empty() && queue.front() == t.id);
                    queue.pop_front();
                    if (!queue.empty()) {
                        Task& next = tasks_[static_cast<std::size_t>(queue.front())];
                        log_.record(boundary, next.id, next.vehicle_id, Stage::EdgeQueue,
                                    EventType::StageExited);
                        enter_stage(next, Stage::EdgeCompute, boundary);
                    }
                    advance_from(t, boundary, out);
                }
                break;
            default:
                break;
        }
    }
    for (int id : active) {
        Task& t = tasks_[static_cast<std::size_t>(id)];
        if (t.stage == Stage::Uplink && t.uplink_bytes_remaining <= kDoneEps) {
            t.uplink_bytes_remaining = 0.0;
            advance_from(t, boundary, out);
        }
    }
    for (int id : active) {
        Task& t = tasks_[static_cast<std::size_t>(id)];
        if (t.stage == Stage::LocalCompute && t.remaining_local_ms <= kDoneEps) {
            t.remaining_local_ms = 0.0;
            advance_from(t, boundary, out);
        }
    }

    clock_.now = boundary;
    std::sort(out.begin(), out.end(),
              [](const CompletedTask& a, const CompletedTask& b) { return a.task_id < b.task_id; });
    return out;
}

double Simulator::server_workload_ms() const {
    double total = 0.0;
    for (int q = 0; q < server_.n_queues; ++q) total += server_.queue_load_ms(tasks_, q);
    return total;
}

double Simulator::snr_db_for(int vehicle_id) const {
    const double dist = trace_->distance_to_bs(vehicle_id, clock_.now);
    return snr_db(dist, cfg_.channel.max_bandwidth_uplink_hz, cfg_.channel);
}

}  // namespace edgesim
