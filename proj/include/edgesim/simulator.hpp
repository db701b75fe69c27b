#pragma once

#include <Eigen/Core>
#include <deque>
#include <vector>

#include "edgesim/channel.hpp"
#include "edgesim/event_log.hpp"
#include "edgesim/mobility.hpp"
#include "edgesim/task.hpp"

namespace edgesim {

// Reserved fractions of the three leased resources, each in [0,1].
struct ResourceReservation {
    double uplink = 1.0;
    double downlink = 1.0;
    double compute = 1.0;

    Eigen::Vector3d as_vector() const { return {uplink, downlink, compute}; }
    static ResourceReservation from_vector(const Eigen::Vector3d& v) {
        return {v.x(), v.y(), v.z()};
    }
};

struct SimClock {
    Tick now = 0;
    static constexpr double tick_length_ms = 1.0;
};

// Parallel FIFO service queues. Each queue serves its head task at the full
// reserved speed; min-load scheduling picks the queue with the least total
// remaining service time.
struct EdgeServer {
    int n_queues = 4;
    double compute_capacity = 1.0;      // reserved fraction
    double max_speedup = 10.0;          // capacity_to_speedup multiplier
    std::vector<std::deque<int>> queues;

    double service_speed() const { return compute_capacity * max_speedup; }
    double queue_load_ms(const std::vector<Task>& tasks, int q) const;
};

// Min-load queue pick; ties break toward the lowest index.
int schedule_edge(const Task& task, const EdgeServer& server, const std::vector<Task>& tasks);

struct SimConfig {
    int n_vehicles = 4;
    int n_queues = 4;
    double max_speedup = 10.0;
    ChannelConfig channel;
};

// Deterministic 1 ms time-driven engine. Within one step every in-flight task
// receives exactly one tick of service in its current stage; stage boundaries
// happen at the end of the step, so a task enters the next module only after
// finishing the previous one.
class Simulator {
public:
    Simulator(SimConfig cfg, const MobilityTrace* trace);

    void set_reservation(const ResourceReservation& r);
    const ResourceReservation& reservation() const { return reservation_; }

    // Creates the task, resolving the initial stage past any zero-demand
    // stages. Throws std::logic_error if the vehicle already has a task in
    // flight. A task with all-zero demands completes immediately and is
    // reported by the next step().
    int start_offload(int vehicle_id, double split_ratio, const TaskDemands& demands);

    // Advances one 1 ms tick; returns tasks that completed at this boundary.
    std::vector<CompletedTask> step();

    Tick now() const { return clock_.now; }
    bool vehicle_busy(int vehicle_id) const { return inflight_[static_cast<std::size_t>(vehicle_id)] >= 0; }
    int n_vehicles() const { return cfg_.n_vehicles; }

    // total queued + in-service edge work at unit capacity, in ms
    double server_workload_ms() const;
    // channel-quality feature: SNR over the full uplink band at the current position
    double snr_db_for(int vehicle_id) const;

    const std::vector<Task>& tasks() const { return tasks_; }
    const EdgeServer& server() const { return server_; }
    const EventLog& log() const { return log_; }
    EventLog& log() { return log_; }
    const MobilityTrace& trace() const { return *trace_; }

private:
    void enter_stage(Task& t, Stage s, Tick tick);
    void advance_from(Task& t, Tick boundary, std::vector<CompletedTask>& out);
    std::vector<Eigen::Vector2d> positions_now() const;

    SimConfig cfg_;
    const MobilityTrace* trace_;
    SimClock clock_;
    ResourceReservation reservation_;
    EdgeServer server_;
    std::vector<Task> tasks_;
    std::vector<int> inflight_;            // vehicle -> task id or -1
    std::vector<int> pending_immediate_;   // zero-demand tasks completed at creation
    EventLog log_;
};

}  // namespace edgesim
