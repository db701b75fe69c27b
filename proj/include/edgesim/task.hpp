#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "edgesim/workload.hpp"

namespace edgesim {

using Tick = std::int64_t;

enum class Stage { LocalCompute, Uplink, EdgeQueue, EdgeCompute, Broadcast, Done };

std::string_view stage_name(Stage s);

// One vehicular offload moving through local compute, uplink, edge service
// and downlink broadcast. Counters are non-negative and non-increasing; a
// stage is exited exactly when its counter reaches zero.
struct Task {
    int id = -1;
    int vehicle_id = -1;
    Tick created_at = 0;
    Stage stage = Stage::LocalCompute;

    double remaining_local_ms = 0.0;
    double uplink_bytes_remaining = 0.0;
    double remaining_edge_ms_unit = 0.0;  // at unit service speed
    double broadcast_bytes_remaining = 0.0;

    double split_ratio = 0.0;
    std::optional<Tick> completed_at;
    int queue_index = -1;

    // whole-tick attribution of the task's lifetime, one stage per tick
    Tick ticks_local = 0;
    Tick ticks_uplink = 0;
    Tick ticks_queue = 0;
    Tick ticks_edge = 0;
    Tick ticks_broadcast = 0;

    double latency_ms() const {
        return completed_at ? static_cast<double>(*completed_at - created_at) : -1.0;
    }
};

struct CompletedTask {
    int task_id;
    int vehicle_id;
    Tick created_at;
    Tick completed_at;
    double latency_ms;
    double split_ratio;
    Tick ticks_local, ticks_uplink, ticks_queue, ticks_edge, ticks_broadcast;
};

}  // namespace edgesim
