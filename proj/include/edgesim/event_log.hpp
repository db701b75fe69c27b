#pragma once

#include <iosfwd>
#include <vector>

#include "edgesim/task.hpp"

namespace edgesim {

enum class EventType { TaskCreated, StageEntered, StageExited, TaskCompleted };

std::string_view event_name(EventType t);

struct SimEvent {
    Tick tick;  // boundary time: stage intervals are [entered, exited)
    int task_id;
    int vehicle_id;
    Stage stage;
    EventType type;

    bool operator==(const SimEvent&) const = default;
};

// Replayable record of every stage boundary. Replaying the enter/exit pairs
// reconstructs each task's latency decomposition exactly.
class EventLog {
public:
    void record(Tick tick, int task_id, int vehicle_id, Stage stage, EventType type) {
        events_.push_back({tick, task_id, vehicle_id, stage, type});
    }
    const std::vector<SimEvent>& events() const { return events_; }
    void clear() { events_.clear(); }

    // CSV schema: tick,task_id,vehicle_id,stage,event
    void export_csv(std::ostream& out) const;

    // Stage durations for one task recomputed purely from enter/exit pairs.
    struct StageBreakdown {
        Tick local = 0, uplink = 0, queue = 0, edge = 0, broadcast = 0;
        Tick total() const { return local + uplink + queue + edge + broadcast; }
    };
    StageBreakdown replay_task(int task_id) const;

private:
    std::vector<SimEvent> events_;
};

}  // namespace edgesim
