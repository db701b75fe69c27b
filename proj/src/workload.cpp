#include "edgesim/workload.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgesim {

namespace {
double truncated_normal(RngStream& rng, double mean, double std) {
    return std::max(rng.normal(mean, std), 0.01 * mean);
}
}  // namespace

RawDemand sample_demands(const WorkloadStats& stats, RngStream& rng) {
    RawDemand d;
    d.image_bytes = truncated_normal(rng, stats.image_bytes_mean, stats.image_bytes_std);
    d.local_full_ms = truncated_normal(rng, stats.local_full_ms_mean, stats.local_full_ms_std);
    d.edge_full_ms = truncated_normal(rng, stats.edge_full_ms_mean, stats.edge_full_ms_std);
    d.update_bytes = truncated_normal(rng, stats.update_bytes_mean, stats.update_bytes_std);
    return d;
}

TaskDemands split_demand(const RawDemand& raw, double a, const WorkloadStats& stats) {
    if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument("split_demand: split ratio outside [0,1]");
    TaskDemands t;
    t.local_ms = a * raw.local_full_ms;
    t.edge_ms_unit = (1.0 - a) * raw.edge_full_ms;
    t.uplink_bytes = (1.0 - a) * raw.image_bytes + a * stats.min_uplink_bytes;
    t.broadcast_bytes = raw.update_bytes;
    return t;
}

}  // namespace edgesim
