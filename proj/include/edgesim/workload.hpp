#pragma once

#include "edgesim/rng.hpp"

namespace edgesim {

// Per-offload demand statistics. Size means/stds come from profiling a
// monocular SLAM pipeline; see README for the provenance of the defaults.
struct WorkloadStats {
    double image_bytes_mean = 353.5e3;
    double image_bytes_std = 22.7e3;
    double edge_full_ms_mean = 286.54;
    double edge_full_ms_std = 68.89;
    double local_full_ms_mean = 609.27;
    double local_full_ms_std = 165.44;
    double update_bytes_mean = 50e3;  // broadcast payload
    double update_bytes_std = 0.0;
    double min_uplink_bytes = 35e3;   // residual upload when everything runs locally
};

// One sampled offload before the split ratio is applied.
struct RawDemand {
    double image_bytes;
    double local_full_ms;
    double edge_full_ms;
    double update_bytes;
};

// Stage counters for one task after applying the split ratio.
struct TaskDemands {
    double local_ms = 0.0;
    double uplink_bytes = 0.0;
    double edge_ms_unit = 0.0;  // edge compute time at unit service speed
    double broadcast_bytes = 0.0;
};

// Gaussian draws with the configured mean/std, truncated below at 1% of the
// mean. Draw order: image, local, edge, update.
RawDemand sample_demands(const WorkloadStats& stats, RngStream& rng);

// Linear interpolation in the split ratio `a` (fraction computed locally):
//   local  = a * full_local
//   edge   = (1 - a) * full_edge
//   uplink = (1 - a) * image + a * min_uplink
//   broadcast = update (independent of a)
// Throws std::invalid_argument for a outside [0, 1].
TaskDemands split_demand(const RawDemand& raw, double split_ratio,
                         const WorkloadStats& stats);

}  // namespace edgesim
