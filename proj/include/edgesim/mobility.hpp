#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "edgesim/rng.hpp"

namespace edgesim {

struct MobilityConfig {
    double region_m = 200.0;          // square intersection region, side length
    double speed_min_mps = 5.0;
    double speed_max_mps = 15.0;
    Eigen::Vector2d bs_position{100.0, 100.0};
};

// Per-vehicle positions on a 1 ms grid. Generated traces are piecewise-linear
// crossing paths: each vehicle keeps a constant speed and turns toward a fresh
// interior waypoint whenever it would leave the region, so consecutive 1 ms
// positions are always exactly speed * 1 ms apart. Traces loaded from CSV are
// stored as explicit per-tick tables.
class MobilityTrace {
public:
    static MobilityTrace generate(int n_vehicles, std::int64_t horizon_ticks,
                                  std::uint64_t seed, MobilityConfig cfg = {});

    Eigen::Vector2d position(int vehicle, std::int64_t tick) const;
    double speed_mps(int vehicle, std::int64_t tick) const;
    double distance_to_bs(int vehicle, std::int64_t tick) const;

    int n_vehicles() const { return n_vehicles_; }
    std::int64_t horizon_ticks() const { return horizon_ticks_; }
    const Eigen::Vector2d& bs_position() const { return cfg_.bs_position; }
    const MobilityConfig& config() const { return cfg_; }

    // CSV schema: tick,vehicle_id,x,y,speed
    void export_csv(std::ostream& out, std::int64_t horizon_ticks) const;
    static MobilityTrace import_csv(std::istream& in);

private:
    MobilityTrace() : warmup_rng_(0) {}

    struct Segment {
        std::int64_t start_tick;
        Eigen::Vector2d origin;
        Eigen::Vector2d dir;  // unit
    };
    struct Path {
        double speed_mps = 0.0;
        std::vector<Segment> segments;
        RngStream rng{0};
    };

    void extend(int vehicle, std::int64_t tick) const;
    Segment make_segment(Path& p, std::int64_t start_tick, const Eigen::Vector2d& from) const;

    MobilityConfig cfg_;
    int n_vehicles_ = 0;
    std::int64_t horizon_ticks_ = 0;
    mutable std::vector<Path> paths_;  // analytic mode; lazily extended

    // table mode (imported traces)
    bool table_mode_ = false;
    std::vector<std::vector<Eigen::Vector2d>> table_pos_;
    std::vector<std::vector<double>> table_speed_;

    RngStream warmup_rng_;
};

}  // namespace edgesim
