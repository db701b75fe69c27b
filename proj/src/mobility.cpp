#include "edgesim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "edgesim/csv.hpp"

namespace edgesim {

namespace {
constexpr double kBoundaryMargin = 0.5;  // meters kept clear of the walls
}

MobilityTrace MobilityTrace::generate(int n_vehicles, std::int64_t horizon_ticks,
                                      std::uint64_t seed, MobilityConfig cfg) {
    if (n_vehicles < 1) throw std::invalid_argument("mobility: need at least one vehicle");
    MobilityTrace t;
    t.cfg_ = cfg;
    t.n_vehicles_ = n_vehicles;
    t.horizon_ticks_ = horizon_ticks;
    t.paths_.resize(static_cast<std::size_t>(n_vehicles));
    RngStream root(mix_seed(seed, "mobility"));
    for (int v = 0; v < n_vehicles; ++v) {
        Path& p = t.paths_[static_cast<std::size_t>(v)];
        p.rng = root.derive("vehicle", static_cast<std::uint64_t>(v));
        p.speed_mps = p.rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
        const double lo = kBoundaryMargin;
        const double hi = cfg.region_m - kBoundaryMargin;
        Eigen::Vector2d origin{p.rng.uniform(lo, hi), p.rng.uniform(lo, hi)};
        p.segments.push_back(t.make_segment(p, 0, origin));
    }
    return t;
}

MobilityTrace::Segment MobilityTrace::make_segment(Path& p, std::int64_t start_tick,
                                                   const Eigen::Vector2d& from) const {
    // Head toward a waypoint in the central half of the region; guarantees the
    // direction points back inside from any admissible position.
    const double w = cfg_.region_m;
    Eigen::Vector2d target;
    Eigen::Vector2d dir;
    do {
        target = {p.rng.uniform(0.25 * w, 0.75 * w), p.rng.uniform(0.25 * w, 0.75 * w)};
        dir = target - from;
    } while (dir.norm() < 1.0);
    dir.normalize();
    return Segment{start_tick, from, dir};
}

void MobilityTrace::extend(int vehicle, std::int64_t tick) const {
    Path& p = paths_[static_cast<std::size_t>(vehicle)];
    const double step_m = p.speed_mps * 1e-3;  // metres per tick
    const double lo = kBoundaryMargin;
    const double hi = cfg_.region_m - kBoundaryMargin;
    while (true) {
        const Segment& s = p.segments.back();
        // ticks until this segment would cross the margin box
        double limit = std::numeric_limits<double>::infinity();
        for (int axis = 0; axis < 2; ++axis) {
            const double d = s.dir[axis] * step_m;
            if (d > 0)
                limit = std::min(limit, (hi - s.origin[axis]) / d);
            else if (d < 0)
                limit = std::min(limit, (s.origin[axis] - lo) / -d);
        }
        const std::int64_t len = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(limit)));
        const std::int64_t end_tick = s.start_tick + len;
        if (end_tick > tick) return;
        const Eigen::Vector2d at_end =
            s.origin + s.dir * (step_m * static_cast<double>(len));
        p.segments.push_back(make_segment(p, end_tick, at_end));
    }
}

Eigen::Vector2d MobilityTrace::position(int vehicle, std::int64_t tick) const {
    if (table_mode_) {
        const auto& rows = table_pos_[static_cast<std::size_t>(vehicle)];
        const std::size_t i =
            static_cast<std::size_t>(std::clamp<std::int64_t>(tick, 0, static_cast<std::int64_t>(rows.size()) - 1));
        return rows[i];
    }
    extend(vehicle, tick);
    const Path& p = paths_[static_cast<std::size_t>(vehicle)];
    auto it = std::upper_bound(p.segments.begin(), p.segments.end(), tick,
                               [](std::int64_t t, const Segment& s) { return t < s.start_tick; });
    const Segment& s = *std::prev(it);
    const double step_m = p.speed_mps * 1e-3;
    return s.origin + s.dir * (step_m * static_cast<double>(tick - s.start_tick));
}

double MobilityTrace::speed_mps(int vehicle, std::int64_t tick) const {
    if (table_mode_) {
        const auto& rows = table_speed_[static_cast<std::size_t>(vehicle)];
        const std::size_t i =
            static_cast<std::size_t>(std::clamp<std::int64_t>(tick, 0, static_cast<std::int64_t>(rows.size()) - 1));
        return rows[i];
    }
    return paths_[static_cast<std::size_t>(vehicle)].speed_mps;
}

double MobilityTrace::distance_to_bs(int vehicle, std::int64_t tick) const {
    return (position(vehicle, tick) - cfg_.bs_position).norm();
}

void MobilityTrace::export_csv(std::ostream& out, std::int64_t horizon_ticks) const {
    CsvWriter w(out);
    w.row("tick", "vehicle_id", "x", "y", "speed");
    for (std::int64_t t = 0; t < horizon_ticks; ++t) {
        for (int v = 0; v < n_vehicles_; ++v) {
            const Eigen::Vector2d p = position(v, t);
            w.row(t, v, p.x(), p.y(), speed_mps(v, t));
        }
    }
}

MobilityTrace MobilityTrace::import_csv(std::istream& in) {
    MobilityTrace t;
    t.table_mode_ = true;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace csv: empty file");
    std::int64_t max_tick = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        double vals[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("trace csv: short row");
            vals[i] = std::stod(cell);
        }
        const auto tick = static_cast<std::int64_t>(vals[0]);
        const int v = static_cast<int>(vals[1]);
        if (v >= static_cast<int>(t.table_pos_.size())) {
            t.table_pos_.resize(static_cast<std::size_t>(v) + 1);
            t.table_speed_.resize(static_cast<std::size_t>(v) + 1);
        }
        auto& pos = t.table_pos_[static_cast<std::size_t>(v)];
        auto& spd = t.table_speed_[static_cast<std::size_t>(v)];
        if (static_cast<std::int64_t>(pos.size()) != tick)
            throw std::runtime_error("trace csv: ticks must be contiguous per vehicle");
        pos.emplace_back(vals[2], vals[3]);
        spd.push_back(vals[4]);
        max_tick = std::max(max_tick, tick);
    }
    t.n_vehicles_ = static_cast<int>(t.table_pos_.size());
    t.horizon_ticks_ = max_tick + 1;
    if (t.n_vehicles_ == 0) throw std::runtime_error("trace csv: no rows");
    for (const auto& rows : t.table_pos_)
        if (static_cast<std::int64_t>(rows.size()) != t.horizon_ticks_)
            throw std::runtime_error("trace csv: vehicles cover different horizons");
    return t;
}

}  // namespace edgesim
