#include "edgesim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgesim/rng.hpp"

namespace edgesim {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

double path_loss_db(double distance_m, const ChannelConfig& cfg) {
    const double d2d = std::max(distance_m, 1.0);
    const double dh = cfg.bs_height_m - cfg.ut_height_m;
    const double d3d = std::sqrt(d2d * d2d + dh * dh);
    const double fc_hz = cfg.carrier_ghz * 1e9;
    // effective antenna heights use a 1 m environment height
    const double h_bs = cfg.bs_height_m - 1.0;
    const double h_ut = cfg.ut_height_m - 1.0;
    const double d_bp = 4.0 * h_bs * h_ut * fc_hz / kSpeedOfLight;

    double pl;
    if (d2d <= d_bp) {
        pl = 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(cfg.carrier_ghz);
    } else {
        pl = 32.4 + 40.0 * std::log10(d3d) + 20.0 * std::log10(cfg.carrier_ghz) -
             9.5 * std::log10(d_bp * d_bp + dh * dh);
    }
    if (cfg.shadowing_sigma_db > 0.0) {
        const auto cell = static_cast<std::uint64_t>(std::floor(d2d));
        pl += cfg.shadowing_sigma_db * hashed_normal(cfg.seed, cell);
    }
    return pl;
}

double snr_db(double distance_m, double bandwidth_hz, const ChannelConfig& cfg) {
    const double noise_dbm = cfg.noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return cfg.tx_power_dbm - path_loss_db(distance_m, cfg) - noise_dbm;
}

double link_rate_bps(double distance_m, double bandwidth_hz, const ChannelConfig& cfg) {
    if (bandwidth_hz <= 0.0) return 0.0;
    const double snr_linear = std::pow(10.0, snr_db(distance_m, bandwidth_hz, cfg) / 10.0);
    return bandwidth_hz * std::log2(1.0 + snr_linear);
}

std::vector<RateShare> per_vehicle_rate(const std::vector<int>& active,
                                        double reservation,
                                        const std::vector<Eigen::Vector2d>& positions,
                                        const Eigen::Vector2d& bs_position,
                                        const ChannelConfig& cfg,
                                        double max_bandwidth_hz) {
    if (reservation < 0.0 || reservation > 1.0)
        throw std::invalid_argument("per_vehicle_rate: reservation outside [0,1]");
    std::vector<RateShare> out;
    if (active.empty()) return out;
    const double share = reservation * max_bandwidth_hz / static_cast<double>(active.size());
    out.reserve(active.size());
    std::vector<int> ids = active;
    std::sort(ids.begin(), ids.end());
    for (int v : ids) {
        const double dist = (positions[static_cast<std::size_t>(v)] - bs_position).norm();
        out.push_back({v, share, link_rate_bps(dist, share, cfg)});
    }
    return out;
}

double broadcast_rate_bps(int n_flows, double reservation,
                          const std::vector<Eigen::Vector2d>& positions,
                          const Eigen::Vector2d& bs_position,
                          const ChannelConfig& cfg) {
    if (n_flows <= 0) return 0.0;
    const double share = reservation * cfg.max_bandwidth_downlink_hz / static_cast<double>(n_flows);
    double worst = 0.0;
    for (const auto& p : positions) worst = std::max(worst, (p - bs_position).norm());
    return link_rate_bps(worst, share, cfg);
}

}  // namespace edgesim
