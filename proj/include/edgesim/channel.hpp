#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace edgesim {

struct ChannelConfig {
    double carrier_ghz = 3.5;
    double max_bandwidth_uplink_hz = 5e6;
    double max_bandwidth_downlink_hz = 5e6;
    double tx_power_dbm = 23.0;
    double noise_density_dbm_hz = -174.0;
    double shadowing_sigma_db = 4.0;
    double bs_height_m = 10.0;
    double ut_height_m = 1.5;
    std::uint64_t seed = 0;
};

// UMi street-canyon LOS path loss (dual slope around the breakpoint distance)
// plus log-normal shadowing realised as a frozen field over 1 m distance
// cells, so the result is a pure function of (distance, cfg).
double path_loss_db(double distance_m, const ChannelConfig& cfg);

// SNR in dB for a receiver at `distance_m` listening on `bandwidth_hz`.
double snr_db(double distance_m, double bandwidth_hz, const ChannelConfig& cfg);

// Shannon rate in bits/s over `bandwidth_hz` at the given distance.
double link_rate_bps(double distance_m, double bandwidth_hz, const ChannelConfig& cfg);

struct RateShare {
    int vehicle;
    double share_hz;
    double rate_bps;
};

// Reserved uplink bandwidth split equally among vehicles with traffic.
// `positions` is indexed by vehicle id. Empty active set yields an empty map.
std::vector<RateShare> per_vehicle_rate(const std::vector<int>& active,
                                        double reservation,
                                        const std::vector<Eigen::Vector2d>& positions,
                                        const Eigen::Vector2d& bs_position,
                                        const ChannelConfig& cfg,
                                        double max_bandwidth_hz);

// Rate of one broadcast flow when `n_flows` flows share the reserved downlink.
// A broadcast completes when the worst-placed receiver has it, so the rate is
// evaluated at the maximum path-loss receiver.
double broadcast_rate_bps(int n_flows, double reservation,
                          const std::vector<Eigen::Vector2d>& positions,
                          const Eigen::Vector2d& bs_position,
                          const ChannelConfig& cfg);

}  // namespace edgesim
