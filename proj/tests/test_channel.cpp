#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "edgesim/channel.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {
ChannelConfig no_shadow() {
    ChannelConfig cfg;
    cfg.shadowing_sigma_db = 0.0;
    return cfg;
}
}  // namespace

TEST_CASE("path loss matches the published LOS formula") {
    const ChannelConfig cfg = no_shadow();
    // independent evaluation, both slopes of the dual-slope model
    const double dh = cfg.bs_height_m - cfg.ut_height_m;
    const double d_bp =
        4.0 * (cfg.bs_height_m - 1.0) * (cfg.ut_height_m - 1.0) * cfg.carrier_ghz * 1e9 / 299792458.0;

    {
        const double d = 50.0;  // below breakpoint
        REQUIRE(d < d_bp);
        const double d3d = std::sqrt(d * d + dh * dh);
        const double expected = 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(cfg.carrier_ghz);
        CHECK(path_loss_db(d, cfg) == doctest::Approx(expected).epsilon(1e-12));
    }
    {
        const double d = 500.0;  // above breakpoint
        REQUIRE(d > d_bp);
        const double d3d = std::sqrt(d * d + dh * dh);
        const double expected = 32.4 + 40.0 * std::log10(d3d) + 20.0 * std::log10(cfg.carrier_ghz) -
                                9.5 * std::log10(d_bp * d_bp + dh * dh);
        CHECK(path_loss_db(d, cfg) == doctest::Approx(expected).epsilon(1e-12));
    }
    // continuity across the breakpoint
    CHECK(path_loss_db(d_bp - 1e-6, cfg) ==
          doctest::Approx(path_loss_db(d_bp + 1e-6, cfg)).epsilon(1e-6));
}

TEST_CASE("path loss is monotone in distance without shadowing") {
    const ChannelConfig cfg = no_shadow();
    double prev = path_loss_db(1.0, cfg);
    for (double d = 2.0; d <= 2000.0; d += 1.0) {
        const double pl = path_loss_db(d, cfg);
        CHECK(pl >= prev);
        prev = pl;
    }
}

TEST_CASE("zero distance clamps to one metre") {
    const ChannelConfig cfg = no_shadow();
    CHECK(path_loss_db(0.0, cfg) == path_loss_db(1.0, cfg));
    CHECK(path_loss_db(0.5, cfg) == path_loss_db(1.0, cfg));
}

TEST_CASE("shadowing is deterministic per seed") {
    ChannelConfig cfg;
    cfg.seed = 9;
    CHECK(path_loss_db(120.0, cfg) == path_loss_db(120.0, cfg));
    ChannelConfig other = cfg;
    other.seed = 10;
    CHECK(path_loss_db(120.0, cfg) != path_loss_db(120.0, other));
}

TEST_CASE("reserved uplink is shared equally among active vehicles") {
    const ChannelConfig cfg = no_shadow();
    const Eigen::Vector2d bs{0.0, 0.0};
    std::vector<Eigen::Vector2d> pos{{50.0, 0.0}, {0.0, 50.0}, {-50.0, 0.0}};

    SUBCASE("two active vehicles at full reservation get 2.5 MHz each") {
        const auto rates = per_vehicle_rate({0, 1}, 1.0, pos, bs, cfg, cfg.max_bandwidth_uplink_hz);
        REQUIRE(rates.size() == 2);
        CHECK(rates[0].share_hz == doctest::Approx(2.5e6));
        CHECK(rates[1].share_hz == doctest::Approx(2.5e6));
    }
    SUBCASE("zero reservation yields zero rate") {
        const auto rates = per_vehicle_rate({2}, 0.0, pos, bs, cfg, cfg.max_bandwidth_uplink_hz);
        REQUIRE(rates.size() == 1);
        CHECK(rates[0].rate_bps == 0.0);
    }
    SUBCASE("equidistant vehicles see identical rates") {
        const auto rates = per_vehicle_rate({0, 1, 2}, 0.6, pos, bs, cfg, cfg.max_bandwidth_uplink_hz);
        REQUIRE(rates.size() == 3);
        CHECK(rates[0].rate_bps == doctest::Approx(rates[1].rate_bps).epsilon(1e-12));
        CHECK(rates[1].rate_bps == doctest::Approx(rates[2].rate_bps).epsilon(1e-12));
        CHECK(rates[0].rate_bps > 0.0);
    }
    SUBCASE("empty active set yields an empty map") {
        CHECK(per_vehicle_rate({}, 0.7, pos, bs, cfg, cfg.max_bandwidth_uplink_hz).empty());
    }
}

TEST_CASE("bandwidth conservation and linear share scaling") {
    ChannelConfig cfg;
    cfg.seed = 4;
    RngStream rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 8));
        std::vector<Eigen::Vector2d> pos;
        std::vector<int> active;
        for (int v = 0; v < n; ++v) {
            pos.emplace_back(rng.uniform(-100, 100), rng.uniform(-100, 100));
            active.push_back(v);
        }
        const double reservation = rng.uniform();
        const Eigen::Vector2d bs{0, 0};
        const auto rates = per_vehicle_rate(active, reservation, pos, bs, cfg, cfg.max_bandwidth_uplink_hz);
        double total = 0.0;
        for (const auto& r : rates) {
            total += r.share_hz;
            if (reservation > 0.0) CHECK(r.rate_bps > 0.0);
        }
        CHECK(total == doctest::Approx(reservation * cfg.max_bandwidth_uplink_hz).epsilon(1e-9));

        const double half = reservation / 2.0;
        const auto scaled = per_vehicle_rate(active, half, pos, bs, cfg, cfg.max_bandwidth_uplink_hz);
        for (std::size_t i = 0; i < rates.size(); ++i)
            CHECK(scaled[i].share_hz * 2.0 == doctest::Approx(rates[i].share_hz).epsilon(1e-12));
    }
}

TEST_CASE("broadcast rate follows the worst-placed receiver") {
    const ChannelConfig cfg = no_shadow();
    const Eigen::Vector2d bs{0.0, 0.0};
    std::vector<Eigen::Vector2d> pos{{10.0, 0.0}, {150.0, 0.0}};
    const double rate = broadcast_rate_bps(1, 1.0, pos, bs, cfg);
    CHECK(rate == doctest::Approx(link_rate_bps(150.0, cfg.max_bandwidth_downlink_hz, cfg)));
    // two concurrent flows halve the share
    const double two = broadcast_rate_bps(2, 1.0, pos, bs, cfg);
    CHECK(two == doctest::Approx(link_rate_bps(150.0, cfg.max_bandwidth_downlink_hz / 2.0, cfg)));
}
