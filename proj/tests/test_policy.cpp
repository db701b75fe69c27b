#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "edgesim/policy.hpp"

using namespace edgesim;

namespace {
Observation obs_of(double fill) {
    Observation o;
    o.v.setConstant(fill);
    return o;
}
}  // namespace

TEST_CASE("acting without exploration is deterministic") {
    const PolicyPair p = PolicyPair::make(16, 5);
    RngStream rng(1);
    const ActResult a = act(p, obs_of(0.3), false, rng);
    const ActResult b = act(p, obs_of(0.3), false, rng);
    CHECK(a.action == b.action);
    CHECK(a.action == a.mean);
    CHECK(a.action > 0.0);
    CHECK(a.action < 1.0);  // sigmoid head keeps the mean strictly inside
}

TEST_CASE("noise schedule hits its endpoints") {
    NoiseSchedule s{0.4, 0.05, 60};
    CHECK(s.std_at(0) == doctest::Approx(0.4));
    CHECK(s.std_at(60) == doctest::Approx(0.05));
    CHECK(s.std_at(600) == doctest::Approx(0.05));
    CHECK(s.std_at(30) == doctest::Approx(0.225));
}

TEST_CASE("explored actions stay in [0,1] over many draws") {
    PolicyPair p = PolicyPair::make(16, 6);
    p.schedule = {0.8, 0.8, 0};  // deliberately wide noise
    RngStream rng(2);
    for (int i = 0; i < 100000; ++i) {
        const ActResult r = act(p, obs_of(rng.uniform()), true, rng);
        CHECK(r.action >= 0.0);
        CHECK(r.action <= 1.0);
        CHECK(std::isfinite(r.log_prob));
    }
}

TEST_CASE("log probability matches the Gaussian density") {
    const double lp = gaussian_log_prob(0.3, 0.5, 0.2);
    const double expected = std::log(1.0 / (0.2 * std::sqrt(2.0 * M_PI)) *
                                     std::exp(-0.5 * std::pow((0.3 - 0.5) / 0.2, 2)));
    CHECK(lp == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("reward is negated latency normalized by the bound") {
    CHECK(reward_from_latency(500.0, 500.0) == doctest::Approx(-1.0));
    CHECK(reward_from_latency(0.0, 500.0) == doctest::Approx(0.0));
    const double half = reward_from_latency(250.0, 500.0);
    CHECK(half == doctest::Approx(-0.5));
    CHECK(reward_from_latency(125.0, 500.0) == doctest::Approx(half / 2.0));
}

namespace {
Transition make_tr(int vehicle, double reward, double value, bool done, double next_value = 0.0) {
    Transition t;
    t.vehicle_id = vehicle;
    t.reward = reward;
    t.value = value;
    t.done = done;
    t.next_value = next_value;
    return t;
}
}  // namespace

TEST_CASE("single terminal transition with matching value has zero advantage") {
    const std::vector<Transition> batch{make_tr(0, -0.5, -0.5, true)};
    const AdvantageResult r = compute_advantages(batch, 0.95);
    CHECK(r.advantages[0] == doctest::Approx(0.0));
    CHECK(r.returns[0] == doctest::Approx(-0.5));
}

TEST_CASE("gamma zero reduces the advantage to reward minus value") {
    std::vector<Transition> batch;
    batch.push_back(make_tr(0, -0.3, -0.1, false));
    batch.push_back(make_tr(0, -0.7, -0.2, false));
    batch.push_back(make_tr(0, -0.4, -0.6, true));
    const AdvantageResult r = compute_advantages(batch, 0.0);
    CHECK(r.advantages[0] == doctest::Approx(-0.3 - (-0.1)));
    CHECK(r.advantages[1] == doctest::Approx(-0.7 - (-0.2)));
    CHECK(r.advantages[2] == doctest::Approx(-0.4 - (-0.6)));
}

TEST_CASE("three-step returns match the hand-unrolled discounted sum") {
    // G2 = r2; G1 = r1 + 0.9 G2; G0 = r0 + 0.9 G1 (episode ends at step 2)
    std::vector<Transition> batch;
    batch.push_back(make_tr(3, -1.0, 0.0, false));
    batch.push_back(make_tr(3, -2.0, 0.0, false));
    batch.push_back(make_tr(3, -3.0, 0.0, true));
    const AdvantageResult r = compute_advantages(batch, 0.9);
    CHECK(r.returns[2] == doctest::Approx(-3.0));
    CHECK(r.returns[1] == doctest::Approx(-2.0 + 0.9 * -3.0));
    CHECK(r.returns[0] == doctest::Approx(-1.0 + 0.9 * (-2.0 + 0.9 * -3.0)));
}

TEST_CASE("a truncated tail bootstraps from the stored next value") {
    std::vector<Transition> batch{make_tr(0, -1.0, 0.0, false, -4.0)};
    const AdvantageResult r = compute_advantages(batch, 0.5);
    CHECK(r.returns[0] == doctest::Approx(-1.0 + 0.5 * -4.0));
}

TEST_CASE("returns are computed per vehicle over interleaved batches") {
    // vehicles interleave; each vehicle's sequence must be discounted separately
    std::vector<Transition> batch;
    batch.push_back(make_tr(0, -1.0, 0.0, false));
    batch.push_back(make_tr(1, -5.0, 0.0, true));
    batch.push_back(make_tr(0, -2.0, 0.0, true));
    const AdvantageResult r = compute_advantages(batch, 1.0);
    CHECK(r.returns[0] == doctest::Approx(-3.0));
    CHECK(r.returns[1] == doctest::Approx(-5.0));
    CHECK(r.returns[2] == doctest::Approx(-2.0));
}

TEST_CASE("an episode boundary stops the discounted flow") {
    std::vector<Transition> batch;
    batch.push_back(make_tr(0, -1.0, 0.0, true));   // episode 1 ends
    batch.push_back(make_tr(0, -9.0, 0.0, true));   // episode 2
    const AdvantageResult r = compute_advantages(batch, 0.9);
    CHECK(r.returns[0] == doctest::Approx(-1.0));  // no leakage from episode 2
    CHECK(r.returns[1] == doctest::Approx(-9.0));
}

TEST_CASE("empty batches are rejected") {
    CHECK_THROWS_AS(compute_advantages({}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(compute_advantages_gae({}, 0.9, 0.95), std::invalid_argument);
}

TEST_CASE("gae(1) equals monte carlo advantages") {
    std::vector<Transition> batch;
    batch.push_back(make_tr(0, -1.0, -2.0, false));
    batch.push_back(make_tr(0, -2.0, -1.5, false));
    batch.push_back(make_tr(0, -3.0, -0.5, true));
    const AdvantageResult mc = compute_advantages(batch, 0.9);
    const AdvantageResult gae = compute_advantages_gae(batch, 0.9, 1.0);
    for (std::size_t i = 0; i < batch.size(); ++i)
        CHECK(gae.advantages[i] == doctest::Approx(mc.advantages[i]).epsilon(1e-12));
}

TEST_CASE("standardization yields zero mean and unit std") {
    const std::vector<double> vals{1.0, 2.0, 3.0, 4.0, 10.0};
    const std::vector<double> s = standardized(vals);
    double mean = 0, var = 0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    for (double v : s) var += (v - mean) * (v - mean);
    var /= static_cast<double>(s.size());
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
    // a degenerate spread is centered but not rescaled
    const std::vector<double> flat = standardized({2.0, 2.0, 2.0});
    for (double v : flat) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("policy checkpoint round-trips") {
    PolicyPair p = PolicyPair::make(8, 44);
    p.updates_done = 17;
    p.gamma = 0.9;
    std::stringstream buf;
    p.save(buf);
    const PolicyPair q = PolicyPair::load(buf);
    CHECK(q.same_parameters(p));
    CHECK(q.updates_done == 17);
    CHECK(q.gamma == 0.9);
    const Observation o = obs_of(0.4);
    CHECK(p.actor.forward_vec(o.v) == q.actor.forward_vec(o.v));
}
