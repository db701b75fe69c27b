#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "edgesim/mlp.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

TEST_CASE("zero parameters with a sigmoid head output one half") {
    Mlp net({3, 4, 4, 2}, OutputActivation::Sigmoid, 1);
    for (auto& w : net.weights()) w.setZero();
    for (auto& b : net.biases()) b.setZero();
    const Eigen::VectorXd y = net.forward_vec(Eigen::Vector3d{0.3, -0.7, 2.0});
    CHECK(y(0) == doctest::Approx(0.5));
    CHECK(y(1) == doctest::Approx(0.5));
}

TEST_CASE("zero weights with an identity head output the last bias") {
    Mlp net({3, 4, 2}, OutputActivation::Identity, 2);
    for (auto& w : net.weights()) w.setZero();
    net.biases()[0].setZero();
    net.biases()[1] << 1.5, -2.25;
    const Eigen::VectorXd y = net.forward_vec(Eigen::Vector3d{5.0, 5.0, 5.0});
    CHECK(y(0) == doctest::Approx(1.5));
    CHECK(y(1) == doctest::Approx(-2.25));
}

TEST_CASE("forward matches an explicit loop re-evaluation") {
    Mlp net({4, 6, 5, 3}, OutputActivation::Sigmoid, 33);
    RngStream rng(7);
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x(i) = rng.uniform(-2, 2);

    // straight-line re-implementation with explicit loops
    std::vector<double> act(x.data(), x.data() + 4);
    for (int l = 0; l < net.n_layers(); ++l) {
        const auto& w = net.weights()[static_cast<std::size_t>(l)];
        const auto& b = net.biases()[static_cast<std::size_t>(l)];
        std::vector<double> next(static_cast<std::size_t>(w.rows()));
        for (int r = 0; r < w.rows(); ++r) {
            double z = b(r);
            for (int c = 0; c < w.cols(); ++c) z += w(r, c) * act[static_cast<std::size_t>(c)];
            if (l + 1 < net.n_layers())
                next[static_cast<std::size_t>(r)] = z > 0 ? z : 0.01 * z;
            else
                next[static_cast<std::size_t>(r)] = 1.0 / (1.0 + std::exp(-z));
        }
        act = next;
    }

    const Eigen::VectorXd y = net.forward_vec(x);
    REQUIRE(y.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(y(i) == doctest::Approx(act[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatches") {
    Mlp net({4, 4, 1}, OutputActivation::Identity, 3);
    Eigen::MatrixXd bad(2, 5);
    bad.setZero();
    CHECK_THROWS_AS(net.forward(bad), std::invalid_argument);
}

TEST_CASE("single identity layer reproduces the closed-form squared-loss gradient") {
    Mlp net({3, 1}, OutputActivation::Identity, 4);
    const Eigen::Vector3d x{1.0, -2.0, 0.5};
    const double target = 0.7;
    GradientTape tape;
    const double pred = net.forward(x.transpose(), tape)(0, 0);
    Eigen::MatrixXd dl(1, 1);
    dl(0, 0) = 2.0 * (pred - target);
    const Gradients g = net.backward(tape, dl);
    for (int c = 0; c < 3; ++c)
        CHECK(g.weights[0](0, c) == doctest::Approx(2.0 * (pred - target) * x(c)).epsilon(1e-12));
    CHECK(g.biases[0](0) == doctest::Approx(2.0 * (pred - target)).epsilon(1e-12));
}

TEST_CASE("zero output gradient yields zero parameter gradients") {
    Mlp net({3, 5, 2}, OutputActivation::Sigmoid, 5);
    GradientTape tape;
    net.forward(Eigen::MatrixXd::Random(4, 3), tape);
    const Gradients g = net.backward(tape, Eigen::MatrixXd::Zero(4, 2));
    for (const auto& w : g.weights) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& b : g.biases) CHECK(b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a tape cannot be consumed twice") {
    Mlp net({2, 2, 1}, OutputActivation::Identity, 6);
    GradientTape tape;
    net.forward(Eigen::MatrixXd::Random(1, 2), tape);
    const Eigen::MatrixXd dl = Eigen::MatrixXd::Ones(1, 1);
    net.backward(tape, dl);
    CHECK_THROWS_AS(net.backward(tape, dl), std::logic_error);
    GradientTape fresh;
    CHECK_THROWS_AS(net.backward(fresh, dl), std::logic_error);
}

// gating property: every parameter gradient agrees with central differences
TEST_CASE("backward matches finite differences on a 4-8-8-1 network") {
    Mlp net({4, 8, 8, 1}, OutputActivation::Sigmoid, 77);
    RngStream rng(8);
    Eigen::MatrixXd x(3, 4);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) x(r, c) = rng.uniform(-1, 1);

    // loss = sum of outputs over the batch
    auto loss_of = [&](Mlp& m) { return m.forward(x).sum(); };

    GradientTape tape;
    net.forward(x, tape);
    const Gradients g = net.backward(tape, Eigen::MatrixXd::Ones(3, 1));

    const double h = 1e-5;
    Mlp probe = net;
    std::int64_t flat = 0;
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        const auto wsize = net.weights()[l].size();
        const auto bsize = net.biases()[l].size();
        for (std::int64_t i = 0; i < wsize + bsize; ++i, ++flat) {
            const double saved = probe.get_param(flat);
            probe.set_param(flat, saved + h);
            const double up = loss_of(probe);
            probe.set_param(flat, saved - h);
            const double down = loss_of(probe);
            probe.set_param(flat, saved);
            const double fd = (up - down) / (2.0 * h);
            const double an = i < wsize ? g.weights[l](i / net.weights()[l].cols(),
                                                       i % net.weights()[l].cols())
                                        : g.biases[l](i - wsize);
            const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
            CHECK(std::abs(fd - an) / scale < 1e-4);
        }
    }
}

TEST_CASE("sgd with zero learning rate leaves the network unchanged") {
    Mlp net({2, 3, 1}, OutputActivation::Identity, 9);
    const Mlp before = net;
    GradientTape tape;
    net.forward(Eigen::MatrixXd::Random(2, 2), tape);
    const Gradients g = net.backward(tape, Eigen::MatrixXd::Ones(2, 1));
    sgd_step(net, g, 0.0);
    CHECK(net == before);
}

TEST_CASE("one sgd step on a scalar quadratic moves toward the minimum") {
    // single weight, loss (w*1 - 0)^2; start at w0, expect |w| to shrink
    Mlp net({1, 1}, OutputActivation::Identity, 10);
    net.biases()[0].setZero();
    net.weights()[0](0, 0) = 2.0;
    const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
    GradientTape tape;
    const double pred = net.forward(x, tape)(0, 0);
    Eigen::MatrixXd dl(1, 1);
    dl(0, 0) = 2.0 * pred;
    const Gradients g = net.backward(tape, dl);
    sgd_step(net, g, 0.1);
    CHECK(std::abs(net.weights()[0](0, 0)) < 2.0);
}

TEST_CASE("gradient descent solves a linear regression to the closed-form optimum") {
    // y = X beta; the least-squares solution is recoverable, loss -> < 1e-3
    RngStream rng(11);
    const int n = 64;
    Eigen::MatrixXd x(n, 3);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 3; ++c) x(r, c) = rng.uniform(-1, 1);
    const Eigen::Vector3d beta{0.8, -1.2, 0.4};
    const Eigen::VectorXd y = x * beta;

    Mlp net({3, 1}, OutputActivation::Identity, 12);
    for (int iter = 0; iter < 4000; ++iter) {
        GradientTape tape;
        const Eigen::MatrixXd pred = net.forward(x, tape);
        const Eigen::MatrixXd dl = 2.0 * (pred - y) / n;
        sgd_step(net, net.backward(tape, dl), 0.1);
    }
    const double loss = (net.forward(x) - y).squaredNorm() / n;
    CHECK(loss < 1e-3);
    // against the closed-form least-squares oracle
    const Eigen::Vector3d beta_hat =
        (x.transpose() * x).ldlt().solve(x.transpose() * y);
    for (int c = 0; c < 3; ++c)
        CHECK(net.weights()[0](0, c) == doctest::Approx(beta_hat(c)).epsilon(0.05));
}

TEST_CASE("adam also reduces the loss") {
    RngStream rng(13);
    Eigen::MatrixXd x(32, 2);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 2; ++c) x(r, c) = rng.uniform(-1, 1);
    const Eigen::VectorXd y = x.col(0) - 0.5 * x.col(1);

    Mlp net({2, 8, 1}, OutputActivation::Identity, 14);
    AdamState adam(net);
    const double before = (net.forward(x) - y).squaredNorm();
    for (int iter = 0; iter < 500; ++iter) {
        GradientTape tape;
        const Eigen::MatrixXd pred = net.forward(x, tape);
        const Eigen::MatrixXd dl = 2.0 * (pred - y) / 32.0;
        adam.apply(net, net.backward(tape, dl), 1e-2);
    }
    CHECK((net.forward(x) - y).squaredNorm() < 0.01 * before);
}

TEST_CASE("checkpoint round-trip is bit-identical") {
    Mlp net({5, 7, 3}, OutputActivation::Sigmoid, 15);
    std::stringstream buf;
    net.save(buf);
    const Mlp loaded = Mlp::load(buf);
    CHECK(loaded == net);
    const Eigen::VectorXd in = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd a = net.forward_vec(in);
    const Eigen::VectorXd b = loaded.forward_vec(in);
    CHECK(a == b);  // exact equality, not approximate
}
