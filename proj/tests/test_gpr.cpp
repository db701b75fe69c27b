#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "edgesim/gpr.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {

// independent dense-solve oracle: explicit Gram assembly and a hand-rolled
// Gauss-Jordan inverse, mirroring the standardization pipeline
struct DenseOracle {
    std::vector<Eigen::Vector3d> xs;
    std::vector<double> ys;
    double noise;
    bool standardize;

    static std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
        const std::size_t n = a.size();
        std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
            std::swap(a[col], a[pivot]);
            std::swap(inv[col], inv[pivot]);
            const double p = a[col][col];
            for (std::size_t c = 0; c < n; ++c) {
                a[col][c] /= p;
                inv[col][c] /= p;
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col) continue;
                const double f = a[r][col];
                for (std::size_t c = 0; c < n; ++c) {
                    a[r][c] -= f * a[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
        return inv;
    }

    std::pair<double, double> predict(const Eigen::Vector3d& q) const {
        const std::size_t n = xs.size();
        double mean_y = 0.0, scale = 1.0;
        if (standardize) {
            for (double y : ys) mean_y += y;
            mean_y /= static_cast<double>(n);
            double var = 0.0;
            for (double y : ys) var += (y - mean_y) * (y - mean_y);
            scale = std::sqrt(var / static_cast<double>(n));
            if (scale < 1e-12) scale = 1.0;
        }
        std::vector<std::vector<double>> gram(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                gram[i][j] = std::exp(-0.5 * (xs[i] - xs[j]).squaredNorm());
                if (i == j) gram[i][j] += noise;
            }
        const auto inv = invert(gram);
        std::vector<double> k(n);
        for (std::size_t i = 0; i < n; ++i) k[i] = std::exp(-0.5 * (q - xs[i]).squaredNorm());
        double mean = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += inv[i][j] * ((ys[j] - mean_y) / scale);
            mean += k[i] * row;
            double rowk = 0.0;
            for (std::size_t j = 0; j < n; ++j) rowk += inv[i][j] * k[j];
            quad += k[i] * rowk;
        }
        const double var = std::max(0.0, 1.0 - quad);
        return {mean * scale + mean_y, var * scale * scale};
    }
};

}  // namespace

TEST_CASE("noiseless single point interpolates exactly") {
    GprDataset data(0.0);
    data.add({0.3, 0.4, 0.5}, 123.0);
    const GprModel model = GprModel::fit(data, true);
    const GprPrediction p = model.posterior({0.3, 0.4, 0.5});
    CHECK(p.mean == doctest::Approx(123.0).epsilon(1e-12));
    CHECK(p.variance == doctest::Approx(0.0));
}

TEST_CASE("far queries fall back to the prior") {
    GprDataset data(1e-6);
    data.add({0.1, 0.1, 0.1}, 5.0);
    data.add({0.2, 0.3, 0.2}, 7.0);
    const GprModel raw = GprModel::fit(data, false);
    const GprPrediction p = raw.posterior({100.0, 100.0, 100.0});
    CHECK(p.mean == doctest::Approx(0.0));       // zero prior without standardization
    CHECK(p.variance == doctest::Approx(1.0));   // k(x,x) = 1
    // with standardization the prior is the dataset mean
    const GprModel std_model = GprModel::fit(data, true);
    CHECK(std_model.posterior({100.0, 100.0, 100.0}).mean == doctest::Approx(6.0));
}

TEST_CASE("posterior matches the dense-solve oracle on random datasets") {
    RngStream rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        GprDataset data(1e-4);
        DenseOracle oracle;
        oracle.noise = 1e-4;
        oracle.standardize = true;
        for (int i = 0; i < 3; ++i) {
            const Eigen::Vector3d x{rng.uniform(), rng.uniform(), rng.uniform()};
            const double y = rng.uniform(100.0, 900.0);
            data.add(x, y);
            oracle.xs.push_back(x);
            oracle.ys.push_back(y);
        }
        const GprModel model = GprModel::fit(data, true);
        for (int q = 0; q < 5; ++q) {
            const Eigen::Vector3d query{rng.uniform(), rng.uniform(), rng.uniform()};
            const GprPrediction p = model.posterior(query);
            const auto [mean, var] = oracle.predict(query);
            CHECK(std::abs(p.mean - mean) < 1e-8);
            CHECK(std::abs(p.variance - var) < 1e-8);
        }
    }
}

TEST_CASE("noiseless interpolation at every training input") {
    RngStream rng(22);
    GprDataset data(0.0);
    std::vector<std::pair<Eigen::Vector3d, double>> pts;
    for (int i = 0; i < 6; ++i) {
        const Eigen::Vector3d x{rng.uniform(), rng.uniform(), rng.uniform()};
        const double y = rng.uniform(200.0, 800.0);
        data.add(x, y);
        pts.emplace_back(x, y);
    }
    const GprModel model = GprModel::fit(data, true);
    for (const auto& [x, y] : pts) {
        CHECK(std::abs(model.posterior(x).mean - y) < 1e-8);
        CHECK(model.posterior(x).variance < 1e-8);
    }
}

TEST_CASE("variance is never negative") {
    RngStream rng(23);
    GprDataset data(1e-4);
    for (int i = 0; i < 40; ++i)
        data.add({rng.uniform(), rng.uniform(), rng.uniform()}, rng.uniform(0.0, 1000.0));
    const GprModel model = GprModel::fit(data, true);
    for (int q = 0; q < 500; ++q) {
        const Eigen::Vector3d query{rng.uniform(-1, 2), rng.uniform(-1, 2), rng.uniform(-1, 2)};
        CHECK(model.posterior(query).variance >= 0.0);
    }
}

TEST_CASE("duplicate inputs with zero noise are reported") {
    GprDataset data(0.0);
    data.add({0.5, 0.5, 0.5}, 1.0);
    data.add({0.5, 0.5, 0.5}, 2.0);
    CHECK_THROWS_AS(GprModel::fit(data, false), std::runtime_error);
}

TEST_CASE("the dataset cap evicts oldest entries first") {
    GprDataset data(1e-4, 3);
    for (int i = 0; i < 5; ++i) data.add(Eigen::Vector3d::Constant(0.1 * i), static_cast<double>(i));
    REQUIRE(data.size() == 3);
    CHECK(data.observations().front() == 2.0);
    CHECK(data.observations().back() == 4.0);
}

TEST_CASE("expected gradient vanishes on a constant function") {
    // standardization maps constant observations to a constant posterior
    GprDataset data(0.0);
    RngStream rng(24);
    for (int i = 0; i < 12; ++i)
        data.add({rng.uniform(), rng.uniform(), rng.uniform()}, 42.0);
    const GprModel model = GprModel::fit(data, true);
    const Eigen::Vector3d g = expected_gradient(model, {0.5, 0.5, 0.5}, 0.05);
    for (int m = 0; m < 3; ++m) CHECK(std::abs(g(m)) < 1e-6);
}

TEST_CASE("expected gradient recovers a linear slope") {
    // l = -100 * x1 sampled on a 20-point grid along the first coordinate
    GprDataset data(1e-6);
    for (int i = 0; i < 20; ++i) {
        const double x1 = static_cast<double>(i) / 19.0;
        data.add({x1, 0.5, 0.5}, -100.0 * x1);
    }
    const GprModel model = GprModel::fit(data, true);
    const Eigen::Vector3d g = expected_gradient(model, {0.5, 0.5, 0.5}, 0.05);
    CHECK(g(0) == doctest::Approx(-100.0).epsilon(0.05));
    CHECK(std::abs(g(1)) < 5.0);
    CHECK(std::abs(g(2)) < 5.0);
}

TEST_CASE("halving tau is Richardson-consistent on a smooth fit") {
    GprDataset data(1e-6);
    RngStream rng(25);
    for (int i = 0; i < 30; ++i) {
        const Eigen::Vector3d x{rng.uniform(), rng.uniform(), rng.uniform()};
        data.add(x, std::sin(3.0 * x(0)) + 0.5 * x(1) * x(1));
    }
    const GprModel model = GprModel::fit(data, true);
    const Eigen::Vector3d mid{0.5, 0.5, 0.5};
    const Eigen::Vector3d g4 = expected_gradient(model, mid, 0.2);
    const Eigen::Vector3d g2 = expected_gradient(model, mid, 0.1);
    const Eigen::Vector3d g1 = expected_gradient(model, mid, 0.05);
    // central differences converge at O(tau^2): successive deltas shrink
    CHECK((g1 - g2).norm() < 0.5 * (g2 - g4).norm() + 1e-9);
}

TEST_CASE("probes are clipped into the unit cube") {
    GprDataset data(1e-6);
    for (int i = 0; i < 10; ++i) {
        const double x1 = static_cast<double>(i) / 9.0;
        data.add({x1, 0.5, 0.5}, 10.0 * x1);
    }
    const GprModel model = GprModel::fit(data, true);
    // at the boundary the probe collapses to a one-sided difference over tau
    const Eigen::Vector3d g = expected_gradient(model, {0.0, 0.5, 0.5}, 0.05);
    CHECK(std::isfinite(g(0)));
    CHECK_THROWS_AS(expected_gradient(model, {0.5, 0.5, 0.5}, 0.0), std::invalid_argument);
}
