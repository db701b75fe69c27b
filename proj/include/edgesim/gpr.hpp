#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstddef>
#include <deque>
#include <vector>

namespace edgesim {

// Reservation -> observed max-latency pairs. Capped with oldest-first
// eviction; the observation noise variance applies on the standardized scale.
class GprDataset {
public:
    explicit GprDataset(double noise_var = 1e-4, std::size_t cap = 512)
        : noise_var_(noise_var), cap_(cap) {}

    void add(const Eigen::Vector3d& x, double y);
    std::size_t size() const { return xs_.size(); }
    const std::deque<Eigen::Vector3d>& inputs() const { return xs_; }
    const std::deque<double>& observations() const { return ys_; }
    double noise_var() const { return noise_var_; }

private:
    double noise_var_;
    std::size_t cap_;
    std::deque<Eigen::Vector3d> xs_;
    std::deque<double> ys_;
};

// squared-exponential kernel with unit length scale: exp(-0.5 ||x - x'||^2)
double se_kernel(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct GprPrediction {
    double mean;
    double variance;  // clamped at zero against round-off
};

// Zero-mean GP posterior over (optionally standardized) observations, backed
// by a Cholesky factorization of K + noise*I recomputed per fit.
class GprModel {
public:
    // Throws std::runtime_error when K + noise*I is not positive definite
    // (possible only with zero noise and duplicate inputs).
    static GprModel fit(const GprDataset& data, bool standardize_y = true);

    GprPrediction posterior(const Eigen::Vector3d& query) const;
    std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }

private:
    std::vector<Eigen::Vector3d> xs_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;  // (K + noise I)^-1 y_standardized
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
};

// Central difference of the posterior mean along each coordinate axis:
//   g_m = 0.5 * (mu(x + tau e_m) - mu(x - tau e_m)) / tau
// with probe points clipped into [0,1]^3.
Eigen::Vector3d expected_gradient(const GprModel& model, const Eigen::Vector3d& x, double tau);

}  // namespace edgesim
