#include "edgesim/gpr.hpp"

#include <cmath>
#include <stdexcept>

namespace edgesim {

void GprDataset::add(const Eigen::Vector3d& x, double y) {
    xs_.push_back(x);
    ys_.push_back(y);
    while (xs_.size() > cap_) {
        xs_.pop_front();
        ys_.pop_front();
    }
}

double se_kernel(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::exp(-0.5 * (a - b).squaredNorm());
}

GprModel GprModel::fit(const GprDataset& data, bool standardize_y) {
    if (data.size() == 0) throw std::invalid_argument("gpr fit: empty dataset");
    GprModel m;
    const auto n = static_cast<Eigen::Index>(data.size());
    m.xs_.assign(data.inputs().begin(), data.inputs().end());

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = data.observations()[static_cast<std::size_t>(i)];
    if (standardize_y) {
        m.y_mean_ = y.mean();
        const double var = (y.array() - m.y_mean_).square().sum() / static_cast<double>(n);
        m.y_scale_ = std::sqrt(var);
        if (m.y_scale_ < 1e-12) m.y_scale_ = 1.0;
    }
    const Eigen::VectorXd ys = (y.array() - m.y_mean_) / m.y_scale_;

    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double k = se_kernel(m.xs_[static_cast<std::size_t>(i)], m.xs_[static_cast<std::size_t>(j)]);
            gram(i, j) = k;
            gram(j, i) = k;  // symmetric by construction
        }
        gram(i, i) += data.noise_var();
    }

    m.llt_.compute(gram);
    if (m.llt_.info() != Eigen::Success)
        throw std::runtime_error(
            "gpr fit: K + noise*I not positive definite (duplicate inputs with zero noise?)");
    m.alpha_ = m.llt_.solve(ys);
    return m;
}

GprPrediction GprModel::posterior(const Eigen::Vector3d& query) const {
    const auto n = alpha_.size();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = se_kernel(query, xs_[static_cast<std::size_t>(i)]);
    const double mean_s = k.dot(alpha_);
    const double var_s = se_kernel(query, query) - k.dot(llt_.solve(k));
    GprPrediction p;
    p.mean = mean_s * y_scale_ + y_mean_;
    p.variance = std::max(0.0, var_s) * y_scale_ * y_scale_;
    return p;
}

Eigen::Vector3d expected_gradient(const GprModel& model, const Eigen::Vector3d& x, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("expected_gradient: tau must be positive");
    Eigen::Vector3d g;
    for (int m = 0; m < 3; ++m) {
        Eigen::Vector3d hi = x, lo = x;
        hi(m) = std::min(1.0, x(m) + tau);
        lo(m) = std::max(0.0, x(m) - tau);
        g(m) = 0.5 * (model.posterior(hi).mean - model.posterior(lo).mean) / tau;
    }
    return g;
}

}  // namespace edgesim
