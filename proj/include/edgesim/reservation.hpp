#pragma once

#include <Eigen/Core>
#include <vector>

namespace edgesim {

// Direction of the constant drift term in the primal update. AsPrinted applies
// X + eta1*(+1 - lambda*grad); Descent applies X + eta1*(-1 - lambda*grad),
// the projected gradient step on the usage Lagrangian. Descent is the default:
// with a latency that decreases in every resource, the +1 drift saturates all
// reservations at 1 whenever the constraint is slack, which contradicts the
// intended usage minimization (see README).
enum class DriftMode { Descent, AsPrinted };

// Large-timescale controller state: current reservation, dual multiplier and
// step sizes. `latency_scale` divides both the constraint residual and the
// gradient so the dual dynamics are dimensionless; setting it to 1 reproduces
// the raw update arithmetic.
struct ReservationState {
    Eigen::Vector3d x{1.0, 1.0, 1.0};  // uplink, downlink, compute fractions
    double lambda = 0.0;
    double eta1 = 0.02;
    double eta2 = 0.02;
    double tau = 0.05;
    double l_max_ms = 500.0;
    Eigen::Vector3d alpha{1.0, 1.0, 1.0};  // usage weights
    double latency_scale = 500.0;
    DriftMode drift = DriftMode::Descent;

    double weighted_usage() const { return alpha.dot(x); }
};

// One primal-dual step:
//   X'      = clip(X + eta1 * (drift - lambda * grad / scale), 0, 1)
//   lambda' = max(0, lambda + eta2 * (l_H - L_max) / scale)
// The X update uses the pre-update lambda. Throws std::invalid_argument on a
// non-finite gradient.
ReservationState update_reservation(const ReservationState& state,
                                    const Eigen::Vector3d& gradient, double l_h_observed_ms);

// Maximum completed-offload latency in one reservation window. Throws
// std::invalid_argument on an empty window.
double observe_window(const std::vector<double>& window_latencies_ms);

}  // namespace edgesim
