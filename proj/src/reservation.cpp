#include "edgesim/reservation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

ReservationState update_reservation(const ReservationState& state,
                                    const Eigen::Vector3d& gradient, double l_h_observed_ms) {
    if (!gradient.allFinite())
        throw std::invalid_argument("update_reservation: non-finite gradient");
    ReservationState next = state;
    const double drift = state.drift == DriftMode::AsPrinted ? 1.0 : -1.0;
    const Eigen::Vector3d step =
        state.eta1 * (Eigen::Vector3d::Constant(drift) - state.lambda * gradient / state.latency_scale);
    next.x = (state.x + step).cwiseMax(0.0).cwiseMin(1.0);
    next.lambda =
        std::max(0.0, state.lambda + state.eta2 * (l_h_observed_ms - state.l_max_ms) / state.latency_scale);
    return next;
}

double observe_window(const std::vector<double>& window_latencies_ms) {
    if (window_latencies_ms.empty())
        throw std::invalid_argument("observe_window: empty reservation window");
    return *std::max_element(window_latencies_ms.begin(), window_latencies_ms.end());
}

}  // namespace edgesim
