#ifndef LIEDEPTH_ODE_HPP
#define LIEDEPTH_ODE_HPP

#include <cmath>
#include <cstddef>

namespace liedepth {

/// Number of equal substeps of size <= step covering a window of length `duration`.
inline std::size_t substeps_for(double duration, double step) {
    const double q = std::ceil(duration / step - 1e-9);
    return q < 1.0 ? std::size_t{1} : static_cast<std::size_t>(q);
}

/// Classical fourth-order Runge-Kutta over [t0, t0 + duration] with `steps`
/// equal substeps. `rhs(t, y)` returns dy/dt; State needs +, scalar * and copy.
template <class State, class Rhs>
State rk4_integrate(State y, double t0, double duration, std::size_t steps, Rhs&& rhs) {
    const double h = duration / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
        const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
        const State k4 = rhs(t + h, State(y + h * k3));
        y = State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return y;
}

}  // namespace liedepth

#endif
