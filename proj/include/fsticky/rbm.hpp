#ifndef FSTICKY_RBM_HPP
#define FSTICKY_RBM_HPP

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace fsticky {

// Reflected Brownian motion with generator d^2/dx^2 (increment variance 2 dt).
// Each step draws the free increment and, when the Brownian bridge between
// the endpoints can reach the barrier, its exact minimum; the Skorokhod
// pushing term over the step is then max(0, -min). The boundary local time is
// this pushing term (the unit constant makes E_0 int e^{-lt} dgamma = 1/sqrt(l)).
// Grid values of (X, gamma) are therefore exact in law.
namespace detail {

// Bridges with 2ab/var beyond this cannot reach 0 except with prob < e^{-50}.
inline constexpr double bridge_cutoff = 50.0;

inline double bridge_push(double a, double b, double var, RngStream& rng) {
    if (a > 0.0 && b > 0.0 && 2.0 * a * b > bridge_cutoff * var) return 0.0;
    const double m = 0.5 * (a + b - std::sqrt((a - b) * (a - b) - 2.0 * var * std::log(rng.uniform())));
    return m < 0.0 ? -m : 0.0;
}

} // namespace detail

class HalfLineRbm {
public:
    HalfLineRbm(double x0, double dt) : x_(x0), var_(2.0 * dt), sd_(std::sqrt(2.0 * dt)) {
        require(x0 >= 0.0, "HalfLineRbm: x0 must be nonnegative");
        require(dt > 0.0, "HalfLineRbm: dt must be positive");
    }

    // Advances one step; returns the local-time increment.
    double step(RngStream& rng) {
        const double a = x_;
        const double b = a + sd_ * rng.normal();
        const double dl = detail::bridge_push(a, b, var_, rng);
        x_ = std::max(0.0, b + dl);
        gamma_ += dl;
        return dl;
    }

    double x() const { return x_; }
    double gamma() const { return gamma_; }
    // Where the process sits while held at the boundary.
    double boundary_position() const { return 0.0; }

private:
    double x_;
    double gamma_ = 0.0;
    double var_, sd_;
};

// Reflection at both ends of [0,1]; gamma is the sum of the two endpoint
// local times. A single step interacting with both barriers has probability
// of order exp(-1/(8 dt)) and is not treated specially.
class IntervalRbm {
public:
    IntervalRbm(double x0, double dt) : x_(x0), var_(2.0 * dt), sd_(std::sqrt(2.0 * dt)) {
        require(x0 >= 0.0 && x0 <= 1.0, "IntervalRbm: x0 must lie in [0,1]");
        require(dt > 0.0, "IntervalRbm: dt must be positive");
    }

    double step(RngStream& rng) {
        const double a = x_;
        double b = a + sd_ * rng.normal();
        const double d0 = detail::bridge_push(a, b, var_, rng);
        b += d0;
        const double d1 = detail::bridge_push(1.0 - a, 1.0 - b, var_, rng);
        b -= d1;
        x_ = std::clamp(b, 0.0, 1.0);
        gamma0_ += d0;
        gamma1_ += d1;
        last_side_ = d1 > d0 ? 1.0 : 0.0;
        return d0 + d1;
    }

    double x() const { return x_; }
    double gamma() const { return gamma0_ + gamma1_; }
    double gamma0() const { return gamma0_; }
    double gamma1() const { return gamma1_; }
    double boundary_position() const { return last_side_; }

private:
    double x_;
    double gamma0_ = 0.0, gamma1_ = 0.0;
    double last_side_ = 0.0;
    double var_, sd_;
};

} // namespace fsticky

#endif
