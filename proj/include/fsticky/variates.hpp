#ifndef FSTICKY_VARIATES_HPP
#define FSTICKY_VARIATES_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace fsticky {

// One-sided stable law with E[exp(-xi S)] = exp(-scale xi^alpha).
struct StableParams {
    double alpha;
    double scale;

    void validate() const {
        require(alpha > 0.0 && alpha < 1.0, "StableParams: alpha must lie in (0,1)");
        require(scale > 0.0, "StableParams: scale must be positive");
    }
};

namespace detail {

// Unit positive stable via Kanter's representation, written in log form so
// that alpha -> 1 stays finite. alpha in (0,1].
inline double unit_stable(double alpha, RngStream& rng) {
    if (alpha == 1.0) return 1.0;
    const double u = std::numbers::pi * rng.uniform();
    const double e = rng.exponential();
    const double la = (alpha * std::log(std::sin(alpha * u)) +
                       (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                       std::log(std::sin(u))) / alpha;
    return std::exp(la - (1.0 - alpha) / alpha * std::log(e));
}

// Stable draw of the given scale, alpha in (0,1]; alpha = 1 is the
// degenerate law at `scale`.
inline double stable_draw(double alpha, double scale, RngStream& rng) {
    if (scale <= 0.0) return 0.0;
    if (alpha == 1.0) return scale;
    return std::pow(scale, 1.0 / alpha) * unit_stable(alpha, rng);
}

} // namespace detail

inline double sample_positive_stable(const StableParams& p, RngStream& rng) {
    p.validate();
    return std::pow(p.scale, 1.0 / p.alpha) * detail::unit_stable(p.alpha, rng);
}

// P(T > t) = E_alpha(-rate t^alpha), via T = (E/rate)^{1/alpha} S.
inline double sample_mittag_leffler(double alpha, double rate, RngStream& rng) {
    require(alpha > 0.0 && alpha <= 1.0, "sample_mittag_leffler: alpha must lie in (0,1]");
    require(rate > 0.0, "sample_mittag_leffler: rate must be positive");
    const double e = rng.exponential() / rate;
    if (alpha == 1.0) return e;
    return std::pow(e, 1.0 / alpha) * detail::unit_stable(alpha, rng);
}

// L_t = inf{s : H_s > t}, drawn as (t/S)^alpha.
inline double sample_inverse_stable_marginal(double alpha, double t, RngStream& rng) {
    require(alpha > 0.0 && alpha < 1.0, "sample_inverse_stable_marginal: alpha must lie in (0,1)");
    require(t > 0.0, "sample_inverse_stable_marginal: t must be positive");
    return std::pow(t / detail::unit_stable(alpha, rng), alpha);
}

struct SubordinatorTrace {
    std::vector<double> levels;
    std::vector<double> values;

    bool empty() const { return levels.empty(); }
    std::size_t size() const { return levels.size(); }
};

// H evaluated along an increasing axis of levels.
inline SubordinatorTrace sample_subordinator_increments(const StableParams& p,
                                                        const std::vector<double>& levels,
                                                        RngStream& rng) {
    p.validate();
    SubordinatorTrace tr;
    tr.levels = levels;
    tr.values.reserve(levels.size());
    double prev_level = 0.0, h = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double l = levels[j];
        if (j == 0 ? l < 0.0 : !(l > levels[j - 1]))
            throw ValidationError("sample_subordinator_increments: levels must be strictly increasing and >= 0");
        h += detail::stable_draw(p.alpha, (l - prev_level) * p.scale, rng);
        tr.values.push_back(h);
        prev_level = l;
    }
    return tr;
}

// Fractional Poisson count N(L_t): Poisson(rate) run on the inverse-stable clock.
// The Poisson count is drawn by summing unit exponentials, exact for any mean.
inline long sample_fractional_poisson(double alpha, double rate, double t, RngStream& rng) {
    require(alpha > 0.0 && alpha <= 1.0, "sample_fractional_poisson: alpha must lie in (0,1]");
    require(rate > 0.0 && t > 0.0, "sample_fractional_poisson: rate and t must be positive");
    const double clock = alpha == 1.0 ? t : sample_inverse_stable_marginal(alpha, t, rng);
    const double mean = rate * clock;
    long k = 0;
    for (double s = rng.exponential(); s < mean; s += rng.exponential()) ++k;
    return k;
}

// The same count through the renewal form max{i : chi_1 + ... + chi_i < t}
// with Mittag-Leffler interarrival times.
inline long sample_fractional_poisson_renewal(double alpha, double rate, double t, RngStream& rng) {
    long k = 0;
    for (double s = sample_mittag_leffler(alpha, rate, rng); s < t; s += sample_mittag_leffler(alpha, rate, rng)) ++k;
    return k;
}

} // namespace fsticky

#endif
