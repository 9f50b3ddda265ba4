#ifndef FSTICKY_SPECFUN_HPP
#define FSTICKY_SPECFUN_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"

namespace fsticky {

struct MLEvalConfig {
    int series_cutoff = 200;     // max power-series terms
    double series_radius = 5.0;  // series tried only for |z| <= radius
    int quad_nodes = 61;         // Gauss-Kronrod rule: 15, 21, 31, 41, 51 or 61
    double abs_tol = 1e-10;

    void validate() const {
        require(abs_tol > 0, "MLEvalConfig: abs_tol must be positive");
        require(series_radius > 0, "MLEvalConfig: series_radius must be positive");
        require(quad_nodes >= 8, "MLEvalConfig: quad_nodes must be >= 8");
        require(series_cutoff >= 1, "MLEvalConfig: series_cutoff must be >= 1");
    }
};

namespace detail {

// Power series of E_a(-x). Returns false when cancellation or truncation
// would spoil the requested tolerance.
inline bool ml_series(double a, double x, const MLEvalConfig& cfg, double& out) {
    double sum = 1.0, abs_sum = 1.0;
    const double lx = std::log(x);
    for (int k = 1; k <= cfg.series_cutoff; ++k) {
        const double mag = std::exp(k * lx - std::lgamma(a * k + 1.0));
        sum += (k % 2 ? -mag : mag);
        abs_sum += mag;
        if (abs_sum * 4e-16 > 0.1 * cfg.abs_tol) return false;
        if (mag < 1e-3 * cfg.abs_tol && k * a > x) {
            out = sum;
            return true;
        }
    }
    return false;
}

// Bisection on a fixed Kronrod rule until the local error estimate meets an
// absolute tolerance (boost's adaptive driver only offers a relative one).
template <unsigned N, class F>
double gk_absolute(const F& f, double a, double b, double tol, int depth, double& err) {
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, N>::integrate(f, a, b, 0, 0.0, &e);
    e *= 0.5 * (b - a);  // boost reports the error of the rule on [-1,1]
    if (e <= tol || depth >= 30) {
        err += e;
        return v;
    }
    const double m = 0.5 * (a + b);
    return gk_absolute<N>(f, a, m, 0.5 * tol, depth + 1, err) + gk_absolute<N>(f, m, b, 0.5 * tol, depth + 1, err);
}

template <unsigned N>
double ml_integral_rule(double a, double x, double tol, double& err) {
    const double upper = a * std::numbers::pi;
    const double p = 1.0 / a;
    auto integrand = [=](double phi) {
        const double den = std::sin(upper - phi);
        if (den <= 0) return 0.0;
        const double r = x * std::sin(phi) / den;
        return std::exp(-std::pow(r, p));
    };
    // The integrand drops from 1 to 0 around the phi where r(phi) = 1; for
    // large x that layer is thin, so break the range geometrically around it.
    double lo = 0.0, hi = upper;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * upper; ++it) {
        const double mid = 0.5 * (lo + hi);
        (x * std::sin(mid) / std::sin(upper - mid) < 1.0 ? lo : hi) = mid;
    }
    const double knee = 0.5 * (lo + hi);
    std::vector<double> cuts{0.0};
    for (double c = knee / 64.0; c < upper; c *= 2.0)
        if (c > cuts.back()) cuts.push_back(c);
    cuts.push_back(upper);
    double v = 0.0;
    err = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        v += gk_absolute<N>(integrand, cuts[i - 1], cuts[i], tol * (cuts[i] - cuts[i - 1]), 0, err);
    err /= upper;
    return v / upper;
}

// E_a(-x) = (1/(a pi)) int_0^{a pi} exp(-(x sin(phi)/sin(a pi - phi))^{1/a}) dphi
inline double ml_integral(double a, double x, const MLEvalConfig& cfg, double& err) {
    const double tol = 0.01 * cfg.abs_tol;
    switch (cfg.quad_nodes) {
    case 15: return ml_integral_rule<15>(a, x, tol, err);
    case 21: return ml_integral_rule<21>(a, x, tol, err);
    case 31: return ml_integral_rule<31>(a, x, tol, err);
    case 41: return ml_integral_rule<41>(a, x, tol, err);
    case 51: return ml_integral_rule<51>(a, x, tol, err);
    default: return ml_integral_rule<61>(a, x, tol, err);
    }
}

} // namespace detail

// Mittag-Leffler function E_alpha(z) for alpha in (0,1] and real z <= 0.
inline double mittag_leffler(double alpha, double z, const MLEvalConfig& cfg = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("mittag_leffler: alpha must lie in (0,1]");
    if (!(z <= 0.0)) throw DomainError("mittag_leffler: z must be nonpositive");
    cfg.validate();
    if (z == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(z);
    const double x = -z;
    double v = 0.0;
    if (x <= cfg.series_radius && detail::ml_series(alpha, x, cfg, v))
        return std::min(1.0, std::max(v, 0.0));
    double err = 0.0;
    v = detail::ml_integral(alpha, x, cfg, err);
    if (!(err <= cfg.abs_tol))
        throw ConvergenceError("mittag_leffler: quadrature tolerance not met", err);
    return std::min(1.0, v);
}

// Survival function E_alpha(-rate t^alpha) of a Mittag-Leffler holding time.
inline double ml_survival(double alpha, double rate, double t, const MLEvalConfig& cfg = {}) {
    if (!(rate > 0.0)) throw DomainError("ml_survival: rate must be positive");
    if (!(t >= 0.0)) throw DomainError("ml_survival: t must be nonnegative");
    return mittag_leffler(alpha, -rate * std::pow(t, alpha), cfg);
}

// Heat kernel of d^2/dx^2: exp(-z^2/4t)/sqrt(4 pi t).
inline double gauss_kernel(double t, double z) {
    if (!(t > 0.0)) throw DomainError("gauss_kernel: t must be positive");
    return std::exp(-z * z / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

} // namespace fsticky

#endif
