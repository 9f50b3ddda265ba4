#ifndef FSTICKY_PATHS_HPP
#define FSTICKY_PATHS_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "monotone.hpp"
#include "params.hpp"
#include "rbm.hpp"
#include "rng.hpp"
#include "variates.hpp"

namespace fsticky {

struct PathSkeleton {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> local_time;
    std::vector<double> occupation;
    std::optional<double> killed_at;

    std::size_t size() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

struct HoldingRecord {
    double start;
    double duration;
    int index;
};

namespace detail {

inline std::size_t step_count(double horizon, double dt) {
    require(horizon > 0.0, "horizon must be positive");
    require(dt > 0.0, "dt must be positive");
    require(dt <= horizon, "dt must not exceed horizon");
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

// Linear interpolation of ys on the increasing grid xs.
inline double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}

} // namespace detail

inline PathSkeleton simulate_rbm(double x0, double horizon, double dt, RngStream& rng) {
    require(x0 >= 0.0, "simulate_rbm: x0 must be nonnegative");
    const std::size_t n = detail::step_count(horizon, dt);
    const double h = horizon / static_cast<double>(n);
    PathSkeleton sk;
    sk.times.resize(n + 1);
    sk.positions.resize(n + 1);
    sk.local_time.resize(n + 1);
    HalfLineRbm rbm(x0, h);
    sk.times[0] = 0.0;
    sk.positions[0] = x0;
    sk.local_time[0] = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        rbm.step(rng);
        sk.times[k] = static_cast<double>(k) * h;
        sk.positions[k] = rbm.x();
        sk.local_time[k] = rbm.gamma();
    }
    sk.occupation = sk.times;
    return sk;
}

// V_t = t + (eta/sigma) gamma_t
inline MonotoneFn build_sticky_clock(const ModelParams& p, const PathSkeleton& sk) {
    p.validate();
    const double k = p.stickiness();
    std::vector<double> v(sk.size());
    for (std::size_t i = 0; i < sk.size(); ++i) v[i] = sk.times[i] + k * sk.local_time[i];
    return MonotoneFn(sk.times, std::move(v));
}

// V-bar_t = t + H((eta/sigma) gamma_t). The subordinator increment earned
// over a grid step is placed as a jump at the right end of that step.
inline std::pair<MonotoneFn, SubordinatorTrace> build_frac_sticky_clock(const ModelParams& p,
                                                                       const PathSkeleton& sk,
                                                                       RngStream& rng) {
    p.validate();
    if (p.alpha == 1.0) return {build_sticky_clock(p, sk), SubordinatorTrace{}};
    const double k = p.stickiness();
    std::vector<double> levels;
    for (std::size_t i = 1; i < sk.size(); ++i)
        if (sk.local_time[i] > sk.local_time[i - 1]) levels.push_back(k * sk.local_time[i]);
    SubordinatorTrace tr;
    if (!levels.empty()) {
        levels.insert(levels.begin(), 0.0);
        tr = sample_subordinator_increments({p.alpha, 1.0}, levels, rng);
    }
    std::vector<double> s, v;
    s.reserve(sk.size() + levels.size());
    v.reserve(sk.size() + levels.size());
    s.push_back(sk.times[0]);
    v.push_back(sk.times[0]);
    double h = 0.0;
    std::size_t j = 1;
    for (std::size_t i = 1; i < sk.size(); ++i) {
        s.push_back(sk.times[i]);
        v.push_back(sk.times[i] + h);
        if (sk.local_time[i] > sk.local_time[i - 1]) {
            h = tr.values[j++];
            s.push_back(sk.times[i]);
            v.push_back(sk.times[i] + h);
        }
    }
    return {MonotoneFn(std::move(s), std::move(v)), std::move(tr)};
}

// X-bar_t = X+(V-bar^{-1}_t) on an external grid. Inside a clock jump the
// process is held at the boundary. local_time of the result is
// gamma+ o V-bar^{-1}. With c > 0 an Exp(1) threshold E is drawn and the path
// is killed when (c/sigma) gamma+ o V-bar^{-1} first reaches E.
inline PathSkeleton compose_xbar(const ModelParams& p, const PathSkeleton& sk, const MonotoneFn& clock,
                                 RngStream& rng, const std::vector<double>& external_grid = {}) {
    p.validate();
    std::vector<double> grid = external_grid;
    if (grid.empty()) {
        const std::size_t n = sk.size() - 1;
        const double h = sk.horizon() / static_cast<double>(n);
        grid.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) grid[j] = static_cast<double>(j) * h;
    }
    const MonotoneFn inv = generalized_inverse(clock);
    PathSkeleton out;
    out.times = grid;
    out.positions.resize(grid.size());
    out.local_time.resize(grid.size());
    out.occupation.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid[j];
        const double s = inv(t);
        require(std::isfinite(s), "compose_xbar: external grid exceeds the clock range");
        const bool held = clock.left_limit(s) <= t && t < clock.right_limit(s);
        out.positions[j] = held ? 0.0 : detail::interp(sk.times, sk.positions, s);
        out.local_time[j] = detail::interp(sk.times, sk.local_time, s);
        out.occupation[j] = s;
    }
    if (p.c > 0.0) {
        const double level = p.sigma * rng.exponential() / p.c;
        const auto& g = sk.local_time;
        for (std::size_t i = 1; i < sk.size(); ++i) {
            if (g[i] >= level) {
                const double w = (level - g[i - 1]) / (g[i] - g[i - 1]);
                const double s_star = sk.times[i - 1] + w * (sk.times[i] - sk.times[i - 1]);
                const double t_kill = clock.left_limit(s_star);
                if (t_kill <= grid.back()) out.killed_at = t_kill;
                break;
            }
        }
    }
    return out;
}

// Streaming version of simulate_rbm + build_frac_sticky_clock + compose_xbar:
// answers queries at nondecreasing external times without storing the path.
// Uses the same variate order as the skeleton route, so with the same two
// streams the results agree with it.
template <class Rbm>
class FracStickyWalker {
public:
    struct State {
        double x;
        double gamma;
        bool held;
    };

    FracStickyWalker(const ModelParams& p, Rbm rbm, double dt, RngStream& path_rng, RngStream& h_rng)
        : p_(p), rbm_(std::move(rbm)), dt_(dt), k_(p.stickiness()), path_rng_(path_rng), h_rng_(h_rng) {
        p_.validate();
        x0_ = x1_ = rbm_.x();
        advance();
    }

    State at(double t) {
        for (;;) {
            const double e0 = s0_ + h0_;
            if (p_.alpha == 1.0) {
                const double e1 = s1_ + h1_;
                if (t < e1) {
                    const double w = (t - e0) / (e1 - e0);
                    return {x0_ + w * (x1_ - x0_), g0_ + w * (g1_ - g0_), false};
                }
            } else {
                if (t < s1_ + h0_) {
                    const double w = (t - e0) / dt_;
                    return {x0_ + w * (x1_ - x0_), g0_ + w * (g1_ - g0_), false};
                }
                if (t < s1_ + h1_) return {side_, g1_, true};
            }
            advance();
        }
    }

    double internal_time() const { return s1_; }
    const Rbm& rbm() const { return rbm_; }

private:
    void advance() {
        x0_ = x1_;
        g0_ = g1_;
        h0_ = h1_;
        s0_ = s1_;
        ++steps_;
        const double dl = rbm_.step(path_rng_);
        s1_ = static_cast<double>(steps_) * dt_;
        x1_ = rbm_.x();
        g1_ = rbm_.gamma();
        if (dl > 0.0) {
            const double l1 = k_ * g1_;
            h1_ = h0_ + detail::stable_draw(p_.alpha, l1 - level_, h_rng_);
            level_ = l1;
            side_ = rbm_.boundary_position();
        }
    }

    ModelParams p_;
    Rbm rbm_;
    double dt_, k_;
    RngStream& path_rng_;
    RngStream& h_rng_;
    std::size_t steps_ = 0;
    double s0_ = 0, s1_ = 0, x0_ = 0, x1_ = 0, g0_ = 0, g1_ = 0, h0_ = 0, h1_ = 0;
    double level_ = 0.0, side_ = 0.0;
};

// Maximal external-time runs with position < eps_hold. A run that is still
// open at the end of the grid is closed at the last grid time.
inline std::vector<HoldingRecord> extract_holdings(const PathSkeleton& xbar, double eps_hold) {
    require(eps_hold > 0.0, "extract_holdings: eps_hold must be positive");
    std::vector<HoldingRecord> out;
    const std::size_t n = xbar.size();
    std::size_t i = 0;
    while (i < n) {
        if (xbar.positions[i] < eps_hold) {
            std::size_t j = i;
            while (j < n && xbar.positions[j] < eps_hold) ++j;
            const double end = j < n ? xbar.times[j] : xbar.times[n - 1];
            if (end > xbar.times[i])
                out.push_back({xbar.times[i], end - xbar.times[i], static_cast<int>(out.size())});
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

// Duration of the first hold of X-bar from x0 = 0 on the external grid
// t_j = j dt, as extract_holdings(compose_xbar(...))[0] would report it.
inline double first_hold_duration(const ModelParams& p, double dt, double eps_hold, RngStream& path_rng,
                                  RngStream& h_rng, double max_time = 1e6) {
    FracStickyWalker<HalfLineRbm> w(p, HalfLineRbm(0.0, dt), dt, path_rng, h_rng);
    for (std::size_t j = 1;; ++j) {
        const double t = static_cast<double>(j) * dt;
        if (w.at(t).x >= eps_hold || t >= max_time) return t;
    }
}

struct FunctionalValue {
    double value;
    double tail_bound;
    bool tail_warning;
};

// int_0^T exp(-l t - a X_t - b gamma_t) dt, trapezoid in the integrand with
// exact exponential time weights.
inline FunctionalValue path_functional_dt(const PathSkeleton& sk, double lambda, double a, double b,
                                          double tail_tol = 1e-4) {
    require(lambda > 0.0, "path_functional_dt: lambda must be positive");
    double sum = 0.0;
    double w0 = 1.0;
    double g0 = std::exp(-a * sk.positions[0] - b * sk.local_time[0]);
    for (std::size_t k = 1; k < sk.size(); ++k) {
        const double w1 = std::exp(-lambda * sk.times[k]);
        const double g1 = std::exp(-a * sk.positions[k] - b * sk.local_time[k]);
        sum += 0.5 * (g0 + g1) * (w0 - w1) / lambda;
        w0 = w1;
        g0 = g1;
    }
    const double tb = std::exp(-lambda * sk.horizon()) / lambda;
    return {sum, tb, tb > tail_tol};
}

// int_0^T exp(-l t - b gamma_t) dgamma_t, Stieltjes sum over local-time
// increments with the step-averaged time weight. The expected tail beyond T
// is at most exp(-l T)/sqrt(l).
inline FunctionalValue path_functional_dgamma(const PathSkeleton& sk, double lambda, double b,
                                              double tail_tol = 1e-4) {
    require(lambda > 0.0, "path_functional_dgamma: lambda must be positive");
    double sum = 0.0;
    for (std::size_t k = 1; k < sk.size(); ++k) {
        const double dg = sk.local_time[k] - sk.local_time[k - 1];
        if (dg <= 0.0) continue;
        const double t0 = sk.times[k - 1], t1 = sk.times[k];
        const double tw = (std::exp(-lambda * t0) - std::exp(-lambda * t1)) / (lambda * (t1 - t0));
        const double gw = b > 0.0 ? (std::exp(-b * sk.local_time[k - 1]) - std::exp(-b * sk.local_time[k])) / b : dg;
        sum += tw * gw;
    }
    const double tb = std::exp(-lambda * sk.horizon()) / std::sqrt(lambda);
    return {sum, tb, tb > tail_tol};
}

// int_0^inf exp(-l t) dg(t) for a piecewise-linear-with-jumps g, exactly.
inline double stieltjes_laplace(const MonotoneFn& g, double lambda) {
    const auto& s = g.args();
    const auto& v = g.values();
    double sum = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double dv = v[i] - v[i - 1];
        if (dv <= 0.0) continue;
        if (s[i] == s[i - 1]) {
            sum += dv * std::exp(-lambda * s[i]);
        } else {
            const double slope = dv / (s[i] - s[i - 1]);
            sum += slope * (std::exp(-lambda * s[i - 1]) - std::exp(-lambda * s[i])) / lambda;
        }
    }
    return sum;
}

struct LifetimeConfig {
    double kill_rate = -1.0;   // rate of the Exp threshold chi; negative means c/sigma
    double dt = 1e-3;
    double max_internal_time = 50.0;
};

struct LifetimeSample {
    double value;
    bool censored;  // path horizon reached before the kill; value is a lower bound
};

// zeta-bar = V-bar(s*), s* = inf{s : gamma+_s > chi}, chi ~ Exp(kill_rate).
inline LifetimeSample sample_lifetime(const ModelParams& p, double x0, RngStream& path_rng, RngStream& h_rng,
                                      const LifetimeConfig& cfg = {}) {
    p.validate();
    if (!(p.c > 0.0)) throw DomainError("sample_lifetime: c = 0 gives an infinite lifetime");
    const double rate = cfg.kill_rate > 0.0 ? cfg.kill_rate : p.c / p.sigma;
    const double chi = path_rng.exponential() / rate;
    const double k = p.stickiness();
    HalfLineRbm rbm(x0, cfg.dt);
    const std::size_t n = detail::step_count(cfg.max_internal_time, cfg.dt);
    double g_prev = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        rbm.step(path_rng);
        const double g = rbm.gamma();
        if (g > chi) {
            const double s_star = (static_cast<double>(i - 1) + (chi - g_prev) / (g - g_prev)) * cfg.dt;
            return {s_star + detail::stable_draw(p.alpha, k * chi, h_rng), false};
        }
        g_prev = g;
    }
    const double s_end = static_cast<double>(n) * cfg.dt;
    return {s_end + detail::stable_draw(p.alpha, k * g_prev, h_rng), true};
}

// Regenerative boundary engine for the hat process.
struct HatPath {
    std::vector<HoldingRecord> holds;      // e_i of X, Exp(sigma/eta)
    std::vector<HoldingRecord> hat_holds;  // e-hat_i = H(e_i), external clock of X-hat
    MonotoneFn gamma_hat;                  // cumulative boundary time of X-hat
    int excursions = 0;
};

inline HatPath hat_event_engine(const ModelParams& p, double x0, double horizon, double delta, RngStream& rng) {
    p.validate();
    require(delta > 0.0, "hat_event_engine: delta must be positive");
    require(delta < horizon, "hat_event_engine: delta must be below horizon");
    require(x0 >= 0.0, "hat_event_engine: x0 must be nonnegative");
    const double rate = p.sigma / p.eta;
    const double a = 1.0 / std::sqrt(delta), b = 1.0 / std::sqrt(horizon);
    HatPath out;
    std::vector<double> s{0.0}, v{0.0};
    double t = 0.0, t_x = 0.0, g = 0.0;
    if (x0 > 0.0) {
        t = std::min(horizon, detail::stable_draw(0.5, x0, rng));
        t_x = t;
        s.push_back(t);
        v.push_back(0.0);
    }
    while (t < horizon) {
        const double e = rng.exponential() / rate;
        const double eh = detail::stable_draw(p.alpha, e, rng);
        out.holds.push_back({t_x, e, static_cast<int>(out.holds.size())});
        out.hat_holds.push_back({t, eh, static_cast<int>(out.hat_holds.size())});
        const double dur = std::min(eh, horizon - t);
        t += dur;
        g += dur;
        s.push_back(t);
        v.push_back(g);
        t_x += e;
        if (t >= horizon) break;
        const double u = rng.uniform();
        const double r = a - u * (a - b);
        const double exc = 1.0 / (r * r);
        ++out.excursions;
        t = std::min(horizon, t + exc);
        t_x += exc;
        s.push_back(t);
        v.push_back(g);
    }
    out.gamma_hat = MonotoneFn(std::move(s), std::move(v));
    return out;
}

} // namespace fsticky

#endif
