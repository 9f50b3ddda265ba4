#ifndef FSTICKY_HALFLINE_HPP
#define FSTICKY_HALFLINE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "error.hpp"
#include "field.hpp"
#include "laplace.hpp"
#include "mc.hpp"
#include "params.hpp"
#include "paths.hpp"
#include "specfun.hpp"

namespace fsticky {

using cplx = std::complex<double>;

struct InitialDatum {
    std::function<double(double)> f;
    double f_at_0 = 0.0;
    double sup_bound = 0.0;
    // int_0^inf exp(-y sqrt(lambda)) f(y) dy
    std::function<cplx(cplx)> laplace_weighted;
    // Bounded solution of v'' = lambda v - f on (0,inf) with v(0) = 0.
    std::function<cplx(cplx, double)> dirichlet_resolvent;
};

namespace detail {

inline double gk(const std::function<double(double)>& g, double a, double b, double tol = 1e-13) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, 18, tol, &err);
    return v;
}

inline cplx gk_complex(const std::function<cplx(double)>& g, double a, double b, double tol = 1e-13) {
    return {gk([&](double y) { return g(y).real(); }, a, b, tol),
            gk([&](double y) { return g(y).imag(); }, a, b, tol)};
}

// Length beyond which exp(-y re(q)) sup|f| / re(q) drops below tol.
inline double decay_length(cplx q, double sup, double tol) {
    const double rq = std::max(q.real(), 1e-8);
    return std::max(1.0, std::log(std::max(sup, 1e-300) / (tol * rq)) / rq);
}

} // namespace detail

// Datum with quadrature-based transforms and a sup certificate from probes.
inline InitialDatum make_datum(std::function<double(double)> f, double probe_max = 50.0) {
    InitialDatum d;
    d.f = f;
    d.f_at_0 = f(0.0);
    double sup = 0.0;
    for (int i = 0; i <= 5000; ++i) sup = std::max(sup, std::abs(f(probe_max * i / 5000.0)));
    require(std::isfinite(sup), "make_datum: datum is not bounded on the probe grid");
    d.sup_bound = sup;
    d.laplace_weighted = [f, sup](cplx lam) {
        const cplx q = std::sqrt(lam);
        const double y_max = detail::decay_length(q, sup, 1e-14);
        return detail::gk_complex([&](double y) { return std::exp(-y * q) * f(y); }, 0.0, y_max);
    };
    d.dirichlet_resolvent = [f, sup](cplx lam, double x) {
        const cplx q = std::sqrt(lam);
        const double y_max = x + detail::decay_length(q, sup, 1e-14);
        auto g = [&](double y) { return (std::exp(-std::abs(x - y) * q) - std::exp(-(x + y) * q)) * f(y); };
        return (detail::gk_complex(g, 0.0, x) + detail::gk_complex(g, x, y_max)) / (2.0 * q);
    };
    return d;
}

// f(y) = exp(-r y), with closed-form transforms.
inline InitialDatum exponential_datum(double r) {
    require(r >= 0.0, "exponential_datum: rate must be nonnegative");
    InitialDatum d = make_datum([r](double y) { return std::exp(-r * y); });
    d.laplace_weighted = [r](cplx lam) { return 1.0 / (r + std::sqrt(lam)); };
    auto quad = d.dirichlet_resolvent;
    d.dirichlet_resolvent = [r, quad](cplx lam, double x) {
        if (std::abs(lam - r * r) < 1e-6 * (1.0 + r * r)) return quad(lam, x);
        return (std::exp(-r * x) - std::exp(-x * std::sqrt(lam))) / (lam - r * r);
    };
    return d;
}

inline InitialDatum constant_datum(double v) {
    InitialDatum d;
    d.f = [v](double) { return v; };
    d.f_at_0 = v;
    d.sup_bound = std::abs(v);
    d.laplace_weighted = [v](cplx lam) { return v / std::sqrt(lam); };
    d.dirichlet_resolvent = [v](cplx lam, double x) { return v * (1.0 - std::exp(-x * std::sqrt(lam))) / lam; };
    return d;
}

// Laplace transform of u(., x), complex lambda off the negative axis.
inline cplx u_tilde_c(cplx lam, double x, const ModelParams& p, const InitialDatum& f) {
    const cplx q = std::sqrt(lam);
    const cplx la = std::pow(lam, p.alpha);
    const cplx u0 = (p.sigma * f.laplace_weighted(lam) + p.eta * la / lam * f.f_at_0) /
                    (p.c + p.eta * la + p.sigma * q);
    if (x == 0.0) return u0;
    return f.dirichlet_resolvent(lam, x) + std::exp(-x * q) * u0;
}

inline double u_tilde(double lambda, double x, const ModelParams& p, const InitialDatum& f) {
    require(lambda > 0.0, "u_tilde: lambda must be positive");
    require(x >= 0.0, "u_tilde: x must be nonnegative");
    p.validate();
    const cplx v = u_tilde_c(cplx(lambda, 0.0), x, p, f);
    if (!std::isfinite(v.real())) throw ConvergenceError("u_tilde: transform evaluation failed", v.real());
    return v.real();
}

class InversionError : public ConvergenceError {
public:
    InversionError(double primary, double companion)
        : ConvergenceError("Laplace inversion unstable: estimates " + std::to_string(primary) + " vs " +
                               std::to_string(companion),
                           std::abs(primary - companion)),
          primary_(primary), companion_(companion) {}
    double primary() const { return primary_; }
    double companion() const { return companion_; }

private:
    double primary_, companion_;
};

// Inverts a transform given both on the real axis (fr) and in the complex
// plane (fc). Stehfest is checked against order N-2 (error on gross
// disagreement) and against Talbot (flag above 1e-6); Talbot against M/2.
template <class FR, class FC>
InversionPoint invert_checked(FR&& fr, FC&& fc, double t, const LaplaceInversionConfig& cfg) {
    if (cfg.method == InversionMethod::GaverStehfest) {
        const double a = invert_stehfest(fr, t, cfg.order);
        const double b = invert_stehfest(fr, t, cfg.order - 2);
        if (!std::isfinite(a) || std::abs(a - b) > 1e-3 * std::max(1.0, std::abs(a))) throw InversionError(a, b);
        const double tb = invert_talbot(fc, t, 32);
        return {a, std::abs(a - tb) > 1e-6};
    }
    // Fixed Talbot loses digits as M grows (the sum carries e^{rt}, r ~ M/t),
    // so the companion runs at half the order rather than double.
    const double a = invert_talbot(fc, t, cfg.order);
    const double b = invert_talbot(fc, t, cfg.order / 2);
    if (!std::isfinite(a) || std::abs(a - b) > 1e-3 * std::max(1.0, std::abs(a))) throw InversionError(a, b);
    return {a, false};
}

inline Field solve_laplace_inversion(const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                                     const ModelParams& p, const InitialDatum& f,
                                     const LaplaceInversionConfig& cfg = {}) {
    p.validate();
    cfg.validate();
    Field out(t_grid, x_grid);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        require(t_grid[i] >= cfg.t_min, "solve_laplace_inversion: t below t_min");
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const double x = x_grid[j];
            auto fr = [&](double lam) { return u_tilde_c(cplx(lam, 0.0), x, p, f).real(); };
            auto fc = [&](cplx lam) { return u_tilde_c(lam, x, p, f); };
            const auto r = invert_checked(fr, fc, t_grid[i], cfg);
            out.at(i, j) = r.value;
            out.flagged[i * x_grid.size() + j] = r.flagged;
        }
    }
    return out;
}

// u(t, 0) by Stehfest inversion, f(0) below t_min.
inline std::function<double(double)> boundary_trace(const ModelParams& p, const InitialDatum& f,
                                                    const LaplaceInversionConfig& cfg = {}) {
    return [p, f, cfg](double t) {
        if (t < cfg.t_min) return f.f_at_0;
        auto fr = [&](double lam) { return u_tilde_c(cplx(lam, 0.0), 0.0, p, f).real(); };
        return invert_stehfest(fr, t, cfg.order);
    };
}

// (x/s) g(s, x): density of the first hitting time of 0 from x.
inline double first_passage_kernel(double s, double x) { return x / s * gauss_kernel(s, x); }

// Dirichlet semigroup Q^D_t f(x).
inline double dirichlet_semigroup(double t, double x, const InitialDatum& f) {
    const double l = 14.0 * std::sqrt(t);
    auto g = [&](double y) { return (gauss_kernel(t, x - y) - gauss_kernel(t, x + y)) * f.f(y); };
    const double a = std::max(0.0, x - l);
    return detail::gk(g, a, std::max(a, x), 1e-12) + detail::gk(g, std::max(a, x), x + l, 1e-12);
}

// u(t,x) = Q^D_t f(x) + int_0^t (x/s) g(s,x) u(t-s,0) ds. With s = x^2/w^2
// the convolution becomes int_{x/sqrt t}^inf exp(-w^2/4)/sqrt(pi) u(t - x^2/w^2, 0) dw.
inline Field solve_volterra(const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                            const ModelParams& p, const InitialDatum& f,
                            const std::function<double(double)>& boundary) {
    p.validate();
    Field out(t_grid, x_grid);
    constexpr double w_max = 14.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        require(t > 0.0, "solve_volterra: t must be positive");
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const double x = x_grid[j];
            if (x == 0.0) {
                out.at(i, j) = boundary(t);
                continue;
            }
            const double w0 = x / std::sqrt(t);
            double conv = 0.0;
            if (w0 < w_max) {
                auto g = [&](double w) {
                    return std::exp(-0.25 * w * w) / std::sqrt(std::numbers::pi) * boundary(t - x * x / (w * w));
                };
                double err = 0.0;
                conv = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, w0, w_max, 12, 1e-10, &err);
                if (!std::isfinite(conv)) throw ConvergenceError("solve_volterra: kernel quadrature failed", err);
            }
            out.at(i, j) = dirichlet_semigroup(t, x, f) + conv;
        }
    }
    return out;
}

struct L1SchemeConfig {
    double dx = 0.01;
    double dt = 1e-3;
    double x_max = 0.0;  // 0 means 12 sqrt(horizon)
    double theta = 1.0;

    void validate(double horizon) const {
        require(dx > 0.0 && dt > 0.0, "L1SchemeConfig: dx and dt must be positive");
        require(theta >= 0.5 && theta <= 1.0, "L1SchemeConfig: theta must lie in [0.5, 1]");
        require(x_max == 0.0 || x_max >= 10.0 * std::sqrt(horizon), "L1SchemeConfig: x_max below 10 sqrt(horizon)");
    }
};

struct L1Solution {
    std::vector<double> times;
    std::vector<double> boundary;  // u(t_n, 0)
    Field field;
};

// L1 weights b_j = (j+1)^{1-a} - j^{1-a}; D^a y(t_n) ~ dt^{-a}/Gamma(2-a) sum_j b_j (y^{n-j} - y^{n-j-1}).
inline std::vector<double> l1_weights(double alpha, std::size_t n) {
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j)
        b[j] = std::pow(static_cast<double>(j + 1), 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
    return b;
}

// D^a y = -rate y, y(0) = y0, by the implicit L1 scheme.
inline std::vector<double> solve_l1_relaxation(double alpha, double rate, double y0, double dt, std::size_t n) {
    const auto b = l1_weights(alpha, n + 1);
    const double cst = std::pow(dt, -alpha) / std::tgamma(2.0 - alpha);
    std::vector<double> y(n + 1);
    y[0] = y0;
    for (std::size_t m = 1; m <= n; ++m) {
        double hist = 0.0;
        for (std::size_t j = 1; j < m; ++j) hist += b[j] * (y[m - j] - y[m - j - 1]);
        y[m] = cst * (y[m - 1] - hist) / (cst + rate);
    }
    return y;
}

// Implicit finite differences: heat equation u_t = u_xx inside, L1 Caputo
// derivative in the boundary row with the one-sided second-order u_x(0),
// homogeneous Neumann at x_max. theta >= 1/2 is unconditionally stable.
inline L1Solution solve_l1_caputo(const ModelParams& p, const InitialDatum& f, const L1SchemeConfig& cfg_in,
                                  double horizon, const std::vector<double>& t_out = {},
                                  const std::vector<double>& x_out = {}) {
    p.validate();
    cfg_in.validate(horizon);
    L1SchemeConfig cfg = cfg_in;
    if (cfg.x_max == 0.0) cfg.x_max = 12.0 * std::sqrt(horizon);
    const std::size_t m = static_cast<std::size_t>(std::ceil(cfg.x_max / cfg.dx));
    const std::size_t nt = static_cast<std::size_t>(std::ceil(horizon / cfg.dt - 1e-9));
    const double dx = cfg.dx, dt = horizon / static_cast<double>(nt), th = cfg.theta;
    const double r = dt / (dx * dx);
    const auto bw = l1_weights(p.alpha, nt + 1);
    const double cst = p.eta * std::pow(dt, -p.alpha) / std::tgamma(2.0 - p.alpha);
    const double bound = f.sup_bound * (1.0 + 1e-6) + 1e-12;

    std::vector<double> u(m + 1), un(m + 1);
    for (std::size_t i = 0; i <= m; ++i) u[i] = f.f(static_cast<double>(i) * dx);
    std::vector<double> lo(m + 1), di(m + 1), up(m + 1), rhs(m + 1);
    std::vector<double> trace(nt + 1);
    trace[0] = u[0];

    L1Solution sol;
    sol.times.resize(nt + 1);
    for (std::size_t n = 0; n <= nt; ++n) sol.times[n] = static_cast<double>(n) * dt;
    std::vector<std::vector<double>> snaps;
    std::vector<std::size_t> snap_idx;
    for (double t : t_out) {
        const std::size_t k = static_cast<std::size_t>(std::llround(t / dt));
        snap_idx.push_back(std::min(k, nt));
    }
    auto maybe_snap = [&](std::size_t n) {
        for (std::size_t q = 0; q < snap_idx.size(); ++q)
            if (snap_idx[q] == n) {
                snaps.resize(snap_idx.size());
                snaps[q] = u;
            }
    };
    maybe_snap(0);

    for (std::size_t n = 1; n <= nt; ++n) {
        double hist = 0.0;
        for (std::size_t j = 1; j < n; ++j) hist += bw[j] * (trace[n - j] - trace[n - j - 1]);
        // boundary row with the u_2 term, eliminated below using row 1
        const double s2 = p.sigma / (2.0 * dx);
        double a0 = cst + 3.0 * s2 + p.c, b0 = -4.0 * s2, e0 = s2;
        double d0 = cst * (u[0] - hist);
        for (std::size_t i = 1; i < m; ++i) {
            lo[i] = -th * r;
            di[i] = 1.0 + 2.0 * th * r;
            up[i] = -th * r;
            rhs[i] = u[i] + (1.0 - th) * r * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        }
        lo[m] = -2.0 * th * r;
        di[m] = 1.0 + 2.0 * th * r;
        rhs[m] = u[m] + (1.0 - th) * 2.0 * r * (u[m - 1] - u[m]);
        const double w = e0 / up[1];
        a0 -= w * lo[1];
        b0 -= w * di[1];
        d0 -= w * rhs[1];
        di[0] = a0;
        up[0] = b0;
        rhs[0] = d0;
        // Thomas
        for (std::size_t i = 1; i <= m; ++i) {
            const double q = lo[i] / di[i - 1];
            di[i] -= q * up[i - 1];
            rhs[i] -= q * rhs[i - 1];
        }
        un[m] = rhs[m] / di[m];
        for (std::size_t i = m; i-- > 0;) un[i] = (rhs[i] - up[i] * un[i + 1]) / di[i];
        u.swap(un);
        trace[n] = u[0];
        for (double v : u)
            if (!(std::abs(v) <= bound)) throw ConvergenceError("solve_l1_caputo: solution exceeds the datum bound", v);
        maybe_snap(n);
    }
    sol.boundary = trace;
    sol.field = Field(t_out, x_out);
    for (std::size_t q = 0; q < t_out.size(); ++q)
        for (std::size_t j = 0; j < x_out.size(); ++j) {
            const double xi = x_out[j] / dx;
            const std::size_t i0 = std::min(static_cast<std::size_t>(xi), m - 1);
            const double w = xi - static_cast<double>(i0);
            sol.field.at(q, j) = (1.0 - w) * snaps[q][i0] + w * snaps[q][i0 + 1];
        }
    return sol;
}

// MC of u(t,x) = E_x[f(X-bar_t) exp(-(c/sigma) gamma+ o V-bar^{-1}_t)].
inline Field mc_solution(const ModelParams& p, const InitialDatum& f, const std::vector<double>& t_grid,
                         const std::vector<double>& x0_grid, std::uint64_t n_paths, std::uint64_t seed,
                         double dt = 5e-4, int workers = 1, std::uint32_t tag = 7) {
    p.validate();
    require(n_paths >= 10000, "mc_solution: need at least 1e4 paths");
    require(std::is_sorted(t_grid.begin(), t_grid.end()), "mc_solution: t grid must be sorted");
    Field out(t_grid, x0_grid);
    out.se.assign(out.u.size(), 0.0);
    const double kc = p.c / p.sigma;
    for (std::size_t j = 0; j < x0_grid.size(); ++j) {
        const double x0 = x0_grid[j];
        auto acc = run_mc(t_grid.size(), n_paths, workers, [&](std::uint64_t i, std::span<double> o) {
            RngStream pr(seed, stream_id(tag, i * x0_grid.size() + j, 0));
            RngStream hr(seed, stream_id(tag, i * x0_grid.size() + j, 1));
            FracStickyWalker<HalfLineRbm> w(p, HalfLineRbm(x0, dt), dt, pr, hr);
            for (std::size_t k = 0; k < t_grid.size(); ++k) {
                const auto st = w.at(t_grid[k]);
                o[k] = f.f(st.x) * std::exp(-kc * st.gamma);
            }
        });
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            out.at(k, j) = acc[k].mean;
            out.se[k * x0_grid.size() + j] = acc[k].se();
        }
    }
    return out;
}

} // namespace fsticky

#endif
