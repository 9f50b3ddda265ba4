#ifndef FSTICKY_INTERVAL_HPP
#define FSTICKY_INTERVAL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"
#include "laplace.hpp"
#include "mc.hpp"
#include "params.hpp"
#include "paths.hpp"
#include "specfun.hpp"

namespace fsticky {

namespace detail {

// Composite 20-point Gauss-Legendre on [0,1]; pieces should grow with the
// oscillation frequency of the integrand.
template <class G>
double unit_gauss(const G& g, int pieces) {
    double sum = 0.0;
    const double h = 1.0 / pieces;
    for (int i = 0; i < pieces; ++i)
        sum += boost::math::quadrature::gauss<double, 20>::integrate(g, i * h, (i + 1) * h);
    return sum;
}

inline int pieces_for(double s) { return 8 + 2 * static_cast<int>(std::ceil(s / std::numbers::pi)); }

} // namespace detail

// Wentzell eigenpairs on [0,1]:
//   -psi'' = mu psi,  -eta mu psi(0) = sigma psi'(0) - c psi(0),
//                    -eta mu psi(1) = -sigma psi'(1) - c psi(1),
// orthonormal for <f,g> = int fg + beta (f(0)g(0) + f(1)g(1)), beta = eta/sigma.
struct SpectralBasis {
    std::vector<double> eigenvalues;
    std::vector<double> A, B;  // psi_k(x) = A_k cos(s_k x) + B_k sin(s_k x), s_k = sqrt(mu_k)
    double boundary_weight = 0.0;
    std::vector<double> residuals;

    std::size_t count() const { return eigenvalues.size(); }
    double psi(std::size_t k, double x) const {
        const double s = std::sqrt(eigenvalues[k]);
        return A[k] * std::cos(s * x) + B[k] * std::sin(s * x);
    }
    double dpsi(std::size_t k, double x) const {
        const double s = std::sqrt(eigenvalues[k]);
        return s * (-A[k] * std::sin(s * x) + B[k] * std::cos(s * x));
    }
    double inner(const std::function<double(double)>& f, const std::function<double(double)>& g,
                 int pieces = 64) const {
        const double bulk = detail::unit_gauss([&](double x) { return f(x) * g(x); }, pieces);
        return bulk + boundary_weight * (f(0.0) * g(0.0) + f(1.0) * g(1.0));
    }
};

namespace detail {

// Boundary determinant in s = sqrt(mu) with psi = sigma s cos(sx) + (c - eta s^2) sin(sx),
// which satisfies the x = 0 condition identically.
inline double wentzell_det(const ModelParams& p, double s) {
    const double h = p.c - p.eta * s * s;
    const double g = (h * h - p.sigma * p.sigma * s * s) * std::sin(s) + 2.0 * p.sigma * s * h * std::cos(s);
    return g / ((1.0 + s * s) * (1.0 + p.eta * s * s));
}

inline double wentzell_det_ds(const ModelParams& p, double s) {
    const double e = 1e-7 * std::max(1.0, s);
    return (wentzell_det(p, s + e) - wentzell_det(p, s - e)) / (2.0 * e);
}

inline double bulk_norm2(double a, double b, double s) {
    if (s == 0.0) return a * a;
    return a * a * (0.5 + std::sin(2 * s) / (4 * s)) + b * b * (0.5 - std::sin(2 * s) / (4 * s)) +
           a * b * std::sin(s) * std::sin(s) / s;
}

inline int sign_changes(const SpectralBasis& b, std::size_t k) {
    const int n = 4000 + 40 * static_cast<int>(k);
    int changes = 0;
    double prev = b.psi(k, 0.0);
    for (int i = 1; i <= n; ++i) {
        const double v = b.psi(k, static_cast<double>(i) / n);
        if (v == 0.0) continue;
        if (prev != 0.0 && (v > 0) != (prev > 0)) ++changes;
        prev = v;
    }
    return changes;
}

} // namespace detail

inline SpectralBasis solve_eigen(const ModelParams& p, std::size_t K) {
    p.validate();
    require(K >= 1, "solve_eigen: K must be >= 1");
    SpectralBasis b;
    b.boundary_weight = p.stickiness();
    std::vector<double> roots;
    if (p.c == 0.0) roots.push_back(0.0);
    const double step = std::numbers::pi / 64.0;
    double s0 = 1e-9, g0 = detail::wentzell_det(p, s0);
    while (roots.size() < K) {
        const double s1 = s0 + step;
        const double g1 = detail::wentzell_det(p, s1);
        if (g1 == 0.0 || (g0 > 0) != (g1 > 0)) {
            double lo = s0, hi = s1, glo = g0;
            for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = detail::wentzell_det(p, mid);
                if ((gm > 0) == (glo > 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            double s = 0.5 * (lo + hi);
            for (int it = 0; it < 3; ++it) {
                const double d = detail::wentzell_det_ds(p, s);
                if (d == 0.0) break;
                const double sn = s - detail::wentzell_det(p, s) / d;
                if (sn > s0 && sn < s1) s = sn;
            }
            roots.push_back(s);
        }
        s0 = s1;
        g0 = g1;
    }
    for (double s : roots) {
        double a, bb;
        if (s == 0.0) {
            a = 1.0;
            bb = 0.0;
        } else {
            a = p.sigma * s;
            bb = p.c - p.eta * s * s;
            const double sc = std::max(std::abs(a), std::abs(bb));
            a /= sc;
            bb /= sc;
        }
        const double psi0 = a, psi1 = a * std::cos(s) + bb * std::sin(s);
        const double n2 = detail::bulk_norm2(a, bb, s) + b.boundary_weight * (psi0 * psi0 + psi1 * psi1);
        const double nrm = std::sqrt(n2);
        b.eigenvalues.push_back(s * s);
        b.A.push_back(a / nrm);
        b.B.push_back(bb / nrm);
    }
    for (std::size_t k = 0; k < b.count(); ++k) {
        const double mu = b.eigenvalues[k];
        const double r0 = p.sigma * b.dpsi(k, 0.0) + (p.eta * mu - p.c) * b.psi(k, 0.0);
        const double r1 = -p.sigma * b.dpsi(k, 1.0) + (p.eta * mu - p.c) * b.psi(k, 1.0);
        b.residuals.push_back(std::max(std::abs(r0), std::abs(r1)) / (1.0 + p.eta * mu + p.sigma * std::sqrt(mu)));
        const int zc = detail::sign_changes(b, k);
        if (zc != static_cast<int>(k))
            throw ConvergenceError("solve_eigen: eigenfunction " + std::to_string(k) + " has " + std::to_string(zc) +
                                       " sign changes; a root was missed near s = " + std::to_string(std::sqrt(mu)),
                                   static_cast<double>(zc));
    }
    return b;
}

struct SeriesSolution {
    SpectralBasis basis;
    std::vector<double> interior_coeffs;
    std::vector<double> boundary_coeffs;
    double alpha = 1.0;
    double tail_energy = 0.0;  // relative Parseval tail
};

inline SeriesSolution build_series(const SpectralBasis& basis, const std::function<double(double)>& f, double alpha,
                                   double tail_tol = 1e-8) {
    require(alpha > 0.0 && alpha <= 1.0, "build_series: alpha must lie in (0,1]");
    SeriesSolution sol;
    sol.basis = basis;
    sol.alpha = alpha;
    const double beta = basis.boundary_weight;
    const double f0 = f(0.0), f1 = f(1.0);
    double captured = 0.0;
    for (std::size_t k = 0; k < basis.count(); ++k) {
        const double ck = detail::unit_gauss([&](double x) { return f(x) * basis.psi(k, x); },
                                             detail::pieces_for(std::sqrt(basis.eigenvalues[k])));
        const double dk = beta * (f0 * basis.psi(k, 0.0) + f1 * basis.psi(k, 1.0));
        sol.interior_coeffs.push_back(ck);
        sol.boundary_coeffs.push_back(dk);
        captured += (ck + dk) * (ck + dk);
    }
    const double energy = basis.inner(f, f, 256);
    sol.tail_energy = energy > 0.0 ? std::max(0.0, energy - captured) / energy : 0.0;
    if (sol.tail_energy > tail_tol) {
        const double need = static_cast<double>(basis.count()) * std::cbrt(sol.tail_energy / tail_tol);
        throw ConvergenceError("build_series: Parseval tail too large, need about K = " +
                                   std::to_string(static_cast<long>(std::ceil(need))),
                               sol.tail_energy);
    }
    return sol;
}

// (w_{f|interior}, w_{f|boundary}) at (t, x).
inline std::pair<double, double> evaluate_series(const SeriesSolution& sol, double t, double x,
                                                 const MLEvalConfig& cfg = {}) {
    require(t >= 0.0, "evaluate_series: t must be nonnegative");
    double wi = 0.0, wb = 0.0;
    for (std::size_t k = 0; k < sol.basis.count(); ++k) {
        const double mu = sol.basis.eigenvalues[k];
        const double psi = sol.basis.psi(k, x);
        wi += std::exp(-mu * t) * sol.interior_coeffs[k] * psi;
        const double decay = mu == 0.0 ? 1.0 : mittag_leffler(sol.alpha, -mu * std::pow(t, sol.alpha), cfg);
        wb += decay * sol.boundary_coeffs[k] * psi;
    }
    return {wi, wb};
}

// Datum on [0,1] with the free-space particular solution of v'' = lambda v - f,
// returned as (v_p, v_p').
struct IntervalDatum {
    std::function<double(double)> f;
    std::function<std::pair<std::complex<double>, std::complex<double>>(std::complex<double>, double)> particular;
};

inline IntervalDatum cosine_datum(double freq, double offset = 0.0, double amp = 1.0) {
    IntervalDatum d;
    d.f = [=](double x) { return offset + amp * std::cos(freq * x); };
    d.particular = [=](std::complex<double> lam, double x) {
        const std::complex<double> den = lam + freq * freq;
        return std::pair{offset / lam + amp * std::cos(freq * x) / den, -amp * freq * std::sin(freq * x) / den};
    };
    return d;
}

// Laplace transform of the exact solution on [0,1] with v = v_p + P e^{-qx} + Q e^{-q(1-x)}.
inline std::complex<double> interval_u_tilde(std::complex<double> lam, double x, const ModelParams& p,
                                             const IntervalDatum& f) {
    using cd = std::complex<double>;
    const cd q = std::sqrt(lam);
    const cd la = std::pow(lam, p.alpha);
    const cd k = p.eta * la + p.c;
    const cd e = std::exp(-q);
    const auto [vp0, dvp0] = f.particular(lam, 0.0);
    const auto [vp1, dvp1] = f.particular(lam, 1.0);
    const cd src0 = p.eta * la / lam * f.f(0.0), src1 = p.eta * la / lam * f.f(1.0);
    const cd r0 = src0 - k * vp0 + p.sigma * dvp0;
    const cd r1 = src1 - k * vp1 - p.sigma * dvp1;
    const cd a11 = k + p.sigma * q, a12 = e * (k - p.sigma * q);
    const cd det = a11 * a11 - a12 * a12;
    const cd P = (r0 * a11 - a12 * r1) / det;
    const cd Q = (a11 * r1 - a12 * r0) / det;
    const auto [vpx, dvpx] = f.particular(lam, x);
    (void)dvpx;
    return vpx + P * std::exp(-q * x) + Q * std::exp(-q * (1.0 - x));
}

inline InversionPoint interval_exact(const ModelParams& p, const IntervalDatum& f, double t, double x,
                                     const LaplaceInversionConfig& cfg = {}) {
    using cd = std::complex<double>;
    auto fr = [&](double lam) { return interval_u_tilde(cd(lam, 0.0), x, p, f).real(); };
    auto fc = [&](cd lam) { return interval_u_tilde(lam, x, p, f); };
    // Talbot is the more accurate of the two here; Stehfest is the companion.
    const double a = invert_talbot(fc, t, 32);
    const double b = invert_stehfest(fr, t, cfg.order);
    return {a, std::abs(a - b) > 1e-6};
}

struct McEstimate {
    double mean;
    double se;
};

// MC of E_x[f(X-bar_t) exp(-(c/sigma) gamma o V-bar^{-1}_t)] with reflection at 0 and 1.
inline std::vector<McEstimate> mc_interval(const ModelParams& p, const std::function<double(double)>& f,
                                           const std::vector<double>& t_grid, double x0, std::uint64_t n_paths,
                                           std::uint64_t seed, double dt = 1e-4, int workers = 1,
                                           std::uint32_t tag = 11) {
    p.validate();
    require(x0 >= 0.0 && x0 <= 1.0, "mc_interval: x0 must lie in [0,1]");
    require(std::is_sorted(t_grid.begin(), t_grid.end()), "mc_interval: t grid must be sorted");
    const double kc = p.c / p.sigma;
    auto acc = run_mc(t_grid.size(), n_paths, workers, [&](std::uint64_t i, std::span<double> o) {
        RngStream pr(seed, stream_id(tag, i, 0));
        RngStream hr(seed, stream_id(tag, i, 1));
        FracStickyWalker<IntervalRbm> w(p, IntervalRbm(x0, dt), dt, pr, hr);
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            const auto st = w.at(t_grid[k]);
            o[k] = f(st.x) * std::exp(-kc * st.gamma);
        }
    });
    std::vector<McEstimate> out;
    for (const auto& a : acc) out.push_back({a.mean, a.se()});
    return out;
}

} // namespace fsticky

#endif
