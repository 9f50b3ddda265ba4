#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fsticky/halfline.hpp"

using namespace fsticky;

namespace {

ModelParams params(double alpha, double eta, double sigma, double c) {
    ModelParams p;
    p.alpha = alpha;
    p.eta = eta;
    p.sigma = sigma;
    p.c = c;
    return p;
}

} // namespace

TEST(Laplace, KnownPairs) {
    auto exp_r = [](double l) { return 1.0 / (l + 1.0); };
    auto exp_c = [](cplx l) { return 1.0 / (l + 1.0); };
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
        EXPECT_NEAR(invert_stehfest(exp_r, t, 16), std::exp(-t), 1e-5) << t;
        EXPECT_NEAR(invert_talbot(exp_c, t, 32), std::exp(-t), 1e-10) << t;
    }
    // lambda^{a-1}/(lambda^a + 1) inverts to E_a(-t^a)
    const double a = 0.6;
    auto ml_c = [a](cplx l) { return std::pow(l, a - 1.0) / (std::pow(l, a) + 1.0); };
    auto ml_r = [a](double l) { return std::pow(l, a - 1.0) / (std::pow(l, a) + 1.0); };
    for (double t : {0.1, 0.5, 1.0, 5.0}) {
        const double ref = mittag_leffler(a, -std::pow(t, a));
        EXPECT_NEAR(invert_talbot(ml_c, t, 32), ref, 1e-9) << t;
        EXPECT_NEAR(invert_stehfest(ml_r, t, 16), ref, 2e-6) << t;
    }
}

TEST(Laplace, StehfestWeightsSumToZero) {
    for (int n : {8, 12, 16, 18}) {
        const auto& w = stehfest_weights(n);
        double s = 0.0, mx = 0.0;
        for (double v : w) {
            s += v;
            mx = std::max(mx, std::abs(v));
        }
        EXPECT_LE(std::abs(s), 1e-16 * mx * n) << n;
    }
    EXPECT_NEAR(stehfest_weights(8)[0], -1.0 / 3.0, 1e-15);
}

TEST(Datum, ClosedFormsMatchQuadrature) {
    const auto closed = exponential_datum(1.3);
    const auto quad = make_datum([](double y) { return std::exp(-1.3 * y); });
    for (cplx lam : {cplx(0.5, 0.0), cplx(3.0, 0.0), cplx(2.0, 5.0)}) {
        EXPECT_LT(std::abs(closed.laplace_weighted(lam) - quad.laplace_weighted(lam)), 1e-10);
        for (double x : {0.0, 0.4, 2.0})
            EXPECT_LT(std::abs(closed.dirichlet_resolvent(lam, x) - quad.dirichlet_resolvent(lam, x)), 1e-10)
                << lam << " " << x;
    }
    const auto one = constant_datum(1.0);
    const auto qone = make_datum([](double) { return 1.0; });
    EXPECT_LT(std::abs(one.dirichlet_resolvent(cplx(2.0, 1.0), 0.7) - qone.dirichlet_resolvent(cplx(2.0, 1.0), 0.7)),
              1e-10);
}

TEST(Transform, BoundaryIdentity) {
    // eta l^{a-1}(l u - f0) = sigma u_x - c u at x = 0
    const auto p = params(0.6, 0.7, 1.4, 0.3);
    const auto f = exponential_datum(1.0);
    for (double lam : {0.3, 1.0, 7.0}) {
        const double h = 1e-5;
        const double u0 = u_tilde(lam, 0.0, p, f);
        const double ux = (-3.0 * u0 + 4.0 * u_tilde(lam, h, p, f) - u_tilde(lam, 2 * h, p, f)) / (2 * h);
        const double lhs = p.eta * std::pow(lam, p.alpha - 1.0) * (lam * u0 - 1.0);
        EXPECT_NEAR(lhs, p.sigma * ux - p.c * u0, 1e-7) << lam;
    }
}

TEST(Transform, ConstantDatumIsStationary) {
    const auto p = params(0.4, 1.0, 1.0, 0.0);
    const auto f = constant_datum(2.0);
    for (double lam : {0.2, 1.0, 9.0})
        for (double x : {0.0, 0.5, 3.0}) EXPECT_NEAR(u_tilde(lam, x, p, f), 2.0 / lam, 1e-12);
    const auto field = solve_laplace_inversion({0.1, 1.0, 4.0}, {0.0, 1.0}, p, f);
    for (double v : field.u) EXPECT_NEAR(v, 2.0, 1e-6);
}

TEST(L1, RelaxationMatchesMittagLeffler) {
    const double a = 0.6, dt = 1e-3;
    const auto y = solve_l1_relaxation(a, 1.0, 1.0, dt, 2000);
    for (std::size_t n : {100u, 500u, 1000u, 2000u}) {
        const double t = n * dt;
        EXPECT_NEAR(y[n], mittag_leffler(a, -std::pow(t, a)), 3e-3) << t;
    }
}

TEST(L1, ConvergesUnderRefinement) {
    const double a = 0.6;
    const double ref = mittag_leffler(a, -1.0);
    const double e1 = std::abs(solve_l1_relaxation(a, 1.0, 1.0, 1e-2, 100).back() - ref);
    const double e2 = std::abs(solve_l1_relaxation(a, 1.0, 1.0, 5e-3, 200).back() - ref);
    const double e3 = std::abs(solve_l1_relaxation(a, 1.0, 1.0, 2.5e-3, 400).back() - ref);
    EXPECT_LT(e2, e1);
    EXPECT_LT(e3, e2);
    EXPECT_GT(std::log2(e1 / e2), 0.8 * (2.0 - a) - 0.5);
}

TEST(Solvers, ThreeRoutesAgree) {
    const auto p = params(0.6, 1.0, 1.0, 0.5);
    const auto f = exponential_datum(1.0);
    const std::vector<double> ts{0.1, 0.5, 1.0};
    const std::vector<double> xs{0.0, 0.3, 1.0};
    const auto inv = solve_laplace_inversion(ts, xs, p, f);
    const auto l1 = solve_l1_caputo(p, f, L1SchemeConfig{}, 1.0, ts, xs);
    const auto vol = solve_volterra(ts, xs, p, f, boundary_trace(p, f));
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
            EXPECT_FALSE(inv.flagged[i * xs.size() + j]);
            EXPECT_NEAR(inv.at(i, j), l1.field.at(i, j), 5e-3) << ts[i] << " " << xs[j];
            EXPECT_NEAR(inv.at(i, j), vol.at(i, j), 1e-5) << ts[i] << " " << xs[j];
            EXPECT_GE(inv.at(i, j), 0.0);
            EXPECT_LE(inv.at(i, j), 1.0);
        }
}

TEST(Solvers, L1ConstantDatum) {
    const auto p = params(0.5, 1.0, 1.0, 0.0);
    const auto sol = solve_l1_caputo(p, constant_datum(1.0), L1SchemeConfig{0.02, 1e-2}, 1.0, {1.0}, {0.0, 0.5});
    for (double v : sol.boundary) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_NEAR(sol.field.at(0, 1), 1.0, 1e-12);
}

TEST(Solvers, KillingLowersTheSolution) {
    const auto f = exponential_datum(0.5);
    double prev = 2.0;
    for (double c : {0.0, 0.5, 2.0}) {
        const auto fld = solve_laplace_inversion({0.8}, {0.0}, params(0.6, 1.0, 1.0, c), f);
        EXPECT_LT(fld.u[0], prev);
        prev = fld.u[0];
    }
}

TEST(Solvers, MonteCarloAgrees) {
    const auto p = params(0.6, 1.0, 1.0, 0.5);
    const auto f = exponential_datum(1.0);
    const std::vector<double> ts{0.25, 0.5};
    const auto mc = mc_solution(p, f, ts, {0.0, 0.4}, 20000, 99, 5e-4);
    const auto inv = solve_laplace_inversion(ts, {0.0, 0.4}, p, f);
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            EXPECT_LE(std::abs(mc.at(i, j) - inv.at(i, j)), 4 * mc.se_at(i, j) + 5e-3)
                << ts[i] << " " << j << " mc " << mc.at(i, j) << " inv " << inv.at(i, j);
}

TEST(Solvers, ValidationErrors) {
    const auto p = params(0.6, 1.0, 1.0, 0.0);
    const auto f = exponential_datum(1.0);
    EXPECT_THROW(solve_laplace_inversion({1e-8}, {0.0}, p, f), ValidationError);
    LaplaceInversionConfig bad;
    bad.order = 7;
    EXPECT_THROW(solve_laplace_inversion({1.0}, {0.0}, p, f, bad), ValidationError);
    EXPECT_THROW(u_tilde(-1.0, 0.0, p, f), ValidationError);
    EXPECT_THROW(solve_l1_caputo(p, f, L1SchemeConfig{0.01, 1e-3, 1.0}, 1.0), ValidationError);
}
