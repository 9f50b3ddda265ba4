#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fsticky/interval.hpp"

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

// Finite-volume eigenvalues: boundary cells carry mass beta + h/2 and the
// Robin term c/sigma; symmetric tridiagonal after diagonal scaling.
std::vector<double> fd_eigenvalues(const ModelParams& p, int n, int count) {
    const double h = 1.0 / n, beta = p.eta / p.sigma, kc = p.c / p.sigma;
    Eigen::VectorXd mass = Eigen::VectorXd::Constant(n + 1, h), diag(n + 1), off(n);
    mass[0] = mass[n] = beta + 0.5 * h;
    for (int i = 0; i <= n; ++i) diag[i] = 2.0 / h;
    diag[0] = diag[n] = 1.0 / h + kc;
    for (int i = 0; i <= n; ++i) diag[i] /= mass[i];
    for (int i = 0; i < n; ++i) off[i] = -1.0 / h / std::sqrt(mass[i] * mass[i + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(es.eigenvalues()[k]);
    return out;
}

} // namespace

TEST(Eigen, ResidualsAndOrthonormality) {
    for (const auto& p : {params(1.0, 1.0, 1.0, 0.0), params(1.0, 0.2, 2.0, 0.7), params(1.0, 3.0, 0.5, 0.0)}) {
        const auto b = solve_eigen(p, 12);
        ASSERT_EQ(b.count(), 12u);
        for (std::size_t k = 0; k < b.count(); ++k) {
            EXPECT_LT(b.residuals[k], 1e-9);
            if (k) {
                EXPECT_GT(b.eigenvalues[k], b.eigenvalues[k - 1]);
            }
        }
        for (std::size_t i = 0; i < b.count(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double g = b.inner([&](double x) { return b.psi(i, x); }, [&](double x) { return b.psi(j, x); });
                EXPECT_NEAR(g, i == j ? 1.0 : 0.0, 1e-10) << i << " " << j;
            }
    }
}

TEST(Eigen, MatchesFiniteVolumeOracle) {
    for (const auto& p : {params(1.0, 1.0, 1.0, 0.0), params(1.0, 1.0, 1.0, 0.5), params(1.0, 0.1, 1.0, 2.0)}) {
        const auto b = solve_eigen(p, 6);
        const auto fd = fd_eigenvalues(p, 4000, 6);
        for (std::size_t k = 0; k < 6; ++k)
            EXPECT_NEAR(b.eigenvalues[k], fd[k], 1e-5 * (1.0 + fd[k])) << p.c << " " << k;
    }
}

TEST(Eigen, FirstRootBelowHalfPi) {
    // at eta = sigma = 1, c = 0 the first nonzero s is near 1.3, inside (0, pi/2)
    const auto b = solve_eigen(params(1.0, 1.0, 1.0, 0.0), 3);
    EXPECT_EQ(b.eigenvalues[0], 0.0);
    EXPECT_GT(std::sqrt(b.eigenvalues[1]), 1.0);
    EXPECT_LT(std::sqrt(b.eigenvalues[1]), std::numbers::pi / 2);
}

TEST(Series, ExactAtAlphaOne) {
    const auto p = params(1.0, 1.0, 1.0, 0.5);
    const auto f = cosine_datum(std::numbers::pi);
    const auto sol = build_series(solve_eigen(p, 400), f.f, 1.0, 1e-6);
    for (double t : {0.05, 0.3, 1.0})
        for (double x : {0.0, 0.25, 0.8}) {
            const auto [wi, wb] = evaluate_series(sol, t, x);
            const auto ex = interval_exact(p, f, t, x);
            EXPECT_NEAR(wi + wb, ex.value, 1e-8) << t << " " << x;
        }
}

TEST(Series, InitialValueRecovered) {
    const auto p = params(0.6, 1.0, 1.0, 0.0);
    auto f = [](double x) { return 1.0 + 0.5 * std::cos(std::numbers::pi * x); };
    const auto sol = build_series(solve_eigen(p, 400), f, 0.6, 1e-6);
    // the boundary-atom part converges slowly off the boundary, so test the sum
    for (double x : {0.0, 0.1, 0.5, 0.9, 1.0}) {
        const auto [wi, wb] = evaluate_series(sol, 0.0, x);
        EXPECT_NEAR(wi + wb, f(x), 5e-3) << x;
    }
}

TEST(Series, TailCheckReportsNeededK) {
    const auto p = params(0.6, 1.0, 1.0, 0.0);
    try {
        build_series(solve_eigen(p, 3), [](double x) { return x < 0.5 ? 1.0 : 0.0; }, 0.6);
        FAIL() << "expected a convergence error";
    } catch (const ConvergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("K ="), std::string::npos);
    }
}

TEST(Exact, ConstantDatumConservedWithoutKilling) {
    const auto p = params(0.6, 1.0, 1.0, 0.0);
    const auto f = cosine_datum(0.0, 1.0, 0.0);
    for (double t : {0.1, 1.0, 3.0}) EXPECT_NEAR(interval_exact(p, f, t, 0.3).value, 1.0, 1e-6);
}

TEST(Exact, SymmetricDatumSymmetricSolution) {
    const auto p = params(0.6, 1.0, 1.0, 0.5);
    const auto f = cosine_datum(2.0 * std::numbers::pi, 0.5);
    for (double t : {0.1, 0.7})
        EXPECT_NEAR(interval_exact(p, f, t, 0.2).value, interval_exact(p, f, t, 0.8).value, 1e-6);  // Stehfest accuracy
}

TEST(Exact, MonteCarloAgrees) {
    for (double alpha : {1.0, 0.6}) {
        const auto p = params(alpha, 1.0, 1.0, 0.0);
        const auto f = cosine_datum(std::numbers::pi);
        const std::vector<double> ts{0.1, 0.3};
        const auto mc = mc_interval(p, f.f, ts, 0.25, 20000, 5, 2e-4);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double ex = interval_exact(p, f, ts[k], 0.25).value;
            EXPECT_LE(std::abs(mc[k].mean - ex), 4 * mc[k].se + 5e-3) << alpha << " " << ts[k];
        }
    }
}
