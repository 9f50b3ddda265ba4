#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "fsticky/mc.hpp"
#include "fsticky/paths.hpp"
#include "fsticky/stats.hpp"

using namespace fsticky;

namespace {

ModelParams params(double alpha, double eta = 1.0, double sigma = 1.0, double c = 0.0) {
    ModelParams p;
    p.alpha = alpha;
    p.eta = eta;
    p.sigma = sigma;
    p.c = c;
    return p;
}

} // namespace

TEST(Rbm, StaysNonnegativeAndLocalTimeGrows) {
    RngStream rng(1, 0);
    const auto sk = simulate_rbm(0.0, 5.0, 1e-3, rng);
    ASSERT_EQ(sk.size(), 5001u);
    EXPECT_NEAR(sk.horizon(), 5.0, 1e-12);
    for (std::size_t i = 1; i < sk.size(); ++i) {
        EXPECT_GE(sk.positions[i], 0.0);
        EXPECT_GE(sk.local_time[i], sk.local_time[i - 1]);
    }
    EXPECT_GT(sk.local_time.back(), 0.0);
    EXPECT_THROW(simulate_rbm(-0.1, 1.0, 1e-3, rng), ValidationError);
    EXPECT_THROW(simulate_rbm(0.0, 1.0, 2.0, rng), ValidationError);
}

TEST(Rbm, LocalTimeNormalisation) {
    // E_0 int e^{-l t} dgamma_t = 1/sqrt(l)
    for (double lambda : {1.0, 4.0}) {
        McAccumulator acc;
        double tail = 0.0;
        for (int i = 0; i < 4000; ++i) {
            RngStream rng(2, stream_id(1, i, 0));
            const auto sk = simulate_rbm(0.0, 14.0 / lambda, 1e-3, rng);
            const auto f = path_functional_dgamma(sk, lambda, 0.0);
            acc.add(f.value);
            tail = f.tail_bound;
        }
        EXPECT_LE(std::abs(acc.mean - 1.0 / std::sqrt(lambda)), 3 * acc.se() + tail) << lambda;
    }
}

TEST(Rbm, JointTransform) {
    // E_0 int e^{-l t - a X - b gamma} dt = 1/((sqrt l + a)(sqrt l + b))
    const double lambda = 1.0, a = 1.0, b = 1.0;
    McAccumulator acc, accg;
    for (int i = 0; i < 4000; ++i) {
        RngStream rng(3, stream_id(1, i, 0));
        const auto sk = simulate_rbm(0.0, 14.0, 1e-3, rng);
        acc.add(path_functional_dt(sk, lambda, a, b).value);
        accg.add(path_functional_dgamma(sk, 4.0, 1.0).value);
    }
    EXPECT_LE(std::abs(acc.mean - 0.25), 3 * acc.se() + 1e-5);
    EXPECT_LE(std::abs(accg.mean - 1.0 / 3.0), 3 * accg.se() + 1e-5);
}

TEST(Rbm, IntervalSymmetry) {
    McAccumulator g0, g1;
    for (int i = 0; i < 2000; ++i) {
        RngStream rng(4, stream_id(1, i, 0));
        IntervalRbm r(0.5, 1e-3);
        for (int k = 0; k < 2000; ++k) {
            r.step(rng);
            ASSERT_GE(r.x(), 0.0);
            ASSERT_LE(r.x(), 1.0);
        }
        g0.add(r.gamma0());
        g1.add(r.gamma1());
    }
    EXPECT_LE(std::abs(g0.mean - g1.mean), 3 * std::hypot(g0.se(), g1.se()));
}

TEST(Functionals, DeterministicPaths) {
    PathSkeleton sk;
    for (int k = 0; k <= 1000; ++k) {
        sk.times.push_back(k * 0.01);
        sk.positions.push_back(0.0);
        sk.local_time.push_back(k * 0.01);
    }
    sk.occupation = sk.times;
    // dt functional with gamma_t = t: int e^{-2t} dt over [0,10]
    EXPECT_NEAR(path_functional_dt(sk, 1.0, 0.0, 1.0).value, (1 - std::exp(-20.0)) / 2.0, 1e-4);
    EXPECT_NEAR(path_functional_dgamma(sk, 1.0, 1.0).value, (1 - std::exp(-20.0)) / 2.0, 1e-4);
    const auto f = path_functional_dt(sk, 0.1, 0.0, 0.0);
    EXPECT_NEAR(f.value, (1 - std::exp(-1.0)) / 0.1, 1e-12);
    EXPECT_TRUE(f.tail_warning);
    EXPECT_THROW(path_functional_dt(sk, 0.0, 0.0, 0.0), ValidationError);
}

TEST(Functionals, StieltjesLaplace) {
    MonotoneFn g({0.0, 1.0, 1.0, 3.0}, {0.0, 2.0, 5.0, 5.0});
    const double lambda = 0.7;
    const double expect = 2.0 * (1 - std::exp(-lambda)) / lambda + 3.0 * std::exp(-lambda);
    EXPECT_NEAR(stieltjes_laplace(g, lambda), expect, 1e-14);
}

TEST(Clock, StickyClockIsAffineInLocalTime) {
    RngStream rng(5, 0);
    const auto sk = simulate_rbm(0.0, 2.0, 1e-3, rng);
    const auto p = params(1.0, 2.0, 0.5);
    const auto v = build_sticky_clock(p, sk);
    for (std::size_t i = 0; i < sk.size(); i += 97)
        EXPECT_NEAR(v(sk.times[i]), sk.times[i] + 4.0 * sk.local_time[i], 1e-12);
}

TEST(Clock, FracClockJumpsOnlyWhereLocalTimeGrows) {
    RngStream rng(6, 0), hr(6, 1);
    const auto sk = simulate_rbm(0.0, 2.0, 1e-3, rng);
    const auto [clock, trace] = build_frac_sticky_clock(params(0.6), sk, hr);
    const auto& s = clock.args();
    const auto& v = clock.values();
    std::size_t jumps = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] == s[i - 1]) {
            ++jumps;
            EXPECT_GT(v[i], v[i - 1]);
        } else {
            EXPECT_NEAR(v[i] - v[i - 1], s[i] - s[i - 1], 1e-12);  // unit slope between jumps
        }
    }
    EXPECT_EQ(jumps + 1, trace.size());
    EXPECT_NEAR(v.back() - s.back(), trace.values.back(), 1e-9);
}

TEST(Clock, NotHeldTimeTransform) {
    // E_0 int e^{-l V-bar(s)} ds = 1/(sqrt l (sqrt l + k l^alpha))
    const double lambda = 4.0, alpha = 0.6;
    McAccumulator acc;
    for (int i = 0; i < 3000; ++i) {
        RngStream rng(7, stream_id(1, i, 0)), hr(7, stream_id(1, i, 1));
        const auto sk = simulate_rbm(0.0, 5.0, 1e-3, rng);
        const auto clock = build_frac_sticky_clock(params(alpha), sk, hr).first;
        double sum = 0.0;
        for (std::size_t k = 1; k < sk.size(); ++k) {
            // V-bar has unit slope on (t_{k-1}, t_k) starting from its right limit at t_{k-1}
            const double v0 = clock(sk.times[k - 1]);
            sum += std::exp(-lambda * v0) * (1 - std::exp(-lambda * (sk.times[k] - sk.times[k - 1]))) / lambda;
        }
        acc.add(sum);
    }
    const double expect = 1.0 / (2.0 * (2.0 + std::pow(lambda, alpha)));
    EXPECT_LE(std::abs(acc.mean - expect), 3 * acc.se() + std::exp(-20.0) + 2e-3 * expect) << acc.mean;
}

TEST(Compose, HeldTimeTransform) {
    // E_0 int e^{-l t} 1{held} dt = 1/l - 1/(sqrt l (sqrt l + k l^alpha))
    const double lambda = 4.0, alpha = 0.6, dt = 1e-3;
    const auto p = params(alpha);
    McAccumulator acc;
    for (int i = 0; i < 2000; ++i) {
        RngStream rng(8, stream_id(1, i, 0)), hr(8, stream_id(1, i, 1));
        FracStickyWalker<HalfLineRbm> w(p, HalfLineRbm(0.0, dt), dt, rng, hr);
        double sum = 0.0;
        for (int j = 0; j < 6000; ++j) {
            const double t = (j + 0.5) * dt;
            if (w.at(t).held) sum += std::exp(-lambda * t) * dt;
        }
        acc.add(sum);
    }
    const double expect = 0.25 - 1.0 / (2.0 * (2.0 + std::pow(lambda, alpha)));
    EXPECT_LE(std::abs(acc.mean - expect), 3 * acc.se() + 2e-3) << acc.mean;
}

TEST(Compose, WalkerMatchesSkeletonRoute) {
    for (double alpha : {0.5, 1.0}) {
        const auto p = params(alpha, 1.0, 2.0);
        const double dt = 1e-3, T = 3.0;
        RngStream r1(9, 0), h1(9, 1), r2(9, 0), h2(9, 1);
        const auto sk = simulate_rbm(0.0, T, dt, r1);
        const auto clock = build_frac_sticky_clock(p, sk, h1).first;
        std::vector<double> grid;
        for (int j = 0; j <= 2500 && j * dt * 1.0 < clock.values().back(); ++j) grid.push_back(j * 1e-3);
        const auto xbar = compose_xbar(p, sk, clock, r1, grid);
        FracStickyWalker<HalfLineRbm> w(p, HalfLineRbm(0.0, dt), dt, r2, h2);
        int held = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const auto st = w.at(grid[j]);
            EXPECT_NEAR(st.x, xbar.positions[j], 1e-9) << alpha << " " << grid[j];
            EXPECT_NEAR(st.gamma, xbar.local_time[j], 1e-9);
            held += st.held;
        }
        if (alpha < 1.0) {
            EXPECT_GT(held, 0);
        } else {
            EXPECT_EQ(held, 0);
        }
    }
}

TEST(Holdings, FirstHoldMatchesExtraction) {
    // the streaming first hold equals extract_holdings(compose_xbar(...))[0]
    const double dt = 1e-3, eps = 2.0 * std::sqrt(dt), T = 2.0;
    int compared = 0;
    for (double alpha : {0.6, 1.0})
        for (int i = 0; i < 40; ++i) {
            const auto p = params(alpha);
            RngStream r1(21, 2 * i), h1(21, 2 * i + 1), r2(21, 2 * i), h2(21, 2 * i + 1);
            const auto sk = simulate_rbm(0.0, T, dt, r1);
            const auto clock = build_frac_sticky_clock(p, sk, h1).first;
            std::vector<double> grid;
            for (int j = 0; j * dt < clock.values().back() && j * dt <= T; ++j) grid.push_back(j * dt);
            const auto holds = extract_holdings(compose_xbar(p, sk, clock, r1, grid), eps);
            ASSERT_FALSE(holds.empty());
            ASSERT_EQ(holds[0].start, 0.0);
            if (holds[0].start + holds[0].duration >= grid.back()) continue;  // hold still open at the grid end
            EXPECT_NEAR(first_hold_duration(p, dt, eps, r2, h2), holds[0].duration, 1e-12) << alpha << " " << i;
            ++compared;
        }
    EXPECT_GT(compared, 60);
}

TEST(Compose, KillingRecordsTime) {
    const auto p = params(0.5, 1.0, 1.0, 5.0);
    int killed = 0;
    for (int i = 0; i < 50; ++i) {
        RngStream rng(10, i), hr(10, 1000 + i);
        const auto sk = simulate_rbm(0.0, 4.0, 1e-3, rng);
        const auto clock = build_frac_sticky_clock(p, sk, hr).first;
        const auto xbar = compose_xbar(p, sk, clock, rng);
        if (xbar.killed_at) {
            ++killed;
            EXPECT_GE(*xbar.killed_at, 0.0);
            EXPECT_LE(*xbar.killed_at, xbar.horizon());
        }
    }
    EXPECT_GT(killed, 25);
}

TEST(Holdings, Extraction) {
    PathSkeleton xb;
    const std::vector<double> pos{0.5, 0.0, 0.0, 0.3, 0.0, 0.6, 0.0, 0.0};
    for (std::size_t i = 0; i < pos.size(); ++i) {
        xb.times.push_back(static_cast<double>(i));
        xb.positions.push_back(pos[i]);
    }
    const auto h = extract_holdings(xb, 0.1);
    ASSERT_EQ(h.size(), 3u);
    EXPECT_DOUBLE_EQ(h[0].start, 1.0);
    EXPECT_DOUBLE_EQ(h[0].duration, 2.0);
    EXPECT_DOUBLE_EQ(h[1].duration, 1.0);
    EXPECT_DOUBLE_EQ(h[2].start, 6.0);
    EXPECT_DOUBLE_EQ(h[2].duration, 1.0);  // closed at the last grid time
    EXPECT_THROW(extract_holdings(xb, 0.0), ValidationError);
}

TEST(Lifetime, LaplaceTransform) {
    // E_x e^{-l zeta} = r e^{-x sqrt l}/(k l^alpha + r + sqrt l), r the kill rate
    const auto p = params(0.5, 1.0, 1.0, 1.0);
    const double x0 = 0.5, lambda = 1.0;
    LifetimeConfig cfg;
    McAccumulator acc;
    int censored = 0;
    for (int i = 0; i < 20000; ++i) {
        RngStream rng(11, stream_id(1, i, 0)), hr(11, stream_id(1, i, 1));
        const auto s = sample_lifetime(p, x0, rng, hr, cfg);
        censored += s.censored;
        acc.add(std::exp(-lambda * s.value));
    }
    const double expect = std::exp(-0.5) / 3.0;
    EXPECT_LE(std::abs(acc.mean - expect), 3 * acc.se() + 5e-4) << acc.mean << " censored " << censored;
    RngStream r1(1, 1), r2(1, 2);
    EXPECT_THROW(sample_lifetime(params(0.5), x0, r1, r2), DomainError);
}

TEST(HatEngine, RenewalIdentity) {
    // Per cycle: hold e-hat then an excursion D with density prop. to s^{-3/2} on [delta, T].
    // E int e^{-l t} dgamma-hat = (l^a/l)/(l^a + rho (1 - phi_D)).
    const auto p = params(0.6);
    const double T = 40.0, delta = 1e-3;
    for (double lambda : {1.0, 4.0}) {
        const double a = 1.0 / std::sqrt(delta), b = 1.0 / std::sqrt(T);
        auto dens = [&](double s) { return 0.5 * std::pow(s, -1.5) / (a - b) * std::exp(-lambda * s); };
        const double phi = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, delta, T, 30, 1e-13);
        const double la = std::pow(lambda, 0.6);
        const double expect = (la / lambda) / (la + (1.0 - phi));
        McAccumulator acc;
        for (int i = 0; i < 20000; ++i) {
            RngStream rng(12, stream_id(1, i, 0));
            const auto hp = hat_event_engine(p, 0.0, T, delta, rng);
            acc.add(stieltjes_laplace(hp.gamma_hat, lambda));
        }
        EXPECT_LE(std::abs(acc.mean - expect), 3 * acc.se() + std::exp(-lambda * T) / lambda)
            << lambda << " " << acc.mean << " " << expect;
    }
}

TEST(HatEngine, FirstPassageFromInterior) {
    RngStream rng(13, 0);
    std::vector<double> starts;
    for (int i = 0; i < 5000; ++i) {
        const auto hp = hat_event_engine(params(0.6), 0.7, 1e3, 1e-3, rng);
        starts.push_back(hp.hat_holds.empty() ? 1e3 : hp.hat_holds.front().start);
    }
    // hitting time of 0 from x for generator d^2/dx^2 is stable(1/2) with scale x
    const auto ks = ks_one_sample(starts, [](double s) { return s <= 0 ? 0.0 : std::erfc(0.35 / std::sqrt(s)); });
    EXPECT_TRUE(ks.passed()) << ks.statistic;
}

TEST(Mc, WorkerCountInvariance) {
    auto path = [](std::size_t i, std::span<double> out) {
        RngStream rng(14, i);
        out[0] = rng.normal();
        out[1] = rng.exponential();
    };
    const auto a = run_mc(2, 5000, 1, path);
    const auto b = run_mc(2, 5000, 3, path);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(a[k].n, b[k].n);
        EXPECT_EQ(a[k].mean, b[k].mean);
        EXPECT_EQ(a[k].m2, b[k].m2);
    }
}
