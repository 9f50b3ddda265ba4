// One path of the fractional sticky process: prints X-bar on a coarse grid and
// the longest boundary holds.
//
//   demo_sticky_path [alpha] [seed]
#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "fsticky/paths.hpp"

int main(int argc, char** argv) {
    using namespace fsticky;
    ModelParams p;
    p.alpha = argc > 1 ? std::atof(argv[1]) : 0.6;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
    const double dt = 1e-4, internal = 2.0;
    try {
        p.validate();
        RngStream pr(seed, stream_id(1, 0, 0)), hr(seed, stream_id(1, 0, 1)), kr(seed, stream_id(1, 0, 2));
        const auto sk = simulate_rbm(0.0, internal, dt, pr);
        const auto [clock, trace] = build_frac_sticky_clock(p, sk, hr);
        const auto xb = compose_xbar(p, sk, clock, kr);

        std::printf("alpha=%g  internal horizon %g  external horizon %g  boundary local time %g\n", p.alpha, internal,
                    clock(internal), sk.local_time.back());
        std::printf("%10s %12s %12s\n", "t", "x", "gamma");
        for (std::size_t i = 0; i < xb.size(); i += 1000)
            std::printf("%10.4f %12.6f %12.6f\n", xb.times[i], xb.positions[i], xb.local_time[i]);

        auto holds = extract_holdings(xb, 2.0 * std::sqrt(dt));
        std::sort(holds.begin(), holds.end(), [](const auto& a, const auto& b) { return a.duration > b.duration; });
        std::printf("\n%zu holds; longest:\n", holds.size());
        for (std::size_t i = 0; i < std::min<std::size_t>(5, holds.size()); ++i)
            std::printf("  start %.4f  duration %.4f\n", holds[i].start, holds[i].duration);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
}
