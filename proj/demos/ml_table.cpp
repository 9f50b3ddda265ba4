// Table of E_alpha(-x) for a few orders, with the closed forms at alpha = 1 and 1/2.
#include <cmath>
#include <cstdio>

#include <boost/math/special_functions/erf.hpp>

#include "fsticky/specfun.hpp"

int main() {
    const double orders[] = {0.25, 0.5, 0.75, 0.9, 1.0};
    std::printf("%6s", "x");
    for (double a : orders) std::printf("  E_%-12.2f", a);
    std::printf("  %-14s  %-14s\n", "exp(-x)", "e^{x^2}erfc(x)");
    for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        std::printf("%6.2f", x);
        for (double a : orders) std::printf("  %-14.10f", fsticky::mittag_leffler(a, -x));
        std::printf("  %-14.10f  %-14.10f\n", std::exp(-x), std::exp(x * x) * boost::math::erfc(x));
    }
}
