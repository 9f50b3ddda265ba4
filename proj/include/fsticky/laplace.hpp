#ifndef FSTICKY_LAPLACE_HPP
#define FSTICKY_LAPLACE_HPP

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/factorials.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "error.hpp"

namespace fsticky {

enum class InversionMethod { GaverStehfest, Talbot };

struct LaplaceInversionConfig {
    InversionMethod method = InversionMethod::GaverStehfest;
    int order = 16;         // Stehfest order N, or Talbot node count M
    double t_min = 1e-6;

    void validate() const {
        if (method == InversionMethod::GaverStehfest)
            require(order >= 8 && order % 2 == 0, "LaplaceInversionConfig: Stehfest order must be even and >= 8");
        else
            require(order >= 24, "LaplaceInversionConfig: Talbot needs >= 24 nodes");
        require(t_min > 0.0, "LaplaceInversionConfig: t_min must be positive");
    }
};

struct InversionPoint {
    double value;
    bool flagged;  // cross-check disagreement
};

// Stehfest weights V_1..V_N, evaluated in 50-digit arithmetic and rounded.
inline const std::vector<double>& stehfest_weights(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    using mp = boost::multiprecision::cpp_bin_float_50;
    auto fact = [](int k) { return boost::math::factorial<mp>(static_cast<unsigned>(k)); };
    const int h = n / 2;
    std::vector<double> w(n);
    for (int k = 1; k <= n; ++k) {
        mp s = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, h); ++j)
            s += boost::multiprecision::pow(mp(j), h) * fact(2 * j) /
                 (fact(h - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
        if ((k + h) % 2) s = -s;
        w[k - 1] = static_cast<double>(s);
    }
    return cache.emplace(n, std::move(w)).first->second;
}

// Gaver-Stehfest: f(t) ~ (ln2/t) sum_k V_k F(k ln2 / t). F on the real axis.
template <class F>
double invert_stehfest(F&& fhat, double t, int n) {
    const auto& w = stehfest_weights(n);
    const double a = std::numbers::ln2 / t;
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += w[k - 1] * fhat(k * a);
    return a * s;
}

// Fixed Talbot contour (Abate-Valko). F must accept std::complex<double>.
template <class F>
double invert_talbot(F&& fhat, double t, int m) {
    using cd = std::complex<double>;
    const double r = 2.0 * m / (5.0 * t);
    double s = 0.5 * std::exp(r * t) * std::real(fhat(cd(r, 0.0)));
    for (int k = 1; k < m; ++k) {
        const double th = k * std::numbers::pi / m;
        const double cot = std::cos(th) / std::sin(th);
        const cd delta = r * th * cd(cot, 1.0);
        const double sig = th + (th * cot - 1.0) * cot;
        s += std::real(std::exp(t * delta) * fhat(delta) * cd(1.0, sig));
    }
    return r / m * s;
}

} // namespace fsticky

#endif
