#ifndef FSTICKY_STATS_HPP
#define FSTICKY_STATS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "error.hpp"

namespace fsticky {

// Welford accumulator; merge() follows Chan et al. so batches combine exactly.
struct McAccumulator {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const McAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double se() const {
        return n > 1 ? std::sqrt(m2 / (static_cast<double>(n) * static_cast<double>(n - 1))) : 0.0;
    }
};

inline McAccumulator empirical_laplace(std::span<const double> samples) {
    McAccumulator acc;
    for (double x : samples) acc.add(x);
    return acc;
}

struct KsResult {
    double statistic;
    double threshold;  // asymptotic critical value at level 0.01
    bool passed() const { return statistic < threshold; }
};

inline constexpr double ks_c_001 = 1.628;

namespace detail {
inline std::vector<double> sorted_checked(std::span<const double> xs, const char* who) {
    if (xs.size() < 100) throw ValidationError(std::string(who) + ": need at least 100 samples");
    std::vector<double> v(xs.begin(), xs.end());
    for (double x : v)
        if (std::isnan(x)) throw ValidationError(std::string(who) + ": NaN in samples");
    std::sort(v.begin(), v.end());
    return v;
}
} // namespace detail

inline KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
    const auto v = detail::sorted_checked(samples, "ks_one_sample");
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return {d, ks_c_001 / std::sqrt(n)};
}

inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    const auto x = detail::sorted_checked(a, "ks_two_sample");
    const auto y = detail::sorted_checked(b, "ks_two_sample");
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(i / n - j / m));
    }
    return {d, ks_c_001 * std::sqrt((n + m) / (n * m))};
}

// Right-continuous empirical CDF of a sample.
inline std::function<double(double)> ecdf(std::span<const double> samples) {
    auto v = std::make_shared<std::vector<double>>(samples.begin(), samples.end());
    std::sort(v->begin(), v->end());
    return [v](double x) {
        return static_cast<double>(std::upper_bound(v->begin(), v->end(), x) - v->begin()) /
               static_cast<double>(v->size());
    };
}

} // namespace fsticky

#endif
