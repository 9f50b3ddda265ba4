#ifndef FSTICKY_MONOTONE_HPP
#define FSTICKY_MONOTONE_HPP

#include <algorithm>
#include <limits>
#include <vector>

#include "error.hpp"

namespace fsticky {

// Nondecreasing function stored as knots (s_i, v_i). Between knots with
// distinct s the function is linear; two knots with equal s encode a jump.
// Outside the knot range it is extended by v_0 on the left and by v_last
// (or +inf when tail == Infinite) on the right.
class MonotoneFn {
public:
    enum class Tail { Constant, Infinite };

    MonotoneFn() = default;
    MonotoneFn(std::vector<double> s, std::vector<double> v, Tail tail = Tail::Constant,
               bool right_continuous = true)
        : s_(std::move(s)), v_(std::move(v)), tail_(tail), right_continuous_(right_continuous) {
        require(s_.size() == v_.size(), "MonotoneFn: knot arrays differ in length");
        require(!s_.empty(), "MonotoneFn: no knots");
        for (std::size_t i = 1; i < s_.size(); ++i) {
            require(s_[i] >= s_[i - 1], "MonotoneFn: knot abscissae must be nondecreasing");
            require(v_[i] >= v_[i - 1], "MonotoneFn: values must be nondecreasing");
        }
    }

    double operator()(double x) const { return right_continuous_ ? eval_right(x) : eval_left(x); }

    double left_limit(double x) const { return eval_left(x); }
    double right_limit(double x) const { return eval_right(x); }

    const std::vector<double>& args() const { return s_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return s_.size(); }
    Tail tail() const { return tail_; }
    bool right_continuous() const { return right_continuous_; }

private:
    static constexpr double inf = std::numeric_limits<double>::infinity();

    double lerp(std::size_t i, double x) const {
        const double w = (x - s_[i]) / (s_[i + 1] - s_[i]);
        return v_[i] + w * (v_[i + 1] - v_[i]);
    }

    double eval_right(double x) const {
        if (x < s_.front()) return v_.front();
        if (x >= s_.back()) return tail_ == Tail::Infinite ? inf : v_.back();
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), x) - s_.begin()) - 1;
        return lerp(i, x);
    }

    double eval_left(double x) const {
        if (x <= s_.front()) return v_.front();
        if (x > s_.back()) return tail_ == Tail::Infinite ? inf : v_.back();
        const std::size_t i = static_cast<std::size_t>(std::lower_bound(s_.begin(), s_.end(), x) - s_.begin());
        if (s_[i] == x) return v_[i];
        return lerp(i - 1, x);
    }

    std::vector<double> s_, v_;
    Tail tail_ = Tail::Constant;
    bool right_continuous_ = true;
};

// f^{-1}(t) = inf{s : f(s) > t}. Jumps of f become flat pieces and flat
// pieces become jumps; beyond the last value the inverse is +inf.
inline MonotoneFn generalized_inverse(const MonotoneFn& f) {
    return MonotoneFn(f.values(), f.args(), MonotoneFn::Tail::Infinite, true);
}

} // namespace fsticky

#endif
