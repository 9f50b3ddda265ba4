#ifndef FSTICKY_FIELD_HPP
#define FSTICKY_FIELD_HPP

#include <vector>

namespace fsticky {

// u(t_i, x_j) stored row-major in t. se is empty for deterministic solvers.
struct Field {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> se;
    std::vector<bool> flagged;  // inversion cross-check disagreement

    Field() = default;
    Field(std::vector<double> tg, std::vector<double> xg) : t(std::move(tg)), x(std::move(xg)) {
        u.assign(t.size() * x.size(), 0.0);
        flagged.assign(u.size(), false);
    }

    double& at(std::size_t i, std::size_t j) { return u[i * x.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return u[i * x.size() + j]; }
    double se_at(std::size_t i, std::size_t j) const { return se.empty() ? 0.0 : se[i * x.size() + j]; }
};

} // namespace fsticky

#endif
