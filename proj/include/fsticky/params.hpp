#ifndef FSTICKY_PARAMS_HPP
#define FSTICKY_PARAMS_HPP

#include "error.hpp"

namespace fsticky {

// Boundary condition  eta D^alpha u = sigma du/dn_in - c u,  generator gen_norm * d^2/dx^2.
struct ModelParams {
    double eta = 1.0;
    double sigma = 1.0;
    double c = 0.0;
    double alpha = 1.0;
    double gen_norm = 1.0;

    void validate() const {
        require(eta > 0.0, "ModelParams: eta must be positive");
        require(sigma > 0.0, "ModelParams: sigma must be positive");
        require(c >= 0.0, "ModelParams: c must be nonnegative");
        require(alpha > 0.0 && alpha <= 1.0, "ModelParams: alpha must lie in (0,1]");
        require(gen_norm == 1.0, "ModelParams: gen_norm is fixed to 1");
    }

    double stickiness() const { return eta / sigma; }
};

} // namespace fsticky

#endif
