#pragma once

// Independent thinning of a CMMB_d(1/2, nu) vector J: I_m = K_m J_m with
// K_m ~ Bernoulli(theta_m) independent and theta_m = 2 p_m, so that
// E[I_m] = p_m. Each thinning step substitutes 1 - theta + theta z_m for z_m
// in the pgf, which maps the upper half-plane into itself.

#include "cmmb/multi_affine.hpp"

#include <span>
#include <vector>

namespace cmmb {

class ThinningSpec {
public:
    // Requires 1 <= d <= 20 and every p_m in [0, 1/2]; p need not be sorted.
    ThinningSpec(double base_nu, std::vector<double> p);

    double base_nu() const noexcept { return base_nu_; }
    int d() const noexcept { return static_cast<int>(p_.size()); }
    const std::vector<double>& p() const noexcept { return p_; }
    const std::vector<double>& theta() const noexcept { return theta_; }

    // Joint law of the unthinned CMMB_d(1/2, nu) vector.
    MultiAffinePmf base() const;

private:
    double base_nu_;
    std::vector<double> p_;
    std::vector<double> theta_;
};

// Exact joint law of (K_1 J_1, ..., K_d J_d), summing every base outcome
// over all of its sub-outcomes.
MultiAffinePmf thin_joint_pmf(const ThinningSpec& spec);

// P_J(1 - theta_1 + theta_1 z_1, ..., 1 - theta_d + theta_d z_d).
double thinned_pgf_eval(const ThinningSpec& spec, std::span<const double> z);

// Thins coordinate m (1-based) of `base` by an independent Bernoulli(p_k).
// p_k = 1 is the identity; p_k = 0 zeroes the coordinate.
MultiAffinePmf single_thin_pgf(const MultiAffinePmf& base, int m, double p_k);

}  // namespace cmmb
