#pragma once

// Polytope view of the laws on {0,...,d} with a fixed mean: two-atom
// extremal points, the symmetric decomposition of CMB_d(1/2, nu), the d = 3
// line through it, and the nu -> +/-inf limits.

#include "cmmb/cmb_core.hpp"
#include "cmmb/multi_affine.hpp"

#include <vector>

namespace cmmb {

struct ExtremalIndex {
    int j1;
    int j2;
};

// Mass (j2-mu)/(j2-j1) at j1 and (mu-j1)/(j2-j1) at j2.
// Requires 0 <= j1 <= floor(mu), ceil(mu) <= j2 <= d and j1 != j2.
DiscretePmf extremal_point(int d, double mu, ExtremalIndex index);

// Symmetric extremal point of the mean-d/2 polytope: half mass at j and at
// d-j, or the point mass at d/2 when j = d/2.
DiscretePmf symmetric_extremal_point(int d, int j);

class WeightVector {
public:
    // Nonnegative, summing to 1 within 1e-12; one weight per j = 0..floor(d/2).
    explicit WeightVector(std::vector<double> lambdas);

    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    double operator[](int j) const { return lambdas_.at(static_cast<std::size_t>(j)); }
    int size() const noexcept { return static_cast<int>(lambdas_.size()); }

private:
    std::vector<double> lambdas_;
};

// lambda_j = 2 C(d,j)^nu / sum_y C(d,y)^nu for j < d/2; for even d the
// middle weight is C(d,d/2)^nu / sum_y C(d,y)^nu because its extremal point
// is a single atom.
WeightVector symmetric_weights(int d, double nu);

// sum_j lambda_j * symmetric_extremal_point(d, j).
DiscretePmf reconstruct_from_weights(int d, const WeightVector& weights);

enum class LimitDirection { plus_inf, minus_inf };

DiscretePmf limit_pmf(int d, LimitDirection direction);

// lambda * (half mass at 0 and 3) + (1 - lambda) * (half mass at 1 and 2).
// lambda = 1/(1+3^nu) gives CMB_3(1/2, nu).
DiscretePmf d3_line_pmf(double lambda);

// lambda0 * (half mass at 000 and 111)
//   + (1 - lambda0) * sum_k w_k * (half mass at e_k and 1 - e_k).
// Exchangeable exactly when w1 = w2 = w3.
MultiAffinePmf d3_nonexch_family(double lambda0, double w1, double w2, double w3);

}  // namespace cmmb
