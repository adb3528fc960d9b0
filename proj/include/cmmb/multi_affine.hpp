#pragma once

// General d-variate Bernoulli law. Its pgf is multi-affine:
//
//     P(z) = sum_{i in {0,1}^d} f(i) z_1^{i_1} ... z_d^{i_d}
//
// Outcomes are stored densely as bitmasks: bit j (0-based) of the mask is the
// value of coordinate j+1. All 2^d entries are kept, zeros included.

#include "cmmb/cmb_core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cmmb {

using Outcome = std::uint32_t;

class MultiAffinePmf {
public:
    static constexpr int kMaxDim = 20;
    static constexpr double kSumTolerance = 1e-12;

    // Throws DomainError on a bad size or invalid weights, CapacityError when d > 20.
    MultiAffinePmf(int d, std::vector<double> weights);

    static MultiAffinePmf normalized(int d, std::vector<double> weights);

    int d() const noexcept { return d_; }
    std::size_t size() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](Outcome x) const { return weights_.at(x); }

    // P(I_{j+1} = 1), j 0-based.
    double marginal_mean(int j) const;
    std::vector<double> marginal_means() const;

    // Law of I_1 + ... + I_d.
    DiscretePmf sum_law() const;

    double pgf(std::span<const double> x) const;

    // Mixed partial derivative of the pgf over the coordinates in `wrt`
    // (a bitmask), evaluated at the real point x.
    double pgf_derivative(std::span<const double> x, Outcome wrt) const;

    bool operator==(const MultiAffinePmf&) const = default;

private:
    int d_;
    std::vector<double> weights_;
};

// Binary-string key of an outcome, coordinate 1 first: for d=3 the mask with
// only coordinate 2 set is "010".
std::string outcome_key(Outcome x, int d);

// Inverse of outcome_key; throws DomainError on malformed keys.
Outcome parse_outcome_key(const std::string& key, int d);

// prod_j x_j^{bit j of mask} for every mask, in O(2^d).
std::vector<double> monomial_table(std::span<const double> x);

}  // namespace cmmb
