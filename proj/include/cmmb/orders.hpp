#pragma once

// Dependence-order oracles: convex order between laws on {0,...,d},
// supermodular order between small Bernoulli vectors, and negative
// association by exhaustive enumeration.

#include "cmmb/cmb_core.hpp"
#include "cmmb/multi_affine.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cmmb {

// The exchangeable Bernoulli vector whose component sum has law `sum_pmf`:
// every outcome with k ones has probability sum_pmf(k) / C(d,k).
class ExchBernoulliPmf {
public:
    explicit ExchBernoulliPmf(DiscretePmf sum_pmf) : sum_(std::move(sum_pmf)) {}

    int d() const noexcept { return sum_.d(); }
    const DiscretePmf& sum_pmf() const noexcept { return sum_; }
    double marginal_mean() const { return mean(sum_) / d(); }

    double joint(Outcome x) const;

    // Full 2^d table; CapacityError when d > 20.
    MultiAffinePmf expand() const;

private:
    DiscretePmf sum_;
};

ExchBernoulliPmf exchangeable_from_sum(const DiscretePmf& pmf);

// Joint law of CMMB_d(r, nu).
MultiAffinePmf cmmb_joint(const CmbParams& params);

// E[(W - t)_+].
double stop_loss(const DiscretePmf& pmf, double t);

// lo <=_cx hi. Both laws must share d and have means within tol (DomainError
// otherwise); the stop-loss transforms are then compared on t = 0..d.
bool cx_dominates(const DiscretePmf& hi, const DiscretePmf& lo, double tol = 1e-9);

struct SignPattern {
    std::vector<int> positions;  // index k where a new sign starts
    std::vector<int> signs;      // sign of each run, +1 or -1
};

// Sign changes of a - b over k = 0..d, skipping exact zeros.
SignPattern sign_changes(const DiscretePmf& a, const DiscretePmf& b);

struct SmResult {
    bool holds = false;
    double optimum = 0.0;  // max over supermodular phi in [-1,1]^{2^d} of E_lo[phi] - E_hi[phi]
    std::optional<std::vector<double>> witness;  // maximizing phi, indexed by outcome, when !holds
};

// lo <=_sm hi for d <= 4, decided by a linear program over the supermodular
// cone intersected with the box [-1,1]^{2^d}. Supermodularity on the cube is
// imposed through pairs that differ in exactly two coordinates.
SmResult sm_dominates_lp(const MultiAffinePmf& lo, const MultiAffinePmf& hi);

// Local supermodularity check used to validate witnesses.
bool is_supermodular(const std::vector<double>& phi, int d, double tol = 1e-9);

struct NaViolation {
    Outcome block1 = 0;  // coordinate sets as bitmasks
    Outcome block2 = 0;
    // Truth tables of the increasing 0/1 functions over each block's local
    // coordinates (local bit l is the l-th smallest coordinate of the block).
    std::uint32_t h1 = 0;
    std::uint32_t h2 = 0;
    double e_h1h2 = 0.0;
    double e_h1 = 0.0;
    double e_h2 = 0.0;
};

struct NaResult {
    bool holds = false;
    std::optional<NaViolation> violation;
};

// Non-constant increasing Boolean functions of n <= 4 variables, as truth tables.
const std::vector<std::uint32_t>& monotone_boolean_functions(int n);

// Checks E[h1 h2] <= E[h1] E[h2] + 1e-12 over all ordered pairs of disjoint
// nonempty blocks and all increasing 0/1 functions on them. Increasing
// functions on a finite lattice are nonnegative combinations of upset
// indicators plus a constant, so the 0/1 case decides the general one.
// d <= 5; CapacityError otherwise. Reports the first violation in
// enumeration order (block1, then block2, then h1, then h2).
NaResult na_check_exhaustive(const MultiAffinePmf& pmf);

// Cov(I_1, I_2) = E[W(W-1)] / (d(d-1)) - p^2; d >= 2.
double pairwise_covariance(const ExchBernoulliPmf& pmf);

}  // namespace cmmb
