#pragma once

// Real-rootedness (hyperbolicity) of univariate polynomials, real stability
// of multi-affine pgfs, and the strongly Rayleigh (SR) property of CMB laws.

#include "cmmb/cmb_core.hpp"
#include "cmmb/multi_affine.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cmmb {

enum class HyperbolicityMethod { exact_sturm, numeric_eigen };

const char* to_string(HyperbolicityMethod method);

struct HyperbolicityVerdict {
    bool is_hyperbolic = false;
    int real_root_count = 0;  // with multiplicity
    int degree = 0;
    HyperbolicityMethod method = HyperbolicityMethod::exact_sturm;
    // A non-real root; only the numeric method produces one.
    std::optional<std::complex<double>> witness;
};

// Real roots counted with multiplicity by Sturm sequences over the
// rationals, after repeated square-free reduction. Requires exact
// coefficients and degree >= 1; throws DomainError otherwise.
HyperbolicityVerdict is_hyperbolic_exact(const UnivariatePoly& poly);
HyperbolicityVerdict is_hyperbolic_exact(std::span<const BigInt> coeffs);

// Roots as eigenvalues of the balanced companion matrix.
std::vector<std::complex<double>> polynomial_roots(const UnivariatePoly& poly);

// A root is real when |Im| <= rel_tol * (1 + |Re|). Tight rings of m roots
// around a real centre, the eigensolver's rendering of an m-fold real root,
// count as m real roots.
HyperbolicityVerdict is_hyperbolic_numeric(const UnivariatePoly& poly, double rel_tol = 1e-8);

// Hyperbolicity of G_{d,nu}; exact for nonnegative integer nu, numeric otherwise.
// The SR property of CMB_d(r, nu) does not depend on r.
HyperbolicityVerdict cmb_sr_verdict(int d, double nu);
bool cmb_is_sr(int d, double nu);

// Bisection on nu between a non-SR `lo` and an SR `hi` until the bracket is
// no wider than tol; returns the bracket midpoint.
double find_sr_threshold(int d, double lo, double hi, double tol);

// Legendre polynomial of degree n by the three-term recurrence.
double legendre(int n, double x);

// Closed-form SR decision for d = 3: for each coordinate pair the Rayleigh
// difference is a quadratic in the remaining coordinate, which must be
// nonnegative on the whole real line.
bool sr_check_multiaffine_d3(const MultiAffinePmf& pmf);

struct RayleighViolation {
    std::vector<double> x;
    int j1 = 0;  // 1-based coordinate indices, j1 < j2
    int j2 = 0;
    // (dP/dz_j1 dP/dz_j2 - P d2P/dz_j1 dz_j2) / max(|first|, |second|); negative.
    double margin = 0.0;
};

// Rayleigh margin at x for the pair (j1, j2), 0-based, divided by the sum of
// absolute terms so cancellation noise stays near 1e-16.
double rayleigh_margin(const MultiAffinePmf& pmf, std::span<const double> x, int j1, int j2);

// Random search for a point violating the Rayleigh inequalities. Points mix
// uniform[-3,3] coordinates with reciprocal-uniform ones to reach far out.
std::optional<RayleighViolation> sr_falsify_random(const MultiAffinePmf& pmf, int trials,
                                                   std::uint64_t seed);

}  // namespace cmmb
