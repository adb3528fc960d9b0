#pragma once

// Conway-Maxwell binomial (CMB) law on {0,...,d}:
//
//     f(k) = C(d,k)^nu r^k (1-r)^(d-k) / S_d(r,nu)
//
// All evaluation happens in log-space; C(d,k)^nu overflows a double long
// before d reaches the supported range.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace cmmb {

using BigInt = boost::multiprecision::cpp_int;

class CmbParams {
public:
    // Throws DomainError unless d >= 1, 0 < r < 1 and nu is finite.
    CmbParams(int d, double r, double nu);

    int d() const noexcept { return d_; }
    double r() const noexcept { return r_; }
    double nu() const noexcept { return nu_; }

private:
    int d_;
    double r_;
    double nu_;
};

// Probability vector on {0,...,d}.
class DiscretePmf {
public:
    static constexpr double kSumTolerance = 1e-12;

    // Validates length >= 2, finite nonnegative entries, sum within 1e-12 of 1.
    explicit DiscretePmf(std::vector<double> weights);

    // Divides by the sum first; only nonnegativity and a positive sum are required.
    static DiscretePmf normalized(std::vector<double> weights);

    int d() const noexcept { return static_cast<int>(weights_.size()) - 1; }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](int k) const { return weights_.at(static_cast<std::size_t>(k)); }

    bool operator==(const DiscretePmf&) const = default;

private:
    std::vector<double> weights_;
};

double mean(const DiscretePmf& pmf);
double variance(const DiscretePmf& pmf);

// Polynomial with ascending real coefficients. The represented polynomial is
// exp(log_scale) * sum_k coeffs[k] z^k; log_scale is nonzero only when the
// raw coefficients would overflow. Exact integer coefficients are carried
// alongside when they are known.
class UnivariatePoly {
public:
    explicit UnivariatePoly(std::vector<double> coeffs, double log_scale = 0.0);
    UnivariatePoly(std::vector<double> coeffs, std::vector<BigInt> exact, double log_scale = 0.0);

    static UnivariatePoly from_exact(std::vector<BigInt> exact);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    const std::optional<std::vector<BigInt>>& exact_coeffs() const noexcept { return exact_; }
    double log_scale() const noexcept { return log_scale_; }
    bool scaled() const noexcept { return log_scale_ != 0.0; }

    double operator()(double z) const;
    std::complex<double> operator()(std::complex<double> z) const;

private:
    std::vector<double> coeffs_;
    std::optional<std::vector<BigInt>> exact_;
    double log_scale_ = 0.0;
};

// Returns n when nu is exactly a nonnegative integer small enough to
// exponentiate exactly.
std::optional<int> as_natural(double nu);

// ln C(n,k) via log-gamma.
double log_binomial(int n, int k);

// Exact C(n,k).
BigInt binomial_exact(int n, int k);

// ln S_d(r, nu) by log-sum-exp over the d+1 terms.
double log_normalizer(const CmbParams& params);

// Throws DomainError when k is outside 0..d.
double log_pmf(const CmbParams& params, int k);

DiscretePmf pmf(const CmbParams& params);

double mean(const CmbParams& params);
double variance(const CmbParams& params);

// G_{d,nu}(z) = sum_k C(d,k)^nu z^k. Exact coefficients are attached when nu
// is a nonnegative integer.
UnivariatePoly g_poly(int d, double nu);

// Probability generating function of CMB_d(r, nu); coefficient k is f(k).
UnivariatePoly pgf_poly(const CmbParams& params);

}  // namespace cmmb
