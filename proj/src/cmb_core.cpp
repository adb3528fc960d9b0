#include "cmmb/cmb_core.hpp"

#include "cmmb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cmmb {

namespace {

// Largest exponent for which exact coefficients are materialized.
constexpr int kMaxExactNu = 256;

// Above this, exp() of a log-coefficient is no longer safely finite.
constexpr double kMaxLogCoeff = 700.0;

double log_sum_exp(std::span<const double> xs) {
    const double top = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - top);
    return top + std::log(acc);
}

std::vector<double> log_terms(const CmbParams& p) {
    const int d = p.d();
    const double log_r = std::log(p.r());
    const double log_q = std::log1p(-p.r());
    std::vector<double> terms(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        terms[static_cast<std::size_t>(k)] =
            p.nu() * log_binomial(d, k) + k * log_r + (d - k) * log_q;
    }
    return terms;
}

void check_finite_nonempty(const std::vector<double>& c) {
    if (c.empty()) throw DomainError("polynomial needs at least one coefficient");
    for (double x : c) {
        if (!std::isfinite(x)) throw DomainError("polynomial coefficients must be finite");
    }
}

}  // namespace

CmbParams::CmbParams(int d, double r, double nu) : d_(d), r_(r), nu_(nu) {
    if (d < 1) throw DomainError("d must be >= 1, got " + std::to_string(d));
    if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0,1), got " + std::to_string(r));
    if (!std::isfinite(nu)) throw DomainError("nu must be finite");
}

DiscretePmf::DiscretePmf(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) throw DomainError("a pmf on {0,...,d} needs d >= 1");
    double sum = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("pmf weights must be finite and >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw DomainError("pmf weights sum to " + std::to_string(sum) + ", not 1");
    }
}

DiscretePmf DiscretePmf::normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("pmf weights must be finite and >= 0");
        sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("pmf weights have zero total mass");
    for (double& w : weights) w /= sum;
    return DiscretePmf(std::move(weights));
}

double mean(const DiscretePmf& pmf) {
    double m = 0.0;
    for (int k = 0; k <= pmf.d(); ++k) m += k * pmf[k];
    return m;
}

double variance(const DiscretePmf& pmf) {
    // Centered second moment; avoids cancellation in E[W^2] - E[W]^2.
    const double m = mean(pmf);
    double v = 0.0;
    for (int k = 0; k <= pmf.d(); ++k) v += (k - m) * (k - m) * pmf[k];
    return v;
}

UnivariatePoly::UnivariatePoly(std::vector<double> coeffs, double log_scale)
    : coeffs_(std::move(coeffs)), log_scale_(log_scale) {
    check_finite_nonempty(coeffs_);
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.back() == 0.0) throw DomainError("zero polynomial");
}

UnivariatePoly::UnivariatePoly(std::vector<double> coeffs, std::vector<BigInt> exact, double log_scale)
    : UnivariatePoly(std::move(coeffs), log_scale) {
    while (exact.size() > 1 && exact.back() == 0) exact.pop_back();
    if (exact.size() != coeffs_.size()) {
        throw DomainError("exact and floating coefficients disagree on the degree");
    }
    exact_ = std::move(exact);
}

UnivariatePoly UnivariatePoly::from_exact(std::vector<BigInt> exact) {
    if (exact.empty()) throw DomainError("polynomial needs at least one coefficient");
    // Scale the floating copy by the largest magnitude so huge integers stay finite.
    double log_top = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) {
        const BigInt mag = boost::multiprecision::abs(exact[k]);
        if (mag == 0) {
            logs[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        // ln|c| from the top 53 bits and the dropped bit count.
        const unsigned bits = boost::multiprecision::msb(mag) + 1;
        const unsigned shift = bits > 60 ? bits - 60 : 0;
        const double head = static_cast<double>(BigInt(mag >> shift));
        logs[k] = std::log(head) + shift * std::log(2.0);
        log_top = std::max(log_top, logs[k]);
    }
    const double log_scale = log_top > kMaxLogCoeff ? log_top : 0.0;
    std::vector<double> coeffs(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) {
        if (exact[k] == 0) continue;
        const double sign = exact[k] < 0 ? -1.0 : 1.0;
        coeffs[k] = log_scale == 0.0 ? static_cast<double>(exact[k])
                                     : sign * std::exp(logs[k] - log_scale);
        if (coeffs[k] == 0.0) throw CapacityError("coefficients span more than the double exponent range");
    }
    return UnivariatePoly(std::move(coeffs), std::move(exact), log_scale);
}

double UnivariatePoly::operator()(double z) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return log_scale_ == 0.0 ? acc : acc * std::exp(log_scale_);
}

std::complex<double> UnivariatePoly::operator()(std::complex<double> z) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return log_scale_ == 0.0 ? acc : acc * std::exp(log_scale_);
}

std::optional<int> as_natural(double nu) {
    if (!(nu >= 0.0) || nu > kMaxExactNu || std::floor(nu) != nu) return std::nullopt;
    return static_cast<int>(nu);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

BigInt binomial_exact(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double log_normalizer(const CmbParams& params) {
    return log_sum_exp(log_terms(params));
}

double log_pmf(const CmbParams& params, int k) {
    const int d = params.d();
    if (k < 0 || k > d) {
        throw DomainError("k = " + std::to_string(k) + " outside 0.." + std::to_string(d));
    }
    const auto terms = log_terms(params);
    return terms[static_cast<std::size_t>(k)] - log_sum_exp(terms);
}

DiscretePmf pmf(const CmbParams& params) {
    auto terms = log_terms(params);
    const double log_s = log_sum_exp(terms);
    for (double& t : terms) t = std::exp(t - log_s);
    return DiscretePmf::normalized(std::move(terms));
}

double mean(const CmbParams& params) { return mean(pmf(params)); }

double variance(const CmbParams& params) { return variance(pmf(params)); }

UnivariatePoly g_poly(int d, double nu) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (!std::isfinite(nu)) throw DomainError("nu must be finite");
    if (const auto n = as_natural(nu)) {
        std::vector<BigInt> exact(static_cast<std::size_t>(d) + 1);
        for (int k = 0; k <= d; ++k) exact[static_cast<std::size_t>(k)] = boost::multiprecision::pow(binomial_exact(d, k), static_cast<unsigned>(*n));
        return UnivariatePoly::from_exact(std::move(exact));
    }
    std::vector<double> logs(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) logs[static_cast<std::size_t>(k)] = nu * log_binomial(d, k);
    const double top = *std::max_element(logs.begin(), logs.end());
    const double log_scale = top > kMaxLogCoeff ? top : 0.0;
    std::vector<double> coeffs(logs.size());
    std::transform(logs.begin(), logs.end(), coeffs.begin(),
                   [&](double l) { return std::exp(l - log_scale); });
    return UnivariatePoly(std::move(coeffs), log_scale);
}

UnivariatePoly pgf_poly(const CmbParams& params) {
    const auto f = pmf(params);
    return UnivariatePoly(std::vector<double>(f.weights().begin(), f.weights().end()));
}

}  // namespace cmmb
