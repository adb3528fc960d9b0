#include "cmmb/geometry.hpp"

#include "cmmb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cmmb {

namespace {

constexpr double kWeightTolerance = 1e-12;

}  // namespace

DiscretePmf extremal_point(int d, double mu, ExtremalIndex index) {
    const auto [j1, j2] = index;
    if (d < 1) throw DomainError("d must be >= 1");
    if (!(mu >= 0.0 && mu <= d)) throw DomainError("mean must lie in [0, d]");
    if (j1 < 0 || j1 > std::floor(mu) || j2 < std::ceil(mu) || j2 > d || j1 == j2) {
        throw DomainError("extremal index (" + std::to_string(j1) + ", " + std::to_string(j2) +
                          ") is out of range for mean " + std::to_string(mu));
    }
    std::vector<double> w(static_cast<std::size_t>(d) + 1, 0.0);
    const double span = j2 - j1;
    w[static_cast<std::size_t>(j1)] = (j2 - mu) / span;
    w[static_cast<std::size_t>(j2)] = (mu - j1) / span;
    return DiscretePmf(std::move(w));
}

DiscretePmf symmetric_extremal_point(int d, int j) {
    if (d < 1 || j < 0 || 2 * j > d) throw DomainError("symmetric extremal index out of range");
    std::vector<double> w(static_cast<std::size_t>(d) + 1, 0.0);
    w[static_cast<std::size_t>(j)] += 0.5;
    w[static_cast<std::size_t>(d - j)] += 0.5;
    return DiscretePmf(std::move(w));
}

WeightVector::WeightVector(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw DomainError("weight vector must not be empty");
    double sum = 0.0;
    for (double l : lambdas_) {
        if (!std::isfinite(l) || l < 0.0) throw DomainError("weights must be finite and >= 0");
        sum += l;
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) {
        throw DomainError("weights sum to " + std::to_string(sum) + ", not 1");
    }
}

WeightVector symmetric_weights(int d, double nu) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (!std::isfinite(nu)) throw DomainError("nu must be finite");
    std::vector<double> logs(static_cast<std::size_t>(d) + 1);
    for (int y = 0; y <= d; ++y) logs[static_cast<std::size_t>(y)] = nu * log_binomial(d, y);
    const double top = *std::max_element(logs.begin(), logs.end());
    double total = 0.0;
    for (double l : logs) total += std::exp(l - top);
    const double log_total = top + std::log(total);

    std::vector<double> lambdas(static_cast<std::size_t>(d / 2) + 1);
    for (int j = 0; 2 * j <= d; ++j) {
        const double factor = 2 * j == d ? 1.0 : 2.0;
        lambdas[static_cast<std::size_t>(j)] = factor * std::exp(logs[static_cast<std::size_t>(j)] - log_total);
    }
    // Rounding only; keeps the WeightVector invariant tight.
    const double sum = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
    for (double& l : lambdas) l /= sum;
    return WeightVector(std::move(lambdas));
}

DiscretePmf reconstruct_from_weights(int d, const WeightVector& weights) {
    if (weights.size() != d / 2 + 1) {
        throw DomainError("need " + std::to_string(d / 2 + 1) + " weights for d = " + std::to_string(d));
    }
    std::vector<double> w(static_cast<std::size_t>(d) + 1, 0.0);
    for (int j = 0; 2 * j <= d; ++j) {
        const auto point = symmetric_extremal_point(d, j);
        for (int k = 0; k <= d; ++k) w[static_cast<std::size_t>(k)] += weights[j] * point[k];
    }
    return DiscretePmf::normalized(std::move(w));
}

DiscretePmf limit_pmf(int d, LimitDirection direction) {
    if (d < 1) throw DomainError("d must be >= 1");
    if (direction == LimitDirection::minus_inf) return symmetric_extremal_point(d, 0);
    return symmetric_extremal_point(d, d / 2);
}

DiscretePmf d3_line_pmf(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0,1]");
    return DiscretePmf({lambda / 2, (1 - lambda) / 2, (1 - lambda) / 2, lambda / 2});
}

MultiAffinePmf d3_nonexch_family(double lambda0, double w1, double w2, double w3) {
    if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw DomainError("lambda0 must lie in [0,1]");
    const double ws[3] = {w1, w2, w3};
    for (double w : ws) {
        if (!(w >= 0.0)) throw DomainError("mixture weights must be >= 0");
    }
    if (std::abs(w1 + w2 + w3 - 1.0) > kWeightTolerance) throw DomainError("mixture weights must sum to 1");
    std::vector<double> f(8, 0.0);
    f[0] += lambda0 / 2;
    f[7] += lambda0 / 2;
    for (int k = 0; k < 3; ++k) {
        const Outcome ek = 1u << k;
        const double half = (1 - lambda0) * ws[k] / 2;
        f[ek] += half;
        f[7u ^ ek] += half;
    }
    return MultiAffinePmf(3, std::move(f));
}

}  // namespace cmmb
