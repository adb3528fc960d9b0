#include "cmmb/multi_affine.hpp"

#include "cmmb/errors.hpp"

#include <bit>
#include <cmath>

namespace cmmb {

namespace {

void check_dim(int d) {
    if (d < 1) throw DomainError("Bernoulli vector dimension must be >= 1");
    if (d > MultiAffinePmf::kMaxDim) {
        throw CapacityError("joint law with d = " + std::to_string(d) + " exceeds the 2^" +
                            std::to_string(MultiAffinePmf::kMaxDim) + " expansion cap");
    }
}

}  // namespace

MultiAffinePmf::MultiAffinePmf(int d, std::vector<double> weights) : d_(d), weights_(std::move(weights)) {
    check_dim(d);
    if (weights_.size() != (std::size_t{1} << d)) {
        throw DomainError("joint law of dimension " + std::to_string(d) + " needs " +
                          std::to_string(std::size_t{1} << d) + " entries");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("joint weights must be finite and >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw DomainError("joint weights sum to " + std::to_string(sum) + ", not 1");
    }
}

MultiAffinePmf MultiAffinePmf::normalized(int d, std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("joint weights must be finite and >= 0");
        sum += w;
    }
    if (!(sum > 0.0)) throw DomainError("joint weights have zero total mass");
    for (double& w : weights) w /= sum;
    return MultiAffinePmf(d, std::move(weights));
}

double MultiAffinePmf::marginal_mean(int j) const {
    if (j < 0 || j >= d_) throw DomainError("coordinate index out of range");
    const Outcome bit = Outcome{1} << j;
    double m = 0.0;
    for (Outcome x = 0; x < weights_.size(); ++x) {
        if (x & bit) m += weights_[x];
    }
    return m;
}

std::vector<double> MultiAffinePmf::marginal_means() const {
    std::vector<double> out(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) out[static_cast<std::size_t>(j)] = marginal_mean(j);
    return out;
}

DiscretePmf MultiAffinePmf::sum_law() const {
    std::vector<double> w(static_cast<std::size_t>(d_) + 1, 0.0);
    for (Outcome x = 0; x < weights_.size(); ++x) w[static_cast<std::size_t>(std::popcount(x))] += weights_[x];
    return DiscretePmf::normalized(std::move(w));
}

double MultiAffinePmf::pgf(std::span<const double> x) const { return pgf_derivative(x, 0); }

double MultiAffinePmf::pgf_derivative(std::span<const double> x, Outcome wrt) const {
    if (x.size() != static_cast<std::size_t>(d_)) throw DomainError("pgf argument has the wrong dimension");
    const auto mono = monomial_table(x);
    double acc = 0.0;
    for (Outcome m = 0; m < weights_.size(); ++m) {
        if ((m & wrt) == wrt) acc += weights_[m] * mono[m ^ wrt];
    }
    return acc;
}

std::string outcome_key(Outcome x, int d) {
    std::string key(static_cast<std::size_t>(d), '0');
    for (int j = 0; j < d; ++j) {
        if (x & (Outcome{1} << j)) key[static_cast<std::size_t>(j)] = '1';
    }
    return key;
}

Outcome parse_outcome_key(const std::string& key, int d) {
    if (key.size() != static_cast<std::size_t>(d)) {
        throw DomainError("outcome key '" + key + "' must have " + std::to_string(d) + " digits");
    }
    Outcome x = 0;
    for (int j = 0; j < d; ++j) {
        const char c = key[static_cast<std::size_t>(j)];
        if (c == '1') {
            x |= Outcome{1} << j;
        } else if (c != '0') {
            throw DomainError("outcome key '" + key + "' is not a binary string");
        }
    }
    return x;
}

std::vector<double> monomial_table(std::span<const double> x) {
    std::vector<double> table(std::size_t{1} << x.size());
    table[0] = 1.0;
    for (Outcome m = 1; m < table.size(); ++m) {
        const int low = std::countr_zero(m);
        table[m] = table[m & (m - 1)] * x[static_cast<std::size_t>(low)];
    }
    return table;
}

}  // namespace cmmb
