#include "cmmb/sampling.hpp"

#include "cmmb/errors.hpp"
#include "cmmb/rng.hpp"

#include <algorithm>
#include <numeric>

namespace cmmb {

namespace {

class InverseCdf {
public:
    explicit InverseCdf(const DiscretePmf& law) {
        const auto w = law.weights();
        cdf_.resize(w.size());
        std::partial_sum(w.begin(), w.end(), cdf_.begin());
        // Pin the top of the table to 1 from the last atom with mass on, so
        // rounding can never hand a draw to a zero-mass tail.
        std::size_t last = w.size() - 1;
        while (last > 0 && w[last] == 0.0) --last;
        std::fill(cdf_.begin() + static_cast<std::ptrdiff_t>(last), cdf_.end(), 1.0);
    }

    int operator()(Rng& rng) const {
        const double u = rng.uniform();
        return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

void check_count(std::size_t n) {
    if (n < 1) throw DomainError("sample size must be >= 1");
}

}  // namespace

WBatch sample_w(const DiscretePmf& law, std::size_t n, std::uint64_t seed) {
    check_count(n);
    const InverseCdf draw(law);
    Rng rng(seed);
    WBatch batch;
    batch.seed = seed;
    batch.draws.resize(n);
    for (auto& w : batch.draws) w = draw(rng);
    return batch;
}

WBatch sample_w(const CmbParams& params, std::size_t n, std::uint64_t seed) {
    return sample_w(pmf(params), n, seed);
}

VectorBatch sample_exchangeable(const DiscretePmf& law, std::size_t n, std::uint64_t seed) {
    const auto sums = sample_w(law, n, seed);
    const int d = law.d();
    Rng placement(derive_seed(seed, 1));
    VectorBatch batch;
    batch.d = d;
    batch.seed = seed;
    batch.bits.assign(n * static_cast<std::size_t>(d), 0);
    std::vector<int> positions(static_cast<std::size_t>(d));
    for (std::size_t row = 0; row < n; ++row) {
        std::iota(positions.begin(), positions.end(), 0);
        const int k = sums.draws[row];
        // Partial Fisher-Yates: the first k slots are a uniform k-subset.
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(i) + placement.below(static_cast<std::uint64_t>(d - i));
            std::swap(positions[static_cast<std::size_t>(i)], positions[j]);
            batch.bits[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] = 1;
        }
    }
    return batch;
}

VectorBatch sample_exchangeable(const CmbParams& params, std::size_t n, std::uint64_t seed) {
    return sample_exchangeable(pmf(params), n, seed);
}

VectorBatch sample_thinned(const ThinningSpec& spec, std::size_t n, std::uint64_t seed) {
    auto batch = sample_exchangeable(CmbParams(spec.d(), 0.5, spec.base_nu()), n, seed);
    Rng coins(derive_seed(seed, 2));
    const auto& theta = spec.theta();
    for (std::size_t row = 0; row < n; ++row) {
        for (int m = 0; m < spec.d(); ++m) {
            // Always consume the coin so streams stay aligned across theta values.
            const bool keep = coins.bernoulli(theta[static_cast<std::size_t>(m)]);
            auto& bit = batch.bits[row * static_cast<std::size_t>(spec.d()) + static_cast<std::size_t>(m)];
            bit = static_cast<std::uint8_t>(bit & static_cast<std::uint8_t>(keep));
        }
    }
    return batch;
}

double sample_mean(const WBatch& batch) {
    check_count(batch.n());
    double acc = 0.0;
    for (int w : batch.draws) acc += w;
    return acc / static_cast<double>(batch.n());
}

double sample_variance(const WBatch& batch) {
    if (batch.n() < 2) throw DomainError("sample variance needs at least two draws");
    const double m = sample_mean(batch);
    double acc = 0.0;
    for (int w : batch.draws) acc += (w - m) * (w - m);
    return acc / static_cast<double>(batch.n() - 1);
}

std::vector<double> column_means(const VectorBatch& batch) {
    check_count(batch.n());
    std::vector<double> means(static_cast<std::size_t>(batch.d), 0.0);
    for (std::size_t row = 0; row < batch.n(); ++row) {
        for (int j = 0; j < batch.d; ++j) means[static_cast<std::size_t>(j)] += batch.at(row, j);
    }
    for (auto& m : means) m /= static_cast<double>(batch.n());
    return means;
}

std::vector<std::vector<double>> covariance_matrix(const VectorBatch& batch) {
    if (batch.n() < 2) throw DomainError("covariance needs at least two draws");
    const auto means = column_means(batch);
    const auto d = static_cast<std::size_t>(batch.d);
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (std::size_t row = 0; row < batch.n(); ++row) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = batch.at(row, static_cast<int>(i)) - means[i];
            for (std::size_t j = i; j < d; ++j) cov[i][j] += xi * (batch.at(row, static_cast<int>(j)) - means[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(batch.n() - 1);
            cov[j][i] = cov[i][j];
        }
    }
    return cov;
}

}  // namespace cmmb
