#pragma once

// Seeded samplers for W ~ CMB, for the exchangeable vector behind it, and
// for thinned vectors. See rng.hpp for the generator contract.
//
// Streams: W draws use `seed`; subset placement uses derive_seed(seed, 1);
// thinning coins use derive_seed(seed, 2). Hence the row sums of
// sample_exchangeable(params, n, seed) are exactly sample_w(params, n, seed),
// and thinning with theta = 1 reproduces the exchangeable batch.

#include "cmmb/cmb_core.hpp"
#include "cmmb/thinning.hpp"

#include <cstdint>
#include <vector>

namespace cmmb {

struct WBatch {
    std::vector<int> draws;
    std::uint64_t seed = 0;

    std::size_t n() const noexcept { return draws.size(); }
};

// n x d binary matrix, row-major.
struct VectorBatch {
    int d = 0;
    std::vector<std::uint8_t> bits;
    std::uint64_t seed = 0;

    std::size_t n() const noexcept { return d == 0 ? 0 : bits.size() / static_cast<std::size_t>(d); }
    std::uint8_t at(std::size_t row, int col) const { return bits[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(col)]; }
};

// Inverse-CDF draws from a precomputed cumulative table. n >= 1.
WBatch sample_w(const DiscretePmf& law, std::size_t n, std::uint64_t seed);
WBatch sample_w(const CmbParams& params, std::size_t n, std::uint64_t seed);

// Draws W, then sets W ones at a uniformly random subset of positions.
VectorBatch sample_exchangeable(const DiscretePmf& law, std::size_t n, std::uint64_t seed);
VectorBatch sample_exchangeable(const CmbParams& params, std::size_t n, std::uint64_t seed);

// Exchangeable CMMB_d(1/2, nu) draw times independent Bernoulli(theta_m) coins.
VectorBatch sample_thinned(const ThinningSpec& spec, std::size_t n, std::uint64_t seed);

double sample_mean(const WBatch& batch);
double sample_variance(const WBatch& batch);  // unbiased
std::vector<double> column_means(const VectorBatch& batch);
std::vector<std::vector<double>> covariance_matrix(const VectorBatch& batch);  // unbiased

}  // namespace cmmb
