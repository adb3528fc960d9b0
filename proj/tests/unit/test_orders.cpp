#include "cmmb/calibrate.hpp"
#include "cmmb/errors.hpp"
#include "cmmb/orders.hpp"
#include "cmmb/rng.hpp"
#include "cmmb/simplex.hpp"
#include "cmmb/stability.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace cmmb;
using Catch::Matchers::WithinAbs;

namespace {

DiscretePmf calibrated(double nu) { return pmf(CmbParams(9, solve_r(9, nu, 1.0 / 3.0), nu)); }

DiscretePmf point_mass(int d, int k) {
    std::vector<double> w(static_cast<std::size_t>(d) + 1, 0.0);
    w[static_cast<std::size_t>(k)] = 1.0;
    return DiscretePmf(w);
}

// E[phi(X)] for a phi indexed by outcome.
double expect(const MultiAffinePmf& f, const std::vector<double>& phi) {
    double acc = 0.0;
    for (Outcome x = 0; x < f.size(); ++x) acc += f[x] * phi[x];
    return acc;
}

}  // namespace

TEST_CASE("exchangeable expansion", "[orders]") {
    const auto top = exchangeable_from_sum(point_mass(4, 4)).expand();
    CHECK(top[0b1111] == 1.0);
    const auto fr = exchangeable_from_sum(DiscretePmf({0.5, 0.0, 0.0, 0.5})).expand();
    CHECK(fr == oracle::upper_frechet(3, 0.5));

    const auto e = cmmb_joint(CmbParams(4, 0.3, 2.0));
    const auto sum = pmf(CmbParams(4, 0.3, 2.0));
    for (Outcome x = 0; x < e.size(); ++x) {
        const int k = std::popcount(x);
        CHECK_THAT(e[x], WithinAbs(sum[k] / static_cast<double>(oracle::binom(4, k)), 1e-15));
    }
    const auto back = e.sum_law();
    for (int k = 0; k <= 4; ++k) CHECK_THAT(back[k], WithinAbs(sum[k], 1e-15));
    CHECK_THROWS_AS(exchangeable_from_sum(DiscretePmf::normalized(std::vector<double>(22, 1.0))).expand(), CapacityError);
}

TEST_CASE("stop-loss", "[orders]") {
    const auto b = pmf(CmbParams(9, 1.0 / 3.0, 1.0));
    CHECK_THAT(stop_loss(b, 0.0), WithinAbs(3.0, 1e-12));
    CHECK_THAT(stop_loss(b, -2.0), WithinAbs(5.0, 1e-12));
    CHECK(stop_loss(b, 9.0) == 0.0);
    CHECK(stop_loss(b, 12.0) == 0.0);
    // 3584 / 6561 by exact summation.
    CHECK_THAT(stop_loss(b, 3.0), WithinAbs(3584.0 / 6561.0, 1e-14));
    // Direct summation against the oracle binomial pmf.
    const auto ref = oracle::binomial_pmf(9, 1.0 / 3.0);
    for (double t : {0.5, 1.7, 4.2, 8.9}) {
        double acc = 0.0;
        for (int k = 0; k <= 9; ++k) acc += std::max(k - t, 0.0) * ref[static_cast<std::size_t>(k)];
        CHECK_THAT(stop_loss(b, t), WithinAbs(acc, 1e-13));
    }
}

TEST_CASE("convex order", "[orders]") {
    const auto w1 = pmf(CmbParams(9, 0.21367747, 2.0));
    const auto w2 = pmf(CmbParams(9, 0.04105203, 5.0));
    CHECK(cx_dominates(w1, w2, 1e-6));
    CHECK_FALSE(cx_dominates(w2, w1, 1e-6));
    CHECK(cx_dominates(w1, w1));
    const auto dirac = DiscretePmf({0.0, 0.0, 1.0, 0.0, 0.0});
    for (double nu : {-1.0, 0.0, 1.0, 4.0}) CHECK(cx_dominates(pmf(CmbParams(4, 0.5, nu)), dirac));
    CHECK_THROWS_AS(cx_dominates(w1, pmf(CmbParams(9, 0.5, 2.0))), DomainError);
    CHECK_THROWS_AS(cx_dominates(w1, pmf(CmbParams(8, 0.3, 2.0))), DomainError);
    try {
        cx_dominates(w1, pmf(CmbParams(9, 0.5, 2.0)));
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("equal means") != std::string::npos);
        CHECK(msg.find("4.5") != std::string::npos);
    }
}

TEST_CASE("sign changes", "[orders]") {
    const auto s = sign_changes(calibrated(2.0), calibrated(5.0));
    CHECK(s.signs == std::vector<int>{1, -1, 1});
    CHECK(s.positions == std::vector<int>{3, 4});
    const auto same = sign_changes(calibrated(2.0), calibrated(2.0));
    CHECK(same.signs.empty());
    const auto ends = sign_changes(point_mass(5, 0), point_mass(5, 5));
    CHECK(ends.signs == std::vector<int>{1, -1});
}

TEST_CASE("property: calibrated chain is cx-decreasing in nu", "[orders]") {
    std::vector<DiscretePmf> laws;
    for (int nu = 1; nu <= 5; ++nu) laws.push_back(calibrated(nu));
    for (std::size_t i = 0; i < laws.size(); ++i) {
        for (std::size_t j = i; j < laws.size(); ++j) {
            INFO("nu1=" << i + 1 << " nu2=" << j + 1);
            CHECK(cx_dominates(laws[i], laws[j]));
            CHECK(variance(laws[j]) <= variance(laws[i]) + 1e-10);
            if (j > i) {
                CHECK(variance(laws[j]) < variance(laws[i]));
                CHECK(sign_changes(laws[i], laws[j]).signs == std::vector<int>{1, -1, 1});
            }
        }
    }
}

TEST_CASE("property: cx implies variance order on random pairs", "[orders]") {
    Rng rng(41);
    int hits = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(8));
        const double nu1 = rng.uniform(-1.0, 4.0);
        const double nu2 = rng.uniform(-1.0, 4.0);
        const double p = rng.uniform(0.2, 0.8);
        const auto a = pmf(CmbParams(d, solve_r(d, nu1, p), nu1));
        const auto b = pmf(CmbParams(d, solve_r(d, nu2, p), nu2));
        if (cx_dominates(a, b, 1e-8)) {
            ++hits;
            CHECK(variance(b) <= variance(a) + 1e-10);
        }
    }
    CHECK(hits > 50);
}

TEST_CASE("simplex solver", "[orders]") {
    // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3 -> (3, 1), value 11.
    const auto r = simplex_maximize({3, 2}, {{1, 1}, {1, 3}, {1, 0}}, {4, 6, 3});
    CHECK_THAT(r.optimum, WithinAbs(11.0, 1e-12));
    CHECK_THAT(r.x[0], WithinAbs(3.0, 1e-12));
    CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(simplex_maximize({1, 0}, {{0, 1}}, {1}), NumericError);
    CHECK_THROWS_AS(simplex_maximize({1}, {{1}}, {-1}), DomainError);
}

TEST_CASE("supermodular LP", "[orders]") {
    const auto nu2 = cmmb_joint(CmbParams(3, 0.5, 2.0));
    const auto nu1 = cmmb_joint(CmbParams(3, 0.5, 1.0));
    CHECK(sm_dominates_lp(nu2, nu1).holds);
    const auto rev = sm_dominates_lp(nu1, nu2);
    CHECK_FALSE(rev.holds);
    REQUIRE(rev.witness.has_value());
    CHECK(is_supermodular(*rev.witness, 3));
    CHECK(expect(nu1, *rev.witness) - expect(nu2, *rev.witness) > 1e-6);
    CHECK_THAT(expect(nu1, *rev.witness) - expect(nu2, *rev.witness), WithinAbs(rev.optimum, 1e-9));

    CHECK(sm_dominates_lp(nu2, nu2).holds);
    const auto indep = oracle::independent({0.5, 0.5, 0.5});
    const auto upper = oracle::upper_frechet(3, 0.5);
    CHECK(sm_dominates_lp(indep, upper).holds);
    const auto up = sm_dominates_lp(upper, indep);
    CHECK_FALSE(up.holds);
    REQUIRE(up.witness.has_value());
    CHECK(is_supermodular(*up.witness, 3));
    // The product indicator I1 I2 I3 already separates them by 1/2 - 1/8.
    CHECK(up.optimum >= 0.375 - 1e-9);

    CHECK_THROWS_AS(sm_dominates_lp(nu2, cmmb_joint(CmbParams(3, 0.3, 2.0))), DomainError);
    CHECK_THROWS_AS(sm_dominates_lp(cmmb_joint(CmbParams(5, 0.5, 2.0)), cmmb_joint(CmbParams(5, 0.5, 1.0))), CapacityError);
}

TEST_CASE("is_supermodular", "[orders]") {
    // phi = x1 x2 is supermodular; -x1 x2 is not.
    std::vector<double> phi(8), neg(8);
    for (Outcome x = 0; x < 8; ++x) {
        phi[x] = ((x & 1u) && (x & 2u)) ? 1.0 : 0.0;
        neg[x] = -phi[x];
    }
    CHECK(is_supermodular(phi, 3));
    CHECK_FALSE(is_supermodular(neg, 3));
}

TEST_CASE("property: cx on sums implies sm on exchangeable vectors", "[orders]") {
    Rng rng(42);
    int hits = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(3));
        const double p = rng.uniform(0.2, 0.8);
        const double nu1 = rng.uniform(-1.0, 4.0);
        const double nu2 = rng.uniform(-1.0, 4.0);
        const auto a = pmf(CmbParams(d, solve_r(d, nu1, p), nu1));
        const auto b = pmf(CmbParams(d, solve_r(d, nu2, p), nu2));
        if (!cx_dominates(a, b, 1e-8)) continue;
        ++hits;
        const auto res = sm_dominates_lp(exchangeable_from_sum(b).expand(), exchangeable_from_sum(a).expand());
        INFO("d=" << d << " nu1=" << nu1 << " nu2=" << nu2 << " optimum=" << res.optimum);
        CHECK(res.holds);
    }
    CHECK(hits > 20);
}

TEST_CASE("monotone Boolean functions", "[orders]") {
    // Dedekind numbers minus the two constants.
    CHECK(monotone_boolean_functions(1).size() == 1);
    CHECK(monotone_boolean_functions(2).size() == 4);
    CHECK(monotone_boolean_functions(3).size() == 18);
    CHECK(monotone_boolean_functions(4).size() == 166);
}

TEST_CASE("negative association", "[orders]") {
    CHECK(na_check_exhaustive(cmmb_joint(CmbParams(3, 0.5, 2.0))).holds);
    CHECK(na_check_exhaustive(oracle::independent({0.3, 0.6, 0.9})).holds);
    const auto r = na_check_exhaustive(oracle::upper_frechet(3, 0.5));
    CHECK_FALSE(r.holds);
    REQUIRE(r.violation.has_value());
    CHECK(r.violation->block1 == 0b001);
    CHECK(r.violation->block2 == 0b010);
    CHECK(r.violation->h1 == 0b10);
    CHECK(r.violation->h2 == 0b10);
    CHECK_THAT(r.violation->e_h1h2 - r.violation->e_h1 * r.violation->e_h2, WithinAbs(0.25, 1e-15));
    CHECK_THROWS_AS(na_check_exhaustive(cmmb_joint(CmbParams(6, 0.5, 2.0))), CapacityError);
}

TEST_CASE("property: SR at d = 3 implies NA", "[orders]") {
    Rng rng(43);
    int sr = 0;
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<double> w(8);
        for (auto& x : w) x = rng.uniform() * rng.uniform();
        const auto f = MultiAffinePmf::normalized(3, w);
        if (!sr_check_multiaffine_d3(f)) continue;
        if (sr_falsify_random(f, 100000, static_cast<std::uint64_t>(trial)).has_value()) continue;
        ++sr;
        CHECK(na_check_exhaustive(f).holds);
    }
    CHECK(sr > 5);
}

TEST_CASE("pairwise covariance", "[orders]") {
    CHECK_THAT(pairwise_covariance(exchangeable_from_sum(pmf(CmbParams(5, 0.5, 1.0)))), WithinAbs(0.0, 1e-15));
    // -1/68 and -1/20 by exact fraction arithmetic.
    CHECK_THAT(pairwise_covariance(exchangeable_from_sum(pmf(CmbParams(9, 0.5, 2.0)))), WithinAbs(-1.0 / 68.0, 1e-14));
    CHECK_THAT(pairwise_covariance(exchangeable_from_sum(pmf(CmbParams(3, 0.5, 2.0)))), WithinAbs(-0.05, 1e-15));
    CHECK_THAT(pairwise_covariance(exchangeable_from_sum(DiscretePmf({0.5, 0.0, 0.5}))), WithinAbs(0.25, 1e-15));
    for (int d = 3; d <= 9; ++d) {
        for (double nu : {2.0, 3.0, 4.0}) CHECK(pairwise_covariance(exchangeable_from_sum(pmf(CmbParams(d, 0.5, nu)))) < 0.0);
        CHECK(pairwise_covariance(exchangeable_from_sum(pmf(CmbParams(d, 0.5, 0.5)))) > 0.0);
    }
    CHECK_THROWS_AS(pairwise_covariance(exchangeable_from_sum(DiscretePmf({0.5, 0.5}))), DomainError);
}
