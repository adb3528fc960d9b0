#include "cmmb/calibrate.hpp"

#include "cmmb/cmb_core.hpp"
#include "cmmb/errors.hpp"

#include <cmath>
#include <string>

namespace cmmb {

namespace {

constexpr double kEdge = 1e-12;
constexpr int kMaxIterations = 200;
constexpr int kScanPoints = 64;
constexpr int kFallbackPoints = 10000;

double mean_at(int d, double nu, double r) { return mean(CmbParams(d, r, nu)); }

// Grid in logit space so both tails of (0,1) are probed.
double grid_point(int i, int n) {
    const double lo = std::log(kEdge / (1.0 - kEdge));
    const double t = lo + (-2.0 * lo) * i / (n - 1);
    return 1.0 / (1.0 + std::exp(-t));
}

bool mean_is_increasing(int d, double nu) {
    double prev = mean_at(d, nu, grid_point(0, kScanPoints));
    for (int i = 1; i < kScanPoints; ++i) {
        const double cur = mean_at(d, nu, grid_point(i, kScanPoints));
        // Rounding noise on a flat stretch is not a decrease.
        if (cur < prev - 1e-13 * d) return false;
        prev = cur;
    }
    return true;
}

}  // namespace

double solve_r(int d, double nu, double p, double tol) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0,1), got " + std::to_string(p));
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    if (d < 1) throw DomainError("d must be >= 1");
    const double target = d * p;

    double lo = kEdge;
    double hi = 1.0 - kEdge;
    if (!mean_is_increasing(d, nu)) {
        int crossings = 0;
        double prev_r = grid_point(0, kFallbackPoints);
        double prev_g = mean_at(d, nu, prev_r) - target;
        for (int i = 1; i < kFallbackPoints; ++i) {
            const double r = grid_point(i, kFallbackPoints);
            const double g = mean_at(d, nu, r) - target;
            if ((prev_g < 0.0) != (g < 0.0)) {
                ++crossings;
                lo = prev_r;
                hi = r;
            }
            prev_r = r;
            prev_g = g;
        }
        if (crossings != 1) {
            throw SolverError("mean(r) - d*p has " + std::to_string(crossings) +
                                  " sign changes on the fallback grid; r is not unique",
                              lo, hi);
        }
    }

    double g_lo = mean_at(d, nu, lo) - target;
    const double g_hi = mean_at(d, nu, hi) - target;
    if (g_lo > tol || g_hi < -tol) {
        throw SolverError("target mean " + std::to_string(target) + " is not bracketed by r in (" +
                              std::to_string(lo) + ", " + std::to_string(hi) + ")",
                          lo, hi);
    }
    for (int it = 0; it < kMaxIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = mean_at(d, nu, mid) - target;
        if (std::abs(g) <= tol) return mid;
        if ((g < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    throw SolverError("calibration of r did not reach tol " + std::to_string(tol) + " in " +
                          std::to_string(kMaxIterations) + " iterations",
                      lo, hi);
}

std::vector<ChainRow> chain_table(int d, double p, std::span<const double> nu_list, double tol) {
    if (nu_list.empty()) throw DomainError("nu list must not be empty");
    std::vector<ChainRow> rows;
    rows.reserve(nu_list.size());
    for (double nu : nu_list) {
        const double r = solve_r(d, nu, p, tol);
        const auto law = pmf(CmbParams(d, r, nu));
        rows.push_back({nu, r, mean(law), variance(law)});
    }
    return rows;
}

}  // namespace cmmb
