#pragma once

// Calibration of r so that CMB_d(r, nu) has mean d*p, which places the
// exchangeable vector behind it in the Frechet class with common mean p.

#include <span>
#include <vector>

namespace cmmb {

inline constexpr double kDefaultCalibrationTol = 1e-10;

struct ChainRow {
    double nu;
    double r;
    double mean;
    double variance;
};

// Bisection on r in (1e-12, 1 - 1e-12), capped at 200 iterations, after a
// grid scan confirms mean(r) is increasing. If the scan finds a
// non-monotone stretch, the sign change of mean - d*p is located on a
// 10^4-point grid instead. Throws DomainError for p outside (0,1) or
// tol <= 0, SolverError when no unique root is bracketed or the tolerance
// is not met within the cap.
double solve_r(int d, double nu, double p, double tol = kDefaultCalibrationTol);

// One calibrated row per nu, in input order.
std::vector<ChainRow> chain_table(int d, double p, std::span<const double> nu_list,
                                  double tol = kDefaultCalibrationTol);

}  // namespace cmmb
