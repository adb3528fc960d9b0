#pragma once

// Dense tableau simplex for small problems of the form
//
//     maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
//
// so the slack basis is feasible from the start. Bland's rule on both the
// entering and the leaving variable rules out cycling.

#include <vector>

namespace cmmb {

struct LpResult {
    double optimum = 0.0;
    std::vector<double> x;
    int iterations = 0;
};

// `a` is row-major with one row per constraint. Throws DomainError on
// inconsistent shapes or negative b, NumericError when unbounded.
LpResult simplex_maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b);

}  // namespace cmmb
