#include "cmmb/simplex.hpp"

#include "cmmb/errors.hpp"

#include <cmath>
#include <limits>

namespace cmmb {

namespace {
constexpr double kPivotEps = 1e-12;
}

LpResult simplex_maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b) {
    const std::size_t n = c.size();
    const std::size_t m = a.size();
    if (b.size() != m) throw DomainError("simplex: row count of A and length of b differ");
    for (const auto& row : a) {
        if (row.size() != n) throw DomainError("simplex: a constraint row has the wrong length");
    }
    for (double bi : b) {
        if (!(bi >= 0.0)) throw DomainError("simplex: b must be nonnegative");
    }

    // Columns 0..n-1 structural, n..n+m-1 slack, n+m right-hand side.
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = b[i];
        basis[i] = n + i;
    }
    auto& obj = t[m];
    for (std::size_t j = 0; j < n; ++j) obj[j] = -c[j];

    LpResult result;
    const int max_iterations = 50 * static_cast<int>(n + m) + 1000;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (obj[j] < -kPivotEps) {
                enter = j;
                break;
            }
        }
        if (enter == cols) break;

        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= kPivotEps) continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (ratio < best - kPivotEps || (std::abs(ratio - best) <= kPivotEps && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == m) throw NumericError("simplex: objective is unbounded");

        const double pivot = t[leave][enter];
        for (auto& v : t[leave]) v /= pivot;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double factor = t[i][enter];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= factor * t[leave][j];
        }
        basis[leave] = enter;
        if (++result.iterations > max_iterations) throw NumericError("simplex: iteration limit reached");
    }

    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) result.x[basis[i]] = t[i][cols - 1];
    }
    result.optimum = obj[cols - 1];
    return result;
}

}  // namespace cmmb
