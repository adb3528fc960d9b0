#include "cmmb/orders.hpp"

#include "cmmb/errors.hpp"
#include "cmmb/simplex.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace cmmb {

namespace {

constexpr int kMaxSmDim = 4;
constexpr int kMaxNaDim = 5;
constexpr double kSmTolerance = 1e-9;
constexpr double kMarginTolerance = 1e-9;
constexpr double kNaTolerance = 1e-12;

// Compresses the bits of x selected by `block` into consecutive low bits.
std::uint32_t extract_bits(Outcome x, Outcome block) {
    std::uint32_t out = 0;
    int pos = 0;
    for (Outcome rest = block; rest != 0; rest &= rest - 1) {
        const Outcome bit = rest & (~rest + 1);
        if (x & bit) out |= 1u << pos;
        ++pos;
    }
    return out;
}

std::string format_vector(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(12);
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

}  // namespace

double ExchBernoulliPmf::joint(Outcome x) const {
    const int k = std::popcount(x);
    if (k > d() || (d() < 32 && (x >> d()) != 0)) throw DomainError("outcome outside {0,1}^d");
    const double f = sum_[k];
    return f == 0.0 ? 0.0 : std::exp(std::log(f) - log_binomial(d(), k));
}

MultiAffinePmf ExchBernoulliPmf::expand() const {
    if (d() > MultiAffinePmf::kMaxDim) {
        throw CapacityError("exchangeable expansion with d = " + std::to_string(d()) + " exceeds the d <= 20 cap");
    }
    std::vector<double> per_count(static_cast<std::size_t>(d()) + 1);
    for (int k = 0; k <= d(); ++k) {
        per_count[static_cast<std::size_t>(k)] = sum_[k] / static_cast<double>(binomial_exact(d(), k));
    }
    std::vector<double> w(std::size_t{1} << d());
    for (Outcome x = 0; x < w.size(); ++x) w[x] = per_count[static_cast<std::size_t>(std::popcount(x))];
    return MultiAffinePmf::normalized(d(), std::move(w));
}

ExchBernoulliPmf exchangeable_from_sum(const DiscretePmf& pmf) { return ExchBernoulliPmf(pmf); }

MultiAffinePmf cmmb_joint(const CmbParams& params) { return exchangeable_from_sum(pmf(params)).expand(); }

double stop_loss(const DiscretePmf& pmf, double t) {
    if (!std::isfinite(t)) throw DomainError("stop-loss retention must be finite");
    double acc = 0.0;
    for (int k = 0; k <= pmf.d(); ++k) {
        if (k > t) acc += (k - t) * pmf[k];
    }
    return acc;
}

bool cx_dominates(const DiscretePmf& hi, const DiscretePmf& lo, double tol) {
    if (hi.d() != lo.d()) throw DomainError("convex order comparison needs laws on the same support");
    const double m_hi = mean(hi);
    const double m_lo = mean(lo);
    if (std::abs(m_hi - m_lo) > tol) {
        std::ostringstream os;
        os.precision(12);
        os << "convex order needs equal means, got " << m_hi << " and " << m_lo;
        throw DomainError(os.str());
    }
    for (int t = 0; t <= hi.d(); ++t) {
        if (stop_loss(lo, t) > stop_loss(hi, t) + tol) return false;
    }
    return true;
}

SignPattern sign_changes(const DiscretePmf& a, const DiscretePmf& b) {
    if (a.d() != b.d()) throw DomainError("sign changes need laws on the same support");
    SignPattern out;
    for (int k = 0; k <= a.d(); ++k) {
        const double g = a[k] - b[k];
        if (g == 0.0) continue;
        const int s = g > 0.0 ? 1 : -1;
        if (out.signs.empty() || out.signs.back() != s) {
            if (!out.signs.empty()) out.positions.push_back(k);
            out.signs.push_back(s);
        }
    }
    return out;
}

bool is_supermodular(const std::vector<double>& phi, int d, double tol) {
    if (phi.size() != (std::size_t{1} << d)) throw DomainError("function table has the wrong size");
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const Outcome ei = 1u << i;
            const Outcome ej = 1u << j;
            for (Outcome x = 0; x < phi.size(); ++x) {
                if (x & (ei | ej)) continue;
                if (phi[x | ei | ej] + phi[x] < phi[x | ei] + phi[x | ej] - tol) return false;
            }
        }
    }
    return true;
}

SmResult sm_dominates_lp(const MultiAffinePmf& lo, const MultiAffinePmf& hi) {
    if (lo.d() != hi.d()) throw DomainError("supermodular order needs vectors of the same dimension");
    const int d = lo.d();
    if (d > kMaxSmDim) {
        throw CapacityError("supermodular LP supports d <= 4, got d = " + std::to_string(d));
    }
    const auto m_lo = lo.marginal_means();
    const auto m_hi = hi.marginal_means();
    for (int j = 0; j < d; ++j) {
        if (std::abs(m_lo[static_cast<std::size_t>(j)] - m_hi[static_cast<std::size_t>(j)]) > kMarginTolerance) {
            throw DomainError("supermodular order needs equal margins, got " + format_vector(m_lo) + " and " +
                              format_vector(m_hi));
        }
    }

    // Variables psi = phi + 1 in [0, 2], which keeps b >= 0.
    const std::size_t n = std::size_t{1} << d;
    std::vector<double> c(n);
    double c_sum = 0.0;
    for (Outcome x = 0; x < n; ++x) {
        c[x] = lo[x] - hi[x];
        c_sum += c[x];
    }
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (Outcome x = 0; x < n; ++x) {
        std::vector<double> row(n, 0.0);
        row[x] = 1.0;
        a.push_back(std::move(row));
        b.push_back(2.0);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const Outcome ei = 1u << i;
            const Outcome ej = 1u << j;
            for (Outcome x = 0; x < n; ++x) {
                if (x & (ei | ej)) continue;
                // psi(x+ei) + psi(x+ej) - psi(x) - psi(x+ei+ej) <= 0
                std::vector<double> row(n, 0.0);
                row[x | ei] += 1.0;
                row[x | ej] += 1.0;
                row[x] -= 1.0;
                row[x | ei | ej] -= 1.0;
                a.push_back(std::move(row));
                b.push_back(0.0);
            }
        }
    }

    const auto lp = simplex_maximize(c, a, b);
    SmResult result;
    result.optimum = lp.optimum - c_sum;
    result.holds = result.optimum <= kSmTolerance;
    if (!result.holds) {
        std::vector<double> phi(n);
        for (std::size_t x = 0; x < n; ++x) phi[x] = lp.x[x] - 1.0;
        result.witness = std::move(phi);
    }
    return result;
}

const std::vector<std::uint32_t>& monotone_boolean_functions(int n) {
    static const std::array<std::vector<std::uint32_t>, 5> tables = [] {
        std::array<std::vector<std::uint32_t>, 5> out;
        for (int vars = 0; vars <= 4; ++vars) {
            const std::uint32_t points = 1u << vars;
            const std::uint64_t count = std::uint64_t{1} << points;
            const std::uint32_t full = static_cast<std::uint32_t>(count - 1);
            for (std::uint64_t t64 = 1; t64 + 1 < count; ++t64) {
                const auto t = static_cast<std::uint32_t>(t64);
                bool monotone = true;
                for (std::uint32_t y = 0; y < points && monotone; ++y) {
                    if (!((t >> y) & 1u)) continue;
                    for (int v = 0; v < vars; ++v) {
                        if (!((t >> (y | (1u << v))) & 1u)) {
                            monotone = false;
                            break;
                        }
                    }
                }
                if (monotone && t != full) out[static_cast<std::size_t>(vars)].push_back(t);
            }
        }
        return out;
    }();
    if (n < 0 || n > 4) throw DomainError("monotone Boolean functions are tabulated for n <= 4");
    return tables[static_cast<std::size_t>(n)];
}

NaResult na_check_exhaustive(const MultiAffinePmf& pmf) {
    const int d = pmf.d();
    if (d > kMaxNaDim) throw CapacityError("exhaustive NA check supports d <= 5, got d = " + std::to_string(d));
    const Outcome all = (Outcome{1} << d) - 1;
    const auto w = pmf.weights();

    for (Outcome block1 = 1; block1 <= all; ++block1) {
        const int n1 = std::popcount(block1);
        for (Outcome block2 = 1; block2 <= all; ++block2) {
            if (block1 & block2) continue;
            const int n2 = std::popcount(block2);
            const std::uint32_t size1 = 1u << n1;
            const std::uint32_t size2 = 1u << n2;

            // Joint law of the two blocks.
            std::vector<double> joint(std::size_t{size1} * size2, 0.0);
            for (Outcome x = 0; x < w.size(); ++x) {
                joint[extract_bits(x, block1) * size2 + extract_bits(x, block2)] += w[x];
            }
            std::vector<double> m1(size1, 0.0);
            std::vector<double> m2(size2, 0.0);
            for (std::uint32_t u = 0; u < size1; ++u) {
                for (std::uint32_t v = 0; v < size2; ++v) {
                    m1[u] += joint[u * size2 + v];
                    m2[v] += joint[u * size2 + v];
                }
            }

            for (std::uint32_t h1 : monotone_boolean_functions(n1)) {
                double e1 = 0.0;
                for (std::uint32_t u = 0; u < size1; ++u) {
                    if ((h1 >> u) & 1u) e1 += m1[u];
                }
                for (std::uint32_t h2 : monotone_boolean_functions(n2)) {
                    double e2 = 0.0;
                    for (std::uint32_t v = 0; v < size2; ++v) {
                        if ((h2 >> v) & 1u) e2 += m2[v];
                    }
                    double e12 = 0.0;
                    for (std::uint32_t u = 0; u < size1; ++u) {
                        if (!((h1 >> u) & 1u)) continue;
                        for (std::uint32_t v = 0; v < size2; ++v) {
                            if ((h2 >> v) & 1u) e12 += joint[u * size2 + v];
                        }
                    }
                    if (e12 > e1 * e2 + kNaTolerance) {
                        return {false, NaViolation{block1, block2, h1, h2, e12, e1, e2}};
                    }
                }
            }
        }
    }
    return {true, std::nullopt};
}

double pairwise_covariance(const ExchBernoulliPmf& pmf) {
    const int d = pmf.d();
    if (d < 2) throw DomainError("pairwise covariance needs d >= 2");
    const auto& law = pmf.sum_pmf();
    double falling = 0.0;
    for (int k = 2; k <= d; ++k) falling += static_cast<double>(k) * (k - 1) * law[k];
    const double p = pmf.marginal_mean();
    return falling / (static_cast<double>(d) * (d - 1)) - p * p;
}

}  // namespace cmmb
