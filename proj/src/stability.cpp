#include "cmmb/stability.hpp"

#include "cmmb/errors.hpp"
#include "cmmb/rng.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cmmb {

namespace {

using Rational = boost::multiprecision::cpp_rational;
// Ascending coefficients; the zero polynomial is the empty vector.
using RationalPoly = std::vector<Rational>;

void trim(RationalPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const RationalPoly& p) { return static_cast<int>(p.size()) - 1; }

int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

RationalPoly derivative(const RationalPoly& p) {
    RationalPoly out;
    for (std::size_t k = 1; k < p.size(); ++k) out.push_back(p[k] * static_cast<long>(k));
    trim(out);
    return out;
}

// Returns {quotient, remainder} of a / b; b nonzero.
std::pair<RationalPoly, RationalPoly> divmod(RationalPoly a, const RationalPoly& b) {
    const int db = degree(b);
    if (degree(a) < db) return {RationalPoly{}, a};
    RationalPoly q(static_cast<std::size_t>(degree(a) - db + 1));
    for (int i = degree(a); i >= db; --i) {
        const Rational c = a[static_cast<std::size_t>(i)] / b.back();
        q[static_cast<std::size_t>(i - db)] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(i - db + j)] -= c * b[static_cast<std::size_t>(j)];
    }
    a.resize(static_cast<std::size_t>(db));
    trim(a);
    trim(q);
    return {q, a};
}

// Rescale by a positive constant so the leading coefficient has magnitude 1.
// Signs are untouched, which is all a Sturm chain needs.
void normalize(RationalPoly& p) {
    if (p.empty()) return;
    const Rational lead = boost::multiprecision::abs(p.back());
    for (auto& c : p) c /= lead;
}

RationalPoly gcd(RationalPoly a, RationalPoly b) {
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    normalize(a);
    return a;
}

int sign_changes(const std::vector<int>& signs) {
    int changes = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

// Distinct real roots of p by Sturm's theorem on (-inf, inf).
int distinct_real_roots(const RationalPoly& p) {
    if (degree(p) < 1) return 0;
    std::vector<RationalPoly> chain{p, derivative(p)};
    normalize(chain[0]);
    normalize(chain[1]);
    while (!chain.back().empty()) {
        auto r = divmod(chain[chain.size() - 2], chain.back()).second;
        for (auto& c : r) c = -c;
        normalize(r);
        chain.push_back(std::move(r));
    }
    chain.pop_back();
    std::vector<int> at_neg_inf;
    std::vector<int> at_pos_inf;
    for (const auto& q : chain) {
        const int lead = sign(q.back());
        at_pos_inf.push_back(lead);
        at_neg_inf.push_back(degree(q) % 2 == 0 ? lead : -lead);
    }
    return sign_changes(at_neg_inf) - sign_changes(at_pos_inf);
}

// Real roots with multiplicity: if p = prod (z - a_i)^{m_i}, then
// gcd(p, p') = prod (z - a_i)^{m_i - 1}, so peel one layer at a time.
int real_roots_with_multiplicity(RationalPoly p) {
    int total = 0;
    while (degree(p) >= 1) {
        RationalPoly g = gcd(p, derivative(p));
        RationalPoly square_free = degree(g) >= 1 ? divmod(p, g).first : p;
        total += distinct_real_roots(square_free);
        p = std::move(g);
    }
    return total;
}

// Parlett-Reinsch diagonal similarity scaling by powers of two.
void balance(Eigen::MatrixXd& a) {
    constexpr double radix = 2.0;
    constexpr double radix_sq = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix_sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix_sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

const char* to_string(HyperbolicityMethod method) {
    switch (method) {
        case HyperbolicityMethod::exact_sturm: return "exact_sturm";
        case HyperbolicityMethod::numeric_eigen: return "numeric_eigen";
    }
    return "unknown";
}

HyperbolicityVerdict is_hyperbolic_exact(std::span<const BigInt> coeffs) {
    RationalPoly p(coeffs.begin(), coeffs.end());
    trim(p);
    if (p.empty()) throw DomainError("hyperbolicity of the zero polynomial is undefined");
    if (degree(p) < 1) throw DomainError("hyperbolicity needs a polynomial of degree >= 1");
    HyperbolicityVerdict v;
    v.method = HyperbolicityMethod::exact_sturm;
    v.degree = degree(p);
    v.real_root_count = real_roots_with_multiplicity(std::move(p));
    v.is_hyperbolic = v.real_root_count == v.degree;
    return v;
}

HyperbolicityVerdict is_hyperbolic_exact(const UnivariatePoly& poly) {
    if (!poly.exact_coeffs()) throw DomainError("exact hyperbolicity check needs exact integer coefficients");
    return is_hyperbolic_exact(*poly.exact_coeffs());
}

std::vector<std::complex<double>> polynomial_roots(const UnivariatePoly& poly) {
    const int n = poly.degree();
    if (n < 1) throw DomainError("root finding needs a polynomial of degree >= 1");
    const auto c = poly.coeffs();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
    if (!companion.allFinite()) throw NumericError("companion matrix is not finite");
    balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
    const auto ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

HyperbolicityVerdict is_hyperbolic_numeric(const UnivariatePoly& poly, double rel_tol) {
    if (!(rel_tol >= 0.0)) throw DomainError("rel_tol must be >= 0");
    const auto roots = polynomial_roots(poly);
    const int n = static_cast<int>(roots.size());
    HyperbolicityVerdict v;
    v.method = HyperbolicityMethod::numeric_eigen;
    v.degree = poly.degree();

    // A real root of multiplicity m comes back from the eigensolver as a ring
    // of m roots with radius about eps^(1/m). From the largest m down, any
    // group of exactly m roots linked at that scale, with a real centroid and
    // a radius inside the ring, is taken as one m-fold real root.
    const double eps = std::numeric_limits<double>::epsilon() * n;
    auto ring = [&](int m, std::complex<double> c) { return 10.0 * std::pow(eps, 1.0 / m) * (1.0 + std::abs(c)); };
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int m = n; m >= 2; --m) {
        std::vector<int> group(static_cast<std::size_t>(n));
        std::iota(group.begin(), group.end(), 0);
        auto find = [&](int i) {
            while (group[static_cast<std::size_t>(i)] != i) i = group[static_cast<std::size_t>(i)];
            return i;
        };
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)]) continue;
                const auto zi = roots[static_cast<std::size_t>(i)];
                const auto zj = roots[static_cast<std::size_t>(j)];
                if (std::abs(zi - zj) <= ring(m, 0.5 * (zi + zj))) group[static_cast<std::size_t>(find(j))] = find(i);
            }
        }
        for (int g = 0; g < n; ++g) {
            if (used[static_cast<std::size_t>(g)] || find(g) != g) continue;
            std::vector<int> members;
            for (int i = 0; i < n; ++i) {
                if (!used[static_cast<std::size_t>(i)] && find(i) == g) members.push_back(i);
            }
            if (static_cast<int>(members.size()) != m) continue;
            std::complex<double> c = 0.0;
            for (int i : members) c += roots[static_cast<std::size_t>(i)];
            c /= static_cast<double>(m);
            double radius = 0.0;
            for (int i : members) radius = std::max(radius, std::abs(roots[static_cast<std::size_t>(i)] - c));
            if (std::abs(c.imag()) > rel_tol * (1.0 + std::abs(c.real())) || radius > ring(m, c)) continue;
            v.real_root_count += m;
            for (int i : members) used[static_cast<std::size_t>(i)] = true;
        }
    }

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (used[static_cast<std::size_t>(i)]) continue;
        const auto z = roots[static_cast<std::size_t>(i)];
        const double rel_im = std::abs(z.imag()) / (1.0 + std::abs(z.real()));
        if (rel_im <= rel_tol) {
            ++v.real_root_count;
        } else if (rel_im > worst) {
            worst = rel_im;
            v.witness = z.imag() > 0 ? z : std::conj(z);
        }
    }
    v.is_hyperbolic = v.real_root_count == v.degree;
    return v;
}

HyperbolicityVerdict cmb_sr_verdict(int d, double nu) {
    const auto g = g_poly(d, nu);
    return g.exact_coeffs() ? is_hyperbolic_exact(g) : is_hyperbolic_numeric(g);
}

bool cmb_is_sr(int d, double nu) { return cmb_sr_verdict(d, nu).is_hyperbolic; }

double find_sr_threshold(int d, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    if (!(lo < hi)) throw DomainError("threshold bracket needs lo < hi");
    if (cmb_is_sr(d, lo)) throw DomainError("lower end of the bracket is already SR");
    if (!cmb_is_sr(d, hi)) throw DomainError("upper end of the bracket is not SR");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cmb_is_sr(d, mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double legendre(int n, double x) {
    if (n < 0) throw DomainError("Legendre degree must be >= 0");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

bool sr_check_multiaffine_d3(const MultiAffinePmf& pmf) {
    if (pmf.d() != 3) throw DomainError("closed-form SR check is only defined for d = 3");
    const auto f = [&](Outcome x) { return pmf[x]; };
    const auto w = pmf.weights();
    const double scale = *std::max_element(w.begin(), w.end());
    const double tol2 = 1e-12 * scale * scale;
    const double tol4 = tol2 * scale * scale;
    constexpr std::array<std::array<int, 3>, 3> pairs{{{0, 1, 2}, {0, 2, 1}, {1, 2, 0}}};
    for (const auto& [i, j, k] : pairs) {
        const Outcome ei = 1u << i;
        const Outcome ej = 1u << j;
        const Outcome ek = 1u << k;
        // Rayleigh difference for (i, j) as a quadratic a t^2 + b t + c in x_k = t.
        const double a = f(ei | ek) * f(ej | ek) - f(ek) * f(7);
        const double b = f(ei) * f(ej | ek) + f(ei | ek) * f(ej) - f(0) * f(7) - f(ek) * f(ei | ej);
        const double c = f(ei) * f(ej) - f(0) * f(ei | ej);
        if (a < -tol2 || c < -tol2 || 4.0 * a * c - b * b < -tol4) return false;
    }
    return true;
}

double rayleigh_margin(const MultiAffinePmf& pmf, std::span<const double> x, int j1, int j2) {
    if (j1 < 0 || j2 < 0 || j1 >= pmf.d() || j2 >= pmf.d() || j1 == j2) {
        throw DomainError("Rayleigh pair indices out of range");
    }
    const auto mono = monomial_table(x);
    const Outcome b1 = Outcome{1} << j1;
    const Outcome b2 = Outcome{1} << j2;
    const Outcome both = b1 | b2;
    const auto w = pmf.weights();
    double p = 0.0, d1 = 0.0, d2 = 0.0, d12 = 0.0;
    // absolute sums bound the rounding error of the signed ones
    double ap = 0.0, ad1 = 0.0, ad2 = 0.0, ad12 = 0.0;
    for (Outcome m = 0; m < w.size(); ++m) {
        const double fm = w[m];
        if (fm == 0.0) continue;
        p += fm * mono[m];
        ap += std::abs(fm * mono[m]);
        if (m & b1) {
            d1 += fm * mono[m ^ b1];
            ad1 += std::abs(fm * mono[m ^ b1]);
        }
        if (m & b2) {
            d2 += fm * mono[m ^ b2];
            ad2 += std::abs(fm * mono[m ^ b2]);
        }
        if ((m & both) == both) {
            d12 += fm * mono[m ^ both];
            ad12 += std::abs(fm * mono[m ^ both]);
        }
    }
    const double lhs = d1 * d2;
    const double rhs = p * d12;
    const double norm = ad1 * ad2 + ap * ad12;
    return norm == 0.0 ? 0.0 : (lhs - rhs) / norm;
}

std::optional<RayleighViolation> sr_falsify_random(const MultiAffinePmf& pmf, int trials, std::uint64_t seed) {
    if (trials < 1) throw DomainError("trials must be >= 1");
    constexpr double kViolation = -1e-9;
    const int d = pmf.d();
    Rng rng(seed);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int t = 0; t < trials; ++t) {
        for (auto& xi : x) {
            if (rng.uniform() < 0.5) {
                xi = rng.uniform(-3.0, 3.0);
            } else {
                const double u = rng.uniform(-1.0, 1.0);
                xi = u == 0.0 ? 1e12 : 1.0 / u;
            }
        }
        for (int j1 = 0; j1 < d; ++j1) {
            for (int j2 = j1 + 1; j2 < d; ++j2) {
                const double m = rayleigh_margin(pmf, x, j1, j2);
                if (m < kViolation) return RayleighViolation{x, j1 + 1, j2 + 1, m};
            }
        }
    }
    return std::nullopt;
}

}  // namespace cmmb
