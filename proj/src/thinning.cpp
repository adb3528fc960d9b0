#include "cmmb/thinning.hpp"

#include "cmmb/errors.hpp"
#include "cmmb/orders.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace cmmb {

namespace {

// Adds `mass` to every sub-outcome of kept | rest, weighting
// each kept bit by theta and each dropped bit by 1 - theta.
void spread(std::vector<double>& out, std::span<const double> theta, Outcome rest, Outcome kept, double mass) {
    if (mass == 0.0) return;
    if (rest == 0) {
        out[kept] += mass;
        return;
    }
    const Outcome bit = rest & (~rest + 1);
    const int j = std::countr_zero(bit);
    const double t = theta[static_cast<std::size_t>(j)];
    spread(out, theta, rest ^ bit, kept | bit, mass * t);
    spread(out, theta, rest ^ bit, kept, mass * (1.0 - t));
}

}  // namespace

ThinningSpec::ThinningSpec(double base_nu, std::vector<double> p) : base_nu_(base_nu), p_(std::move(p)) {
    if (!std::isfinite(base_nu_)) throw DomainError("base nu must be finite");
    if (p_.empty()) throw DomainError("thinning needs at least one coordinate");
    if (static_cast<int>(p_.size()) > MultiAffinePmf::kMaxDim) {
        throw CapacityError("thinning supports d <= 20, got d = " + std::to_string(p_.size()));
    }
    theta_.reserve(p_.size());
    for (double pm : p_) {
        if (!(pm >= 0.0 && pm <= 0.5)) {
            throw DomainError("thinning targets need p_m in [0, 1/2], got " + std::to_string(pm));
        }
        theta_.push_back(2.0 * pm);
    }
}

MultiAffinePmf ThinningSpec::base() const { return cmmb_joint(CmbParams(d(), 0.5, base_nu_)); }

MultiAffinePmf thin_joint_pmf(const ThinningSpec& spec) {
    const auto base = spec.base();
    std::vector<double> out(base.size(), 0.0);
    for (Outcome x = 0; x < base.size(); ++x) spread(out, spec.theta(), x, 0, base[x]);
    return MultiAffinePmf::normalized(spec.d(), std::move(out));
}

double thinned_pgf_eval(const ThinningSpec& spec, std::span<const double> z) {
    if (z.size() != static_cast<std::size_t>(spec.d())) throw DomainError("pgf argument has the wrong dimension");
    std::vector<double> shifted(z.size());
    for (std::size_t m = 0; m < z.size(); ++m) shifted[m] = 1.0 - spec.theta()[m] + spec.theta()[m] * z[m];
    return spec.base().pgf(shifted);
}

MultiAffinePmf single_thin_pgf(const MultiAffinePmf& base, int m, double p_k) {
    if (m < 1 || m > base.d()) throw DomainError("thinned coordinate index out of range");
    if (!(p_k >= 0.0 && p_k <= 1.0)) throw DomainError("thinning probability must lie in [0,1]");
    const Outcome bit = Outcome{1} << (m - 1);
    std::vector<double> w(base.weights().begin(), base.weights().end());
    for (Outcome x = 0; x < w.size(); ++x) {
        if (!(x & bit)) continue;
        const double moved = (1.0 - p_k) * base[x];
        w[x] = p_k * base[x];
        w[x ^ bit] += moved;
    }
    return MultiAffinePmf::normalized(base.d(), std::move(w));
}

}  // namespace cmmb
