#include "cli.hpp"

#include "law_spec.hpp"

#include "cmmb/calibrate.hpp"
#include "cmmb/errors.hpp"
#include "cmmb/geometry.hpp"
#include "cmmb/orders.hpp"
#include "cmmb/sampling.hpp"
#include "cmmb/stability.hpp"
#include "cmmb/thinning.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace cmmb::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kDefaultPrecision = 8;
constexpr std::size_t kMaxSampleSize = 100000000;

// Decimal places for every printed number: --precision, then CMMB_PRECISION,
// then 8.
class Numbers {
public:
    explicit Numbers(int places) : places_(places) {}

    double round(double x) const {
        const double scale = std::pow(10.0, places_);
        if (!std::isfinite(x) || std::abs(x) * scale > 1e15) return x;
        const double r = std::round(x * scale) / scale;
        return r == 0.0 ? 0.0 : r;
    }

    std::string fixed(double x) const {
        std::ostringstream os;
        os << std::fixed << std::setprecision(places_) << round(x);
        return os.str();
    }

private:
    int places_;
};

// Shortest text that reads back to x, for echoing inputs such as nu.
std::string plain(double x) {
    std::ostringstream os;
    os << std::setprecision(15) << x;
    return os.str();
}

int resolve_precision(std::optional<int> flag) {
    int p = kDefaultPrecision;
    if (flag) {
        p = *flag;
    } else if (const char* env = std::getenv("CMMB_PRECISION"); env != nullptr && *env != '\0') {
        try {
            p = parse_int(env);
        } catch (const DomainError&) {
            throw DomainError(std::string("CMMB_PRECISION is not an integer: ") + env);
        }
    }
    if (p < 0 || p > 17) throw DomainError("precision must lie in 0..17");
    return p;
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "json") throw DomainError("--format must be csv or json");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write " + path);
    return f;
}

Json round_all(const std::vector<double>& v, const Numbers& num) {
    Json a = Json::array();
    for (double x : v) a.push_back(num.round(x));
    return a;
}

// --- subcommand state -------------------------------------------------------

struct PmfArgs {
    int d = 0;
    double r = 0.0;
    double nu = 0.0;
    std::string format = "csv";
};

struct ChainArgs {
    int d = 0;
    std::string p;
    std::string nu_list;
    double tol = kDefaultCalibrationTol;
    std::string format = "csv";
};

struct SrArgs {
    std::optional<int> d;
    std::optional<double> nu;
    std::optional<double> r;
    bool exact = false;
    bool numeric = false;
    bool threshold = false;
    std::optional<double> lo;
    std::optional<double> hi;
    double tol = 1e-5;
    std::optional<std::string> law;
    int trials = 100000;
    std::uint64_t seed = 0;
};

struct HistArgs {
    int d = 0;
    std::string p;
    std::string nu_list;
    std::string out;
};

struct OrderArgs {
    std::string mode;
    std::string first;
    std::optional<std::string> second;
};

struct SampleArgs {
    std::string what;
    std::optional<int> d;
    std::optional<double> r;
    double nu = 1.0;
    std::optional<std::string> p;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

struct DecomposeArgs {
    int d = 0;
    double nu = 0.0;
    std::string format = "csv";
};

// --- handlers ---------------------------------------------------------------

void cmd_pmf(const PmfArgs& a, const Numbers& num, std::ostream& out) {
    check_format(a.format);
    const CmbParams params(a.d, a.r, a.nu);
    const auto f = pmf(params);
    if (a.format == "json") {
        Json j;
        j["d"] = a.d;
        j["r"] = a.r;
        j["nu"] = a.nu;
        j["pmf"] = round_all({f.weights().begin(), f.weights().end()}, num);
        j["mean"] = num.round(mean(f));
        j["variance"] = num.round(variance(f));
        out << j.dump(2) << '\n';
        return;
    }
    out << "k,probability\n";
    for (int k = 0; k <= a.d; ++k) out << k << ',' << num.fixed(f[k]) << '\n';
}

void cmd_chain(const ChainArgs& a, const Numbers& num, std::ostream& out) {
    check_format(a.format);
    const double p = parse_real(a.p);
    const auto nus = parse_real_list(a.nu_list);
    const auto rows = chain_table(a.d, p, nus, a.tol);
    if (a.format == "json") {
        Json j;
        j["d"] = a.d;
        j["p"] = p;
        j["rows"] = Json::array();
        for (const auto& row : rows) {
            j["rows"].push_back(
                {{"nu", row.nu}, {"r", num.round(row.r)}, {"mean", num.round(row.mean)}, {"variance", num.round(row.variance)}});
        }
        out << j.dump(2) << '\n';
        return;
    }
    out << "nu,r,mean,variance\n";
    for (const auto& row : rows) {
        out << plain(row.nu) << ',' << num.fixed(row.r) << ',' << num.fixed(row.mean) << ',' << num.fixed(row.variance) << '\n';
    }
}

Json verdict_json(const HyperbolicityVerdict& v, const Numbers& num) {
    Json j;
    j["is_sr"] = v.is_hyperbolic;
    j["method"] = to_string(v.method);
    j["degree"] = v.degree;
    j["real_root_count"] = v.real_root_count;
    if (v.witness) j["witness"] = {{"re", num.round(v.witness->real())}, {"im", num.round(v.witness->imag())}};
    return j;
}

Json rayleigh_json(const RayleighViolation& v, const Numbers& num) {
    return {{"x", round_all(v.x, num)}, {"j1", v.j1}, {"j2", v.j2}, {"margin", v.margin}};
}

void cmd_sr_check(const SrArgs& a, const Numbers& num, std::ostream& out) {
    if (a.exact && a.numeric) throw DomainError("--exact and --numeric are exclusive");
    Json j;
    if (a.threshold) {
        if (!a.d || !a.lo || !a.hi) throw DomainError("--threshold needs --d, --lo and --hi");
        const double t = find_sr_threshold(*a.d, *a.lo, *a.hi, a.tol);
        j["d"] = *a.d;
        j["lo"] = *a.lo;
        j["hi"] = *a.hi;
        j["tol"] = a.tol;
        j["threshold"] = num.round(t);
        out << j.dump(2) << '\n';
        return;
    }
    if (a.law) {
        const auto law = Law::parse(*a.law);
        j["law"] = law.label();
        j["d"] = law.d();
        if (!law.is_joint()) {
            // A sum law is SR exactly when its pgf is real-rooted.
            const auto sum = law.sum_law();
            std::vector<double> c(sum.weights().begin(), sum.weights().end());
            while (c.size() > 1 && c.back() == 0.0) c.pop_back();
            if (c.size() == 1) {
                j["is_sr"] = true;
                j["method"] = "trivial";
            } else {
                const auto v = verdict_json(is_hyperbolic_numeric(UnivariatePoly(std::move(c))), num);
                j.update(v);
            }
            out << j.dump(2) << '\n';
            return;
        }
        const auto joint = law.joint_law();
        const auto hit = sr_falsify_random(joint, a.trials, a.seed);
        if (joint.d() == 3) {
            j["is_sr"] = sr_check_multiaffine_d3(joint);
            j["method"] = "closed_form_d3";
        } else {
            // Random search can refute the property but not prove it.
            j["is_sr"] = hit ? Json(false) : Json(nullptr);
            j["method"] = "random_search";
            j["trials"] = a.trials;
            j["seed"] = a.seed;
        }
        if (hit) j["witness"] = rayleigh_json(*hit, num);
        out << j.dump(2) << '\n';
        return;
    }
    if (!a.d || !a.nu) throw DomainError("sr-check needs --d and --nu (or --threshold, or --law)");
    j["d"] = *a.d;
    j["nu"] = *a.nu;
    HyperbolicityVerdict v;
    if (a.exact) {
        const auto g = g_poly(*a.d, *a.nu);
        if (!g.exact_coeffs()) throw DomainError("--exact needs a nonnegative integer nu no larger than 256");
        v = is_hyperbolic_exact(g);
    } else if (a.r) {
        j["r"] = *a.r;
        v = is_hyperbolic_numeric(pgf_poly(CmbParams(*a.d, *a.r, *a.nu)));
    } else if (a.numeric) {
        v = is_hyperbolic_numeric(g_poly(*a.d, *a.nu));
    } else {
        v = cmb_sr_verdict(*a.d, *a.nu);
    }
    if (a.exact && a.r) j["r"] = *a.r;
    j.update(verdict_json(v, num));
    out << j.dump(2) << '\n';
}

void cmd_hist(const HistArgs& a, const Numbers& num, std::ostream& out) {
    const double p = parse_real(a.p);
    const auto rows = chain_table(a.d, p, parse_real_list(a.nu_list));
    auto file = open_out(a.out);
    file << "nu,k,probability\n";
    Json modes = Json::array();
    for (const auto& row : rows) {
        const auto f = pmf(CmbParams(a.d, row.r, row.nu));
        int mode = 0;
        for (int k = 0; k <= a.d; ++k) {
            file << plain(row.nu) << ',' << k << ',' << num.fixed(f[k]) << '\n';
            if (f[k] > f[mode]) mode = k;
        }
        modes.push_back({{"nu", row.nu}, {"r", num.round(row.r)}, {"mode", mode}});
    }
    if (!file) throw DomainError("cannot write " + a.out);
    Json j;
    j["out"] = a.out;
    j["rows"] = static_cast<int>(rows.size()) * (a.d + 1);
    j["modes"] = modes;
    out << j.dump(2) << '\n';
}

std::string relation(bool holds, bool reverse, const std::string& order) {
    if (holds && reverse) return "equivalent";
    if (holds) return "second <=_" + order + " first";
    if (reverse) return "first <=_" + order + " second";
    return "incomparable";
}

Json upset_keys(std::uint32_t truth, Outcome block, int d) {
    // Coordinates of the block, smallest first.
    std::vector<int> coords;
    for (int j = 0; j < d; ++j) {
        if ((block >> j) & 1u) coords.push_back(j + 1);
    }
    Json keys = Json::array();
    for (std::uint32_t local = 0; local < (1u << coords.size()); ++local) {
        if (!((truth >> local) & 1u)) continue;
        std::string key;
        for (std::size_t l = 0; l < coords.size(); ++l) key += ((local >> l) & 1u) ? '1' : '0';
        keys.push_back(key);
    }
    return {{"coordinates", coords}, {"true_on", keys}};
}

Json coordinates(Outcome block, int d) {
    Json c = Json::array();
    for (int j = 0; j < d; ++j) {
        if ((block >> j) & 1u) c.push_back(j + 1);
    }
    return c;
}

void cmd_order_check(const OrderArgs& a, const Numbers& num, std::ostream& out) {
    Json j;
    j["mode"] = a.mode;
    const auto first = Law::parse(a.first);
    j["first"] = first.label();
    if (a.mode == "na") {
        if (a.second) throw DomainError("--mode na takes a single law (--first)");
        const auto res = na_check_exhaustive(first.joint_law());
        j["holds"] = res.holds;
        if (res.violation) {
            const auto& v = *res.violation;
            const int d = first.d();
            j["violation"] = {{"block1", coordinates(v.block1, d)},
                              {"block2", coordinates(v.block2, d)},
                              {"h1", upset_keys(v.h1, v.block1, d)},
                              {"h2", upset_keys(v.h2, v.block2, d)},
                              {"e_h1h2", num.round(v.e_h1h2)},
                              {"e_h1", num.round(v.e_h1)},
                              {"e_h2", num.round(v.e_h2)}};
        }
        out << j.dump(2) << '\n';
        return;
    }
    if (!a.second) throw DomainError("--mode " + a.mode + " needs --second");
    const auto second = Law::parse(*a.second);
    j["second"] = second.label();
    if (a.mode == "cx") {
        const auto f1 = first.sum_law();
        const auto f2 = second.sum_law();
        const bool holds = cx_dominates(f1, f2);
        const bool reverse = cx_dominates(f2, f1);
        j["holds"] = holds;
        j["reverse_holds"] = reverse;
        j["relation"] = relation(holds, reverse, "cx");
        j["mean_first"] = num.round(mean(f1));
        j["mean_second"] = num.round(mean(f2));
        j["variance_first"] = num.round(variance(f1));
        j["variance_second"] = num.round(variance(f2));
        const auto s = sign_changes(f1, f2);
        j["sign_changes"] = {{"positions", s.positions}, {"signs", s.signs}};
        if (!holds) {
            for (int t = 0; t <= f1.d(); ++t) {
                if (stop_loss(f2, t) > stop_loss(f1, t) + 1e-9) {
                    j["witness"] = {{"t", t},
                                    {"stop_loss_first", num.round(stop_loss(f1, t))},
                                    {"stop_loss_second", num.round(stop_loss(f2, t))}};
                    break;
                }
            }
        }
        out << j.dump(2) << '\n';
        return;
    }
    if (a.mode == "sm") {
        const auto p1 = first.joint_law();
        const auto p2 = second.joint_law();
        const auto fwd = sm_dominates_lp(p2, p1);
        const auto rev = sm_dominates_lp(p1, p2);
        j["holds"] = fwd.holds;
        j["reverse_holds"] = rev.holds;
        j["relation"] = relation(fwd.holds, rev.holds, "sm");
        j["optimum"] = num.round(fwd.optimum);
        j["reverse_optimum"] = num.round(rev.optimum);
        if (fwd.witness) {
            Json w = Json::object();
            for (Outcome x = 0; x < fwd.witness->size(); ++x) w[outcome_key(x, p1.d())] = num.round((*fwd.witness)[x]);
            j["witness"] = w;
        }
        out << j.dump(2) << '\n';
        return;
    }
    throw DomainError("--mode must be cx, sm or na");
}

void write_summary_vectors(const VectorBatch& batch, Json& j, const Numbers& num) {
    j["mean"] = round_all(column_means(batch), num);
    Json cov = Json::array();
    if (batch.n() >= 2) {
        for (const auto& row : covariance_matrix(batch)) cov.push_back(round_all(row, num));
    }
    j["covariance"] = cov;
}

void cmd_sample(const SampleArgs& a, const Numbers& num, std::ostream& out) {
    if (a.n < 1) throw DomainError("--n must be >= 1");
    if (a.n > kMaxSampleSize) throw CapacityError("--n is capped at 100000000");
    Json j;
    j["what"] = a.what;
    j["n"] = a.n;
    j["seed"] = a.seed;
    std::optional<std::ofstream> file;
    if (a.out) file = open_out(*a.out);

    if (a.what == "w" || a.what == "exch") {
        if (!a.d || !a.r) throw DomainError("--what " + a.what + " needs --d, --r and --nu");
        const CmbParams params(*a.d, *a.r, a.nu);
        j["d"] = *a.d;
        j["r"] = *a.r;
        j["nu"] = a.nu;
        if (a.what == "w") {
            const auto batch = sample_w(params, a.n, a.seed);
            j["mean"] = num.round(sample_mean(batch));
            j["variance"] = batch.n() >= 2 ? Json(num.round(sample_variance(batch))) : Json(nullptr);
            if (file) {
                *file << "w\n";
                for (int w : batch.draws) *file << w << '\n';
            }
        } else {
            const auto batch = sample_exchangeable(params, a.n, a.seed);
            write_summary_vectors(batch, j, num);
            if (file) {
                for (int c = 0; c < batch.d; ++c) *file << (c ? "," : "") << 'i' << c + 1;
                *file << '\n';
                for (std::size_t row = 0; row < batch.n(); ++row) {
                    for (int c = 0; c < batch.d; ++c) *file << (c ? "," : "") << static_cast<int>(batch.at(row, c));
                    *file << '\n';
                }
            }
        }
    } else if (a.what == "thinned") {
        if (!a.p) throw DomainError("--what thinned needs --p and --nu");
        const ThinningSpec spec(a.nu, parse_real_list(*a.p));
        j["nu"] = a.nu;
        j["p"] = spec.p();
        const auto batch = sample_thinned(spec, a.n, a.seed);
        write_summary_vectors(batch, j, num);
        if (file) {
            for (int c = 0; c < batch.d; ++c) *file << (c ? "," : "") << 'i' << c + 1;
            *file << '\n';
            for (std::size_t row = 0; row < batch.n(); ++row) {
                for (int c = 0; c < batch.d; ++c) *file << (c ? "," : "") << static_cast<int>(batch.at(row, c));
                *file << '\n';
            }
        }
    } else {
        throw DomainError("--what must be w, exch or thinned");
    }
    if (file) {
        if (!*file) throw DomainError("cannot write " + *a.out);
        j["out"] = *a.out;
    }
    out << j.dump(2) << '\n';
}

void cmd_decompose(const DecomposeArgs& a, const Numbers& num, std::ostream& out) {
    check_format(a.format);
    const auto weights = symmetric_weights(a.d, a.nu);
    const auto rec = reconstruct_from_weights(a.d, weights);
    const auto direct = pmf(CmbParams(a.d, 0.5, a.nu));
    double residual = 0.0;
    for (int k = 0; k <= a.d; ++k) residual = std::max(residual, std::abs(rec[k] - direct[k]));

    std::ostringstream res;
    res << std::scientific << std::setprecision(3) << residual;
    if (a.format == "json") {
        Json j;
        j["d"] = a.d;
        j["nu"] = a.nu;
        j["weights"] = Json::array();
        for (int jj = 0; jj < weights.size(); ++jj) {
            Json support = Json::array({jj});
            if (2 * jj != a.d) support.push_back(a.d - jj);
            j["weights"].push_back({{"j", jj}, {"lambda", num.round(weights[jj])}, {"support", support}});
        }
        j["residual"] = residual;
        out << j.dump(2) << '\n';
        return;
    }
    out << "j,lambda,support\n";
    for (int jj = 0; jj < weights.size(); ++jj) {
        out << jj << ',' << num.fixed(weights[jj]) << ',' << jj;
        if (2 * jj != a.d) out << '|' << a.d - jj;
        out << '\n';
    }
    out << "# residual," << res.str() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conway-Maxwell binomial and multivariate Bernoulli toolkit", "cmmb"};
    app.require_subcommand(1);
    std::optional<int> precision;
    app.add_option("--precision", precision, "Decimal places in numeric output (default 8, or CMMB_PRECISION)");

    PmfArgs pmf_args;
    auto* pmf_cmd = app.add_subcommand("pmf", "Probability table of CMB_d(r, nu)");
    pmf_cmd->add_option("--d", pmf_args.d)->required();
    pmf_cmd->add_option("--r", pmf_args.r)->required();
    pmf_cmd->add_option("--nu", pmf_args.nu)->required();
    pmf_cmd->add_option("--format", pmf_args.format, "csv or json");

    ChainArgs chain_args;
    auto* chain_cmd = app.add_subcommand("chain", "Calibrate r for each nu at mean d*p");
    chain_cmd->add_option("--d", chain_args.d)->required();
    chain_cmd->add_option("--p", chain_args.p, "Target Bernoulli mean; fractions such as 1/3 are accepted")->required();
    chain_cmd->add_option("--nu-list", chain_args.nu_list, "Comma-separated nu values")->required();
    chain_cmd->add_option("--tol", chain_args.tol);
    chain_cmd->add_option("--format", chain_args.format, "csv or json");

    SrArgs sr_args;
    auto* sr_cmd = app.add_subcommand("sr-check", "Strongly Rayleigh verdicts and the nu threshold");
    sr_cmd->add_option("--d", sr_args.d);
    sr_cmd->add_option("--nu", sr_args.nu);
    sr_cmd->add_option("--r", sr_args.r, "Check the pgf of CMB_d(r, nu) instead of G");
    sr_cmd->add_flag("--exact", sr_args.exact, "Sturm sequences over the rationals (integer nu)");
    sr_cmd->add_flag("--numeric", sr_args.numeric, "Companion-matrix eigenvalues");
    sr_cmd->add_flag("--threshold", sr_args.threshold, "Bisect for the SR threshold in [lo, hi]");
    sr_cmd->add_option("--lo", sr_args.lo);
    sr_cmd->add_option("--hi", sr_args.hi);
    sr_cmd->add_option("--tol", sr_args.tol);
    sr_cmd->add_option("--law", sr_args.law, "Law spec or JSON file instead of --d/--nu");
    sr_cmd->add_option("--trials", sr_args.trials, "Random-search trials for joint laws");
    sr_cmd->add_option("--seed", sr_args.seed);

    HistArgs hist_args;
    auto* hist_cmd = app.add_subcommand("hist", "Long-format pmf data for each calibrated nu");
    hist_cmd->add_option("--d", hist_args.d)->required();
    hist_cmd->add_option("--p", hist_args.p)->required();
    hist_cmd->add_option("--nu-list", hist_args.nu_list)->required();
    hist_cmd->add_option("--out", hist_args.out)->required();

    OrderArgs order_args;
    auto* order_cmd = app.add_subcommand("order-check", "Convex, supermodular and negative-association checks");
    order_cmd->add_option("--mode", order_args.mode, "cx, sm or na")->required();
    order_cmd->add_option("--first", order_args.first, "Law spec or JSON file")->required();
    order_cmd->add_option("--second", order_args.second, "Law spec or JSON file (cx and sm)");

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample", "Seeded samples with summary statistics");
    sample_cmd->add_option("--what", sample_args.what, "w, exch or thinned")->required();
    sample_cmd->add_option("--d", sample_args.d);
    sample_cmd->add_option("--r", sample_args.r);
    sample_cmd->add_option("--nu", sample_args.nu);
    sample_cmd->add_option("--p", sample_args.p, "Comma-separated thinning targets in [0, 1/2]");
    sample_cmd->add_option("--n", sample_args.n)->required();
    sample_cmd->add_option("--seed", sample_args.seed);
    sample_cmd->add_option("--out", sample_args.out, "CSV file for the draws");

    DecomposeArgs dec_args;
    auto* dec_cmd = app.add_subcommand("decompose", "Weights of CMB_d(1/2, nu) on the symmetric extremal points");
    dec_cmd->add_option("--d", dec_args.d)->required();
    dec_cmd->add_option("--nu", dec_args.nu)->required();
    dec_cmd->add_option("--format", dec_args.format, "csv or json");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }

    try {
        const Numbers num(resolve_precision(precision));
        if (*pmf_cmd) cmd_pmf(pmf_args, num, out);
        else if (*chain_cmd) cmd_chain(chain_args, num, out);
        else if (*sr_cmd) cmd_sr_check(sr_args, num, out);
        else if (*hist_cmd) cmd_hist(hist_args, num, out);
        else if (*order_cmd) cmd_order_check(order_args, num, out);
        else if (*sample_cmd) cmd_sample(sample_args, num, out);
        else if (*dec_cmd) cmd_decompose(dec_args, num, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "internal failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

}  // namespace cmmb::cli
