#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "zetalab/report.hpp"

namespace zetalab::cli {

using report::json;

enum class OutputFormat { json, csv, text };

struct RunConfig {
    unsigned precision_bits = 256;
    unsigned threads = 1;
    OutputFormat output_format = OutputFormat::json;
    std::optional<std::string> output_path;
    bool strict = false;

    void validate() const {
        if (precision_bits < 64) throw error(errc::domain, "precision_bits must be >= 64");
        if (threads < 1) throw error(errc::domain, "threads must be >= 1");
    }
};

inline OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    if (s == "text") return OutputFormat::text;
    throw CLI::ValidationError("format", "expected json, csv or text, got '" + s + "'");
}

inline bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw CLI::ValidationError("strict", "expected a boolean, got '" + s + "'");
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("config", "cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("config", "line without '=': " + line);
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key != "precision_bits" && key != "threads" && key != "output_format" && key != "strict")
            throw CLI::ValidationError("config", "unknown key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

/// Ordinate of the first zeta zero to 65 places; used when no bracket is given.
inline constexpr const char* first_zero_ordinate = "14.134725141734693790457251983562470270784257115699243175685567460";

// ---------------------------------------------------------------------------

struct Options {
    // global
    std::string config_path;
    unsigned precision_flag = 0;
    unsigned threads_flag = 0;
    std::string format_flag;
    std::string output_flag;
    bool strict_flag = false;

    // shared numeric inputs
    double re = 0, im = 0, sigma = 0, t = 0, lo = 0, hi = 0, radius = 0, c = 0, W = 0, h = 0;
    int order = 0;
    std::string method = "em";
    std::uint64_t limit = 0, V = 0, U = 0;
    unsigned j = 0, J = 0, lemma = 0;
    bool tilde = false, use_double = false, simple = false;
    double c1 = 1.0 / 500.0, c0 = 1e-3, step = 1e-3, s0 = 1.5, z0 = 1.0;
    std::string out_path, center = "1,0", fn = "invzeta", gamma = "", sieve_method = "auto", points, csv_path;
    std::string regime = "doublestar";
    double zero_lo = 14.0, zero_hi = 14.2, beta0 = 0.5;
    // overrides
    std::optional<double> ov_b, ov_r, ov_eps, ov_a, ov_z0, ov_z1, ov_c0;
    std::optional<std::uint64_t> ov_U;
    std::optional<unsigned> ov_J;
};

class Runner {
public:
    Runner(const RunConfig& cfg, const Options& o) : cfg_(cfg), o_(o), ctx_(PrecisionContext::with_bits(cfg.precision_bits)) {}

    const RunConfig& config() const { return cfg_; }
    unsigned bits() const { return cfg_.precision_bits; }

    json zeta() {
        Complex<mp_real> s = point(o_.re, o_.im);
        CValue<mp_real> z;
        if (o_.method == "afe") {
            if (o_.order != 0) throw error(errc::domain, "the approximate functional equation gives order 0 only");
            z = afe_zeta(s, ctx_);
        } else {
            z = zeta_em(s, o_.order, ctx_);
        }
        return report::complex_value(z, bits());
    }

    json zero_free() {
        const double b = o_.simple ? zero_free_boundary_simple(o_.t, o_.c1) : zero_free_boundary(o_.t);
        return json{{"t", report::plain(o_.t)}, {"sigma", report::plain(b)}, {"err_bound", "0"}};
    }

    json hardy() {
        precision_scope<mp_real> scope(bits());
        auto z = hardy_z(mp_real(o_.t), ctx_);
        return report::real_value(z.value, z.err_bound, bits());
    }

    json moment() {
        auto m = second_moment<mp_real>(o_.sigma, o_.lo, o_.hi, ctx_);
        return report::real_value(m.value, m.err_bound, bits());
    }

    json fv() {
        const MobiusTable& tab = table(o_.V);
        const MollifierVariant variant = o_.tilde ? MollifierVariant::tilde : MollifierVariant::standard;
        double R = o_.radius > 0 ? o_.radius : (o_.tilde ? std::min(0.99, std::pow(double(o_.V), -o_.c0)) : 0.5);
        auto res = find_mollifier_root<mp_real>(o_.V, R, tab, ctx_);
        if (res.status == RootStatus::no_sign_change && R < 1.0) res = find_mollifier_root<mp_real>(o_.V, 1.0, tab, ctx_);
        if (res.status == RootStatus::no_sign_change) throw error(errc::no_sign_change, "M_V has no real sign change within |s - 1| <= 1");
        MollifierSpec<mp_real> spec;
        spec.V = o_.V;
        spec.root = res.value;
        spec.variant = variant;
        auto f = f_v(point(o_.sigma, o_.t), spec, tab, ctx_);
        json j = report::complex_value(f, bits());
        j["variant"] = to_string(variant);
        j["root"] = root_json(res);
        return j;
    }

    json guv() {
        const MobiusTable& tab = table(o_.V);
        const MollifierVariant variant = o_.tilde ? MollifierVariant::tilde : MollifierVariant::standard;
        double R = o_.tilde ? std::min(0.99, std::pow(double(o_.V), -o_.c0)) : 0.5;
        auto res = find_mollifier_root<mp_real>(o_.V, R, tab, ctx_);
        if (res.status == RootStatus::no_sign_change) res = find_mollifier_root<mp_real>(o_.V, 1.0, tab, ctx_);
        if (res.status == RootStatus::no_sign_change) throw error(errc::no_sign_change, "M_V has no real sign change within |s - 1| <= 1");
        GSpec<mp_real> g;
        {
            precision_scope<mp_real> scope(bits());
            g.mollifier.V = o_.V;
            g.mollifier.root = res.value;
            g.mollifier.variant = variant;
            g.U = o_.U;
            g.v = real_traits<mp_real>::from_string(gamma_text());
            g.s0 = mp_real(o_.s0);
        }
        const Complex<mp_real> s = point(o_.sigma, o_.t);
        CValue<mp_real> d;
        if (o_.j == 0) {
            d = g_uv(s, g, tab, ctx_);
        } else if (o_.method == "cauchy") {
            d = g_deriv_cauchy<mp_real>(o_.j, s, g, o_.radius, tab, ctx_);
        } else if (o_.method == "fd") {
            d = g_deriv_fd<mp_real>(o_.j, s, g, o_.h, tab, ctx_);
        } else if (o_.method == "series") {
            precision_scope<mp_real> scope(bits());
            auto coeffs = coeff_table<mp_real>(o_.V, mp_real(1) - res.value, default_coeff_limit(o_.V), tab, ctx_);
            // the series returns (-1)^j D^j G / j! for z0 = 1
            auto raw = g_deriv_series<mp_real>(o_.j, s, g, coeffs, 1.0, tab, ctx_);
            mp_real fact = exp(real_traits<mp_real>::log_factorial(o_.j));
            if (o_.j % 2) fact = -fact;
            d = CValue<mp_real>(raw.value * fact, raw.err_bound * std::abs(to_double(fact)));
        } else {
            throw error(errc::domain, "method must be series, cauchy or fd");
        }
        json j = report::complex_value(d, bits());
        j["j"] = o_.j;
        j["method"] = o_.j == 0 ? "direct" : o_.method;
        j["root"] = root_json(res);
        return j;
    }

    json perron() {
        const double c = o_.c > 0 ? o_.c : perron_default_c(o_.sigma, o_.V);
        auto spec = ContourSpec::vertical(c, o_.W);
        json j;
        auto fill = [&](auto tag) {
            using T = decltype(tag);
            precision_scope<T> scope(effective_bits<T>(ctx_));
            const MobiusTable& tab = table(o_.V);
            Complex<T> s(T(o_.sigma), T(o_.t));
            auto p = perron_mv<T>(s, o_.V, spec, ctx_);
            auto m = m_v<T>(s, o_.V, tab, ctx_);
            const unsigned b = effective_bits<T>(ctx_);
            const double diff = absd(p.value.value - m.value);
            const double env = perron_envelope(o_.sigma, o_.V, c, o_.W);
            j["perron"] = report::complex_value(p.value, b);
            j["m_v"] = report::complex_value(m, b);
            j["difference"] = report::real_value<double>(diff, p.value.err_bound + m.err_bound, 53);
            j["envelope"] = report::err_text(env);
            j["within_envelope"] = diff <= env;
            j["c"] = report::plain(c);
            j["evaluations"] = p.evaluations;
        };
        if (o_.use_double)
            fill(double{});
        else
            fill(mp_real{});
        return j;
    }

    json winding() {
        auto [cre, cim] = parse_center(o_.center);
        const WindingFunction fn = o_.fn == "mv" ? WindingFunction::m_v : WindingFunction::inv_zeta;
        if (o_.fn != "mv" && o_.fn != "invzeta") throw error(errc::domain, "--fn must be invzeta or mv");
        const MobiusTable* tab = fn == WindingFunction::m_v ? &table(o_.V) : nullptr;
        auto circle = ContourSpec::circle(cre, cim, o_.radius);
        WindingResult w = o_.use_double ? winding_number<double>(fn, circle, o_.V, tab, ctx_)
                                        : winding_number<mp_real>(fn, circle, o_.V, tab, ctx_);
        return json{{"function", to_string(fn)},
                    {"winding", w.winding},
                    {"raw", report::plain(w.raw)},
                    {"previous_raw", report::plain(w.previous_raw)},
                    {"nodes", w.nodes}};
    }

    json root_sv() {
        auto res = find_mollifier_root<mp_real>(o_.V, o_.radius, table(o_.V), ctx_);
        return root_json(res);
    }

    json root_zeta() {
        auto res = find_zeta_zero<mp_real>(o_.lo, o_.hi, ctx_);
        return root_json(res);
    }

    json sieve(std::ostream* csv_out) {
        SieveOptions so;
        so.method = o_.sieve_method == "linear" ? SieveMethod::linear
                    : o_.sieve_method == "segmented" ? SieveMethod::segmented
                                                     : SieveMethod::automatic;
        so.threads = cfg_.threads;
        MobiusTable t = mobius_table(o_.limit, so);
        long long mertens = 0;
        std::uint64_t squarefree = 0;
        for (std::uint64_t n = 1; n <= o_.limit; ++n) {
            mertens += t.mu[n];
            squarefree += t.mu[n] != 0;
        }
        if (csv_out) {
            *csv_out << report::csv_version_line << "\nn,mu,d\n";
            for (std::uint64_t n = 1; n <= o_.limit; ++n) *csv_out << n << ',' << int(t.mu[n]) << ',' << t.d[n] << '\n';
        }
        return json{{"limit", o_.limit}, {"mertens", mertens}, {"squarefree", squarefree}};
    }

    BoundReport check_lemma1() { return zetalab::check_lemma1<mp_real>(o_.J, o_.step, std::max(bits(), 256u)); }

    BoundReport check_bound() {
        ParamSet p = params();
        return zetalab::check_bound<mp_real>(static_cast<int>(o_.lemma), p, parse_points(), table(p.V), ctx_);
    }

    BoundReport check_expansion() {
        ParamSet p = params();
        return zetalab::check_expansion<mp_real>(static_cast<int>(o_.lemma), p, table(p.V), ctx_);
    }

    BoundReport check_taylor() {
        ParamSet p = params();
        return taylor_identity_check<mp_real>(p, table(p.V), ctx_);
    }

    BoundReport final() {
        ParamSet p = params();
        return final_report<mp_real>(p, table(p.V), ctx_);
    }

private:
    RunConfig cfg_;
    Options o_;
    PrecisionContext ctx_;
    std::optional<MobiusTable> table_;
    std::string gamma_cache_;

    const MobiusTable& table(std::uint64_t V) {
        if (V < 2) throw error(errc::domain, "V must be >= 2");
        if (!table_ || table_->limit < V) table_ = mobius_table(V);
        return *table_;
    }

    Complex<mp_real> point(double re, double im) const {
        precision_scope<mp_real> scope(cfg_.precision_bits);
        return Complex<mp_real>(mp_real(re), mp_real(im));
    }

    /// --gamma if given, else the zero located in [zero_lo, zero_hi] at twice
    /// the working precision, so that it is exact to working accuracy.
    std::string gamma_text() {
        if (!o_.gamma.empty()) return o_.gamma;
        if (!gamma_cache_.empty()) return gamma_cache_;
        if (o_.zero_lo == 14.0 && o_.zero_hi == 14.2 && bits() <= 200) return gamma_cache_ = first_zero_ordinate;
        auto ctx2 = PrecisionContext::with_bits(2 * bits());
        auto res = find_zeta_zero<mp_real>(o_.zero_lo, o_.zero_hi, ctx2);
        precision_scope<mp_real> scope(2 * bits());
        return gamma_cache_ = real_traits<mp_real>::to_string(res.value, static_cast<int>(2 * bits() * 0.30103));
    }

    ParamSet params() {
        const Regime regime = o_.regime == "star" ? Regime::star : Regime::doublestar;
        if (o_.regime != "star" && o_.regime != "doublestar") throw error(errc::domain, "--regime must be star or doublestar");
        ParamOverrides ov;
        ov.b = o_.ov_b;
        ov.r = o_.ov_r;
        ov.epsilon = o_.ov_eps;
        ov.a = o_.ov_a;
        ov.z0 = o_.ov_z0;
        ov.z1 = o_.ov_z1;
        ov.c0 = o_.ov_c0;
        ov.U = o_.ov_U;
        ov.J = o_.ov_J;
        return build_params(regime, o_.V, gamma_text(), o_.beta0, ov, cfg_.strict);
    }

    std::vector<GridPoint> parse_points() const {
        std::vector<GridPoint> pts;
        if (o_.points.empty()) return pts;
        std::istringstream is(o_.points);
        std::string item;
        while (std::getline(is, item, ';')) {
            std::vector<double> v;
            std::istringstream fs(item);
            std::string f;
            while (std::getline(fs, f, ':')) v.push_back(std::stod(f));
            GridPoint g;
            if (o_.lemma == 3 || o_.lemma == 5) {
                if (v.size() != 2) throw error(errc::domain, "lemma 3/5 points are sigma:t");
                g.s_re = v[0];
                g.s_im = v[1];
            } else {
                if (v.size() != 4) throw error(errc::domain, "lemma 6/7 points are omega_re:omega_im:z_re:z_im");
                g.omega_re = v[0];
                g.omega_im = v[1];
                g.z_re = v[2];
                g.z_im = v[3];
            }
            pts.push_back(g);
        }
        return pts;
    }

    static std::pair<double, double> parse_center(const std::string& s) {
        auto k = s.find(',');
        if (k == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, k)), std::stod(s.substr(k + 1))};
    }

    json root_json(const RootResult<mp_real>& r) const {
        precision_scope<mp_real> scope(bits());
        json j;
        j["status"] = to_string(r.status);
        if (r.status != RootStatus::no_sign_change) {
            j["value"] = report::real_value(r.value, r.value_err, bits());
            j["residual"] = report::err_text(r.residual);
            j["bracket"] = json::array({report::plain(to_double(r.bracket.first)), report::plain(to_double(r.bracket.second))});
            j["within_paper_bound"] = r.within_paper_bound;
        }
        j["sign_changes"] = r.sign_changes;
        return j;
    }
};

// ---------------------------------------------------------------------------

inline void add_param_overrides(CLI::App* c, Options& o) {
    c->add_option("--v", o.V, "mollifier length V")->required();
    c->add_option("--regime", o.regime, "star or doublestar")->check(CLI::IsMember({"star", "doublestar"}));
    c->add_option("--gamma", o.gamma, "ordinate of the zeta zero (default: located in --zero-lo..--zero-hi)");
    c->add_option("--zero-lo", o.zero_lo, "lower end of the zero bracket");
    c->add_option("--zero-hi", o.zero_hi, "upper end of the zero bracket");
    c->add_option("--beta0", o.beta0, "real part of the zero");
    c->add_option("--b", o.ov_b);
    c->add_option("--r", o.ov_r);
    c->add_option("--epsilon", o.ov_eps);
    c->add_option("--a", o.ov_a);
    c->add_option("--z0", o.ov_z0);
    c->add_option("--z1", o.ov_z1);
    c->add_option("--c0", o.ov_c0);
    c->add_option("--u", o.ov_U, "U (default V^(2/3))");
    c->add_option("--J", o.ov_J, "expansion order (default 2 floor(z0 log U + 2))");
    c->add_option("--csv", o.csv_path, "also write the CSV grid dump to this file");
}

/// Parses argv, runs the command and writes the result. Returns the exit
/// status: 0 success, 1 evaluation error, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Options o;
    CLI::App app{"Numerical laboratory for zeta, mollifiers and contour integrals", "zetalab"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.add_option("--config", o.config_path, "key=value config file");
    app.add_option("--precision", o.precision_flag, "working precision in bits (>= 64)");
    app.add_option("--threads", o.threads_flag, "worker threads (>= 1)");
    app.add_option("--format", o.format_flag, "json, csv or text");
    app.add_option("--output", o.output_flag, "write the result to this file");
    app.add_flag("--strict", o.strict_flag, "reject parameter sets that violate the regime constraints");

    auto* sieve = app.add_subcommand("sieve", "Mobius and divisor tables");
    sieve->add_option("--limit", o.limit)->required();
    sieve->add_option("--out", o.out_path, "CSV file n,mu,d");
    sieve->add_option("--method", o.sieve_method)->check(CLI::IsMember({"auto", "linear", "segmented"}));

    auto* zeta = app.add_subcommand("zeta", "zeta(s) and its derivative");
    zeta->require_subcommand(0, 1);
    zeta->add_option("--re", o.re);
    zeta->add_option("--im", o.im);
    zeta->add_option("--order", o.order)->check(CLI::IsMember({0, 1}));
    zeta->add_option("--method", o.method)->check(CLI::IsMember({"em", "afe"}));
    auto* zfb = zeta->add_subcommand("zero-free-boundary", "explicit zero-free region edge");
    zfb->add_option("--t", o.t)->required();
    zfb->add_flag("--simple", o.simple, "use 1 - c1/log t");
    zfb->add_option("--c1", o.c1);
    auto* hz = zeta->add_subcommand("hardy", "Hardy Z(t)");
    hz->add_option("--t", o.t)->required();
    auto* mom = zeta->add_subcommand("moment", "int |zeta(sigma+it)|^2 dt");
    mom->add_option("--sigma", o.sigma)->required();
    mom->add_option("--lo", o.lo)->required();
    mom->add_option("--hi", o.hi)->required();

    auto* fv = app.add_subcommand("fv", "F_V(s) = zeta(s) M_V(s + root - 1)");
    fv->add_option("--v", o.V)->required();
    fv->add_option("--sigma", o.sigma)->required();
    fv->add_option("--t", o.t);
    fv->add_flag("--tilde", o.tilde, "root bracket V^(-c0)");
    fv->add_option("--c0", o.c0);
    fv->add_option("--radius", o.radius, "root bracket radius");

    auto* guv = app.add_subcommand("guv", "D^j G_UV(s)");
    guv->add_option("--u", o.U)->required();
    guv->add_option("--v", o.V)->required();
    guv->add_option("--gamma", o.gamma, "ordinate v (default: first zero)");
    guv->add_option("--j", o.j);
    guv->add_option("--method", o.method)->check(CLI::IsMember({"series", "cauchy", "fd"}));
    guv->add_option("--sigma", o.sigma)->required();
    guv->add_option("--t", o.t);
    guv->add_option("--s0", o.s0);
    guv->add_option("--radius", o.radius, "Cauchy radius (default from the pole distance)");
    guv->add_option("--step", o.h, "finite-difference step (default balances truncation and rounding)");
    guv->add_flag("--tilde", o.tilde);
    guv->add_option("--c0", o.c0);

    auto* perron = app.add_subcommand("perron", "truncated Perron integral of 1/zeta");
    perron->add_option("--sigma", o.sigma)->required();
    perron->add_option("--t", o.t);
    perron->add_option("--v", o.V)->required();
    perron->add_option("--c", o.c, "abscissa (default max(1-sigma,0) + 1/log V)");
    perron->add_option("--w", o.W)->required();
    perron->add_flag("--double", o.use_double, "evaluate in double precision");

    auto* winding = app.add_subcommand("winding", "argument-principle zero count on a circle");
    winding->add_option("--fn", o.fn)->check(CLI::IsMember({"invzeta", "mv"}));
    winding->add_option("--center", o.center, "re or re,im");
    winding->add_option("--radius", o.radius)->required();
    winding->add_option("--v", o.V);
    winding->add_flag("--double", o.use_double, "evaluate in double precision");

    auto* root = app.add_subcommand("root", "real roots");
    root->require_subcommand(1);
    auto* rsv = root->add_subcommand("sv", "real zero of M_V near 1");
    rsv->add_option("--v", o.V)->required();
    rsv->add_option("--radius", o.radius)->required();
    auto* rz = root->add_subcommand("zeta", "zero of Z(t) in a bracket");
    rz->add_option("--lo", o.lo)->required();
    rz->add_option("--hi", o.hi)->required();

    auto* check = app.add_subcommand("check", "lemma checks");
    check->require_subcommand(1);
    auto* l1 = check->add_subcommand("lemma1", "Poisson-weight inequalities");
    l1->add_option("--J", o.J)->required();
    l1->add_option("--step", o.step);
    auto* cb = check->add_subcommand("bound", "ratio against a growth or decay envelope");
    cb->add_option("--lemma", o.lemma)->required()->check(CLI::IsMember({3, 5, 6, 7}));
    cb->add_option("--points", o.points, "sigma:t;... (3, 5) or wre:wim:zre:zim;... (6, 7)");
    add_param_overrides(cb, o);
    auto* ce = check->add_subcommand("expansion", "order-J Taylor coefficients against their main terms");
    ce->add_option("--lemma", o.lemma)->required()->check(CLI::IsMember({8, 9}));
    add_param_overrides(ce, o);
    auto* ct = check->add_subcommand("taylor", "Taylor identity with integral remainder");
    add_param_overrides(ct, o);

    auto* fin = app.add_subcommand("final", "final inequality chain, reported without a verdict");
    add_param_overrides(fin, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    RunConfig cfg;
    try {
        // defaults < environment (threads) < config file < flags
        if (const char* env = std::getenv("ZETALAB_THREADS")) cfg.threads = static_cast<unsigned>(std::stoul(env));
        if (!o.config_path.empty()) {
            for (const auto& [k, v] : read_config_file(o.config_path)) {
                if (k == "precision_bits") cfg.precision_bits = static_cast<unsigned>(std::stoul(v));
                if (k == "threads") cfg.threads = static_cast<unsigned>(std::stoul(v));
                if (k == "output_format") cfg.output_format = parse_format(v);
                if (k == "strict") cfg.strict = parse_bool(v);
            }
        }
        if (o.precision_flag) cfg.precision_bits = o.precision_flag;
        if (app.count("--threads")) cfg.threads = o.threads_flag;
        if (!o.format_flag.empty()) cfg.output_format = parse_format(o.format_flag);
        if (!o.output_flag.empty()) cfg.output_path = o.output_flag;
        if (o.strict_flag) cfg.strict = true;
        if (app.count("--precision") && o.precision_flag < 64) throw CLI::ValidationError("precision", "must be >= 64");
        if (cfg.threads < 1) throw CLI::ValidationError("threads", "must be >= 1");
        cfg.validate();
        if (*zeta && !*zfb && !*hz && !*mom && (!zeta->count("--re")))
            throw CLI::RequiredError("--re");
        if (*winding && o.fn == "mv" && o.V < 2) throw CLI::RequiredError("--v (needed for --fn mv)");
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    set_default_threads(cfg.threads);
    if (*guv && !guv->count("--method")) o.method = "cauchy";

    auto emit = [&](const std::string& text) {
        if (cfg.output_path) {
            std::ofstream f(*cfg.output_path);
            if (!f) throw error(errc::domain, "cannot write " + *cfg.output_path);
            f << text;
        } else {
            out << text;
        }
    };
    auto emit_json = [&](const json& j) {
        switch (cfg.output_format) {
        case OutputFormat::json: emit(j.dump(2) + "\n"); break;
        case OutputFormat::text: emit(report::as_text(j)); break;
        case OutputFormat::csv: emit(report::as_csv(j)); break;
        }
    };
    auto emit_report = [&](const BoundReport& r) {
        if (!o.csv_path.empty()) {
            std::ofstream f(o.csv_path);
            if (!f) throw error(errc::domain, "cannot write " + o.csv_path);
            f << report::bound_report_csv(r);
        }
        if (cfg.output_format == OutputFormat::csv)
            emit(report::bound_report_csv(r));
        else
            emit_json(report::bound_report(r));
    };

    try {
        Runner rn(cfg, o);
        if (*sieve) {
            if (!o.out_path.empty()) {
                std::ofstream f(o.out_path);
                if (!f) throw error(errc::domain, "cannot write " + o.out_path);
                emit_json(rn.sieve(&f));
            } else if (cfg.output_format == OutputFormat::csv) {
                std::ostringstream os;
                rn.sieve(&os);
                emit(os.str());
            } else {
                emit_json(rn.sieve(nullptr));
            }
        } else if (*zeta) {
            if (*zfb) emit_json(rn.zero_free());
            else if (*hz) emit_json(rn.hardy());
            else if (*mom) emit_json(rn.moment());
            else emit_json(rn.zeta());
        } else if (*fv) {
            emit_json(rn.fv());
        } else if (*guv) {
            emit_json(rn.guv());
        } else if (*perron) {
            emit_json(rn.perron());
        } else if (*winding) {
            emit_json(rn.winding());
        } else if (*rsv) {
            emit_json(rn.root_sv());
        } else if (*rz) {
            emit_json(rn.root_zeta());
        } else if (*l1) {
            emit_report(rn.check_lemma1());
        } else if (*cb) {
            emit_report(rn.check_bound());
        } else if (*ce) {
            emit_report(rn.check_expansion());
        } else if (*ct) {
            emit_report(rn.check_taylor());
        } else if (*fin) {
            emit_report(rn.final());
        }
    } catch (const error& e) {
        out << report::error_object(to_string(e.code()), e.what()).dump(2) << '\n';
        return 1;
    } catch (const std::exception& e) {
        out << report::error_object("internal", e.what()).dump(2) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace zetalab::cli
