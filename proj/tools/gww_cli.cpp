// Command-line surface: logdet | predict | verify | sweep | constants.
//
// Exit codes: 0 pass, 1 verification failure, 2 precision failure,
//             3 config error, 4 regime guard.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gww/harness.hpp"

using namespace gww;

namespace {

constexpr const char* kCsvHeader =
    "n,tau,nu_re,nu_im,exact_re,exact_im,pred_re,pred_im,residual,bits,seconds";

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

bool stable_timing() { return std::getenv("GWW_STABLE_TIMING") != nullptr; }

std::string fmt(const Real& x, long digits) {
    if (x.is_zero()) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%%.%ldRe", digits);
    char* s = nullptr;
    mpfr_asprintf(&s, buf, x.raw());
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

std::string fmt_grid(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct RunConfig {
    int n = 0;
    std::vector<long> n_list;
    std::string tau_str, t_str;  // exact decimal strings from the command line
    std::string nu_str = "0";
    long bits = 256;
    std::string format = "json";
    std::string out_path;
    std::string cache_path;
    std::string suite = "all";
    bool with_exact = false;
    double tau_min = 0, tau_max = 0, tau_step = 0;

    PrecisionContext ctx() const { return PrecisionContext::for_bits(bits); }

    Complex nu(mpfr_prec_t prec) const {
        auto comma = nu_str.find(',');
        std::string re = comma == std::string::npos ? nu_str : nu_str.substr(0, comma);
        std::string im = comma == std::string::npos ? "0" : nu_str.substr(comma + 1);
        return {Real::parse(re, prec), Real::parse(im, prec)};
    }

    void check_one_of_tau_t() const {
        if (tau_str.empty() == t_str.empty())
            throw DomainError("exactly one of --tau and --t must be given");
    }
    Real resolve_t(int n_, mpfr_prec_t prec) const {
        check_one_of_tau_t();
        if (!t_str.empty()) return Real::parse(t_str, prec);
        return Real::parse(tau_str, prec) * n_;
    }
    Real resolve_tau(int n_, mpfr_prec_t prec) const {
        check_one_of_tau_t();
        if (!tau_str.empty()) return Real::parse(tau_str, prec);
        return Real::parse(t_str, prec) / n_;
    }
};

struct Row {
    long n;
    Real tau;
    Complex nu;
    Complex exact;
    Complex pred;
    Real residual;
    long bits;
    double seconds;
};

void write_rows(const RunConfig& cfg, const std::vector<Row>& rows, std::ostream& os) {
    long digits = cfg.ctx().target_digits + 5;
    if (cfg.format == "csv") {
        os << kCsvHeader << "\n";
        for (const auto& r : rows) {
            os << r.n << ',' << fmt(r.tau, digits) << ',' << fmt(r.nu.re(), digits) << ','
               << fmt(r.nu.im(), digits) << ',' << fmt(r.exact.re(), digits) << ','
               << fmt(r.exact.im(), digits) << ',' << fmt(r.pred.re(), digits) << ','
               << fmt(r.pred.im(), digits) << ',' << fmt(r.residual, digits) << ',' << r.bits
               << ',' << (stable_timing() ? 0.0 : r.seconds) << "\n";
        }
    } else {
        os << "[\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            os << "  {\"n\":" << r.n << ",\"tau\":\"" << fmt(r.tau, digits) << "\",\"nu_re\":\""
               << fmt(r.nu.re(), digits) << "\",\"nu_im\":\"" << fmt(r.nu.im(), digits)
               << "\",\"exact_re\":\"" << fmt(r.exact.re(), digits) << "\",\"exact_im\":\""
               << fmt(r.exact.im(), digits) << "\",\"pred_re\":\"" << fmt(r.pred.re(), digits)
               << "\",\"pred_im\":\"" << fmt(r.pred.im(), digits) << "\",\"residual\":\""
               << fmt(r.residual, digits) << "\",\"bits\":" << r.bits
               << ",\"seconds\":" << (stable_timing() ? 0.0 : r.seconds) << "}"
               << (i + 1 < rows.size() ? "," : "") << "\n";
        }
        os << "]\n";
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot open output file " + path);
    return f;
}

int cmd_logdet(const RunConfig& cfg) {
    PrecisionContext ctx = cfg.ctx();
    MomentTable table;
    if (!cfg.cache_path.empty()) table.load(cfg.cache_path);
    Complex nu = cfg.nu(ctx.work());
    std::vector<long> sizes = cfg.n_list.empty() ? std::vector<long>{cfg.n} : cfg.n_list;
    long digits = ctx.target_digits + 5;
    std::ostringstream os;
    for (long n : sizes) {
        Real t = cfg.resolve_t(static_cast<int>(n), ctx.work());
        Real tau = cfg.resolve_tau(static_cast<int>(n), ctx.work());
        double t0 = now_seconds();
        Escalated esc = with_precision(ctx, [&](const PrecisionContext& c) {
            return log_det(ModelParams(static_cast<int>(n), nu.round_to(c.work()),
                                       t.round_to(c.work())),
                           c, table)
                .value();
        });
        double dt = now_seconds() - t0;
        os << "{\"n\":" << n << ",\"tau\":\"" << fmt(tau, digits) << "\",\"nu_re\":\""
           << fmt(nu.re(), digits) << "\",\"nu_im\":\"" << fmt(nu.im(), digits)
           << "\",\"logdet_re\":\"" << fmt(esc.value.re(), digits) << "\",\"logdet_im\":\""
           << fmt(esc.value.im(), digits) << "\",\"bits\":" << cfg.bits
           << ",\"achieved_digits\":" << esc.achieved_digits
           << ",\"seconds\":" << (stable_timing() ? 0.0 : dt) << "}\n";
    }
    if (!cfg.out_path.empty()) {
        auto f = open_out(cfg.out_path);
        f << os.str();
    }
    std::cout << os.str();
    if (!cfg.cache_path.empty()) table.save(cfg.cache_path);
    return 0;
}

// negative: sub regime; positive: super; throws inside the excluded window
int regime_of(const Real& tau) {
    if (tau > 0.0 && tau <= 0.9) return -1;
    if (tau >= 1.1) return +1;
    throw DomainError("regime guard: |tau - 1| < 0.1");
}

int cmd_predict(const RunConfig& cfg) {
    PrecisionContext ctx = cfg.ctx();
    MomentTable table;
    if (!cfg.cache_path.empty()) table.load(cfg.cache_path);
    Complex nu = cfg.nu(ctx.work());
    std::vector<Row> rows;
    std::vector<long> sizes = cfg.n_list.empty() ? std::vector<long>{cfg.n} : cfg.n_list;
    for (long n : sizes) {
        Real tau_n = cfg.resolve_tau(static_cast<int>(n), ctx.work());
        int reg;
        try {
            reg = regime_of(tau_n);
        } catch (const DomainError& e) {
            std::cerr << e.what() << "\n";
            return 4;
        }
        double t0 = now_seconds();
        Complex pred = (reg < 0) ? thm1_prediction(n, nu, tau_n, ctx)
                                 : thm2_prediction(n, nu, tau_n, ctx);
        Row row{n, tau_n, nu, Complex::zero(ctx.work()), pred, Real::zero(ctx.work()), cfg.bits, 0};
        if (cfg.with_exact) {
            Real t = tau_n * n;
            Complex exact =
                log_det(ModelParams(static_cast<int>(n), nu, t), ctx, table).value();
            Complex diff = exact - pred;
            Real twopi = const_pi(ctx.work()) * 2;
            Real k = floor(diff.im() / twopi + Real::frac(1, 2, ctx.work()));
            row.exact = exact;
            row.residual = hypot(diff.re(), diff.im() - k * twopi);
        }
        row.seconds = now_seconds() - t0;
        rows.push_back(row);
    }
    if (!cfg.out_path.empty()) {
        auto f = open_out(cfg.out_path);
        write_rows(cfg, rows, f);
    }
    write_rows(cfg, rows, std::cout);
    if (!cfg.cache_path.empty()) table.save(cfg.cache_path);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    PrecisionContext ctx = cfg.ctx();
    MomentTable table;
    if (!cfg.cache_path.empty()) table.load(cfg.cache_path);
    Complex nu = cfg.nu(ctx.work());
    if (cfg.tau_step <= 0) throw DomainError("sweep requires --tau-step > 0");
    std::vector<std::string> grid;
    for (double tv = cfg.tau_min; tv <= cfg.tau_max + 1e-12; tv += cfg.tau_step) {
        if (tv > 0.9 && tv < 1.1) continue;  // near-critical window excluded
        if (tv <= 0) continue;
        grid.push_back(fmt_grid(tv));
    }
    if (grid.empty()) throw DomainError("sweep grid is empty");
    std::vector<Row> rows;
    for (const std::string& tv : grid) {
        double t0 = now_seconds();
        Real tau = Real::parse(tv, ctx.work());
        Real t = tau * cfg.n;
        Complex exact = log_det(ModelParams(cfg.n, nu, t), ctx, table).value();
        Real fe = free_energy(tau, ctx);
        Complex pred = Complex(fe * cfg.n * static_cast<long>(cfg.n));
        Real resid = abs(exact.re() / (static_cast<long>(cfg.n) * cfg.n) - fe);
        rows.push_back({cfg.n, tau, nu, exact, pred, resid, cfg.bits, now_seconds() - t0});
    }
    if (!cfg.out_path.empty()) {
        auto f = open_out(cfg.out_path);
        write_rows(cfg, rows, f);
    }
    write_rows(cfg, rows, std::cout);
    if (!cfg.cache_path.empty()) table.save(cfg.cache_path);
    return 0;
}

int cmd_constants(const RunConfig& cfg) {
    PrecisionContext ctx = cfg.ctx();
    long digits = ctx.target_digits + 5;
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const char* name : {"pi", "euler_gamma", "zeta_prime_minus1", "log_glaisher"}) {
        Real v = named_constant(name, ctx);
        os << (first ? "" : ",") << "\"" << name << "\":\"" << fmt(v, digits) << "\"";
        first = false;
    }
    os << ",\"bits\":" << cfg.bits << "}\n";
    if (!cfg.out_path.empty()) {
        auto f = open_out(cfg.out_path);
        f << os.str();
    }
    std::cout << os.str();
    return 0;
}

struct SuiteResult {
    std::string name;
    bool pass;
    std::string detail;
};

SuiteResult run_identity_suite(const RunConfig& cfg, const PrecisionContext& ctx,
                               MomentTable& table) {
    Real h = pow2(-40, ctx.work());
    Real tol = Real::parse("1e-20", ctx.work());
    struct Case { int n; std::string nu; std::string t; };
    std::vector<Case> cases;
    if (cfg.n >= 1 && !cfg.t_str.empty()) {
        cases.push_back({cfg.n, cfg.nu_str, cfg.t_str});  // user-specified point
    } else {
        cases = {{2, "0.1", "0.5"}, {3, "0.35", "1.7"}, {5, "0.6", "3"}};
    }
    bool ok = true;
    std::ostringstream det;
    for (const Case& c : cases) {
        ModelParams p(c.n, Complex(Real::parse(c.nu, ctx.work())), Real::parse(c.t, ctx.work()));
        IdentityReport rep = check_differential_identity(p, ctx, h, table);
        bool pass = rep.residual <= tol;
        ok = ok && pass;
        det << "{\"n\":" << c.n << ",\"nu\":" << c.nu << ",\"t\":" << c.t << ",\"residual\":\""
            << fmt(rep.residual, 8) << "\",\"pass\":" << (pass ? "true" : "false") << "},";
    }
    return {"identity", ok, det.str()};
}

SuiteResult run_recurrence_suite(const PrecisionContext& ctx, MomentTable& table, bool cd_only) {
    bool ok = true;
    std::ostringstream det;
    Real tol = pow2(-ctx.bits + 80, ctx.work());
    for (int n : {1, 4, 8, 12}) {
        ModelParams p(n, Complex(Real::frac(3, 10, ctx.work())), Real::of(2L, ctx.work()));
        RecurrenceReport rep = check_recurrences_cd(p, ctx, table);
        Real worst = cd_only ? rep.worst_cd : rep.worst_recurrence;
        bool pass = worst <= tol;
        ok = ok && pass;
        det << "{\"n\":" << n << ",\"residual\":\"" << fmt(worst, 8)
            << "\",\"pass\":" << (pass ? "true" : "false") << "},";
    }
    return {cd_only ? "cd" : "recurrence", ok, det.str()};
}

SuiteResult run_symmetry_suite(const PrecisionContext& ctx, MomentTable& table) {
    bool ok = true;
    std::ostringstream det;
    Real tol = pow2(-ctx.bits + 40, ctx.work());
    for (int nu : {1, 2, 3}) {
        for (int n : {5, 8}) {
            Real r = check_symmetry(n, Real::of(2L, ctx.work()), nu, ctx, table);
            bool pass = r <= tol;
            ok = ok && pass;
            det << "{\"n\":" << n << ",\"nu\":" << nu << ",\"residual\":\"" << fmt(r, 8)
                << "\",\"pass\":" << (pass ? "true" : "false") << "},";
        }
    }
    return {"symmetry", ok, det.str()};
}

// The error clauses of the asymptotic formulas are upper bounds, so the suite
// requires decay at least as fast as claimed (fitted <= claimed + 0.35) plus
// monotone residuals; faster-than-claimed decay is reported, not failed.
SuiteResult run_convergence_suite(const PrecisionContext& ctx, MomentTable& table) {
    bool ok = true;
    std::ostringstream det;
    std::vector<long> ns{16, 24, 32, 48, 64};
    struct Study { Quantity q; Regime r; const char* nu; const char* tau; };
    std::vector<Study> studies{{Quantity::LogDet, Regime::Sub, "0.3", "0.5"},
                               {Quantity::LogDet, Regime::Super, "0.4", "2"}};
    for (const auto& s : studies) {
        ConvergenceStudy st = convergence_study(s.q, s.r, Complex(Real::parse(s.nu, ctx.work())),
                                                Real::parse(s.tau, ctx.work()), ns, ctx, table);
        bool pass = st.fit_valid && st.monotone && st.fitted_order <= st.claimed_order + 0.35;
        ok = ok && pass;
        det << "{\"quantity\":\"" << quantity_tag(s.q) << "\",\"regime\":\""
            << (s.r == Regime::Sub ? "sub" : "super") << "\",\"fitted\":" << st.fitted_order
            << ",\"claimed\":" << st.claimed_order << ",\"superconvergent\":"
            << (st.superconvergent ? "true" : "false") << ",\"pass\":" << (pass ? "true" : "false")
            << "},";
    }
    return {"convergence", ok, det.str()};
}

SuiteResult run_equilibrium_suite(const PrecisionContext& ctx) {
    bool ok = true;
    std::ostringstream det;
    Real tol_mass = Real::parse("1e-20", ctx.work());
    Real tol_el = Real::parse("1e-15", ctx.work());
    for (const char* tv : {"1.5", "2", "3"}) {
        Real tau = Real::parse(tv, ctx.work());
        Real mass = equilibrium_mass(tau, ctx, 240);
        Real el = euler_lagrange_residual(
            super_geometry(tau, Complex::zero(ctx.work()), ctx).theta_c / 3, tau, ctx);
        JumpChecks jc = g_jump_checks(tau, ctx);
        Real jworst = jc.arc_vs_phi_plus;
        for (const Real* v : {&jc.arc_vs_phi_minus, &jc.c1_upper, &jc.c1_lower, &jc.negative_axis})
            if (*v > jworst) jworst = *v;
        bool pass = abs(mass - 1) <= tol_mass && el <= tol_el && jworst <= tol_el;
        ok = ok && pass;
        det << "{\"tau\":" << tv << ",\"mass_err\":\"" << fmt(abs(mass - 1), 8)
            << "\",\"el_residual\":\"" << fmt(el, 8) << "\",\"jump_worst\":\"" << fmt(jworst, 8)
            << "\",\"pass\":" << (pass ? "true" : "false") << "},";
    }
    return {"equilibrium", ok, det.str()};
}

int cmd_verify(const RunConfig& cfg) {
    PrecisionContext ctx = cfg.ctx();
    MomentTable table;
    if (!cfg.cache_path.empty()) table.load(cfg.cache_path);
    std::vector<SuiteResult> results;
    const std::string& s = cfg.suite;
    bool all = (s == "all");
    if (all || s == "identity") results.push_back(run_identity_suite(cfg, ctx, table));
    if (all || s == "recurrence") results.push_back(run_recurrence_suite(ctx, table, false));
    if (all || s == "cd") results.push_back(run_recurrence_suite(ctx, table, true));
    if (all || s == "symmetry") results.push_back(run_symmetry_suite(ctx, table));
    if (all || s == "convergence") results.push_back(run_convergence_suite(ctx, table));
    if (all || s == "equilibrium") results.push_back(run_equilibrium_suite(ctx));
    if (results.empty()) throw DomainError("unknown suite '" + s + "'");

    bool ok = true;
    std::ostringstream os;
    os << "{\"suites\":[";
    for (std::size_t i = 0; i < results.size(); ++i) {
        ok = ok && results[i].pass;
        std::string d = results[i].detail;
        if (!d.empty() && d.back() == ',') d.pop_back();
        os << (i ? "," : "") << "{\"name\":\"" << results[i].name << "\",\"pass\":"
           << (results[i].pass ? "true" : "false") << ",\"checks\":[" << d << "]}";
    }
    os << "],\"pass\":" << (ok ? "true" : "false") << ",\"bits\":" << cfg.bits << "}\n";
    if (!cfg.out_path.empty()) {
        auto f = open_out(cfg.out_path);
        f << os.str();
    }
    std::cout << os.str();
    if (!cfg.cache_path.empty()) table.save(cfg.cache_path);
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toeplitz determinants of Bessel moments for the perturbed GWW model"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* c, bool needs_n) {
        if (needs_n) c->add_option("--n", cfg.n, "matrix size");
        c->add_option("--n-list", cfg.n_list, "list of sizes")->delimiter(',');
        c->add_option("--tau", cfg.tau_str, "coupling per size, t = n tau");
        c->add_option("--t", cfg.t_str, "coupling t (overrides tau)");
        c->add_option("--nu", cfg.nu_str, "exponent nu as re[,im]");
        c->add_option("--bits", cfg.bits, "working precision bits")->check(CLI::Range(64L, 8192L));
        c->add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--out", cfg.out_path, "output file");
        c->add_option("--cache", cfg.cache_path, "moment cache file (JSON lines)");
    };

    auto* c_logdet = app.add_subcommand("logdet", "exact log D_{n,nu}(t)");
    add_common(c_logdet, true);
    auto* c_predict = app.add_subcommand("predict", "asymptotic prediction of log D");
    add_common(c_predict, true);
    c_predict->add_flag("--with-exact", cfg.with_exact, "also compute the exact value");
    auto* c_verify = app.add_subcommand("verify", "verification suites");
    add_common(c_verify, true);
    c_verify->add_option("--suite", cfg.suite,
                         "identity|recurrence|cd|symmetry|convergence|equilibrium|all");
    auto* c_sweep = app.add_subcommand("sweep", "phase-transition curve data");
    add_common(c_sweep, true);
    c_sweep->add_option("--tau-min", cfg.tau_min, "grid start")->required();
    c_sweep->add_option("--tau-max", cfg.tau_max, "grid end")->required();
    c_sweep->add_option("--tau-step", cfg.tau_step, "grid step")->required();
    auto* c_constants = app.add_subcommand("constants", "named constants");
    add_common(c_constants, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (c_logdet->parsed()) {
            if (cfg.n < 1 && cfg.n_list.empty()) throw DomainError("--n or --n-list required");
            return cmd_logdet(cfg);
        }
        if (c_predict->parsed()) {
            if (cfg.n < 1 && cfg.n_list.empty()) throw DomainError("--n or --n-list required");
            return cmd_predict(cfg);
        }
        if (c_verify->parsed()) return cmd_verify(cfg);
        if (c_sweep->parsed()) {
            if (cfg.n < 1) throw DomainError("--n >= 1 required");
            return cmd_sweep(cfg);
        }
        if (c_constants->parsed()) return cmd_constants(cfg);
    } catch (const PrecisionError& e) {
        std::cerr << "precision failure: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 3;
}
