#include "gww/special.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gww {

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

namespace {

std::mutex g_gl_mutex;
std::map<std::pair<int, mpfr_prec_t>, QuadRule> g_gl_cache;

// P_m(x) and P_m'(x) by the three-term recurrence
void legendre_eval(int m, const Real& x, Real& p, Real& dp) {
    mpfr_prec_t prec = x.prec();
    Real pm1 = Real::of(1L, prec);  // P_0
    Real pm = x;                    // P_1
    for (int k = 2; k <= m; ++k) {
        Real pk = (x * pm * (2 * k - 1) - pm1 * (k - 1)) / k;
        pm1 = pm;
        pm = pk;
    }
    p = pm;
    // P_m'(x) = m (x P_m - P_{m-1}) / (x^2 - 1)
    dp = (x * pm - pm1) * m / (x * x - 1);
}

}  // namespace

const QuadRule& gauss_legendre(int m, mpfr_prec_t prec) {
    std::lock_guard<std::mutex> lock(g_gl_mutex);
    auto key = std::make_pair(m, prec);
    auto it = g_gl_cache.find(key);
    if (it != g_gl_cache.end()) return it->second;

    QuadRule rule;
    rule.nodes.reserve(m);
    rule.weights.reserve(m);
    mpfr_prec_t wp = prec + 32;
    int newton_iters = 3;
    for (mpfr_prec_t b = 53; b < wp; b *= 2) ++newton_iters;
    for (int i = 0; i < m; ++i) {
        double guess = std::cos(M_PI * (m - i - 0.25) / (m + 0.5));
        Real x = Real::of(guess, wp);
        Real p(wp), dp(wp);
        for (int it2 = 0; it2 < newton_iters; ++it2) {
            legendre_eval(m, x, p, dp);
            x = x - p / dp;
        }
        legendre_eval(m, x, p, dp);
        Real w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes.push_back(x.round_to(prec));
        rule.weights.push_back(w.round_to(prec));
    }
    auto [pos, _] = g_gl_cache.emplace(key, std::move(rule));
    return pos->second;
}

// ---------------------------------------------------------------------------
// Spouge gamma
// ---------------------------------------------------------------------------

namespace {

struct SpougeTable {
    long a;
    mpfr_prec_t wp;
    std::vector<Real> c;  // c[0] = sqrt(2 pi), c[k] for k = 1..a-1
};

std::mutex g_spouge_mutex;
std::map<mpfr_prec_t, SpougeTable> g_spouge_cache;

// Spouge order and the guarded working precision for a target precision p.
// The alternating coefficient sum cancels up to ~2a bits, so we widen.
const SpougeTable& spouge_table(mpfr_prec_t target) {
    std::lock_guard<std::mutex> lock(g_spouge_mutex);
    auto it = g_spouge_cache.find(target);
    if (it != g_spouge_cache.end()) return it->second;

    long a = static_cast<long>(0.38 * static_cast<double>(target + 16)) + 4;
    mpfr_prec_t wp = target + static_cast<mpfr_prec_t>(2 * a) + 64;
    SpougeTable tab;
    tab.a = a;
    tab.wp = wp;
    tab.c.reserve(a);
    tab.c.push_back(sqrt(const_pi(wp) * 2));
    Real fact = Real::of(1L, wp);  // (k-1)!
    for (long k = 1; k < a; ++k) {
        if (k > 1) fact = fact * (k - 1);
        Real ak = Real::of(a - k, wp);
        Real ck = pow(ak, Real::frac(2 * k - 1, 2, wp)) * exp(ak) / fact;
        if (k % 2 == 0) ck = -ck;
        tab.c.push_back(ck);
    }
    auto [pos, _] = g_spouge_cache.emplace(target, std::move(tab));
    return pos->second;
}

// Spouge's formula on w = z-1, valid once z sits deep enough in the right
// half-plane that arg(c0 + sum c_k/(w+k)) stays principal:
//   Gamma(w+1) = (w+a)^{w+1/2} e^{-(w+a)} (c0 + sum c_k/(w+k))
Complex log_gamma_spouge(const Complex& z, mpfr_prec_t target) {
    const SpougeTable& tab = spouge_table(target);
    mpfr_prec_t wp = tab.wp;
    Complex w = z.round_to(wp) - 1;
    Complex s = Complex(tab.c[0]);
    for (long k = 1; k < tab.a; ++k) s = s + Complex(tab.c[k]) / (w + k);
    Complex wa = w + tab.a;
    Complex r = (w + Complex(Real::frac(1, 2, wp))) * log(wa) - wa + log(s);
    return r.round_to(target);
}

bool is_nonpositive_integer(const Complex& z) {
    return z.im().is_zero() && z.re().is_integer() && z.re().sign() <= 0;
}

// Re(z + M) >= a (1 + |Im z|) keeps the Spouge sum's argument principal.
long branch_safe_shift(const Complex& z, long a) {
    double x = z.re().to_double();
    double y = std::abs(z.im().to_double());
    double need = static_cast<double>(a) * (1.0 + y);
    if (x >= need) return 0;
    return static_cast<long>(std::ceil(need - x)) + 1;
}

}  // namespace

// lnGamma(z+M) - sum_k Log(z+k) with principal Logs; the recurrence holds for
// the principal branch everywhere off (-inf, 0] (continuity + discreteness).
// Real negative non-integer arguments take the limit from the upper side.
Complex log_gamma(const Complex& z, const PrecisionContext& ctx) {
    mpfr_prec_t target = ctx.work();
    if (is_nonpositive_integer(z)) throw DomainError("gamma pole");
    if (z.im().is_zero() && z.re().sign() > 0) {
        Real r(target);
        mpfr_lngamma(r.raw(), z.re().raw(), MPFR_RNDN);
        return Complex(r);
    }
    const SpougeTable& tab = spouge_table(target);
    long M = branch_safe_shift(z, tab.a);
    mpfr_prec_t wp = target + 32;
    Complex zz = z.round_to(wp);
    Complex s = log_gamma_spouge(zz + M, target).round_to(wp);
    Complex back = zz;
    for (long k = 0; k < M; ++k) {
        s = s - log(back);
        back = back + 1;
    }
    return s.round_to(target);
}

Complex gamma(const Complex& z, const PrecisionContext& ctx) {
    if (is_nonpositive_integer(z)) throw DomainError("gamma pole");
    if (z.im().is_zero()) {  // stay exact on the real axis (sign included)
        Real g(ctx.work());
        mpfr_gamma(g.raw(), z.re().raw(), MPFR_RNDN);
        return Complex(g);
    }
    return exp(log_gamma(z, ctx));
}

Complex digamma(const Complex& z, const PrecisionContext& ctx) {
    mpfr_prec_t target = ctx.work();
    if (is_nonpositive_integer(z)) throw DomainError("gamma pole");
    if (z.im().is_zero() && z.re().sign() > 0) {
        Real r(target);
        mpfr_digamma(r.raw(), z.re().raw(), MPFR_RNDN);
        return Complex(r);
    }
    // psi(z) = psi(z+M) - sum_k 1/(z+k): exact, branch-free
    const SpougeTable& tab = spouge_table(target);
    mpfr_prec_t wp = tab.wp;
    long M = 0;
    {
        double x = z.re().to_double();
        if (x < tab.a) M = static_cast<long>(std::ceil(tab.a - x)) + 1;
    }
    Complex w = z.round_to(wp) + M - 1;
    Complex s = Complex(tab.c[0]);
    Complex ds = Complex::zero(wp);
    for (long k = 1; k < tab.a; ++k) {
        Complex q = inv(w + k);
        Complex t = Complex(tab.c[k]) * q;
        s = s + t;
        ds = ds - t * q;
    }
    Complex wa = w + tab.a;
    Complex r = log(wa) + (w + Complex(Real::frac(1, 2, wp))) / wa - 1 + ds / s;
    Complex back = z.round_to(wp);
    for (long k = 0; k < M; ++k) {
        r = r - inv(back);
        back = back + 1;
    }
    return r.round_to(target);
}

Complex log_barnes_g(const Complex& z, const PrecisionContext& ctx) {
    mpfr_prec_t wp = ctx.work() + 32;
    Complex zz = z.round_to(wp);
    if (zz.is_zero()) return Complex::zero(ctx.work());
    // the segment [1, z+1] must avoid (-inf, 0]
    if (z.im().is_zero() && z.re() <= Real::of(-1L, wp))
        throw DomainError("barnes path error");
    PrecisionContext cw(wp, ctx.target_digits);
    Complex zp1 = zz + 1;
    Complex head = Complex(log(const_pi(wp) * 2)) * (zz / 2) - zz * zp1 / 2 +
                   zz * log_gamma(zp1, cw);
    // integral of logGamma(x+1) along x = z u, u in [0,1]; adaptive GL with doubling
    Real pi = const_pi(wp);
    auto integral = [&](int m) {
        const QuadRule& q = gauss_legendre(m, wp);
        Complex acc = Complex::zero(wp);
        Complex prev = Complex::zero(wp);
        bool havePrev = false;
        for (int i = 0; i < m; ++i) {
            Real u = (q.nodes[i] + 1) / 2;
            Complex lg = log_gamma(Complex::one(wp) + zz * u, cw);
            if (havePrev && abs(lg.im() - prev.im()) > pi)
                throw DomainError("barnes path error");
            prev = lg;
            havePrev = true;
            acc = acc + lg * q.weights[i];
        }
        return acc * (zz / 2);
    };
    int m = std::max<long>(64, ctx.bits / 2);
    Complex est = integral(m);
    Real tol = pow2(-(ctx.bits + 8), wp);
    for (int round = 0; round < 3; ++round) {
        Complex est2 = integral(2 * m);
        Real diff = abs(est2 - est);
        est = est2;
        m *= 2;
        if (diff <= tol * (abs(est) + 1)) break;
    }
    return (head - est).round_to(ctx.work());
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

Real zeta_prime_2(mpfr_prec_t prec) {
    mpfr_prec_t wp = prec + 64;
    long n = static_cast<long>(0.40 * static_cast<double>(wp)) + 24;
    // Borwein weights d_k; t_{i}/t_{i-1} = 4 (n+i-1)(n-i+1) / ((2i-1)(2i))
    std::vector<Real> d;
    d.reserve(n + 1);
    Real t = Real::frac(1, 1, wp) / n;  // t_0 = 1/n
    Real acc = t;
    d.push_back(acc * n);
    for (long i = 1; i <= n; ++i) {
        t = t * 4 * (n + i - 1) * (n - i + 1) / ((2 * i - 1) * (2 * i));
        acc = acc + t;
        d.push_back(acc * n);
    }
    // eta'(2) ~ (1/d_n) sum_{k=0}^{n-1} (-1)^k (d_k - d_n) log(k+1) / (k+1)^2
    Real etap = Real::zero(wp);
    for (long k = 0; k < n; ++k) {
        if (k == 0) continue;  // log(1) = 0
        Real term = (d[k] - d[n]) * log(Real::of(k + 1, wp)) / ((k + 1) * (k + 1));
        etap = (k % 2 == 0) ? etap + term : etap - term;
    }
    etap = etap / d[n];
    // zeta'(2) = 2 eta'(2) - log2 * zeta(2),  zeta(2) = pi^2/6
    Real pi = const_pi(wp);
    Real z2 = pi * pi / 6;
    return (etap * 2 - const_log2(wp) * z2).round_to(prec);
}

namespace {

Real log_glaisher(mpfr_prec_t prec) {
    mpfr_prec_t wp = prec + 32;
    Real pi = const_pi(wp);
    // log A = (log 2pi + gamma)/12 - zeta'(2)/(2 pi^2)
    Real r = (log(pi * 2) + const_euler_gamma(wp)) / 12 - zeta_prime_2(wp) / (pi * pi * 2);
    return r.round_to(prec);
}

}  // namespace

Real named_constant(const std::string& name, const PrecisionContext& ctx) {
    mpfr_prec_t p = ctx.work();
    if (name == "pi") return const_pi(p);
    if (name == "euler_gamma") return const_euler_gamma(p);
    if (name == "log_glaisher") return log_glaisher(p);
    if (name == "zeta_prime_minus1") return Real::frac(1, 12, p) - log_glaisher(p);
    throw DomainError("named_constant: unknown name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Bessel I series
// ---------------------------------------------------------------------------

namespace {

std::optional<long> integer_order(const Complex& a) {
    if (!a.im().is_zero() || !a.re().is_integer()) return std::nullopt;
    double d = a.re().to_double();
    if (std::abs(d) > 1e15) return std::nullopt;
    return a.re().to_long();
}

}  // namespace

BesselSeriesReport bessel_i(const Complex& order, const Real& t, const PrecisionContext& ctx) {
    if (t.sign() < 0) throw DomainError("bessel_i: t must be >= 0");
    auto intord = integer_order(order);
    if (t.is_zero()) {
        mpfr_prec_t p = ctx.work();
        if (intord) {
            Complex v = (*intord == 0) ? Complex::one(p) : Complex::zero(p);
            return {v, 1, Real::of(1L, p), 0};
        }
        if (order.re().sign() > 0) return {Complex::zero(p), 1, Real::zero(p), 0};
        throw DomainError("bessel_i: undefined at t=0 for non-integer order with Re <= 0");
    }

    // poles of 1/Gamma(j+a+1) are exact zeros: for a = -m start at j = m
    long j0 = 0;
    Complex a = order;
    if (intord && *intord < 0) {
        j0 = -*intord;
    }

    mpfr_prec_t wp = ctx.work() + 32;
    double tdbl = t.to_double();
    for (int attempt = 0; attempt < 5; ++attempt) {
        PrecisionContext cw(wp, ctx.target_digits);
        Complex aw = a.round_to(wp);
        Real tw = t.round_to(wp);
        Real t24 = tw * tw / 4;
        // T_{j0} = (t^2/4)^{j0} / (j0! Gamma(j0 + a + 1))
        Complex term = exp(-log_gamma(aw + (j0 + 1), cw));
        for (long j = 1; j <= j0; ++j) term = term * t24 / j;
        Complex partial = term;
        Real maxmag = abs(term);
        Real stop = pow2(-(ctx.bits + ctx.guard_bits), wp);
        long j = j0;
        const long jcap = 2000000;
        while (true) {
            Complex denom = (aw + (j + 1)) * (j + 1);
            term = term * t24 / denom;
            ++j;
            partial = partial + term;
            Real m = abs(term);
            if (m > maxmag) maxmag = m;
            if (j > jcap) throw PrecisionError("bessel_i: series did not terminate");
            if (static_cast<double>(j) > tdbl / 2 && j > j0 + 4) {
                if (m < stop * abs(partial)) break;
            }
        }
        // prefactor (t/2)^a
        Complex pref = exp(aw * Complex(log(tw / 2)));
        Complex value = pref * partial;
        Real absval = abs(partial);
        long cancel = 0;
        if (!absval.is_zero()) {
            long diff = static_cast<long>(mpfr_get_exp(maxmag.raw())) -
                        static_cast<long>(mpfr_get_exp(absval.raw()));
            cancel = diff > 0 ? diff : 0;
        }
        if (cancel + ctx.bits + ctx.guard_bits + 16 <= wp) {
            return {value.round_to(ctx.work()), j + 1 - j0, (maxmag * abs(pref)).round_to(ctx.work()),
                    cancel};
        }
        wp = ctx.bits + ctx.guard_bits + static_cast<mpfr_prec_t>(cancel) + 64;
    }
    throw PrecisionError("bessel_i: precision escalation failed");
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

Complex MomentTable::moment(int k, const Complex& nu, const Real& t, const PrecisionContext& ctx) {
    if (std::abs(k) > n_max_) throw DomainError("moment: |k| exceeds configured n_max");
    std::string key = std::to_string(k) + "|" + nu.re().serialize() + "," + nu.im().serialize() +
                      "|" + t.serialize() + "|" + std::to_string(static_cast<long>(ctx.bits));
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Complex a = -nu - k;
    Complex v = bessel_i(a, t, ctx).value;
    std::lock_guard<std::mutex> lock(mu_);
    auto [pos, _] = cache_.emplace(key, v);  // idempotent: values are deterministic
    return pos->second;
}

std::size_t MomentTable::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

void MomentTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::lock_guard<std::mutex> lock(mu_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto kpos = line.find("\"key\":\"");
        auto rpos = line.find("\"re\":");
        auto ipos = line.find("\"im\":");
        if (kpos == std::string::npos || rpos == std::string::npos || ipos == std::string::npos)
            continue;
        auto kend = line.find('"', kpos + 7);
        std::string key = line.substr(kpos + 7, kend - kpos - 7);
        Real re = deserialize_tagged(line.substr(rpos));
        Real im = deserialize_tagged(line.substr(ipos));
        cache_.emplace(key, Complex(re, im));
    }
}

void MomentTable::save(const std::string& path) const {
    std::ofstream out(path);
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [key, val] : cache_) {
        out << "{\"key\":\"" << key << "\",\"re\":" << serialize_tagged(val.re())
            << ",\"im\":" << serialize_tagged(val.im()) << "}\n";
    }
}

// ---------------------------------------------------------------------------
// Hankel-loop quadrature
// ---------------------------------------------------------------------------

HankelContour HankelContour::make(const Real& t, double max_power, const PrecisionContext& ctx,
                                  int nodes) {
    double td = std::max(t.to_double(), 1e-6);
    double need = (static_cast<double>(ctx.bits + ctx.guard_bits) + 16) * 0.6931471805599453;
    double R = 4;
    while (td / 2 * (R + 1 / R) - std::max(max_power, 0.0) * std::log(R) < need) {
        R *= 2;
        if (R > 1e300) throw DomainError("contour truncation too small");
    }
    HankelContour c{Real::of(1L, ctx.work()), Real::of(R, ctx.work()),
                    nodes > 0 ? nodes
                              : static_cast<int>(std::max<long>(128, ctx.bits + static_cast<long>(td)))};
    return c;
}

bool HankelContour::tail_ok(const Real& t, double max_power, const PrecisionContext& ctx) const {
    double td = t.to_double();
    double R = ray_truncation.to_double();
    double logtail = -td / 2 * (R + 1 / R) + std::max(max_power, 0.0) * std::log(R);
    return logtail < -static_cast<double>(ctx.bits) * 0.6931471805599453;
}

ContourNodes hankel_nodes(const Complex& nu, const Real& t, const HankelContour& contour,
                          const PrecisionContext& ctx) {
    mpfr_prec_t wp = ctx.work() + 32;
    ContourNodes out;
    Real pi = const_pi(wp);
    int m = contour.nodes_per_segment;
    const QuadRule& q = gauss_legendre(m, wp);
    Complex nuw = nu.round_to(wp);
    Real tw = t.round_to(wp);

    // circle |s| = 1: ds/(2 pi i s) = dtheta/2pi, w(s) = e^{t cos th} e^{i nu th}
    for (int i = 0; i < m; ++i) {
        Real th = q.nodes[i] * pi;
        Real s_(wp), c_(wp);
        mpfr_sin_cos(s_.raw(), c_.raw(), th.raw(), MPFR_RNDN);
        Complex s(c_, s_);
        Complex wexp = exp(Complex(tw * c_) + nuw * Complex(Real::zero(wp), th));
        out.s.push_back(s);
        out.w.push_back(wexp * (q.weights[i] / 2));
    }

    // rays on the lips: combined weight (sin pi nu / pi) e^{nu u - t cosh u} du, s = -e^u
    Complex spn = sin_pi(nuw);
    if (!spn.is_zero()) {
        Real U = log(contour.ray_truncation.round_to(wp));
        int panels = std::max(1, static_cast<int>(std::ceil(U.to_double())));
        Real h = U / panels;
        for (int pnl = 0; pnl < panels; ++pnl) {
            Real a = h * pnl;
            for (int i = 0; i < m; ++i) {
                Real u = a + (q.nodes[i] + 1) * h / 2;
                Real x = exp(u);
                Complex weight = spn / pi * exp(nuw * Complex(u) - Complex(tw * cosh(u))) *
                                 (q.weights[i] * h / 2);
                out.s.push_back(Complex(-x, Real::zero(wp)));
                out.w.push_back(weight);
            }
        }
    }
    return out;
}

Complex moment_quadrature(int k, const Complex& nu, const Real& t, const HankelContour& contour,
                          const PrecisionContext& ctx) {
    double max_power = std::abs(k) + std::abs(nu.re().to_double()) + 1;
    if (!contour.tail_ok(t, max_power, ctx) && !(t.is_zero() && nu.is_zero()))
        throw DomainError("contour truncation too small");
    ContourNodes nodes = hankel_nodes(nu, t, contour, ctx);
    mpfr_prec_t wp = ctx.work() + 32;
    Complex acc = Complex::zero(wp);
    for (std::size_t i = 0; i < nodes.s.size(); ++i) {
        acc = acc + nodes.w[i] * ipow(nodes.s[i], k);
    }
    return acc.round_to(ctx.work());
}

}  // namespace gww
