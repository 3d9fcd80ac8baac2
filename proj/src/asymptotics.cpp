#include "gww/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace gww {

const char* quantity_tag(Quantity q) {
    switch (q) {
        case Quantity::LogDet: return "logD";
        case Quantity::Yminus1_11: return "Yminus1_11";
        case Quantity::RatioY21: return "ratio_Y21";
        case Quantity::Y12_0: return "Y12_0";
        case Quantity::Y11_0: return "Y11_0";
        case Quantity::Y22_0: return "Y22_0";
        case Quantity::DnuLogDet: return "dnu_logD";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Sub-critical regime
// ---------------------------------------------------------------------------

namespace {

bool is_positive_integer(const Complex& nu) {
    return nu.im().is_zero() && nu.re().is_integer() && nu.re().sign() > 0;
}

void check_sub_tau(const Real& tau) {
    if (!(tau > 0.05) || !(tau <= 0.9))
        throw DomainError("sub regime requires tau in (0.05, 0.9]");
}

void check_super_tau(const Real& tau) {
    if (!(tau >= 1.1) || !(tau > 0 && tau <= 10.0))
        throw DomainError("super regime requires tau in [1.1, 10]");
}

}  // namespace

SubGeometry sub_geometry(const Real& tau, const Complex& nu, const PrecisionContext& ctx) {
    check_sub_tau(tau);
    mpfr_prec_t wp = ctx.work();
    Real tw = tau.round_to(wp);
    Real s = sqrt(1 - tw * tw);
    Real zm = (-1 - s) / tw;
    Real zp = (-1 + s) / tw;
    Real phire = tw / 2 * (zm - 1 / zm) + log(-zm);
    Real zm2 = zm * zm;
    Real phi2 = -tw / (zm2 * zm) - 1 / zm2;
    Real phi3 = tw * 3 / (zm2 * zm2) + 2 / (zm2 * zm);
    Real l1 = sqrt(-phi2);
    Real l2 = -phi3 / (l1 * 3);
    Complex d1 = Complex(sqrt(const_pi(wp) * 2)) * exp(-log_gamma(Complex::one(wp) - nu.round_to(wp), ctx));
    return SubGeometry{tw,  nu.round_to(wp), zp,       zm, s, Complex(phire, const_pi(wp)),
                       phi2, phi3,           l1,       l2, d1};
}

namespace {

// Re phi(z) for complex z, principal log
Real re_phi(const Complex& z, const Real& tau) {
    Complex p = Complex(tau / 2) * (z - inv(z)) + log(z);
    return p.re();
}

}  // namespace

SignProbeReport phi_sign_probe(const Real& tau, const PrecisionContext& ctx) {
    check_sub_tau(tau);
    mpfr_prec_t wp = ctx.work();
    SubGeometry g = sub_geometry(tau, Complex::zero(wp), ctx);
    Real pi = const_pi(wp);
    Real zero = Real::zero(wp);
    Real worst_circle = zero, worst_inner = Real::of(-1e300, wp), worst_outer = Real::of(1e300, wp),
         worst_ray = Real::of(-1e300, wp);
    const int M = 48;
    Real phizm_re = g.phi_zm.re();
    for (int i = 0; i < M; ++i) {
        Real th = pi * (2 * i + 1) / (2 * M);  // avoid exact 0 and pi endpoints
        Real sn(wp), cs(wp);
        mpfr_sin_cos(sn.raw(), cs.raw(), th.raw(), MPFR_RNDN);
        Complex on_circle(cs, sn);
        Real v = abs(re_phi(on_circle, g.tau));
        if (v > worst_circle) worst_circle = v;
        Complex inner = on_circle * (-g.z_plus);
        Real vi = re_phi(inner, g.tau) - phizm_re;
        if (vi > worst_inner) worst_inner = vi;
        // exclude a neighbourhood of z- itself on the outer circle
        if (!(abs(th - pi) < pi / 8)) {
            Complex outer = on_circle * (-g.z_minus);
            Real vo = re_phi(outer, g.tau) - phizm_re;
            if (vo < worst_outer) worst_outer = vo;
        }
    }
    for (int i = 1; i <= M; ++i) {
        // x sweeps (-inf, z+) via z- * scale and z+ - small, excluding z- neighbourhood
        Real x = g.z_plus - Real::frac(i, 4, wp);
        if (abs(x - g.z_minus) < abs(g.z_minus) / 8) continue;
        Real v = re_phi(Complex(x, pow2(-ctx.bits, wp)), g.tau) - phizm_re;
        if (v > worst_ray) worst_ray = v;
    }
    bool pass = worst_circle < pow2(-ctx.bits / 2, wp) && worst_inner.sign() < 0 &&
                worst_outer.sign() > 0 && worst_ray.sign() < 0;
    return {worst_circle, worst_inner, worst_outer, worst_ray, pass};
}

Complex thm1_prediction(long n, const Complex& nu0, const Real& tau, const PrecisionContext& ctx,
                        bool symmetry_fallback) {
    check_sub_tau(tau);
    mpfr_prec_t wp = ctx.work();
    Complex nu = nu0.round_to(wp);
    if (is_positive_integer(nu)) {
        if (!symmetry_fallback) throw DomainError("thm1_prediction: positive integer nu");
        nu = -nu;
    }
    Real tw = tau.round_to(wp);
    Real s = sqrt(1 - tw * tw);
    Real logn = log(Real::of(n, wp));
    Complex r = Complex(Real::of(n, wp) * n * tw * tw / 4);
    r = r + nu * Complex((log((1 + s) / tw) - s) * n);
    r = r - nu * nu * Complex(logn / 2);
    r = r + nu * Complex(log(const_pi(wp) * 2) / 2);
    r = r - nu * nu * Complex(log(1 - tw * tw) / 4);
    r = r + log_barnes_g(-nu, PrecisionContext(wp, ctx.target_digits));
    return r.round_to(ctx.work());
}

Complex thm2_prediction(long n, const Complex& nu0, const Real& tau, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work();
    Complex nu = nu0.round_to(wp);
    Real tw = tau.round_to(wp);
    Real logn = log(Real::of(n, wp));
    Complex r = Complex((tw - Real::frac(3, 4, wp) - log(tw) / 2) * n * n);
    r = r - Complex(logn / 12);
    r = r + (nu * nu / 2 - Complex(Real::frac(1, 8, wp))) * Complex(log(1 - 1 / tw));
    r = r + Complex(named_constant("zeta_prime_minus1", PrecisionContext(wp, ctx.target_digits)));
    return r.round_to(ctx.work());
}

Real free_energy(const Real& tau, const PrecisionContext& ctx) {
    if (tau.sign() <= 0) throw DomainError("free_energy: tau > 0 required");
    mpfr_prec_t wp = ctx.work();
    Real tw = tau.round_to(wp);
    if (tw < Real::of(1L, wp)) return tw * tw / 4;
    if (tw == Real::of(1L, wp)) return Real::frac(1, 4, wp);
    return tw - log(tw) / 2 - Real::frac(3, 4, wp);
}

ThirdOrderGap third_order_gap(const Real& tau, const PrecisionContext& ctx) {
    if (!(tau > 0.5) || !(tau < 2.0)) throw DomainError("third_order_gap: tau in (0.5, 2)");
    mpfr_prec_t wp = ctx.work();
    Real tw = tau.round_to(wp);
    Real g = tw - log(tw) / 2 - Real::frac(3, 4, wp) - tw * tw / 4;
    Real u = tw - 1;
    return {g, g + u * u * u / 6};
}

std::vector<PredictionRow> sub_y_predictions(long n, const Complex& nu, const Real& tau,
                                             const PrecisionContext& ctx) {
    check_sub_tau(tau);
    if (is_positive_integer(nu)) throw DomainError("sub_y_predictions: d1 pole at positive integer nu");
    mpfr_prec_t wp = ctx.work();
    SubGeometry g = sub_geometry(tau, nu, ctx);
    Complex nw = g.nu;
    Real tw = g.tau;
    Real rn = Real::of(n, wp);
    Complex zm(g.z_minus);
    Complex tpz(tw + g.z_minus);  // tau + z-
    std::vector<PredictionRow> rows;

    // (Y_-1)_11 = -(n/2) tau - nu z- - (1/2n) nu^2 (z-)^2 tau/(tau+z-)^2
    Complex ym1 = Complex(-rn * tw / 2) - nw * zm -
                  nw * nw * zm * zm * Complex(tw) / (tpz * tpz) / (2 * n);
    rows.push_back({Quantity::Yminus1_11, n, ym1.round_to(ctx.work()), -1.5, false});

    // d/dz log Y21(0; n+1)
    Complex ratio = Complex(-rn * tw / 2) + nw / zm +
                    nw / n *
                        (Complex(tw) / (zm * zm * Complex(g.sqrt_1mt2)) - inv(zm) -
                         nw * Complex(tw) / (tpz * tpz) / 2 + (nw + 1) / tpz);
    rows.push_back({Quantity::RatioY21, n, ratio.round_to(ctx.work()), -1.5, false});

    // Y12(0;n) = (1 + (1/n)(nu^2 z- tau/(2(tau+z-)^2) - nu(nu-1) z-/(2(tau+z-)))) |z-|^nu
    Complex y12 = (Complex::one(wp) +
                   (nw * nw * zm * Complex(tw) / (tpz * tpz) / 2 - nw * (nw - 1) * zm / tpz / 2) / n) *
                  pow(-g.z_minus, nw);
    rows.push_back({Quantity::Y12_0, n, y12.round_to(ctx.work()), -1.5, false});

    // exp(n phi(z-)) = (-1)^n e^{n Re phi(z-)}
    Real en = exp(rn * g.phi_zm.re());
    Real sgn = (n % 2 == 0) ? Real::of(1L, wp) : Real::of(-1L, wp);
    Real azm = -g.z_minus;  // |z-|
    Complex y11 = -g.d1 * nw * pow(g.lambda1, -nw * 2 - 1) * pow(azm, -nw * 2 - 1) *
                  pow(rn, -nw - Complex(Real::frac(1, 2, wp))) * Complex(sgn * en);
    rows.push_back({Quantity::Y11_0, n, y11.round_to(ctx.work()), -0.5, true});

    Complex y22 = inv(g.d1) * pow(g.lambda1, nw * 2 - 1) * pow(azm, nw * 2 - 1) *
                  pow(rn, nw - Complex(Real::frac(1, 2, wp))) * Complex(sgn / en);
    rows.push_back({Quantity::Y22_0, n, y22.round_to(ctx.work()), -0.5, true});
    return rows;
}

std::vector<PredictionRow> super_y_predictions(long n, const Complex& nu, const Real& tau,
                                               const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work();
    Complex nw = nu.round_to(wp);
    Real tw = tau.round_to(wp);
    Real rn = Real::of(n, wp);
    Real t = rn * tw;
    Real tm1 = tw - 1;
    std::vector<PredictionRow> rows;

    Complex ym1 = Complex(-t * (1 / tw - 1 / (tw * tw * 2))) + nw / tw +
                  (Complex::one(wp) - nw * nw * 4) / Complex(rn * tm1 * tw * 8);
    rows.push_back({Quantity::Yminus1_11, n, ym1.round_to(ctx.work()), -2.0, false});

    Complex ratio = Complex(-t * (1 / tw - 1 / (tw * tw * 2))) - nw / tw +
                    Complex(1 / (rn * tm1 * tw * 8)) - nw * nw / Complex(rn * tm1 * tw * 2);
    rows.push_back({Quantity::RatioY21, n, ratio.round_to(ctx.work()), -2.0, false});

    Real ell = -tw + log(tw) + 1;
    Complex y12 = Complex(exp(-rn * ell) / sqrt(tw)) *
                  (Complex::one(wp) +
                   (Complex(3 / tm1 + 2) - nw * nw * Complex(12 / tm1)) / (24 * n));
    rows.push_back({Quantity::Y12_0, n, y12.round_to(ctx.work()), -2.0, true});

    Real sgn = (n % 2 == 0) ? Real::of(1L, wp) : Real::of(-1L, wp);
    Real base = 1 - 1 / tw;
    Complex y11 = Complex(sgn) * pow(base, nw + Complex(Real::frac(1, 2, wp)));
    rows.push_back({Quantity::Y11_0, n, y11.round_to(ctx.work()), -2.0, true});
    Complex y22 = Complex(sgn) * pow(base, -nw + Complex(Real::frac(1, 2, wp)));
    rows.push_back({Quantity::Y22_0, n, y22.round_to(ctx.work()), -2.0, true});
    return rows;
}

Complex dnu_logD_prediction(long n, const Complex& nu, const Real& tau, Regime regime,
                            const PrecisionContext& ctx) {
    mpfr_prec_t wp = ctx.work();
    Complex nw = nu.round_to(wp);
    Real tw = tau.round_to(wp);
    if (regime == Regime::Super) {
        check_super_tau(tau);
        return (nw * Complex(log(1 - 1 / tw))).round_to(ctx.work());
    }
    check_sub_tau(tau);
    if (is_positive_integer(nu)) throw DomainError("dnu_logD_prediction: Gamma pole at positive integer nu");
    SubGeometry g = sub_geometry(tau, nu, ctx);
    Real rn = Real::of(n, wp);
    // n log(-z-) + (n tau/2)(z- - 1/z-) - nu log n - nu + 1/2 - (nu/2) log(1-tau^2)
    //   - nu * d/dnu log Gamma(1-nu)      [= + nu psi(1-nu)]
    Complex r = Complex(log(-g.z_minus) * rn);
    r = r + Complex(rn * tw / 2 * (g.z_minus - 1 / g.z_minus));
    r = r - nw * Complex(log(rn));
    r = r - nw + Complex(Real::frac(1, 2, wp));
    r = r - nw * Complex(log(1 - tw * tw) / 2);
    r = r + nw * digamma(Complex::one(wp) - nw, PrecisionContext(wp, ctx.target_digits));
    return r.round_to(ctx.work());
}

// ---------------------------------------------------------------------------
// Super-critical machinery
// ---------------------------------------------------------------------------

SuperGeometry super_geometry(const Real& tau, const Complex& nu, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work();
    Real tw = tau.round_to(wp);
    Real thc = asin(1 / sqrt(tw)) * 2;
    Real sn(wp), cs(wp);
    Real half = thc / 2;
    mpfr_sin_cos(sn.raw(), cs.raw(), thc.raw(), MPFR_RNDN);
    Complex xi(cs, sn);
    Real ell = -tw + log(tw) + 1;
    Complex dinf = pow(cos(half), nu.round_to(wp));
    return {tw, nu.round_to(wp), thc, xi, ell, dinf};
}

Complex arc_sqrt(const Complex& z, const Real& theta_c) {
    mpfr_prec_t wp = std::max(z.prec(), theta_c.prec());
    Real c = cos(theta_c.round_to(wp));
    Complex w = z * z - Complex(c * 2) * z + 1;
    Complex s = sqrt(w);  // principal
    // left of the curve {Re z = cos theta_c (|Im| > sin theta_c)} + arc: flip
    bool left = (z.re() < c) || (abs(z) < Real::of(1L, wp));
    return left ? -s : s;
}

Complex szego_d(const Complex& z, const SuperGeometry& geo) {
    Real c2 = cos(geo.theta_c / 2) * 2;
    Complex phi_c = (z + 1 - arc_sqrt(z, geo.theta_c)) / Complex(c2);
    return pow(phi_c, geo.nu);
}

namespace {

// density against dtheta at theta (minus-side boundary value of the arc sqrt)
Real rho_theta(const Real& theta, const Real& tau, const Real& theta_c, mpfr_prec_t wp) {
    Real sn(wp), cs(wp);
    mpfr_sin_cos(sn.raw(), cs.raw(), theta.raw(), MPFR_RNDN);
    Complex s(cs, sn);
    Real c = cos(theta_c);
    Complex r = sqrt(s * s - Complex(c * 2) * s + 1);  // principal = minus side on the arc
    Complex val = (Complex::one(wp) + inv(s)) * r * Complex(tau / (const_pi(wp) * 4));
    return val.re();
}

}  // namespace

Real psi_density(const Real& theta, const Real& tau, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work();
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), ctx);
    if (abs(theta) > geo.theta_c) throw DomainError("psi_density: theta outside the arc");
    return rho_theta(theta.round_to(wp), geo.tau, geo.theta_c, wp);
}

Real equilibrium_mass(const Real& tau, const PrecisionContext& ctx, int nodes) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work();
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), ctx);
    int m = nodes > 0 ? nodes : std::max<long>(200, ctx.bits / 2);
    const QuadRule& q = gauss_legendre(m, wp);
    Real pi = const_pi(wp);
    Real acc = Real::zero(wp);
    // theta = theta_c sin(u), u in (-pi/2, pi/2): endpoint sqrt absorbed
    for (int i = 0; i < m; ++i) {
        Real u = q.nodes[i] * pi / 2;
        Real su(wp), cu(wp);
        mpfr_sin_cos(su.raw(), cu.raw(), u.raw(), MPFR_RNDN);
        Real th = geo.theta_c * su;
        acc = acc + q.weights[i] * rho_theta(th, geo.tau, geo.theta_c, wp) * geo.theta_c * cu;
    }
    return acc * pi / 2;  // u = (pi/2) x maps the rule from [-1,1]
}

// ---------------------------------------------------------------------------
// g-function with branch sweep
// ---------------------------------------------------------------------------

namespace {

struct Panel {
    Real a, b;  // in u, theta = theta_c sin u
};

// dyadic subdivision of [a,b] refining toward `end` (one of a or b) down to hmin
void push_dyadic(std::vector<Panel>& out, const Real& a, const Real& b, bool toward_b,
                 const Real& hmin) {
    if (toward_b) {
        Real x = a;
        while (b - x > hmin) {
            Real step = (b - x) / 2;
            out.push_back({x, x + step});
            x = x + step;
        }
        out.push_back({x, b});
    } else {
        std::vector<Panel> rev;
        Real x = b;
        while (x - a > hmin) {
            Real step = (x - a) / 2;
            rev.push_back({x - step, x});
            x = x - step;
        }
        rev.push_back({a, x});
        out.insert(out.end(), rev.rbegin(), rev.rend());
    }
}

// continuous-argument advance: returns arg(z - e^{i th_to}) continued from
// (th_from, A_from); bisects in theta until increments are unambiguous.
Real sweep_advance(const Complex& z, const Real& th_from, const Real& th_to, const Real& A_from,
                   int depth = 0) {
    mpfr_prec_t wp = z.prec();
    Real pi = const_pi(wp);
    Real sn(wp), cs(wp);
    mpfr_sin_cos(sn.raw(), cs.raw(), th_to.raw(), MPFR_RNDN);
    Real a_p = arg(z - Complex(cs, sn));
    Real k = floor((A_from - a_p) / (pi * 2) + Real::frac(1, 2, wp));
    Real cand = a_p + k * pi * 2;
    if (abs(cand - A_from) < 2.0 || depth > static_cast<int>(wp)) return cand;
    Real mid = (th_from + th_to) / 2;
    Real Amid = sweep_advance(z, th_from, mid, A_from, depth + 1);
    return sweep_advance(z, mid, th_to, Amid, depth + 1);
}

}  // namespace

Complex g_function(const Complex& z, const Real& tau, const PrecisionContext& ctx,
                   std::optional<Real> near_theta, std::optional<Real> offset) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), PrecisionContext(wp, ctx.target_digits));
    Complex zz = z.round_to(wp);
    Real pi = const_pi(wp);
    Real half_pi = pi / 2;

    std::vector<Panel> panels;
    int base = 8;
    if (!near_theta) {
        for (int k = 0; k < base; ++k)
            panels.push_back({-half_pi + half_pi * 2 * k / base, -half_pi + half_pi * 2 * (k + 1) / base});
    } else {
        Real ustar = asin(near_theta->round_to(wp) / geo.theta_c);
        Real off = offset ? offset->round_to(wp) : pow2(-ctx.bits / 3, wp);
        // panel floor ~ offset/4 expressed in u units
        Real cu = cos(ustar);
        if (cu < Real::frac(1, 16, wp)) cu = Real::frac(1, 16, wp);
        Real hmin = off / (geo.theta_c * cu * 4);
        push_dyadic(panels, -half_pi, ustar, true, hmin);
        push_dyadic(panels, ustar, half_pi, false, hmin);
    }

    int m = std::max<long>(32, ctx.bits / 8);
    const QuadRule& q = gauss_legendre(m, wp);

    // branch anchor: at theta = -pi the cut of log(z - e^{i theta}) degenerates
    // to (-inf, -1], where the principal Arg(z+1) is the continued value.
    Real A = arg(zz + 1);
    Real th_prev = -pi;

    Complex acc = Complex::zero(wp);
    for (const Panel& p : panels) {
        Real ha = (p.b - p.a) / 2;
        Real mid = (p.a + p.b) / 2;
        for (int i = 0; i < m; ++i) {
            Real u = mid + ha * q.nodes[i];
            Real su(wp), cu(wp);
            mpfr_sin_cos(su.raw(), cu.raw(), u.raw(), MPFR_RNDN);
            Real th = geo.theta_c * su;
            A = sweep_advance(zz, th_prev, th, A);
            th_prev = th;
            Real sn(wp), cs(wp);
            mpfr_sin_cos(sn.raw(), cs.raw(), th.raw(), MPFR_RNDN);
            Complex d = zz - Complex(cs, sn);
            Complex logd(log(abs(d)), A);
            Real weight = q.weights[i] * ha * rho_theta(th, geo.tau, geo.theta_c, wp) * geo.theta_c * cu;
            acc = acc + logd * Complex(weight);
        }
    }
    return acc.round_to(ctx.work());
}

namespace {

// integrand of the phi integrals
Complex phi_integrand(const Complex& s, const Real& tau, const Real& theta_c) {
    return Complex(-tau / 4) * (s + 1) / (s * s) * arc_sqrt(s, theta_c);
}

}  // namespace

Complex phi_on_circle(const Real& theta, const Real& tau, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), PrecisionContext(wp, ctx.target_digits));
    Real th = theta.round_to(wp);
    if (abs(th) < geo.theta_c) throw DomainError("phi_on_circle: point on the arc, use phi_arc_side");
    Real start = th.sign() >= 0 ? geo.theta_c : -geo.theta_c;
    // s = e^{i a}, a = start + (th-start) v^2: quadratic map absorbs the sqrt vanishing at xi
    int m = std::max<long>(48, ctx.bits / 4);
    const QuadRule& q = gauss_legendre(m, wp);
    Complex acc = Complex::zero(wp);
    Real span = th - start;
    for (int i = 0; i < m; ++i) {
        Real v = (q.nodes[i] + 1) / 2;
        Real a = start + span * v * v;
        Real sn(wp), cs(wp);
        mpfr_sin_cos(sn.raw(), cs.raw(), a.raw(), MPFR_RNDN);
        Complex s(cs, sn);
        Complex ds = Complex(Real::zero(wp), Real::of(1L, wp)) * s * Complex(span * v * 2);
        acc = acc + phi_integrand(s, geo.tau, geo.theta_c) * ds * Complex(q.weights[i] / 2);
    }
    return acc.round_to(ctx.work());
}

Complex phi_segment(const Complex& z, const Real& tau, const PrecisionContext& ctx, bool tilde) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), PrecisionContext(wp, ctx.target_digits));
    Complex start = tilde ? conj(geo.xi) : geo.xi;
    Complex zz = z.round_to(wp);
    Complex span = zz - start;
    // crossing pre-checks: the segment must stay off the arc and (-inf, 0];
    // a crossing of the unit circle counts only at angles inside the open arc
    {
        const int probes = 128;
        Real prev_r = abs(start) - 1;
        for (int i = 1; i <= probes; ++i) {
            Complex s = start + span * Real::frac(i, probes, wp);
            if (s.im().is_zero() && s.re().sign() <= 0)
                throw DomainError("phi_segment: path crosses (-inf, 0]");
            Real cur_r = abs(s) - 1;
            if (prev_r.sign() * cur_r.sign() < 0) {
                Complex mid = start + span * Real::frac(2 * i - 1, 2 * probes, wp);
                if (abs(arg(mid)) < geo.theta_c - Real::frac(1, 100, wp))
                    throw DomainError("phi_segment: path crosses the arc");
            }
            prev_r = cur_r;
        }
    }
    int m = std::max<long>(48, ctx.bits / 4);
    const QuadRule& q = gauss_legendre(m, wp);
    Complex acc = Complex::zero(wp);
    for (int i = 0; i < m; ++i) {
        Real v = (q.nodes[i] + 1) / 2;
        Complex s = start + span * (v * v);
        Complex ds = span * Complex(v * 2);
        acc = acc + phi_integrand(s, geo.tau, geo.theta_c) * ds * Complex(q.weights[i] / 2);
    }
    return acc.round_to(ctx.work());
}

Complex phi_arc_side(const Real& theta, const Real& tau, int side, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), PrecisionContext(wp, ctx.target_digits));
    Real th = theta.round_to(wp);
    if (abs(th) > geo.theta_c) throw DomainError("phi_arc_side: theta outside the arc");
    int m = std::max<long>(48, ctx.bits / 4);
    const QuadRule& q = gauss_legendre(m, wp);
    Complex acc = Complex::zero(wp);
    Real span = th - geo.theta_c;
    for (int i = 0; i < m; ++i) {
        Real v = (q.nodes[i] + 1) / 2;
        Real a = geo.theta_c + span * v * v;
        Real sn(wp), cs(wp);
        mpfr_sin_cos(sn.raw(), cs.raw(), a.raw(), MPFR_RNDN);
        Complex s(cs, sn);
        // one-sided sqrt on the arc: minus side (outside) is the principal value
        Complex r = sqrt(s * s - Complex(cos(geo.theta_c) * 2) * s + 1);
        if (side > 0) r = -r;
        Complex integ = Complex(-geo.tau / 4) * (s + 1) / (s * s) * r;
        Complex ds = Complex(Real::zero(wp), Real::of(1L, wp)) * s * Complex(span * v * 2);
        acc = acc + integ * ds * Complex(q.weights[i] / 2);
    }
    return acc.round_to(ctx.work());
}

Real euler_lagrange_residual(const Real& theta, const Real& tau, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    PrecisionContext cw(wp, ctx.target_digits);
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), cw);
    Real th = theta.round_to(wp);
    if (!(abs(th) < geo.theta_c)) throw DomainError("euler_lagrange_residual: |theta| < theta_c required");
    Real sn(wp), cs(wp);
    mpfr_sin_cos(sn.raw(), cs.raw(), th.raw(), MPFR_RNDN);
    Complex z0(cs, sn);
    Real delta = pow2(-ctx.bits / 3, wp);
    Complex zi = z0 * Complex(1 - delta);
    Complex zo = z0 * Complex(1 + delta);
    Complex gi = g_function(zi, tau, cw, th, delta);
    Complex go = g_function(zo, tau, cw, th, delta);
    Complex V = Complex(-geo.tau / 2) * (z0 + inv(z0));
    Complex res = gi + go - V + Complex(geo.ell) - log(z0) - Complex(Real::zero(wp), const_pi(wp));
    return abs(res).round_to(ctx.work());
}

JumpChecks g_jump_checks(const Real& tau, const PrecisionContext& ctx) {
    check_super_tau(tau);
    mpfr_prec_t wp = ctx.work() + 32;
    PrecisionContext cw(wp, ctx.target_digits);
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), cw);
    Real pi = const_pi(wp);
    Real delta = pow2(-ctx.bits / 3, wp);
    Complex two_pi_i(Real::zero(wp), pi * 2);

    // C2 at theta = theta_c/3
    Real th = geo.theta_c / 3;
    Real sn(wp), cs(wp);
    mpfr_sin_cos(sn.raw(), cs.raw(), th.raw(), MPFR_RNDN);
    Complex z0(cs, sn);
    Complex jump = g_function(z0 * Complex(1 - delta), tau, cw, th, delta) -
                   g_function(z0 * Complex(1 + delta), tau, cw, th, delta);
    Complex php = phi_arc_side(th, tau, +1, cw);
    Complex phm = phi_arc_side(th, tau, -1, cw);
    Real j1 = abs(jump + php * 2);
    Real j2 = abs(jump - phm * 2);

    // C1 upper/lower at angle theta_c + (pi - theta_c)/2
    Real th1 = geo.theta_c + (pi - geo.theta_c) / 2;
    mpfr_sin_cos(sn.raw(), cs.raw(), th1.raw(), MPFR_RNDN);
    Complex zu(cs, sn);
    Complex ju = g_function(zu * Complex(1 - delta), tau, cw) -
                 g_function(zu * Complex(1 + delta), tau, cw);
    Complex zl(cs, -sn);
    Complex jl = g_function(zl * Complex(1 - delta), tau, cw) -
                 g_function(zl * Complex(1 + delta), tau, cw);

    // (-inf, -1) at z = -3; the paper's +side is the lower lip here
    Complex zneg = Complex(Real::of(-3L, wp), Real::zero(wp));
    Complex jn = g_function(zneg - Complex(Real::zero(wp), delta), tau, cw) -
                 g_function(zneg + Complex(Real::zero(wp), delta), tau, cw);

    return {j1.round_to(ctx.work()),
            j2.round_to(ctx.work()),
            abs(ju).round_to(ctx.work()),
            abs(jl - two_pi_i).round_to(ctx.work()),
            abs(jn + two_pi_i).round_to(ctx.work())};
}

}  // namespace gww
