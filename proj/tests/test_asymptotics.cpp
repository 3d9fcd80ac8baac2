#include "test_util.hpp"

#include "gww/asymptotics.hpp"

#include <cstdio>

using namespace gww;

static void sub_geometry_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();

    // tau = 0.5: z- = -2 - sqrt(3)
    SubGeometry g = sub_geometry(Real::frac(1, 2, wp), Complex::zero(wp), ctx);
    Real ref = -2 - sqrt(Real::of(3L, wp));
    REQUIRE(testutil::close2(g.z_minus, ref, -240), "z- = -2 - sqrt(3) at tau = 1/2");
    REQUIRE(testutil::matches_digits(g.z_minus, "-3.732050807568877293527446341505872366942805253810380628", 50),
            "z- digits");

    // Vieta identities across random tau
    unsigned long long seed = 0x3a3a;
    for (int i = 0; i < 20; ++i) {
        Real tau = Real::of(0.06 + 0.83 * std::abs(testutil::unit(seed)), wp);
        SubGeometry gg = sub_geometry(tau, Complex::zero(wp), ctx);
        REQUIRE(testutil::close2(gg.z_plus * gg.z_minus, Real::of(1L, wp), -230), "z+ z- = 1");
        REQUIRE(testutil::close2(gg.z_plus + gg.z_minus, Real::of(-2L, wp) / tau, -230),
                "z+ + z- = -2/tau");
        REQUIRE(gg.z_minus < -1.0 && gg.z_plus > -1.0 && gg.z_plus < 0.0, "ordering");
    }

    // tau -> 1-: both saddles approach -1 (distance sqrt(2(1-tau)) + O(1-tau))
    SubGeometry gl = sub_geometry(Real::frac(9, 10, wp), Complex::zero(wp), ctx);
    REQUIRE(abs(gl.z_minus + 1) < 0.65 && abs(gl.z_plus + 1) < 0.65, "saddles collide as tau -> 1");
    SubGeometry gm = sub_geometry(Real::frac(1, 2, wp), Complex::zero(wp), ctx);
    REQUIRE(abs(gl.z_minus + 1) < abs(gm.z_minus + 1), "z- approaches -1 monotonically");

    bool threw = false;
    try {
        sub_geometry(Real::frac(95, 100, wp), Complex::zero(wp), ctx);
    } catch (const DomainError&) {
        threw = true;
    }
    REQUIRE(threw, "tau out of the sub range rejected");
    std::puts("sub_geometry_checks ok");
}

static void sign_probe_checks() {
    PrecisionContext ctx(192, 40);
    for (double tau : {0.5, 0.7}) {
        SignProbeReport rep = phi_sign_probe(Real::of(tau, ctx.work()), ctx);
        REQUIRE(rep.pass, "phi sign structure holds on all four sampled sets");
    }
    // Re phi(z+) < 0 and Re phi(z-) > 0 at tau = 0.5
    mpfr_prec_t wp = ctx.work();
    SubGeometry g = sub_geometry(Real::frac(1, 2, wp), Complex::zero(wp), ctx);
    Real rezp = (g.tau / 2 * (g.z_plus - 1 / g.z_plus) + log(-g.z_plus));
    REQUIRE(rezp.sign() < 0, "Re phi(z+) < 0");
    REQUIRE(g.phi_zm.re().sign() > 0, "Re phi(z-) > 0");
    std::puts("sign_probe_checks ok");
}

static void theorem_formulas() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    Real tau = Real::frac(1, 2, wp);

    // nu = 0 collapses Theorem 1.1 to n^2 tau^2 / 4
    Complex p0 = thm1_prediction(32, Complex::zero(wp), tau, ctx);
    REQUIRE(testutil::close2(p0, Complex(Real::of(32L * 32, wp) * tau * tau / 4), -230),
            "thm1 at nu = 0");

    // positive integer nu falls back to -nu
    Complex p1 = thm1_prediction(16, Complex::one(wp), tau, ctx);
    Complex p2 = thm1_prediction(16, Complex(Real::of(-1L, wp)), tau, ctx);
    REQUIRE(testutil::close2(p1, p2, -240), "thm1 symmetry fallback");
    bool threw = false;
    try {
        thm1_prediction(16, Complex::one(wp), tau, ctx, false);
    } catch (const DomainError&) {
        threw = true;
    }
    REQUIRE(threw, "positive integer nu without fallback rejected");

    // Theorem 1.2: nu-dependence is exactly (nu^2/2) log(1 - 1/tau)
    Real tau2 = Real::of(2L, wp);
    Complex nu(Real::frac(2, 5, wp), Real::zero(wp));
    Complex dq = thm2_prediction(24, nu, tau2, ctx) - thm2_prediction(24, Complex::zero(wp), tau2, ctx);
    Complex expect = nu * nu * Complex(log(1 - 1 / tau2)) / 2;
    REQUIRE(testutil::close2(dq, expect, -230), "thm2 nu-dependence");

    // nu = 0 reduction matches the independent assembly of the initial-value form
    Complex base = thm2_prediction(24, Complex::zero(wp), tau2, ctx);
    Real expect0 = (tau2 - Real::frac(3, 4, wp) - log(tau2) / 2) * 24 * 24 -
                   log(Real::of(24L, wp)) / 12 - log(1 - 1 / tau2) / 8 +
                   named_constant("zeta_prime_minus1", ctx);
    REQUIRE(testutil::close2(base.re(), expect0, -230), "thm2 at nu = 0 term-by-term");

    // evenness reduction: predicted(nu) - predicted(-nu) for thm1
    Complex nua(Real::frac(3, 10, wp), Real::zero(wp));
    Complex lhs = thm1_prediction(16, nua, tau, ctx) - thm1_prediction(16, -nua, tau, ctx);
    Real s = sqrt(1 - tau * tau);
    Complex rhs = nua * Complex((log((1 + s) / tau) - s) * 32) +
                  nua * Complex(log(const_pi(wp) * 2)) +
                  log_barnes_g(-nua, ctx) - log_barnes_g(nua, ctx);
    REQUIRE(testutil::close2(lhs, rhs, -220), "thm1 evenness reduction");
    std::puts("theorem_formulas ok");
}

static void free_energy_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    REQUIRE(testutil::close2(free_energy(Real::frac(1, 2, wp), ctx), Real::frac(1, 16, wp), -240),
            "free energy at tau = 1/2 is 1/16");
    Real f2 = free_energy(Real::of(2L, wp), ctx);
    REQUIRE(testutil::matches_digits(f2, "0.90342640972002734529138393927091171596224993281987237", 40),
            "free energy at tau = 2");
    REQUIRE(testutil::close2(free_energy(Real::of(1L, wp), ctx), Real::frac(1, 4, wp), -240),
            "free energy continuous at tau = 1");

    // one-sided derivative structure at tau = 1 by finite differences
    Real h = Real::parse("1e-8", wp);
    auto fe = [&](const Real& x) { return free_energy(x, ctx); };
    Real one = Real::of(1L, wp);
    // third derivative, one-sided 5-point stencils
    auto third = [&](int side) {
        Real s = Real::of(side, wp);
        Real f0 = fe(one + s * h * 0), f1 = fe(one + s * h), f2_ = fe(one + s * h * 2),
             f3 = fe(one + s * h * 3), f4 = fe(one + s * h * 4);
        // f''' ~ (-5/2 f0 + 9 f1 - 12 f2 + 7 f3 - 3/2 f4)/h^3, with sign s^3
        Real num = f0 * -5 / 2 + f1 * 9 - f2_ * 12 + f3 * 7 - f4 * 3 / 2;
        return num / (h * h * h) * side;
    };
    Real gap = third(+1) - third(-1);
    Real tol(wp);
    mpfr_set_d(tol.raw(), 1e-6, MPFR_RNDN);
    REQUIRE(abs(gap + 1) <= tol, "third-derivative gap is -1 (finite differences)");

    // first two one-sided derivatives match across the transition
    auto d1s = [&](int side) {
        Real s = Real::of(side, wp);
        return (fe(one + s * h) - fe(one)) / (s * h);
    };
    REQUIRE(abs(d1s(+1) - d1s(-1)) <= h * 4, "first derivatives match at tau = 1");

    ThirdOrderGap g1 = third_order_gap(Real::of(1L, wp), ctx);
    REQUIRE(abs(g1.g) <= pow2(-240, wp), "g(1) = 0");
    ThirdOrderGap g11 = third_order_gap(Real::frac(11, 10, wp), ctx);
    // g(1.1) = -(0.1)^3/6 + (0.1)^4/8 + O(0.1^5)
    Real expect = -Real::frac(1, 6000, wp);
    Real resid_expect = Real::frac(1, 80000, wp);  // (0.1)^4/8
    Real tol_g(wp), tol_r(wp);
    mpfr_set_d(tol_g.raw(), 2e-5, MPFR_RNDN);  // quartic term ~1.25e-5 sits inside this window
    mpfr_set_d(tol_r.raw(), 3e-6, MPFR_RNDN);
    REQUIRE(abs(g11.g - expect) <= tol_g, "g(1.1) near -1.667e-4");
    REQUIRE(abs(g11.residual - resid_expect) <= tol_r, "cubic-subtracted residual is quartic");
    std::puts("free_energy_checks ok");
}

static void sub_prediction_structure() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    Real tau = Real::frac(1, 2, wp);

    // nu = 0: Y12 prediction = 1, Y11 prediction = 0, Ym1 = -n tau/2
    auto rows = sub_y_predictions(16, Complex::zero(wp), tau, ctx);
    for (const auto& r : rows) {
        if (r.q == Quantity::Y12_0)
            REQUIRE(testutil::close2(r.predicted, Complex::one(wp), -230), "Y12 pred at nu=0 is 1");
        if (r.q == Quantity::Y11_0)
            REQUIRE(abs(r.predicted).is_zero(), "Y11 pred at nu=0 vanishes (prefactor nu)");
        if (r.q == Quantity::Yminus1_11)
            REQUIRE(testutil::close2(r.predicted, Complex(Real::of(-4L, wp)), -230),
                    "Ym1 pred at nu=0 is -n tau/2");
    }
    std::puts("sub_prediction_structure ok");
}

static void super_geometry_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    Complex nu(Real::frac(2, 5, wp), Real::zero(wp));
    SuperGeometry g = super_geometry(Real::of(2L, wp), nu, ctx);
    REQUIRE(testutil::close2(g.theta_c, const_pi(wp) / 2, -240), "theta_c = pi/2 at tau = 2");
    // D_inf = 2^{-nu/2}
    Complex dref = exp(Complex(-const_log2(wp) * Real::frac(2, 5, wp) / 2));
    REQUIRE(testutil::close2(g.d_inf, dref, -230), "D_inf = 2^{-nu/2} at tau = 2");
    // l(1) = 0 and l decreasing
    Real l1 = -Real::of(1L, wp) + log(Real::of(1L, wp)) + 1;
    REQUIRE(l1.is_zero(), "l(1) = 0");
    Real prev = l1;
    for (double tv : {1.2, 1.5, 2.0, 3.0, 5.0}) {
        SuperGeometry gg = super_geometry(Real::of(tv, wp), nu, ctx);
        REQUIRE(gg.ell < prev, "l strictly decreasing in tau");
        prev = gg.ell;
    }
    std::puts("super_geometry_checks ok");
}

static void psi_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    Real tau = Real::of(2L, wp);
    SuperGeometry g = super_geometry(tau, Complex::zero(wp), ctx);

    REQUIRE(abs(psi_density(g.theta_c, tau, ctx)) <= pow2(-ctx.bits / 2, wp), "psi(theta_c) = 0");
    REQUIRE(abs(psi_density(-g.theta_c, tau, ctx)) <= pow2(-ctx.bits / 2, wp), "psi(-theta_c) = 0");
    REQUIRE(psi_density(Real::zero(wp), tau, ctx).sign() > 0, "psi(0) > 0 at tau = 2");

    // closed real form (tau/pi) cos(theta/2) sqrt(sin^2(theta_c/2) - sin^2(theta/2))
    Real th = Real::frac(3, 10, wp);
    Real shalf = sin(g.theta_c / 2);
    Real closed = tau / const_pi(wp) * cos(th / 2) * sqrt(shalf * shalf - sin(th / 2) * sin(th / 2));
    REQUIRE(testutil::close2(psi_density(th, tau, ctx), closed, -220), "psi closed form");

    for (double tv : {1.2, 1.5, 2.0, 3.0}) {
        Real mass = equilibrium_mass(Real::of(tv, wp), ctx, 240);
        Real tol(wp);
        mpfr_set_d(tol.raw(), 1e-20, MPFR_RNDN);
        REQUIRE(abs(mass - 1) <= tol, "equilibrium measure has unit mass");
    }
    std::puts("psi_checks ok");
}

static void g_phi_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    Real tau = Real::of(2L, wp);
    SuperGeometry geo = super_geometry(tau, Complex::zero(wp), ctx);

    // g(R)/log R -> 1 (mass normalisation)
    Real R = Real::parse("1e6", wp);
    Complex gR = g_function(Complex(R), tau, ctx);
    Real ratio = gR.re() / log(R);
    Real tol(wp);
    mpfr_set_d(tol.raw(), 1e-5, MPFR_RNDN);
    REQUIRE(abs(ratio - 1) <= tol, "g(1e6)/log(1e6) ~ 1");
    REQUIRE(abs(gR.im()) <= tol, "g real on the far positive axis");

    // phitilde(z) = conj(phi(conj z)) at z = 2 + i
    Complex z(Real::of(2L, wp), Real::of(1L, wp));
    Complex pt = phi_segment(z, tau, ctx, true);
    Complex pc = conj(phi_segment(conj(z), tau, ctx, false));
    REQUIRE(testutil::close2(pt, pc, -200), "phitilde = conj(phi(conj z))");

    // phi vanishes at its own endpoint
    Complex at_xi = phi_on_circle(geo.theta_c + pow2(-60, wp), tau, ctx);
    REQUIRE(abs(at_xi) <= pow2(-50, wp), "phi(xi) = 0");

    // Re phi > 0 on C1 upper
    Real th1 = geo.theta_c + (const_pi(wp) - geo.theta_c) / 3;
    Complex ph = phi_on_circle(th1, tau, ctx);
    REQUIRE(ph.re().sign() > 0, "Re phi > 0 on the upper complementary arc");

    // Euler-Lagrange residual at sampled points
    Real tol15(wp);
    mpfr_set_d(tol15.raw(), 1e-15, MPFR_RNDN);
    Real r0 = euler_lagrange_residual(Real::zero(wp), tau, ctx);
    REQUIRE(r0 <= tol15, "E-L residual at theta = 0");
    PrecisionContext ctx15(256, 60);
    Real r1 = euler_lagrange_residual(super_geometry(Real::frac(3, 2, wp), Complex::zero(wp), ctx).theta_c / 2,
                                      Real::frac(3, 2, wp), ctx15);
    REQUIRE(r1 <= tol15, "E-L residual at theta_c/2, tau = 1.5");

    // jump relations on all four pieces
    JumpChecks jc = g_jump_checks(tau, ctx);
    REQUIRE(jc.arc_vs_phi_plus <= tol15, "C2 jump vs -2 phi+");
    REQUIRE(jc.arc_vs_phi_minus <= tol15, "C2 jump vs +2 phi-");
    REQUIRE(jc.c1_upper <= tol15, "no jump across C1 upper");
    REQUIRE(jc.c1_lower <= tol15, "2 pi i jump across C1 lower");
    REQUIRE(jc.negative_axis <= tol15, "-2 pi i jump across (-inf,-1)");
    std::puts("g_phi_checks ok");
}

static void dnu_prediction_checks() {
    PrecisionContext ctx(256, 60);
    mpfr_prec_t wp = ctx.work();
    // super, nu = 0 -> 0
    Complex z0 = dnu_logD_prediction(16, Complex::zero(wp), Real::of(2L, wp), Regime::Super, ctx);
    REQUIRE(abs(z0).is_zero(), "super dnu prediction vanishes at nu = 0");
    // super, nu = 0.4, tau = 2 -> 0.4 log(1/2)
    Complex z1 = dnu_logD_prediction(16, Complex(Real::frac(2, 5, wp)), Real::of(2L, wp),
                                     Regime::Super, ctx);
    REQUIRE(testutil::matches_digits(-z1.re(), "0.27725887222397812376689284858327062723020005374410210164", 40),
            "0.4 log(1/2) digits");
    std::puts("dnu_prediction_checks ok");
}

int main() {
    sub_geometry_checks();
    sign_probe_checks();
    theorem_formulas();
    free_energy_checks();
    sub_prediction_structure();
    super_geometry_checks();
    psi_checks();
    g_phi_checks();
    dnu_prediction_checks();
    std::puts("test_asymptotics: all ok");
    return 0;
}
