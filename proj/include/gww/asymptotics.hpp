#pragma once

#include <optional>
#include <vector>

#include "gww/special.hpp"

namespace gww {

enum class Regime { Sub, Super };

enum class Quantity {
    LogDet,      // log D vs Theorem 1.1 / 1.2
    Yminus1_11,  // (Y_{-1})_{11}
    RatioY21,    // Y21'(0;n+1)/Y21(0;n+1)
    Y12_0,
    Y11_0,
    Y22_0,
    DnuLogDet,   // d/dnu log D
};

const char* quantity_tag(Quantity q);

// ---------------------------------------------------------------------------
// Sub-critical regime (tau < 1)
// ---------------------------------------------------------------------------

struct SubGeometry {
    Real tau;
    Complex nu;
    Real z_plus, z_minus;   // saddle points, z- < -1 < z+ < 0
    Real sqrt_1mt2;         // sqrt(1 - tau^2)
    Complex phi_zm;         // phi(z-) with log z- taken as the + boundary value (Im = pi)
    Real phi2_zm, phi3_zm;  // phi'', phi''' at z-
    Real lambda1, lambda2;  // lambda'(z-), lambda''(z-)
    Complex d1;             // sqrt(2 pi)/Gamma(1-nu)
};

SubGeometry sub_geometry(const Real& tau, const Complex& nu, const PrecisionContext& ctx);

// worst-case margins of the phi sign structure on the four sampled sets
struct SignProbeReport {
    Real worst_circle;  // max |Re phi| on |z|=1 (expect ~0)
    Real worst_inner;   // max Re(phi - phi(z-)) on |z| = -z+ (expect < 0)
    Real worst_outer;   // min Re(phi - phi(z-)) on |z| = -z-, z != z- (expect > 0)
    Real worst_ray;     // max Re(phi - phi(z-)) on (-inf, z+) away from z- (expect < 0)
    bool pass;
};

SignProbeReport phi_sign_probe(const Real& tau, const PrecisionContext& ctx);

// Theorem 1.1 closed form; positive integer nu is evaluated at -nu when
// symmetry_fallback is set (the theorem's stated reduction).
Complex thm1_prediction(long n, const Complex& nu, const Real& tau, const PrecisionContext& ctx,
                        bool symmetry_fallback = true);

// Theorem 1.2 closed form, tau in [1.1, 10].
Complex thm2_prediction(long n, const Complex& nu, const Real& tau, const PrecisionContext& ctx);

// lim (1/n^2) log Z: tau^2/4 below the transition, tau - log(tau)/2 - 3/4 above;
// both one-sided values coincide (1/4) at tau = 1.
Real free_energy(const Real& tau, const PrecisionContext& ctx);

struct ThirdOrderGap {
    Real g;         // tau - log(tau)/2 - 3/4 - tau^2/4
    Real residual;  // g + (tau-1)^3/6
};
ThirdOrderGap third_order_gap(const Real& tau, const PrecisionContext& ctx);

struct PredictionRow {
    Quantity q;
    long n;
    Complex predicted;
    double claimed_order;  // exponent of the printed error clause
    bool relative;         // fit |exact-pred|/|pred| instead of |exact-pred|
};

std::vector<PredictionRow> sub_y_predictions(long n, const Complex& nu, const Real& tau,
                                             const PrecisionContext& ctx);
std::vector<PredictionRow> super_y_predictions(long n, const Complex& nu, const Real& tau,
                                               const PrecisionContext& ctx);

// d/dnu log D closed forms: the digamma-bearing sub form and nu log(1-1/tau).
Complex dnu_logD_prediction(long n, const Complex& nu, const Real& tau, Regime regime,
                            const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Super-critical regime (tau > 1): equilibrium measure on the arc
// ---------------------------------------------------------------------------

struct SuperGeometry {
    Real tau;
    Complex nu;
    Real theta_c;  // sin^2(theta_c/2) = 1/tau
    Complex xi;    // e^{i theta_c}
    Real ell;      // Lagrange multiplier -tau + log tau + 1
    Complex d_inf; // cos(theta_c/2)^nu
};

SuperGeometry super_geometry(const Real& tau, const Complex& nu, const PrecisionContext& ctx);

// sqrt((z-xi)(z-1/xi)) analytic off the arc C2, ~ z at infinity
Complex arc_sqrt(const Complex& z, const Real& theta_c);

// Szego function D(z) = phi_c(z)^nu with the conformal map phi_c
Complex szego_d(const Complex& z, const SuperGeometry& geo);

// density against d(theta): psi(e^{i th}) i e^{i th}; real, vanishes at +-theta_c
Real psi_density(const Real& theta, const Real& tau, const PrecisionContext& ctx);

// total mass int_{-theta_c}^{theta_c} psi dtheta (expected: 1)
Real equilibrium_mass(const Real& tau, const PrecisionContext& ctx, int nodes = 0);

// g(z) = int log(z-s) psi(s) ds with the branch anchored at log(z+1)'s principal
// value (the cut of each log runs along the arc from -1 to s, then (-inf,-1]).
// `near_theta`: angle where z sits within `offset` of the arc, enabling dyadic
// panel refinement and the continuity sweep across it.
Complex g_function(const Complex& z, const Real& tau, const PrecisionContext& ctx,
                   std::optional<Real> near_theta = std::nullopt,
                   std::optional<Real> offset = std::nullopt);

// phi(z): path quadrature from xi along the unit circle (|z| = 1, |arg z| > theta_c)
Complex phi_on_circle(const Real& theta, const Real& tau, const PrecisionContext& ctx);
// phi/phitilde by a straight segment from xi (resp. 1/xi); the segment must
// not cross the arc or (-inf, 0].
Complex phi_segment(const Complex& z, const Real& tau, const PrecisionContext& ctx,
                    bool tilde = false);
// one-sided boundary values on the arc: side +1 = inside the disc
Complex phi_arc_side(const Real& theta, const Real& tau, int side, const PrecisionContext& ctx);

// |g+ + g- - V + l - log z - i pi| at z = e^{i theta}, |theta| < theta_c
Real euler_lagrange_residual(const Real& theta, const Real& tau, const PrecisionContext& ctx);

// the four jump relations of (g, phi); residuals should sit at quadrature level
struct JumpChecks {
    Real arc_vs_phi_plus;    // |(g+ - g-) + 2 phi+| on C2
    Real arc_vs_phi_minus;   // |(g+ - g-) - 2 phi-| on C2
    Real c1_upper;           // |g+ - g-| on C1, Im z > 0
    Real c1_lower;           // |g+ - g- - 2 pi i| on C1, Im z < 0
    Real negative_axis;      // |g+ - g- + 2 pi i| on (-inf,-1), + side below
};
JumpChecks g_jump_checks(const Real& tau, const PrecisionContext& ctx);

}  // namespace gww
