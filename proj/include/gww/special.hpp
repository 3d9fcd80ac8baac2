#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gww/precision.hpp"

namespace gww {

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

struct QuadRule {
    std::vector<Real> nodes;    // on (-1, 1), ascending
    std::vector<Real> weights;  // sum = 2
};

// Cached; Newton refinement of the Legendre roots at the requested precision.
const QuadRule& gauss_legendre(int m, mpfr_prec_t prec);

// ---------------------------------------------------------------------------
// Gamma family (complex argument)
// ---------------------------------------------------------------------------

// Principal log-gamma, continuous on C \ (-inf, 0].
// Spouge kernel for Re z >= 1/2, reflection below.
Complex log_gamma(const Complex& z, const PrecisionContext& ctx);
Complex gamma(const Complex& z, const PrecisionContext& ctx);
// psi_0 = d/dz log Gamma, from the Spouge kernel differentiated analytically.
Complex digamma(const Complex& z, const PrecisionContext& ctx);

// log G(z+1) via the integral representation
//   (z/2) log 2pi - z(z+1)/2 + z logGamma(z+1) - int_0^z logGamma(x+1) dx
// with Gauss-Legendre on the straight segment [0, z].
Complex log_barnes_g(const Complex& z, const PrecisionContext& ctx);

// name in {pi, euler_gamma, zeta_prime_minus1, log_glaisher}
Real named_constant(const std::string& name, const PrecisionContext& ctx);

// zeta'(2) by a Borwein-weighted alternating series (used by log_glaisher).
Real zeta_prime_2(mpfr_prec_t prec);

// ---------------------------------------------------------------------------
// Modified Bessel I of complex order, real argument t >= 0
// ---------------------------------------------------------------------------

struct BesselSeriesReport {
    Complex value;
    long terms_used;
    Real max_term_magnitude;
    long cancellation_bits;  // log2(max_term / |value|), >= 0
};

// DLMF 10.25.2 series: (t/2)^a sum_j (t^2/4)^j / (j! Gamma(j+a+1)).
// Terms whose Gamma factor sits at a pole are exact zeros (integer orders).
// Escalates working precision internally when cancellation eats the budget.
BesselSeriesReport bessel_i(const Complex& order, const Real& t, const PrecisionContext& ctx);

// ---------------------------------------------------------------------------
// Weight-function moments m_k(t) = I_{-k-nu}(t)
// ---------------------------------------------------------------------------

class MomentTable {
  public:
    explicit MomentTable(int n_max = 256) : n_max_(n_max) {}

    Complex moment(int k, const Complex& nu, const Real& t, const PrecisionContext& ctx);

    // JSON-lines cache: one record per (k, nu, t, bits), decimal-serialized.
    void load(const std::string& path);
    void save(const std::string& path) const;
    std::size_t size() const;
    int n_max() const { return n_max_; }

  private:
    int n_max_;
    mutable std::mutex mu_;
    std::map<std::string, Complex> cache_;
};

// Hankel loop: unit circle plus two rays on the lips of the cut out to -R.
struct HankelContour {
    Real circle_radius;   // fixed at 1 for the quadrature below
    Real ray_truncation;  // R
    int nodes_per_segment;

    // R chosen so exp(-(t/2)(R+1/R)) R^max_power < 2^-(bits+guard+16).
    static HankelContour make(const Real& t, double max_power, const PrecisionContext& ctx,
                              int nodes = 0);
    // check the truncation invariant for the given parameters
    bool tail_ok(const Real& t, double max_power, const PrecisionContext& ctx) const;
};

// Direct quadrature of int_Gamma s^k w(s) ds/(2 pi i s); independent oracle
// for MomentTable::moment. Branch of log s fixed with arg s in (-pi, pi).
Complex moment_quadrature(int k, const Complex& nu, const Real& t, const HankelContour& contour,
                          const PrecisionContext& ctx);

// Quadrature nodes (s_m, w_m) with sum_m w_m f(s_m) ~ int_Gamma f(s) w(s) ds/(2 pi i s);
// shared by moment_quadrature and the n<=2 partition-function integrals.
struct ContourNodes {
    std::vector<Complex> s;
    std::vector<Complex> w;
};
ContourNodes hankel_nodes(const Complex& nu, const Real& t, const HankelContour& contour,
                          const PrecisionContext& ctx);

}  // namespace gww
