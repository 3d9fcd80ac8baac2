#pragma once

#include <vector>

#include "gww/special.hpp"

namespace gww {

// The model triple (n, nu, t); tau = t/n. Single source of those symbols.
struct ModelParams {
    int n;
    Complex nu;
    Real t;

    ModelParams(int n_, Complex nu_, Real t_) : n(n_), nu(std::move(nu_)), t(std::move(t_)) {
        if (n < 1) throw DomainError("ModelParams: n must be >= 1");
        if (t.sign() < 0) throw DomainError("ModelParams: t must be >= 0");
    }
    Real tau() const { return t / n; }
};

struct LogDet {
    Real log_abs;
    Real arg;  // accumulated continuously, not reduced mod 2pi
    bool perturbed = false;
    Real t_used;
    Complex value() const { return {log_abs, arg}; }
};

// Orthogonal-polynomial data for sizes k = 0..kmax (monic, ascending powers).
struct OrthoData {
    int kmax;
    std::vector<std::vector<Complex>> pi;    // pi[k]: k+1 coefficients
    std::vector<std::vector<Complex>> pit;   // tilde-pi[k]
    std::vector<Complex> log_d;              // log D_k, k = 0..kmax+1 (log D_0 = 0)
    std::vector<Complex> h;                  // h_k = D_{k+1}/D_k, k = 0..kmax

    const Complex& pi0(int k) const { return pi[k][0]; }
    const Complex& pit0(int k) const { return pit[k][0]; }
    Complex a_sub(int k) const { return k >= 1 ? pi[k][k - 1] : Complex::zero(pi[0][0].prec()); }
    Complex at_sub(int k) const { return k >= 1 ? pit[k][k - 1] : Complex::zero(pi[0][0].prec()); }
};

// Exact RH observables at z = 0 computed from orthogonal-polynomial data.
struct YSnapshot {
    Complex Y11_0;       // pi_n(0)
    Complex Y12_0;       // sum_j (pi_n)_j m_{j-n}  (= h_n by orthogonality)
    Complex Y21_0;       // -1/h_{n-1}
    Complex Y22_0;       // -(1/h_{n-1}) sum_j (tilde-pi_{n-1})_j m_{-1-j}
    Complex ratio_Y21;   // Y21'(0)/Y21(0) = tilde-a_{n-1,n-2}
    Complex Yminus1_11;  // a_{n,n-1}
};

// log D_{n,nu}(t) by LU with partial pivoting over the moment matrix
// M[i][j] = m_{j-i}. On a numerically-zero pivot the engine retries once with
// t perturbed by a relative 2^-bits/2 and marks the result.
LogDet log_det(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table);

// log D_k for k = 1..n (leading principal minors), same perturbation policy.
std::vector<Complex> log_det_ladder(const ModelParams& p, const PrecisionContext& ctx,
                                    MomentTable& table);

// h_k = D_{k+1}/D_k for k = 0..n-1, with D_0 = 1.
std::vector<Complex> h_sequence(const ModelParams& p, const PrecisionContext& ctx,
                                MomentTable& table);

// Monic pi_k, tilde-pi_k for k <= n+1 via Toeplitz linear solves, plus h_k.
OrthoData op_coefficients(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table);

// All YSnapshot fields for size n (needs data at sizes n-1, n).
YSnapshot y_snapshot(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table);

// Direct tensor-product quadrature of the n-fold Hankel integral, n <= 2.
Complex partition_direct(int n, const Complex& nu, const Real& t, const HankelContour& contour,
                         const PrecisionContext& ctx);

// --- internal surface exposed for oracles/tests ---

struct CMatrix {
    int n;
    std::vector<Complex> a;  // row-major
    CMatrix(int n_, mpfr_prec_t prec) : n(n_), a(n_ * n_, Complex::zero(prec)) {}
    Complex& at(int i, int j) { return a[i * n + j]; }
    const Complex& at(int i, int j) const { return a[i * n + j]; }
};

// (log|det|, continuous arg); throws SingularMatrixError on a vanishing pivot.
std::pair<Real, Real> lu_logdet(CMatrix m, const PrecisionContext& ctx);

// Solve M x = b (and M^T x = b) by fresh LU; helper for the coefficient solves.
std::vector<Complex> lu_solve(const CMatrix& m, std::vector<Complex> b,
                              const PrecisionContext& ctx, bool transpose);

// The n x n moment matrix for given params.
CMatrix moment_matrix(int n, const Complex& nu, const Real& t, const PrecisionContext& ctx,
                      MomentTable& table);

// Monic orthogonal polynomial coefficient solves at a single size.
std::vector<Complex> pi_coefficients(int k, const ModelParams& p, const PrecisionContext& ctx,
                                     MomentTable& table);
std::vector<Complex> pit_coefficients(int k, const ModelParams& p, const PrecisionContext& ctx,
                                      MomentTable& table);

}  // namespace gww
