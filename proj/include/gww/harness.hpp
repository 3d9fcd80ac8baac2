#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gww/asymptotics.hpp"
#include "gww/toeplitz.hpp"

namespace gww {

// ---------------------------------------------------------------------------
// Differential identity (d/dnu log D vs the Y-observable combination)
// ---------------------------------------------------------------------------

struct IdentityReport {
    Real residual;      // |LHS - RHS|
    Complex lhs, rhs;
    Real h_used;
};

// LHS: central difference of log D in nu with one Richardson level.
// RHS: the Y-combination with plain central differences for every d/dnu factor.
IdentityReport check_differential_identity(const ModelParams& p, const PrecisionContext& ctx,
                                           const Real& h, MomentTable& table);

// Complex-step variant (h imaginary), valid for real nu: d/dnu f = Im f(nu+ih)/h.
IdentityReport check_differential_identity_cstep(const ModelParams& p,
                                                 const PrecisionContext& ctx, const Real& h,
                                                 MomentTable& table);

// ---------------------------------------------------------------------------
// Recurrences and Christoffel-Darboux
// ---------------------------------------------------------------------------

struct RecurrenceReport {
    Real worst_recurrence;  // coefficient-level residual over both recurrences, k <= n
    Real worst_cd;          // Christoffel-Darboux residual over sampled (z, a)
    Real worst_an_identity; // a_{k+1,k} - a_{k,k-1} - pi_{k+1}(0) pit_k(0), both families
};

RecurrenceReport check_recurrences_cd(const ModelParams& p, const PrecisionContext& ctx,
                                      MomentTable& table, unsigned seed = 20240815);

// |log D_{n,nu} - log D_{n,-nu}| for integer nu
Real check_symmetry(int n, const Real& t, int nu_int, const PrecisionContext& ctx,
                    MomentTable& table);

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

struct StudyRow {
    long n;
    Complex exact;
    Complex predicted;
    Real residual;   // absolute or relative per the quantity's claim
    bool saturated;  // at working-precision noise; excluded from the fit
};

struct ConvergenceStudy {
    Quantity quantity;
    Regime regime;
    double claimed_order;
    std::vector<StudyRow> rows;
    double fitted_order;
    bool fit_valid;              // >= 2 usable points
    bool dropped_smallest;       // pre-asymptotic point excluded
    bool superconvergent;        // fitted better than claimed by > 1.0
    bool monotone;               // residuals decrease in n (one inversion allowed)
    std::string note;
};

ConvergenceStudy convergence_study(Quantity q, Regime regime, const Complex& nu, const Real& tau,
                                   const std::vector<long>& n_list, const PrecisionContext& ctx,
                                   MomentTable& table);

// exact observables for one n at t = n tau (shared by the study quantities)
struct ExactObservables {
    Complex logD;
    YSnapshot y;        // at size n
    Complex ratio_np1;  // tilde-a_{n,n-1} from size n+1
    Complex dnu_logD;   // central difference, h = 2^{-bits/6}
};

ExactObservables exact_observables(long n, const Complex& nu, const Real& tau,
                                   const PrecisionContext& ctx, MomentTable& table,
                                   bool with_dnu = false);

}  // namespace gww
