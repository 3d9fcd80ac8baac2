#include "gww/toeplitz.hpp"

#include <algorithm>
#include <cmath>

namespace gww {

CMatrix moment_matrix(int n, const Complex& nu, const Real& t, const PrecisionContext& ctx,
                      MomentTable& table) {
    CMatrix m(n, ctx.work());
    std::vector<Complex> row;
    row.reserve(2 * n - 1);
    for (int k = -(n - 1); k <= n - 1; ++k) row.push_back(table.moment(k, nu, t, ctx));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = row[(j - i) + (n - 1)];
    return m;
}

std::pair<Real, Real> lu_logdet(CMatrix m, const PrecisionContext& ctx) {
    const int n = m.n;
    mpfr_prec_t wp = ctx.work();
    Real scale = Real::zero(wp);
    for (const auto& e : m.a) {
        Real a = abs(e);
        if (a > scale) scale = a;
    }
    Real floor_ = scale * pow2(-(ctx.bits - ctx.guard_bits), wp);
    Real log_abs = Real::zero(wp);
    Real argsum = Real::zero(wp);
    int swaps = 0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        Real best = abs(m.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            Real a = abs(m.at(i, k));
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (best <= floor_ || best.is_zero()) throw SingularMatrixError(k);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            ++swaps;
        }
        const Complex& pivot = m.at(k, k);
        log_abs = log_abs + log(abs(pivot));
        argsum = argsum + arg(pivot);
        Complex pinv = inv(pivot);
        for (int i = k + 1; i < n; ++i) {
            Complex f = m.at(i, k) * pinv;
            if (f.is_zero()) continue;
            for (int j = k + 1; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(k, j);
        }
    }
    if (swaps % 2) argsum = argsum + const_pi(wp);
    return {log_abs, argsum};
}

std::vector<Complex> lu_solve(const CMatrix& m0, std::vector<Complex> b,
                              const PrecisionContext& ctx, bool transpose) {
    CMatrix m = m0;
    const int n = m.n;
    mpfr_prec_t wp = ctx.work();
    if (transpose) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) std::swap(m.at(i, j), m.at(j, i));
    }
    Real scale = Real::zero(wp);
    for (const auto& e : m.a) {
        Real a = abs(e);
        if (a > scale) scale = a;
    }
    Real floor_ = scale * pow2(-(ctx.bits - ctx.guard_bits), wp);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        Real best = abs(m.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            Real a = abs(m.at(i, k));
            if (a > best) {
                best = a;
                piv = i;
            }
        }
        if (best <= floor_ || best.is_zero()) throw SingularMatrixError(k);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        Complex pinv = inv(m.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            Complex f = m.at(i, k) * pinv;
            if (f.is_zero()) continue;
            for (int j = k + 1; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(k, j);
            b[i] = b[i] - f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        Complex acc = b[i];
        for (int j = i + 1; j < n; ++j) acc = acc - m.at(i, j) * b[j];
        b[i] = acc * inv(m.at(i, i));
    }
    return b;
}

namespace {

// one LU log-det attempt at given t; perturbation policy lives in the callers
Complex log_det_at(int n, const Complex& nu, const Real& t, const PrecisionContext& ctx,
                   MomentTable& table) {
    if (n == 0) return Complex::zero(ctx.work());
    auto [la, ar] = lu_logdet(moment_matrix(n, nu, t, ctx, table), ctx);
    return {la, ar};
}

Real perturbed_t(const Real& t, const PrecisionContext& ctx) {
    return t * (1 + pow2(-ctx.bits / 2, ctx.work()));
}

}  // namespace

LogDet log_det(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table) {
    try {
        Complex v = log_det_at(p.n, p.nu, p.t, ctx, table);
        return {v.re(), v.im(), false, p.t};
    } catch (const SingularMatrixError&) {
        Real t2 = perturbed_t(p.t, ctx);
        Complex v = log_det_at(p.n, p.nu, t2, ctx, table);
        return {v.re(), v.im(), true, t2};
    }
}

std::vector<Complex> log_det_ladder(const ModelParams& p, const PrecisionContext& ctx,
                                    MomentTable& table) {
    Real t = p.t;
    for (int attempt = 0;; ++attempt) {
        try {
            std::vector<Complex> out;
            out.reserve(p.n);
            for (int k = 1; k <= p.n; ++k) out.push_back(log_det_at(k, p.nu, t, ctx, table));
            return out;
        } catch (const SingularMatrixError& e) {
            if (attempt >= 1)
                throw NumericsError("log_det_ladder: vanishing determinant at k=" +
                                    std::to_string(e.pivot_index + 1));
            t = perturbed_t(t, ctx);
        }
    }
}

std::vector<Complex> h_sequence(const ModelParams& p, const PrecisionContext& ctx,
                                MomentTable& table) {
    std::vector<Complex> ld = log_det_ladder(p, ctx, table);
    std::vector<Complex> h;
    h.reserve(p.n);
    Complex prev = Complex::zero(ctx.work());  // log D_0 = 0
    for (int k = 0; k < p.n; ++k) {
        h.push_back(exp(ld[k] - prev));
        prev = ld[k];
    }
    return h;
}

std::vector<Complex> pi_coefficients(int k, const ModelParams& p, const PrecisionContext& ctx,
                                     MomentTable& table) {
    mpfr_prec_t wp = ctx.work();
    std::vector<Complex> c;
    if (k == 0) {
        c.push_back(Complex::one(wp));
        return c;
    }
    CMatrix m = moment_matrix(k, p.nu, p.t, ctx, table);
    std::vector<Complex> b;
    b.reserve(k);
    for (int row = 0; row < k; ++row) b.push_back(-table.moment(k - row, p.nu, p.t, ctx));
    c = lu_solve(m, std::move(b), ctx, false);
    c.push_back(Complex::one(wp));
    return c;
}

std::vector<Complex> pit_coefficients(int k, const ModelParams& p, const PrecisionContext& ctx,
                                      MomentTable& table) {
    mpfr_prec_t wp = ctx.work();
    std::vector<Complex> d;
    if (k == 0) {
        d.push_back(Complex::one(wp));
        return d;
    }
    CMatrix m = moment_matrix(k, p.nu, p.t, ctx, table);
    std::vector<Complex> b;
    b.reserve(k);
    for (int row = 0; row < k; ++row) b.push_back(-table.moment(row - k, p.nu, p.t, ctx));
    d = lu_solve(m, std::move(b), ctx, true);
    d.push_back(Complex::one(wp));
    return d;
}

OrthoData op_coefficients(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table) {
    OrthoData od;
    od.kmax = p.n + 1;
    std::vector<Complex> ladder = log_det_ladder(ModelParams(p.n + 2, p.nu, p.t), ctx, table);
    od.log_d.push_back(Complex::zero(ctx.work()));
    for (auto& v : ladder) od.log_d.push_back(v);
    for (int k = 0; k <= p.n + 1; ++k) {
        od.pi.push_back(pi_coefficients(k, p, ctx, table));
        od.pit.push_back(pit_coefficients(k, p, ctx, table));
        od.h.push_back(exp(od.log_d[k + 1] - od.log_d[k]));
    }
    return od;
}

YSnapshot y_snapshot(const ModelParams& p, const PrecisionContext& ctx, MomentTable& table) {
    const int n = p.n;
    if (n < 1) throw DomainError("y_snapshot: n >= 1 required");
    std::vector<Complex> c = pi_coefficients(n, p, ctx, table);
    std::vector<Complex> d = pit_coefficients(n - 1, p, ctx, table);
    auto ld = [&](int k) -> Complex {
        if (k == 0) return Complex::zero(ctx.work());
        auto [la, ar] = lu_logdet(moment_matrix(k, p.nu, p.t, ctx, table), ctx);
        return {la, ar};
    };
    Complex h_nm1 = exp(ld(n) - ld(n - 1));
    YSnapshot y{Complex::zero(ctx.work()), Complex::zero(ctx.work()), Complex::zero(ctx.work()),
                Complex::zero(ctx.work()), Complex::zero(ctx.work()), Complex::zero(ctx.work())};
    y.Y11_0 = c[0];
    Complex y12 = Complex::zero(ctx.work());
    for (int j = 0; j <= n; ++j) y12 = y12 + c[j] * table.moment(j - n, p.nu, p.t, ctx);
    y.Y12_0 = y12;
    y.Y21_0 = -inv(h_nm1);
    Complex s22 = Complex::zero(ctx.work());
    for (int j = 0; j <= n - 1; ++j) s22 = s22 + d[j] * table.moment(-1 - j, p.nu, p.t, ctx);
    y.Y22_0 = -s22 * inv(h_nm1);
    y.ratio_Y21 = (n >= 2) ? d[n - 2] : Complex::zero(ctx.work());
    y.Yminus1_11 = c[n - 1];
    return y;
}

Complex partition_direct(int n, const Complex& nu, const Real& t, const HankelContour& contour,
                         const PrecisionContext& ctx) {
    if (n < 1 || n > 2) throw DomainError("partition_direct: n must be 1 or 2");
    double max_power = std::abs(nu.re().to_double()) + n + 1;
    if (!contour.tail_ok(t, max_power, ctx) && !(t.is_zero() && nu.is_zero()))
        throw DomainError("contour truncation too small");
    ContourNodes nodes = hankel_nodes(nu, t, contour, ctx);
    mpfr_prec_t wp = ctx.work() + 32;
    const std::size_t m = nodes.s.size();
    if (n == 1) {
        Complex acc = Complex::zero(wp);
        for (std::size_t i = 0; i < m; ++i) acc = acc + nodes.w[i];
        return acc.round_to(ctx.work());
    }
    // Delta(s)Delta(s^-1) = (s1-s2)(1/s1-1/s2) = 2 - s1/s2 - s2/s1
    std::vector<Complex> sinv;
    sinv.reserve(m);
    for (std::size_t i = 0; i < m; ++i) sinv.push_back(inv(nodes.s[i]));
    Complex acc = Complex::zero(wp);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            Complex v = Complex::of(2.0, 0.0, wp) - nodes.s[i] * sinv[j] - nodes.s[j] * sinv[i];
            acc = acc + nodes.w[i] * nodes.w[j] * v;
        }
    }
    return (acc / 2).round_to(ctx.work());
}

}  // namespace gww
