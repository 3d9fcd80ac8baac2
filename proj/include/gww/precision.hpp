#pragma once

#include <mpfr.h>

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

// Arbitrary-precision real/complex scalars on top of MPFR.
//
// Precision never lives in a global register: it is carried by each value and
// by the PrecisionContext that callers thread through every computation.
// All rounding is to-nearest. Values are immutable in the arithmetic API
// (operators return fresh values); this makes them safe to share across
// threads.

namespace gww {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when compare-at-double-precision escalation fails to converge.
struct PrecisionError : NumericsError {
    using NumericsError::NumericsError;
};

// Invalid input for a mathematical operation (pole, out-of-range parameter).
struct DomainError : NumericsError {
    using NumericsError::NumericsError;
};

// An LU pivot fell below the relative noise floor.
struct SingularMatrixError : NumericsError {
    int pivot_index;
    explicit SingularMatrixError(int k)
        : NumericsError("determinant numerically zero - escalate precision or report D=0"),
          pivot_index(k) {}
};

struct PrecisionContext {
    mpfr_prec_t bits;        // working mantissa precision, >= 64
    mpfr_prec_t guard_bits;  // extra bits for intermediate sums
    long target_digits;      // decimal digits required of final answers

    PrecisionContext(mpfr_prec_t bits_, long target_digits_, mpfr_prec_t guard = 64)
        : bits(bits_), guard_bits(guard), target_digits(target_digits_) {
        if (bits < 64) throw DomainError("PrecisionContext: bits must be >= 64");
        if (target_digits < 1) throw DomainError("PrecisionContext: target_digits must be >= 1");
        if (bits < 4 * target_digits)
            throw DomainError("PrecisionContext: bits must be >= 4*target_digits");
    }

    static PrecisionContext for_bits(mpfr_prec_t bits) {
        long digits = static_cast<long>(static_cast<double>(bits) * 0.30102999566398);
        if (digits > bits / 4) digits = bits / 4;
        return PrecisionContext(bits, digits > 0 ? digits : 1);
    }

    mpfr_prec_t work() const { return bits + guard_bits; }
    PrecisionContext doubled() const { return PrecisionContext(2 * bits, target_digits, guard_bits); }
    long full_digits() const { return static_cast<long>(static_cast<double>(bits) * 0.30102999566398); }
};

class Real {
  public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, 64);
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    static Real of(double x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Real of(long x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Real of(int x, mpfr_prec_t prec) { return of(static_cast<long>(x), prec); }
    // Exact rational conversion p/q at the given precision.
    static Real frac(long p, long q, mpfr_prec_t prec) {
        Real r = of(p, prec);
        mpfr_div_si(r.v_, r.v_, q, MPFR_RNDN);
        return r;
    }
    static Real zero(mpfr_prec_t prec) { return of(0L, prec); }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_); }
    bool is_nan() const { return mpfr_nan_p(v_); }
    bool is_integer() const { return mpfr_integer_p(v_); }
    int sign() const { return mpfr_sgn(v_); }

    Real round_to(mpfr_prec_t prec) const {
        Real r(prec);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    // value = sign 0.<digits> * 10^exp; minimal digit count guaranteeing that
    // re-parsing at the same precision round-trips bit-exactly.
    std::string serialize() const;
    static Real deserialize(const std::string& s, mpfr_prec_t prec);

    // plain decimal literal, e.g. "-0.165421143700450929e0" or "3.14"
    static Real parse(const std::string& s, mpfr_prec_t prec) {
        Real r(prec);
        if (mpfr_set_str(r.raw(), s.c_str(), 10, MPFR_RNDN) != 0)
            throw DomainError("Real::parse: bad literal '" + s + "'");
        return r;
    }

    friend Real operator+(const Real& a, const Real& b) { return bin(a, b, mpfr_add); }
    friend Real operator-(const Real& a, const Real& b) { return bin(a, b, mpfr_sub); }
    friend Real operator*(const Real& a, const Real& b) { return bin(a, b, mpfr_mul); }
    friend Real operator/(const Real& a, const Real& b) { return bin(a, b, mpfr_div); }
    Real operator-() const {
        Real r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend Real operator+(const Real& a, long b) { return bin_si(a, b, mpfr_add_si); }
    friend Real operator-(const Real& a, long b) { return bin_si(a, b, mpfr_sub_si); }
    friend Real operator*(const Real& a, long b) { return bin_si(a, b, mpfr_mul_si); }
    friend Real operator/(const Real& a, long b) { return bin_si(a, b, mpfr_div_si); }
    friend Real operator+(long a, const Real& b) { return b + a; }
    friend Real operator*(long a, const Real& b) { return b * a; }
    friend Real operator-(long a, const Real& b) {
        Real r(b.prec());
        mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(long a, const Real& b) {
        Real r(b.prec());
        mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }
    friend bool operator!=(const Real& a, const Real& b) { return !mpfr_equal_p(a.v_, b.v_); }
    friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

  private:
    using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    using BinSi = int (*)(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t);
    static Real bin(const Real& a, const Real& b, BinOp op) {
        Real r(std::max(a.prec(), b.prec()));
        op(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    static Real bin_si(const Real& a, long b, BinSi op) {
        Real r(a.prec());
        op(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    mpfr_t v_;
};

// unary wrappers
#define GWW_REAL_UNARY(name, mpfr_fn)            \
    inline Real name(const Real& x) {            \
        Real r(x.prec());                        \
        mpfr_fn(r.raw(), x.raw(), MPFR_RNDN);    \
        return r;                                \
    }
GWW_REAL_UNARY(abs, mpfr_abs)
GWW_REAL_UNARY(sqrt, mpfr_sqrt)
GWW_REAL_UNARY(exp, mpfr_exp)
GWW_REAL_UNARY(log, mpfr_log)
GWW_REAL_UNARY(log1p, mpfr_log1p)
GWW_REAL_UNARY(sin, mpfr_sin)
GWW_REAL_UNARY(cos, mpfr_cos)
GWW_REAL_UNARY(tan, mpfr_tan)
GWW_REAL_UNARY(sinh, mpfr_sinh)
GWW_REAL_UNARY(cosh, mpfr_cosh)
GWW_REAL_UNARY(asin, mpfr_asin)
#undef GWW_REAL_UNARY

inline Real floor(const Real& x) {
    Real r(x.prec());
    mpfr_floor(r.raw(), x.raw());
    return r;
}

inline Real atan2(const Real& y, const Real& x) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}
inline Real hypot(const Real& x, const Real& y) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}
inline Real pow(const Real& x, const Real& y) {
    Real r(std::max(y.prec(), x.prec()));
    mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}
inline Real pow2(long e, mpfr_prec_t prec) {  // 2^e exactly
    Real r(prec);
    mpfr_set_si_2exp(r.raw(), 1, e, MPFR_RNDN);
    return r;
}
inline Real const_pi(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}
inline Real const_euler_gamma(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_euler(r.raw(), MPFR_RNDN);
    return r;
}
inline Real const_log2(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_log2(r.raw(), MPFR_RNDN);
    return r;
}

class Complex {
  public:
    Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
    explicit Complex(Real re) : re_(re), im_(Real::zero(re.prec())) {}
    explicit Complex(mpfr_prec_t prec) : re_(Real::zero(prec)), im_(Real::zero(prec)) {}
    static Complex of(double re, double im, mpfr_prec_t prec) {
        return Complex(Real::of(re, prec), Real::of(im, prec));
    }
    static Complex zero(mpfr_prec_t prec) { return Complex(prec); }
    static Complex one(mpfr_prec_t prec) {
        return Complex(Real::of(1L, prec), Real::zero(prec));
    }

    const Real& re() const { return re_; }
    const Real& im() const { return im_; }
    mpfr_prec_t prec() const { return std::max(re_.prec(), im_.prec()); }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    friend Complex operator+(const Complex& a, const Complex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend Complex operator-(const Complex& a, const Complex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    Complex operator-() const { return {-re_, -im_}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend Complex operator*(const Complex& a, const Real& b) { return {a.re_ * b, a.im_ * b}; }
    friend Complex operator*(const Real& b, const Complex& a) { return a * b; }
    friend Complex operator/(const Complex& a, const Real& b) { return {a.re_ / b, a.im_ / b}; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real d = b.re_ * b.re_ + b.im_ * b.im_;
        return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
    }
    friend Complex operator+(const Complex& a, long b) { return {a.re_ + b, a.im_}; }
    friend Complex operator-(const Complex& a, long b) { return {a.re_ - b, a.im_}; }
    friend Complex operator*(const Complex& a, long b) { return {a.re_ * b, a.im_ * b}; }
    friend Complex operator/(const Complex& a, long b) { return {a.re_ / b, a.im_ / b}; }
    friend Complex operator-(long a, const Complex& b) { return {a - b.re_, -b.im_}; }

    friend bool operator==(const Complex& a, const Complex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    std::string serialize() const;  // {"re": <tagged>, "im": <tagged>}
    Complex round_to(mpfr_prec_t prec) const { return {re_.round_to(prec), im_.round_to(prec)}; }

  private:
    Real re_, im_;
};

inline Complex conj(const Complex& z) { return {z.re(), -z.im()}; }
inline Real abs(const Complex& z) { return hypot(z.re(), z.im()); }
inline Real arg(const Complex& z) { return atan2(z.im(), z.re()); }
inline Complex inv(const Complex& z) {
    Real d = z.re() * z.re() + z.im() * z.im();
    return {z.re() / d, -z.im() / d};
}
inline Complex exp(const Complex& z) {
    Real m = exp(z.re());
    Real s(z.im().prec()), c(z.im().prec());
    mpfr_sin_cos(s.raw(), c.raw(), z.im().raw(), MPFR_RNDN);
    return {m * c, m * s};
}
// principal branch, Im in (-pi, pi]
inline Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }
inline Complex sqrt(const Complex& z) {
    if (z.im().is_zero() && z.re().sign() >= 0) return Complex(sqrt(z.re()));
    Real r = abs(z);
    Real s = sqrt((r + z.re()) / 2);
    if (s.is_zero()) {  // negative real axis
        Real t = sqrt(r);
        return {Real::zero(z.prec()), z.im().sign() >= 0 ? t : -t};
    }
    return {s, z.im() / (s * 2)};
}
inline Complex pow(const Complex& z, const Complex& w) { return exp(w * log(z)); }
inline Complex pow(const Complex& z, const Real& x) { return exp(log(z) * Complex(x)); }
// real base > 0 raised to complex exponent
inline Complex pow(const Real& b, const Complex& w) { return exp(w * Complex(log(b))); }
inline Complex ipow(Complex z, long e) {  // integer power by squaring
    mpfr_prec_t p = z.prec();
    bool invert = e < 0;
    unsigned long k = invert ? -(unsigned long)e : (unsigned long)e;
    Complex acc = Complex::one(p);
    while (k) {
        if (k & 1) acc = acc * z;
        z = z * z;
        k >>= 1;
    }
    return invert ? inv(acc) : acc;
}
// sin(pi z) without forming pi*z products that lose the exact half-integer structure
Complex sin_pi(const Complex& z);

// Serialization of a tagged scalar: {"p": <bits>, "v": "<sign><digits>e<exp>"}
std::string serialize_tagged(const Real& x);
Real deserialize_tagged(const std::string& json_fragment);

struct Escalated {
    Complex value;
    long achieved_digits;
    mpfr_prec_t bits_used;
};

// Runs `f` at ctx.bits and 2*ctx.bits, compares, and doubles until the two
// runs agree to target_digits + 5 leading digits. Throws PrecisionError after
// `max_doublings` failed attempts.
Escalated with_precision(const PrecisionContext& ctx,
                         const std::function<Complex(const PrecisionContext&)>& f,
                         int max_doublings = 4);

// digits of agreement between two runs (capped at the full digit count of `bits`)
long agreement_digits(const Complex& lo, const Complex& hi, mpfr_prec_t bits);

}  // namespace gww
