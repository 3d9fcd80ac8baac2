#include "gww/precision.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace gww {

std::string Real::serialize() const {
    if (mpfr_nan_p(v_)) return "+nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "+inf" : "-inf";
    if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0e0" : "+0e0";
    mpfr_exp_t e;
    // n=0 digits: mpfr chooses the minimal count that round-trips at this precision
    char* s = mpfr_get_str(nullptr, &e, 10, 0, v_, MPFR_RNDN);
    std::string digits(s);
    mpfr_free_str(s);
    std::string out;
    if (!digits.empty() && digits[0] == '-') {
        out = "-" + digits.substr(1);
    } else {
        out = "+" + digits;
    }
    out += "e" + std::to_string(static_cast<long>(e));
    return out;
}

Real Real::deserialize(const std::string& s, mpfr_prec_t prec) {
    Real r(prec);
    if (s == "+nan" || s == "-nan") {
        mpfr_set_nan(r.v_);
        return r;
    }
    if (s == "+inf" || s == "-inf") {
        mpfr_set_inf(r.v_, s[0] == '+' ? 1 : -1);
        return r;
    }
    auto epos = s.rfind('e');
    if (epos == std::string::npos || s.size() < 2 || (s[0] != '+' && s[0] != '-'))
        throw DomainError("Real::deserialize: malformed scalar '" + s + "'");
    std::string digits = s.substr(1, epos - 1);
    long e = std::strtol(s.c_str() + epos + 1, nullptr, 10);
    // value = sign * 0.<digits> * 10^e
    std::string lit = std::string(s[0] == '-' ? "-" : "") + "0." + digits + "e" + std::to_string(e);
    if (mpfr_set_str(r.v_, lit.c_str(), 10, MPFR_RNDN) != 0)
        throw DomainError("Real::deserialize: unparsable scalar '" + s + "'");
    return r;
}

std::string Complex::serialize() const {
    return "{\"re\":" + serialize_tagged(re_) + ",\"im\":" + serialize_tagged(im_) + "}";
}

Complex sin_pi(const Complex& z) {
    mpfr_prec_t p = z.prec();
    Real pi = const_pi(p);
    // sin(pi(x+iy)) = sin(pi x)cosh(pi y) + i cos(pi x)sinh(pi y)
    Real px = pi * z.re();
    Real py = pi * z.im();
    Real s(p), c(p);
    mpfr_sin_cos(s.raw(), c.raw(), px.raw(), MPFR_RNDN);
    return {s * cosh(py), c * sinh(py)};
}

std::string serialize_tagged(const Real& x) {
    return "{\"p\":" + std::to_string(static_cast<long>(x.prec())) + ",\"v\":\"" + x.serialize() +
           "\"}";
}

Real deserialize_tagged(const std::string& s) {
    auto ppos = s.find("\"p\":");
    auto vpos = s.find("\"v\":\"");
    if (ppos == std::string::npos || vpos == std::string::npos)
        throw DomainError("deserialize_tagged: malformed record");
    long bits = std::strtol(s.c_str() + ppos + 4, nullptr, 10);
    auto vend = s.find('"', vpos + 5);
    if (bits < 2 || vend == std::string::npos) throw DomainError("deserialize_tagged: malformed record");
    return Real::deserialize(s.substr(vpos + 5, vend - vpos - 5), bits);
}

long agreement_digits(const Complex& lo, const Complex& hi, mpfr_prec_t bits) {
    long full = static_cast<long>(static_cast<double>(bits) * 0.30102999566398);
    Real d = abs(lo - hi);
    if (d.is_zero()) return full;
    Real scale = abs(hi);
    if (scale.is_zero()) return 0;
    Real rel = d / scale;
    double l10 = mpfr_get_d(rel.raw(), MPFR_RNDN);
    long digits;
    if (l10 <= 0.0) {
        // underflowed ratio: recover exponent from mpfr
        mpfr_exp_t e = mpfr_get_exp(rel.raw());
        digits = static_cast<long>(-static_cast<double>(e) * 0.30102999566398);
    } else {
        digits = static_cast<long>(-std::log10(l10));
    }
    if (digits < 0) digits = 0;
    if (digits > full) digits = full;
    return digits;
}

Escalated with_precision(const PrecisionContext& ctx,
                         const std::function<Complex(const PrecisionContext&)>& f,
                         int max_doublings) {
    PrecisionContext cur = ctx;
    Complex lo = f(cur);
    for (int attempt = 0; attempt <= max_doublings; ++attempt) {
        PrecisionContext next = cur.doubled();
        Complex hi = f(next);
        long digits = agreement_digits(lo, hi, cur.bits);
        if (digits >= ctx.target_digits + 5 || digits >= cur.full_digits())
            return {hi, digits, next.bits};
        lo = hi;
        cur = next;
    }
    throw PrecisionError("precision escalation failed");
}

}  // namespace gww
