#pragma once

#include <climits>
#include <cstdlib>

#include "qwz/numeric/ball.hpp"

namespace qwz {

struct PrecisionContext {
    mpfr_prec_t bits = 192;
    Rational eps = Rational(1, 1) / Rational(Integer("1000000000000000000000000000000"));  // 10^-30
    long max_terms = 2000;
    double q_max = 0.95;

    PrecisionContext() = default;
    PrecisionContext(mpfr_prec_t b, Rational e, long terms = 2000) : bits(b), eps(std::move(e)), max_terms(terms) { validate(); }

    void validate() const {
        if (bits < 16) fail(ErrorKind::InvalidArgument, "precision below 16 bits");
        if (eps <= 0) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
        if (max_terms <= 0) fail(ErrorKind::InvalidArgument, "max_terms must be positive");
        // eps >= 2^(8 - bits)
        Rational floor = rpow(Rational(2), 8 - static_cast<long>(bits));
        if (eps < floor) fail(ErrorKind::InvalidArgument, "epsilon below 2^(8 - bits)");
    }

    Ball ball(const Rational& r) const { return Ball(r, bits); }
    Mpfr eps_up() const { return rad::from(eps); }

    // default precision, overridable through QWZ_PREC
    static PrecisionContext from_env() {
        PrecisionContext c;
        if (const char* s = std::getenv("QWZ_PREC")) {
            long b = std::strtol(s, nullptr, 10);
            if (b >= 16) c.bits = b;
        }
        return c;
    }
};

inline Rational pow10_neg(long d) { return Rational(1) / rpow(Rational(10), d); }

namespace detail {

inline void check_q(const Ball& q, const PrecisionContext& ctx) {
    Mpfr m = q.mag();
    if (mpfr_cmp_d(m.get(), ctx.q_max) > 0) fail(ErrorKind::QTooCloseToOne, "|q| = " + q.mid().str(8) + " exceeds q_max");
    if (q.contains_zero()) fail(ErrorKind::InvalidArgument, "q = 0");
}

}  // namespace detail

// prod_{j<m} (1 - a q^j)
inline Ball qpoch_finite(const Ball& a, const Ball& q, long m) {
    Ball one(Rational(1), std::max(a.prec(), q.prec()));
    Ball p = one, x = a;
    for (long j = 0; j < m; ++j) {
        p *= one - x;
        if (j + 1 < m) x *= q;
    }
    return p;
}

namespace detail {

// prod_{j>=0} (1 - x q^j) for |x| + r_x <= 1/2 in plain mpfr, with an a-priori bound:
// rounding contributes sum (1.01 j u |x_j| / (1 - |x_j|) + 2u) to |log P|, the input radii
// r_x sum |q|^j/(1-|x_j|) and r_q sum j |x| |q|^(j-1)/(1-|x_j|), and the truncated tail 2|x_K|/(1-|q|)
inline Ball qpoch_tail_fast(const Ball& x0, const Ball& q, const PrecisionContext& ctx) {
    mpfr_prec_t p = ctx.bits + 32;
    double u = std::ldexp(1.0, 1 - static_cast<int>(p));
    double xm = x0.mag().to_double() * (1 + 1e-15), qm = q.mag().to_double() * (1 + 1e-15);
    double rx = x0.rad().to_double() * (1 + 1e-15), rq = q.rad().to_double() * (1 + 1e-15);
    double stop = rad::div(ctx.eps_up(), rad::from(Rational(4))).to_double();
    Mpfr P(p), x(p), Q(p), t(p);
    mpfr_set_ui(P.get(), 1, MPFR_RNDN);
    mpfr_set(x.get(), x0.mid().get(), MPFR_RNDN);
    mpfr_set(Q.get(), q.mid().get(), MPFR_RNDN);
    double round = 0, sx = 0, sq = 0, qpow = 1;
    long j = 0;
    for (; xm >= stop; ++j) {
        mpfr_ui_sub(t.get(), 1, x.get(), MPFR_RNDN);
        mpfr_mul(P.get(), P.get(), t.get(), MPFR_RNDN);
        mpfr_mul(x.get(), x.get(), Q.get(), MPFR_RNDN);
        double g = 1.0 / (1.0 - xm);
        round += 1.01 * static_cast<double>(j) * u * xm * g + 2 * u;
        sx += qpow * g;
        if (j > 0) sq += static_cast<double>(j) * (xm / qm) * g;
        xm *= qm * (1 + 4e-16);
        qpow *= qm * (1 + 4e-16);
        if (j > 200'000'000) fail(ErrorKind::QTooCloseToOne, "infinite product did not converge");
    }
    double tail = 2 * xm / (1 - qm);
    double lg = (round + rx * sx + rq * sq + tail) * (1 + 1e-12);
    if (!(lg <= 0.5)) fail(ErrorKind::QTooCloseToOne, "error bound of the infinite product is too large");
    // |P e^s - P| <= |P| (e^lg - 1) <= 2 lg |P|
    Mpfr e = rad::mul(rad::abs_up(P), Mpfr::from_d(2 * lg * (1 + 1e-12), kRadPrec));
    mpfr_prec_round(P.get(), ctx.bits, MPFR_RNDN);
    Ball out(std::move(P), std::move(e));
    out.add_error(rad::ulp(out.mid(), ctx.bits));
    return out;
}

}  // namespace detail

// prod_{j>=0} (1 - a q^j): leading factors in ball arithmetic until |a q^j| <= 1/2, the rest by the fast path
inline Ball qpoch_infinite(const Ball& a, const Ball& q, const PrecisionContext& ctx) {
    detail::check_q(q, ctx);
    Ball one = ctx.ball(1);
    if (a.is_exact_zero()) return one;
    Mpfr half = rad::from(Rational(1, 2));
    Ball p = one, x = a;
    for (long k = 0; !rad::le(x.mag(), half); ++k) {
        p *= one - x;
        x *= q;
        if (k > 10'000'000) fail(ErrorKind::QTooCloseToOne, "infinite product did not converge");
    }
    return p * detail::qpoch_tail_fast(x, q, ctx);
}

// (a;q)_nu = (a;q)_inf / (a q^nu;q)_inf
inline Ball qpoch_fractional(const Ball& a, const Ball& q, const Rational& nu, const PrecisionContext& ctx) {
    if (nu == 0) return ctx.ball(1);
    Ball qnu = nu.get_den() == 1 ? q.pow(to_long(nu)) : q.pow(nu);
    Ball den = qpoch_infinite(a * qnu, q, ctx);
    if (den.contains_zero()) fail(ErrorKind::PoleEncountered, "(a q^nu; q)_inf vanishes");
    return qpoch_infinite(a, q, ctx) / den;
}

// Gamma_q(x) = (1 - q)^(1 - x) (q;q)_inf / (q^x;q)_inf, 0 < q < 1
inline Ball qgamma(const Rational& x, const Ball& q, const PrecisionContext& ctx) {
    if (q.mid().sign() <= 0) fail(ErrorKind::InvalidArgument, "q-Gamma needs 0 < q < 1");
    if (x <= 0 && x.get_den() == 1) fail(ErrorKind::PoleEncountered, "q-Gamma pole at non-positive integer");
    Ball one = ctx.ball(1);
    Ball qx = q.pow(x);
    Ball den = qpoch_infinite(qx, q, ctx);
    if (den.contains_zero()) fail(ErrorKind::PoleEncountered, "q-Gamma pole");
    Ball pre = (one - q).pow(Rational(1) - x);
    return pre * qpoch_infinite(q, q, ctx) / den;
}

}  // namespace qwz
