#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwz/exact/ratfun.hpp"

namespace qwz {

// c0 + cn*n + ck*k
struct Affine {
    Rational c0 = 0, cn = 0, ck = 0;

    Rational at(const Rational& n, const Rational& k) const { return c0 + cn * n + ck * k; }
    bool is_constant() const { return cn == 0 && ck == 0; }
    friend Affine operator+(const Affine& a, const Affine& b) { return {a.c0 + b.c0, a.cn + b.cn, a.ck + b.ck}; }
    friend Affine operator-(const Affine& a, const Affine& b) { return {a.c0 - b.c0, a.cn - b.cn, a.ck - b.ck}; }
    friend Affine operator*(const Rational& s, const Affine& a) { return {s * a.c0, s * a.cn, s * a.ck}; }
    friend bool operator==(const Affine& a, const Affine& b) { return a.c0 == b.c0 && a.cn == b.cn && a.ck == b.ck; }
};

// A n^2 + B nk + C k^2 + Dn n + Ek k + F0, exponent of q
struct QuadForm {
    Rational nn = 0, nk = 0, kk = 0, n = 0, k = 0, c = 0;

    Rational at(const Rational& x, const Rational& y) const {
        return nn * x * x + nk * x * y + kk * y * y + n * x + k * y + c;
    }
    friend QuadForm operator+(const QuadForm& a, const QuadForm& b) {
        return {a.nn + b.nn, a.nk + b.nk, a.kk + b.kk, a.n + b.n, a.k + b.k, a.c + b.c};
    }
    friend bool operator==(const QuadForm& a, const QuadForm& b) {
        return a.nn == b.nn && a.nk == b.nk && a.kk == b.kk && a.n == b.n && a.k == b.k && a.c == b.c;
    }
};

// (sign * q^arg ; q^base)_order raised to `power` (negative power = denominator placement)
struct QPochFactor {
    int arg_sign = 1;
    Affine arg;
    Rational base = 1;
    bool infinite = false;
    Affine order;
    int power = 1;

    friend bool operator==(const QPochFactor& a, const QPochFactor& b) {
        return a.arg_sign == b.arg_sign && a.arg == b.arg && a.base == b.base && a.infinite == b.infinite &&
               a.order == b.order && a.power == b.power;
    }
};

// (n, k) -> (an*n + ak*k + a0, bn*n + bk*k + b0)
struct IndexMap {
    long an = 1, ak = 0, a0 = 0;
    long bn = 0, bk = 1, b0 = 0;
};

class QProperTerm {
public:
    int D = 1;
    RationalFunction constant = RationalFunction(1);  // in q^ only
    int sign_n = 0, sign_k = 0;
    QuadForm qpow;
    std::vector<QPochFactor> factors;
    RationalFunction cofactor = RationalFunction(1);  // in (q^, N, K)
    // optional scalar sequence prod_{i=1}^{n-1} r(q^i), r in (q^, N)
    std::optional<RationalFunction> sequence;
    long n0 = 0;

    bool depends_on_k() const {
        if (sign_k != 0 || qpow.nk != 0 || qpow.kk != 0 || qpow.k != 0 || cofactor.contains(Var::K)) return true;
        for (auto& f : factors)
            if (f.arg.ck != 0 || f.order.ck != 0) return true;
        return false;
    }

    friend bool operator==(const QProperTerm& a, const QProperTerm& b) {
        return a.D == b.D && a.constant == b.constant && a.sign_n == b.sign_n && a.sign_k == b.sign_k &&
               a.qpow == b.qpow && a.factors == b.factors && a.cofactor == b.cofactor && a.sequence == b.sequence &&
               a.n0 == b.n0;
    }
};

// exponent of q^ for an exponent x of q; must be integral
inline long qhat_units(const Rational& x, int D, const char* what) {
    Rational y = x * D;
    if (!is_integer(y)) fail(ErrorKind::NotQProper, std::string(what) + " exponent " + x.get_str() + " not in (1/" + std::to_string(D) + ")Z");
    return to_long(y);
}

inline void require_integer(const Rational& x, const char* what) {
    if (!is_integer(x)) fail(ErrorKind::NotQProper, std::string(what) + " = " + x.get_str() + " is not an integer");
}

// D scaling of the q^ variable: q^ -> q^^(factor)
inline RationalFunction rescale_qhat(const RationalFunction& f, int factor) {
    if (factor == 1) return f;
    auto scale = [&](const MultiPoly& p) {
        std::vector<MultiPoly::Term> ts;
        for (auto [e, c] : p.terms()) {
            e[0] *= factor;
            ts.push_back({e, c});
        }
        return MultiPoly::from_terms(std::move(ts));
    };
    return RationalFunction(scale(f.num()), scale(f.den()));
}

inline QProperTerm with_denominator(const QProperTerm& t, int D) {
    if (D % t.D != 0) fail(ErrorKind::InvalidArgument, "denominator must be a multiple of the term's");
    QProperTerm r = t;
    int f = D / t.D;
    r.D = D;
    r.constant = rescale_qhat(t.constant, f);
    r.cofactor = rescale_qhat(t.cofactor, f);
    if (t.sequence) r.sequence = rescale_qhat(*t.sequence, f);
    return r;
}

// q-properness: every shift quotient must be rational in (q^, N, K)
inline void validate_qproper(const QProperTerm& t) {
    if (t.D < 1) fail(ErrorKind::NotQProper, "D must be positive");
    if (t.constant.contains(Var::N) || t.constant.contains(Var::K))
        fail(ErrorKind::NotQProper, "constant depends on n or k");
    if (t.constant.is_zero()) fail(ErrorKind::NotQProper, "zero constant");
    require_integer(2 * t.qpow.nn, "2A");
    require_integer(t.qpow.nk, "B");
    require_integer(2 * t.qpow.kk, "2C");
    qhat_units(t.qpow.nn + t.qpow.n, t.D, "q-power n-step");
    qhat_units(t.qpow.kk + t.qpow.k, t.D, "q-power k-step");
    qhat_units(t.qpow.c, t.D, "q-power constant");
    qhat_units(t.qpow.nn, t.D, "q-power n^2");
    qhat_units(t.qpow.kk, t.D, "q-power k^2");
    for (auto& f : t.factors) {
        if (f.arg_sign != 1 && f.arg_sign != -1) fail(ErrorKind::NotQProper, "argument sign must be +-1");
        if (f.base <= 0) fail(ErrorKind::NotQProper, "base exponent must be positive");
        if (f.power == 0) fail(ErrorKind::NotQProper, "zero multiplicity");
        require_integer(f.arg.cn, "argument n-coefficient");
        require_integer(f.arg.ck, "argument k-coefficient");
        qhat_units(f.arg.c0, t.D, "argument");
        qhat_units(f.base, t.D, "base");
        if (f.infinite) {
            if (!f.arg.is_constant()) fail(ErrorKind::NotQProper, "infinite factor with n/k dependent argument");
            continue;
        }
        require_integer(f.order.cn, "order n-coefficient");
        require_integer(f.order.ck, "order k-coefficient");
        if (!is_integer(f.order.c0))
            fail(ErrorKind::NotQProper, "fractional order " + f.order.c0.get_str() + " in a summand");
        require_integer(f.base * f.order.cn, "base*order n-coefficient");
        require_integer(f.base * f.order.ck, "base*order k-coefficient");
        if (f.arg.cn != 0) require_integer(f.arg.cn / f.base, "n-slope of argument over base");
        if (f.arg.ck != 0) require_integer(f.arg.ck / f.base, "k-slope of argument over base");
    }
    if (t.sequence && (t.sequence->contains(Var::K)))
        fail(ErrorKind::NotQProper, "sequence factor depends on k");
}

// ---- factored shift quotients ----

// product of LaurentPoly factors raised to integer powers, times a rational scalar
struct FactoredRatio {
    Rational scalar = 1;
    std::vector<std::pair<LaurentPoly, int>> parts;

    void mul(const LaurentPoly& p, int e) {
        if (e == 0) return;
        if (p.is_constant()) {
            scalar *= rpow(p.constant_value(), e);
            return;
        }
        for (auto& [q, x] : parts)
            if (q == p) {
                x += e;
                return;
            }
        parts.push_back({p, e});
    }
    void mul(const FactoredRatio& o) {
        scalar *= o.scalar;
        for (auto& [p, e] : o.parts) mul(p, e);
    }
    RationalFunction to_rf() const {
        LaurentPoly n(scalar), d(1);
        for (auto& [p, e] : parts) {
            if (e > 0) n *= p.pow(static_cast<unsigned>(e));
            else if (e < 0) d *= p.pow(static_cast<unsigned>(-e));
        }
        return RationalFunction::from_laurent(n, d);
    }
};

namespace detail {

// 1 - sign * q^^e0 * N^a * K^b
inline LaurentPoly binomial(int sign, long e0, long a, long b) {
    return LaurentPoly(1) - LaurentPoly::monomial(Rational(sign), {static_cast<int>(e0), static_cast<int>(a), static_cast<int>(b)});
}

// signed product prod_{j=lo}^{hi-1} f(j) as exponents on FactoredRatio
template <class F>
void signed_range(FactoredRatio& out, long lo, long hi, int power, F&& f) {
    if (hi >= lo) {
        for (long j = lo; j < hi; ++j) out.mul(f(j), power);
    } else {
        for (long j = hi; j < lo; ++j) out.mul(f(j), -power);
    }
}

}  // namespace detail

// t(n+dn, k+dk) / t(n, k) as a product of Laurent factors
inline FactoredRatio shift_ratio(const QProperTerm& t, long dn, long dk) {
    FactoredRatio r;
    const int D = t.D;
    r.scalar = ((t.sign_n * dn + t.sign_k * dk) % 2 != 0) ? -1 : 1;
    {
        const QuadForm& Q = t.qpow;
        Rational ec = Q.nn * dn * dn + Q.nk * dn * dk + Q.kk * dk * dk + Q.n * dn + Q.k * dk;
        Rational en = 2 * Q.nn * dn + Q.nk * dk, ek = Q.nk * dn + 2 * Q.kk * dk;
        require_integer(en, "n-exponent of q-power quotient");
        require_integer(ek, "k-exponent of q-power quotient");
        r.mul(LaurentPoly::monomial(1, {static_cast<int>(qhat_units(ec, D, "q-power quotient")), static_cast<int>(to_long(en)),
                                        static_cast<int>(to_long(ek))}),
              1);
    }
    for (auto& f : t.factors) {
        if (f.infinite) continue;
        Rational ds = (f.arg.cn * dn + f.arg.ck * dk) / f.base;
        require_integer(ds, "argument shift over base");
        long s = to_long(ds);
        long dm = to_long(f.order.cn * dn + f.order.ck * dk);
        long bq = qhat_units(f.base, D, "base");
        long u = qhat_units(f.arg.c0, D, "argument");
        long v = to_long(f.arg.cn), w = to_long(f.arg.ck);
        // A B^m B^i : exponents of q^, N, K
        long mu = u + bq * to_long(f.order.c0);
        long mv = v + to_long(f.base * f.order.cn), mw = w + to_long(f.base * f.order.ck);
        detail::signed_range(r, 0, s + dm, f.power, [&](long i) { return detail::binomial(f.arg_sign, mu + bq * i, mv, mw); });
        detail::signed_range(r, 0, s, -f.power, [&](long j) { return detail::binomial(f.arg_sign, u + bq * j, v, w); });
    }
    if (!t.cofactor.is_constant()) {
        Exps sn{static_cast<int>(D * dn), 0, 0}, sk{static_cast<int>(D * dk), 0, 0};
        auto shifted = [&](const MultiPoly& p) {
            LaurentPoly l = p.as<true>();
            if (dn != 0) l = l.substitute_scale(Var::N, sn);
            if (dk != 0) l = l.substitute_scale(Var::K, sk);
            return l;
        };
        if (!t.cofactor.num().is_constant()) {
            r.mul(shifted(t.cofactor.num()), 1);
            r.mul(t.cofactor.num().as<true>(), -1);
        }
        if (!t.cofactor.den().is_constant()) {
            r.mul(shifted(t.cofactor.den()), -1);
            r.mul(t.cofactor.den().as<true>(), 1);
        }
    }
    if (t.sequence && dn != 0) {
        if (dk != 0 || dn < 0) fail(ErrorKind::InvalidArgument, "sequence factor supports forward n-shifts only");
        for (long i = 0; i < dn; ++i) {
            LaurentPoly sn = t.sequence->num().as<true>().substitute_scale(Var::N, {static_cast<int>(D * i), 0, 0});
            LaurentPoly sd = t.sequence->den().as<true>().substitute_scale(Var::N, {static_cast<int>(D * i), 0, 0});
            r.mul(sn, 1);
            r.mul(sd, -1);
        }
    }
    return r;
}

enum class Direction { n, k };

inline RationalFunction shift_quotient(const QProperTerm& t, Direction d) {
    return d == Direction::n ? shift_ratio(t, 1, 0).to_rf() : shift_ratio(t, 0, 1).to_rf();
}

// ---- index substitution and products ----

inline Affine subst_affine(const Affine& a, const IndexMap& m) {
    return {a.c0 + a.cn * m.a0 + a.ck * m.b0, a.cn * m.an + a.ck * m.bn, a.cn * m.ak + a.ck * m.bk};
}

inline QProperTerm substitute(const QProperTerm& t, const IndexMap& m) {
    if (t.sequence) fail(ErrorKind::InvalidArgument, "index substitution of a sequence-carrying term");
    QProperTerm r = t;
    // sign exponent s_n n' + s_k k'
    r.sign_n = static_cast<int>(t.sign_n * m.an + t.sign_k * m.bn);
    r.sign_k = static_cast<int>(t.sign_n * m.ak + t.sign_k * m.bk);
    int sc = static_cast<int>(t.sign_n * m.a0 + t.sign_k * m.b0);
    if (sc % 2 != 0) r.constant = -r.constant;
    const QuadForm& Q = t.qpow;
    // n' = a.n + a.k k + a0, k' = b.n n + b.k k + b0
    Rational an = m.an, ak = m.ak, a0 = m.a0, bn = m.bn, bk = m.bk, b0 = m.b0;
    QuadForm R;
    R.nn = Q.nn * an * an + Q.nk * an * bn + Q.kk * bn * bn;
    R.kk = Q.nn * ak * ak + Q.nk * ak * bk + Q.kk * bk * bk;
    R.nk = 2 * Q.nn * an * ak + Q.nk * (an * bk + ak * bn) + 2 * Q.kk * bn * bk;
    R.n = 2 * Q.nn * an * a0 + Q.nk * (an * b0 + a0 * bn) + 2 * Q.kk * bn * b0 + Q.n * an + Q.k * bn;
    R.k = 2 * Q.nn * ak * a0 + Q.nk * (ak * b0 + a0 * bk) + 2 * Q.kk * bk * b0 + Q.n * ak + Q.k * bk;
    R.c = Q.nn * a0 * a0 + Q.nk * a0 * b0 + Q.kk * b0 * b0 + Q.n * a0 + Q.k * b0 + Q.c;
    r.qpow = R;
    for (auto& f : r.factors) {
        f.arg = subst_affine(f.arg, m);
        if (!f.infinite) f.order = subst_affine(f.order, m);
    }
    // N -> q^^(D a0) N^an K^ak, K -> q^^(D b0) N^bn K^bk
    auto sub = [&](const MultiPoly& p) {
        std::vector<LaurentPoly::Term> ts;
        for (auto& [e, c] : p.terms()) {
            Exps x{static_cast<int>(e[0] + t.D * (m.a0 * e[1] + m.b0 * e[2])), static_cast<int>(m.an * e[1] + m.bn * e[2]),
                   static_cast<int>(m.ak * e[1] + m.bk * e[2])};
            ts.push_back({x, c});
        }
        return LaurentPoly::from_terms(std::move(ts));
    };
    r.cofactor = RationalFunction::from_laurent(sub(t.cofactor.num()), sub(t.cofactor.den()));
    return r;
}

inline QProperTerm operator*(const QProperTerm& a, const QProperTerm& b) {
    int D = std::lcm(a.D, b.D);
    QProperTerm x = with_denominator(a, D), y = with_denominator(b, D);
    x.constant *= y.constant;
    x.sign_n += y.sign_n;
    x.sign_k += y.sign_k;
    x.qpow = x.qpow + y.qpow;
    x.factors.insert(x.factors.end(), y.factors.begin(), y.factors.end());
    x.cofactor *= y.cofactor;
    if (y.sequence) x.sequence = x.sequence ? *x.sequence * *y.sequence : *y.sequence;
    x.n0 = std::max(x.n0, y.n0);
    return x;
}

inline QProperTerm times_rational(const QProperTerm& t, const RationalFunction& r) {
    QProperTerm x = t;
    x.cofactor *= r;
    return x;
}

}  // namespace qwz
