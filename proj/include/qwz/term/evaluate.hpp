#pragma once

#include <functional>
#include <map>

#include "qwz/term/qproper_term.hpp"

namespace qwz {

// Evaluation of a term at integer (n, k). A nonzero direction (dn, dk) evaluates the limit
// p -> 0 of t(n + p*dn, k + p*dk) with integer orders held fixed; vanishing factors contribute their
// first-order slope in p*log(q), and the log(q) powers cancel when the net order is zero.
template <class Num>
class TermEvaluator {
public:
    using FromRational = std::function<Num(const Rational&)>;

    TermEvaluator(Num qhat, FromRational conv) : qhat_(std::move(qhat)), conv_(std::move(conv)) {}

    const Num& qhat() const { return qhat_; }
    Num from_rational(const Rational& r) const { return conv_(r); }

    Num qhat_pow(long e) {
        auto it = cache_.find(e);
        if (it != cache_.end()) return it->second;
        Num v = conv_(Rational(1));
        if (e != 0) {
            Num b = e > 0 ? qhat_ : conv_(Rational(1)) / qhat_;
            unsigned long x = static_cast<unsigned long>(e > 0 ? e : -e);
            while (x) {
                if (x & 1ul) v = v * b;
                x >>= 1ul;
                if (x) b = b * b;
            }
        }
        cache_.emplace(e, v);
        return v;
    }

    // univariate Laurent polynomial in q^ (exponents of N, K must be zero)
    Num laurent_at(const LaurentPoly& p) {
        Num acc = conv_(Rational(0));
        for (auto& [e, c] : p.terms()) acc = acc + qhat_pow(e[0]) * conv_(c);
        return acc;
    }

    struct Accum {
        Num value;
        int order = 0;
        int zeros_num = 0;
        int zeros_den = 0;
    };

    Num evaluate(const QProperTerm& t, long n, long k, long dn = 0, long dk = 0) {
        Accum a{conv_(Rational(1))};
        accumulate(a, t, n, k, dn, dk);
        return finish(a);
    }

    Num finish(const Accum& a) const {
        if (a.zeros_den > 0) {
            if (a.zeros_num > 0) fail(ErrorKind::AmbiguousLimit, "0/0 in term evaluation");
            fail(ErrorKind::PoleEncountered, "term has a pole");
        }
        if (a.zeros_num > 0 || a.order > 0) return conv_(Rational(0));
        if (a.order < 0) fail(ErrorKind::PoleEncountered, "term has a pole (net order " + std::to_string(a.order) + ")");
        return a.value;
    }

    void accumulate(Accum& a, const QProperTerm& t, long n, long k, long dn, long dk) {
        const int D = t.D;
        const bool moving = dn != 0 || dk != 0;
        if ((t.sign_n * n + t.sign_k * k) % 2 != 0) a.value = conv_(Rational(0)) - a.value;
        a.value = a.value * qhat_pow(qhat_units(t.qpow.at(n, k), D, "q-power"));
        mul_poly_value(a, t.constant.num().as<true>(), 1);
        mul_poly_value(a, t.constant.den().as<true>(), -1);
        for (auto& f : t.factors) {
            if (f.infinite) fail(ErrorKind::InvalidArgument, "infinite q-Pochhammer factor in a summand");
            long m = to_long(f.order.at(n, k));
            long bq = qhat_units(f.base, D, "base");
            long E0 = qhat_units(f.arg.at(n, k), D, "argument");
            Rational s_arg = f.arg.cn * dn + f.arg.ck * dk;
            Rational s_ord = f.order.cn * dn + f.order.ck * dk;
            std::optional<long> jstar;
            if (f.arg_sign == 1 && (-E0) % bq == 0) jstar = -E0 / bq;
            long lo = m >= 0 ? 0 : m, hi = m >= 0 ? m : 0;
            int place = m >= 0 ? 1 : -1;
            // frozen finite product, excluding the vanishing index
            Num prod = conv_(Rational(1));
            if (hi > lo) {
                Num step = qhat_pow(bq), x = qhat_pow(E0 + bq * lo);
                Num sgn = conv_(Rational(f.arg_sign));
                for (long j = lo; j < hi; ++j) {
                    if (!(jstar && *jstar == j)) prod = prod * (conv_(Rational(1)) - sgn * x);
                    x = x * step;
                }
            }
            for (int p = 0; p < std::abs(f.power); ++p) a.value = f.power > 0 ? Num(a.value * prod) : Num(a.value / prod);
            if (!jstar) continue;
            auto contribute = [&](const Rational& slope, int sgn_place) {
                int pw = f.power * sgn_place;
                if (!moving || slope == 0) {
                    (pw > 0 ? a.zeros_num : a.zeros_den) += std::abs(pw);
                    return;
                }
                Num c = conv_(-slope);
                for (int p = 0; p < std::abs(pw); ++p) a.value = pw > 0 ? Num(a.value * c) : Num(a.value / c);
                a.order += pw;
            };
            if (!moving || s_ord == 0) {
                if (*jstar >= lo && *jstar < hi) contribute(s_arg, place);
            } else {
                if (*jstar >= 0) contribute(s_arg, 1);
                if (*jstar >= m) contribute(s_arg + f.base * s_ord, -1);
            }
        }
        auto sub = [&](const MultiPoly& p) {
            std::vector<LaurentPoly::Term> ts;
            for (auto& [e, c] : p.terms()) ts.push_back({{static_cast<int>(e[0] + D * (n * e[1] + k * e[2])), 0, 0}, c});
            return LaurentPoly::from_terms(std::move(ts));
        };
        mul_cofactor(a, t.cofactor.num(), 1, sub, dn, dk, moving);
        mul_cofactor(a, t.cofactor.den(), -1, sub, dn, dk, moving);
        if (t.sequence) {
            for (long i = 1; i < n; ++i) {
                auto si = [&](const MultiPoly& p) {
                    std::vector<LaurentPoly::Term> ts;
                    for (auto& [e, c] : p.terms()) ts.push_back({{static_cast<int>(e[0] + D * i * e[1]), 0, 0}, c});
                    return LaurentPoly::from_terms(std::move(ts));
                };
                mul_poly_value(a, si(t.sequence->num()), 1);
                mul_poly_value(a, si(t.sequence->den()), -1);
            }
        }
    }

private:
    // multiply by a univariate polynomial value^place; symbolic zero counts as an exact zero
    void mul_poly_value(Accum& a, const LaurentPoly& p, int place) {
        if (p.is_zero()) {
            (place > 0 ? a.zeros_num : a.zeros_den) += 1;
            return;
        }
        Num v = laurent_at(p);
        a.value = place > 0 ? Num(a.value * v) : Num(a.value / v);
    }

    template <class Sub>
    void mul_cofactor(Accum& a, const MultiPoly& P, int place, Sub&& sub, long dn, long dk, bool moving) {
        if (P.is_constant()) {
            Rational c = P.constant_value();
            a.value = place > 0 ? Num(a.value * conv_(c)) : Num(a.value / conv_(c));
            return;
        }
        LaurentPoly u = sub(P);
        if (!u.is_zero()) {
            Num v = laurent_at(u);
            a.value = place > 0 ? Num(a.value * v) : Num(a.value / v);
            return;
        }
        if (!moving) {
            (place > 0 ? a.zeros_num : a.zeros_den) += 1;
            return;
        }
        // theta = dn N d/dN + dk K d/dK applied until the substituted value is nonzero
        MultiPoly cur = P;
        Rational fact = 1;
        int maxm = P.degree(Var::N) * static_cast<int>(std::abs(dn)) + P.degree(Var::K) * static_cast<int>(std::abs(dk)) + 2;
        for (int m = 1; m <= maxm + 64; ++m) {
            std::vector<MultiPoly::Term> ts;
            for (auto& [e, c] : cur.terms()) {
                Rational w = Rational(dn * e[1] + dk * e[2]);
                if (w != 0) ts.push_back({e, c * w});
            }
            cur = MultiPoly::from_terms(std::move(ts));
            fact *= m;
            if (cur.is_zero()) break;
            LaurentPoly um = sub(cur);
            if (!um.is_zero()) {
                Num v = laurent_at(um) / conv_(fact);
                a.value = place > 0 ? Num(a.value * v) : Num(a.value / v);
                a.order += place * m;
                return;
            }
        }
        (place > 0 ? a.zeros_num : a.zeros_den) += 1;
    }

    Num qhat_;
    FromRational conv_;
    std::map<long, Num> cache_;
};

inline Rational qhat_exact(const Rational& q, int D) {
    if (q == 0) fail(ErrorKind::InvalidArgument, "q = 0");
    auto r = exact_root(q, static_cast<unsigned>(D));
    if (!r) fail(ErrorKind::NoExactRoot, q.get_str() + " has no exact " + std::to_string(D) + "-th root");
    return *r;
}

inline Rational eval_exact_qhat(const QProperTerm& t, long n, long k, const Rational& qhat, long dn = 0, long dk = 0) {
    TermEvaluator<Rational> ev(qhat, [](const Rational& r) { return r; });
    return ev.evaluate(t, n, k, dn, dk);
}

inline Rational eval_exact(const QProperTerm& t, long n, long k, const Rational& q) {
    return eval_exact_qhat(t, n, k, qhat_exact(q, t.D));
}

// ---- exact termwise q -> 1 limit ----

struct LimitAccum {
    int order = 0;
    Rational value = 1;
    bool zero = false;
    bool pole = false;

    void mul(const QOneOrder& o, int place) {
        order += place * o.order;
        value = place > 0 ? Rational(value * o.limit) : Rational(value / o.limit);
    }
};

inline void limit_mul_laurent(LimitAccum& acc, const LaurentPoly& p, int place) {
    if (p.is_zero()) {
        (place > 0 ? acc.zero : acc.pole) = true;
        return;
    }
    acc.mul(vanishing_order_q1(RationalFunction::from_laurent(p)), place);
}

// limit of t(n,k;q)/(1-q)^s as q -> 1, with q = q^^D
inline Rational term_q1_limit(const QProperTerm& t, int scale_power, long n, long k) {
    const int D = t.D;
    LimitAccum acc;
    if ((t.sign_n * n + t.sign_k * k) % 2 != 0) acc.value = -acc.value;
    acc.mul(vanishing_order_q1(t.constant), 1);
    for (auto& f : t.factors) {
        if (f.infinite) fail(ErrorKind::InvalidArgument, "infinite factor in summand");
        long m = to_long(f.order.at(n, k));
        long bq = qhat_units(f.base, D, "base");
        long E0 = qhat_units(f.arg.at(n, k), D, "argument");
        long lo = m >= 0 ? 0 : m, hi = m >= 0 ? m : 0;
        int place = (m >= 0 ? 1 : -1) * (f.power > 0 ? 1 : -1);
        for (int p = 0; p < std::abs(f.power); ++p)
            for (long j = lo; j < hi; ++j) {
                long E = E0 + bq * j;
                if (f.arg_sign == -1) {
                    acc.mul({0, Rational(2)}, place);
                } else if (E == 0) {
                    (place > 0 ? acc.zero : acc.pole) = true;
                } else {
                    acc.mul({1, Rational(E)}, place);
                }
            }
    }
    auto sub = [&](const MultiPoly& p) {
        std::vector<LaurentPoly::Term> ts;
        for (auto& [e, c] : p.terms()) ts.push_back({{static_cast<int>(e[0] + D * (n * e[1] + k * e[2])), 0, 0}, c});
        return LaurentPoly::from_terms(std::move(ts));
    };
    limit_mul_laurent(acc, sub(t.cofactor.num()), 1);
    limit_mul_laurent(acc, sub(t.cofactor.den()), -1);
    if (t.sequence) {
        for (long i = 1; i < n; ++i) {
            auto si = [&](const MultiPoly& p) {
                std::vector<LaurentPoly::Term> ts;
                for (auto& [e, c] : p.terms()) ts.push_back({{static_cast<int>(e[0] + D * i * e[1]), 0, 0}, c});
                return LaurentPoly::from_terms(std::move(ts));
            };
            limit_mul_laurent(acc, si(t.sequence->num()), 1);
            limit_mul_laurent(acc, si(t.sequence->den()), -1);
        }
    }
    if (acc.pole) fail(ErrorKind::DivergentLimit, "term has a pole at this (n, k)");
    if (acc.zero) return Rational(0);
    int net = acc.order - scale_power;
    if (net < 0)
        fail(ErrorKind::DivergentLimit, "vanishing order " + std::to_string(acc.order) + " < scale power " + std::to_string(scale_power));
    if (net > 0) return Rational(0);
    // (1 - q^^D)^s / (1 - q^)^s -> D^s
    return acc.value / rpow(Rational(D), scale_power);
}

}  // namespace qwz
