#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qwz/telescoper/zeilberger.hpp"
#include "qwz/term/evaluate.hpp"

namespace qwz {

// p(N) = c * q^^qexp * N^npow * prod (1 - s q^^e N^v)^m
struct QGeomFactorization {
    RationalFunction c = RationalFunction(1);  // free of N
    long qexp = 0;
    long npow = 0;
    struct Binomial {
        int s = 1;
        long e = 0;
        int v = 1;
        int m = 1;
    };
    std::vector<Binomial> binomials;
};

namespace detail {

inline MultiPoly binomial_poly(int s, long e, int v) {
    // 1 - s q^^e N^v, scaled by q^^(-e) when e < 0
    if (e >= 0) return MultiPoly(1) - MultiPoly::monomial(Rational(s), {static_cast<int>(e), v, 0});
    return MultiPoly::monomial(1, {static_cast<int>(-e), 0, 0}) - MultiPoly::monomial(Rational(s), {0, v, 0});
}

// pull out factors 1 - s q^^e N^v with v = step, working on polynomials in N^step
inline void extract_linear(MultiPoly& r, int step, QGeomFactorization& out) {
    while (r.contains(Var::N)) {
        auto cs = r.coeffs_in(Var::N);
        std::set<long> cand;
        for (auto& [i, ci] : cs)
            for (auto& [j, cj] : cs) {
                if (j <= i) continue;
                if ((j - i) % step != 0) continue;
                long di = (j - i) / step;
                for (long d : {cj.min_degree(Var::q) - ci.min_degree(Var::q), cj.degree(Var::q) - ci.degree(Var::q)})
                    if (d % di == 0) cand.insert(d / di);
            }
        bool found = false;
        for (long e : cand) {
            for (int s : {1, -1}) {
                MultiPoly b = binomial_poly(s, e, step);
                if (auto qt = exact_divide(r, b)) {
                    r = *qt;
                    if (e < 0) out.c *= RationalFunction::monomial(1, {static_cast<int>(-e), 0, 0});
                    bool merged = false;
                    for (auto& x : out.binomials)
                        if (x.s == s && x.e == e && x.v == step) {
                            ++x.m;
                            merged = true;
                        }
                    if (!merged) out.binomials.push_back({s, e, step, 1});
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (!found) return;
    }
}

inline int n_exponent_gcd(const MultiPoly& p) {
    int g = 0;
    for (auto& [e, c] : p.terms()) g = std::gcd(g, e[1]);
    return g;
}

}  // namespace detail

// factor a polynomial in (q^, N) into q-geometric binomials; nullopt when a non-binomial part remains
inline std::optional<QGeomFactorization> factor_qgeometric(const MultiPoly& p) {
    if (p.is_zero() || p.contains(Var::K)) return std::nullopt;
    QGeomFactorization f;
    auto [r, m] = split_laurent(p.as<true>());
    f.qexp = m[0];
    f.npow = m[1];
    detail::extract_linear(r, 1, f);
    while (r.contains(Var::N)) {
        int g = detail::n_exponent_gcd(r);
        std::size_t before = f.binomials.size();
        if (g > 1) detail::extract_linear(r, g, f);
        if (f.binomials.size() == before) return std::nullopt;
    }
    f.c *= RationalFunction(r);
    return f;
}

struct NormalizationPrefactor {
    MultiPoly p1, p2;                         // p1 T(n+1,k) + p2 T(n,k) = G(n,k+1) - G(n,k)
    std::optional<QProperTerm> closed_form;   // term in n alone
    RationalFunction q_constant = RationalFunction(1);
    long n0 = 0;

    bool is_identity() const {
        if (!closed_form) return false;
        const QProperTerm& t = *closed_form;
        return t.factors.empty() && t.sign_n % 2 == 0 && !t.sequence && t.qpow == QuadForm{} && t.cofactor.is_constant() &&
               (t.constant * t.cofactor) == RationalFunction(1);
    }
};

// (-1)^n prod_{i=1}^{n-1} p1(i)/p2(i) by direct product at q^
inline Rational prefactor_product(const MultiPoly& p1, const MultiPoly& p2, int D, long n, const Rational& qhat) {
    Rational v = (n % 2 == 0) ? 1 : -1;
    for (long i = 1; i < n; ++i) {
        Rational N = rpow(qhat, D * i);
        v *= p1.eval(qhat, N, 0) / p2.eval(qhat, N, 0);
    }
    return v;
}

namespace detail {

// closed form of s(n) with s(n+1)/s(n) = -p1(n)/p2(n)
inline std::optional<QProperTerm> prefactor_closed_form(const MultiPoly& p1, const MultiPoly& p2, int D) {
    auto f1 = factor_qgeometric(p1), f2 = factor_qgeometric(p2);
    if (!f1 || !f2) return std::nullopt;
    RationalFunction c = f1->c / f2->c;
    long a = f1->qexp - f2->qexp, b = f1->npow - f2->npow;
    // c must be +-q^^j
    if (!c.num().is_monomial() || !c.den().is_monomial()) return std::nullopt;
    Rational cc = c.num().leading_coeff() / c.den().leading_coeff();
    if (cc != 1 && cc != -1) return std::nullopt;
    a += c.num().terms()[0].first[0] - c.den().terms()[0].first[0];
    QProperTerm t;
    t.D = D;
    // (-1)^n * cc^(n-1)
    t.sign_n = cc < 0 ? 2 : 1;
    if (cc < 0) t.constant = RationalFunction(-1);
    Rational aq = Rational(a, D);
    aq.canonicalize();
    t.qpow.n = aq + Rational(-b, 2);
    t.qpow.c = -aq;
    t.qpow.nn = Rational(b, 2);
    for (Rational* r : {&t.qpow.n, &t.qpow.c, &t.qpow.nn}) r->canonicalize();
    RationalFunction cof(1);
    auto add = [&](const QGeomFactorization::Binomial& x, int sgn) {
        QPochFactor f;
        f.arg_sign = x.s;
        Rational c0(x.e + static_cast<long>(D) * x.v, D);
        c0.canonicalize();
        f.arg.c0 = c0;
        f.base = x.v;
        f.order.cn = 1;
        f.power = sgn * x.m;
        t.factors.push_back(f);
        RationalFunction bin = RationalFunction::from_laurent(LaurentPoly(1) -
                                                             LaurentPoly::monomial(Rational(x.s), {static_cast<int>(x.e), x.v, 0}));
        cof *= bin.pow(-sgn * x.m);
    };
    for (auto& x : f1->binomials) add(x, 1);
    for (auto& x : f2->binomials) add(x, -1);
    t.cofactor = cof;
    validate_qproper(t);
    return t;
}

inline RationalFunction eval_symbolic(const QProperTerm& t, long n) {
    TermEvaluator<RationalFunction> ev(RationalFunction::monomial(1, {1, 0, 0}), [](const Rational& r) { return RationalFunction(r); });
    return ev.evaluate(t, n, 0);
}

}  // namespace detail

struct Normalized {
    QProperTerm Fbar;
    NormalizationPrefactor prefactor;
    RationalFunction certificate;  // Gbar = certificate * Fbar
};

inline Normalized ekhad_normalize(const QProperTerm& kernel, const Recurrence& rec) {
    if (rec.order != 1 || rec.p.size() != 2) fail(ErrorKind::OrderMismatch, "EKHAD normalization needs a first-order recurrence");
    Normalized out;
    NormalizationPrefactor& pf = out.prefactor;
    pf.p1 = rec.p[1];
    pf.p2 = rec.p[0];
    if (auto cf = detail::prefactor_closed_form(pf.p1, pf.p2, kernel.D)) {
        // canonical q-constant: prefactor(n0) = 1 at the first regular n0
        for (long n = 0; n < 16; ++n) {
            try {
                RationalFunction v = detail::eval_symbolic(*cf, n);
                if (v.is_zero()) continue;
                pf.q_constant = v.inverse();
                pf.n0 = n;
                break;
            } catch (const Error&) {
            }
        }
        cf->constant *= pf.q_constant;
        pf.closed_form = *cf;
        if (pf.is_identity()) out.Fbar = kernel;
        else out.Fbar = with_denominator(*cf, kernel.D) * kernel;
    } else {
        QProperTerm t = kernel;
        t.sign_n += 1;
        RationalFunction r = RationalFunction(pf.p1, pf.p2);
        t.sequence = t.sequence ? *t.sequence * r : r;
        out.Fbar = t;
    }
    out.certificate = -(rec.certificate / RationalFunction(pf.p2));
    return out;
}

inline Normalized ekhad_normalize(const QProperTerm& kernel) { return ekhad_normalize(kernel, q_zeilberger(kernel, 1)); }

struct QWZPair {
    QProperTerm F;
    RationalFunction certificate;
    QProperTerm G() const { return times_rational(F, certificate); }
};

// [F(n+1,k) - F(n,k) - G(n,k+1) + G(n,k)] / F(n,k), reduced
inline RationalFunction wz_residual(const QWZPair& p) {
    RationalFunction sn = shift_ratio(p.F, 1, 0).to_rf(), sk = shift_ratio(p.F, 0, 1).to_rf();
    return (sn - RationalFunction(1)) - (sigma(p.certificate, p.F.D, 1) * sk - p.certificate);
}

inline ProofReport wz_verify_symbolic(const QWZPair& p) {
    ProofReport rep;
    rep.residual = wz_residual(p);
    rep.ok = rep.residual.is_zero();
    rep.text = "residual: " + rep.residual.str();
    if (!rep.ok) fail(ErrorKind::VerificationFailed, rep.text);
    return rep;
}

inline QWZPair make_wz_pair(const QProperTerm& Fbar) {
    Recurrence r;
    try {
        r = q_zeilberger(Fbar, 1);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoRecurrenceUpToOrder) fail(ErrorKind::NotWZNormalized, "no first-order recurrence");
        throw;
    }
    if (!(r.p[1] == -r.p[0]) || !r.p[0].is_constant())
        fail(ErrorKind::NotWZNormalized, "recurrence is not of WZ shape: p1 = " + r.p[1].str() + ", p2 = " + r.p[0].str());
    QWZPair pair{Fbar, r.certificate / RationalFunction(r.p[1])};
    wz_verify_symbolic(pair);
    return pair;
}

// H(n,k) = F(n+1, n+k) + G(n, n+k), kept as two terms
struct TermSum {
    std::vector<QProperTerm> terms;
};

inline TermSum build_H(const QWZPair& p) {
    TermSum h;
    h.terms.push_back(substitute(p.F, IndexMap{1, 0, 1, 1, 1, 0}));
    if (!p.certificate.is_zero()) h.terms.push_back(substitute(p.G(), IndexMap{1, 0, 0, 1, 1, 0}));
    return h;
}

}  // namespace qwz
