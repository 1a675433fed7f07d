#pragma once

#include <string>
#include <vector>

#include "qwz/telescoper/gosper.hpp"

namespace qwz {

// sum_i p[i](q^, N) T(n+i, k) = G(n, k+1) - G(n, k), G = certificate * T
struct Recurrence {
    int D = 1;
    int order = 0;
    std::vector<MultiPoly> p;
    RationalFunction certificate;
};

inline constexpr int kDefaultMaxOrder = 4;

namespace detail {

struct Ansatz {
    GosperSystem sys;
    LaurentPoly bs;
    MultiPoly c;
    RationalFunction V;
    std::vector<RationalFunction> z;  // p_i = p'_i / z_i
};

inline Ansatz build_ansatz(const QProperTerm& t, int L, int slack) {
    const int D = t.D;
    std::vector<KFactored> R;
    for (int i = 0; i <= L; ++i) R.push_back(KFactored::from(shift_ratio(t, i, 0)));
    // common denominator V of the R_i
    KFactored V;
    long kv = 0;
    for (auto& r : R) kv = std::max(kv, -r.kpow);
    V.kpow = kv;
    for (auto& r : R)
        for (auto& [p, e] : r.parts) {
            if (e >= 0) continue;
            bool found = false;
            for (auto& [vp, ve] : V.parts)
                if (vp == p) {
                    ve = std::max(ve, -e);
                    found = true;
                }
            if (!found) V.parts.push_back({p, -e});
        }
    Ansatz an;
    std::vector<LaurentPoly> U;
    for (auto& r : R) {
        KFactored u = r;
        u.z = RationalFunction(1);
        u.mul(V);
        LaurentPoly up = LaurentPoly::monomial(1, {0, 0, static_cast<int>(u.kpow)});
        for (auto& [p, e] : u.parts) {
            if (e < 0) fail(ErrorKind::InvalidArgument, "common denominator construction failed");
            up = up * p.as<true>().pow(static_cast<unsigned>(e));
        }
        U.push_back(up);
        an.z.push_back(r.z);
    }
    KFactored ratio = KFactored::from(shift_ratio(t, 0, 1));
    ratio.mul(V);
    ratio.mul(V.shifted(D, 1), -1);
    ratio.compact();
    GosperForm g = gosper_form(ratio, D);
    an.bs = sigma(g.b.as<true>(), D, -1);
    an.c = g.c;
    an.V = V.to_rf();
    std::vector<LaurentPoly> rhs;
    for (auto& u : U) rhs.push_back(u * g.c.as<true>());
    an.sys = gosper_system(g.a.as<true>(), an.bs, rhs, D, slack);
    return an;
}

inline int n_degree_sum(const std::vector<MultiPoly>& p) {
    int s = 0;
    for (auto& x : p) s += x.is_zero() ? 0 : x.degree(Var::N);
    return s;
}

}  // namespace detail

// true iff the order-L ansatz has a solution with some p_i != 0
inline bool ansatz_solvable(const QProperTerm& t, int L, int slack = kGosperSlack) {
    auto an = detail::build_ansatz(t, L, slack);
    if (an.sys.m.empty()) return true;
    EchelonForm e = bareiss_echelon(an.sys.m, an.sys.nx + an.sys.np);
    for (auto& v : nullspace(e))
        for (int l = 0; l < an.sys.np; ++l)
            if (!v[an.sys.nx + l].is_zero()) return true;
    return false;
}

inline std::optional<Recurrence> zeilberger_order(const QProperTerm& t, int L, int slack = kGosperSlack) {
    auto an = detail::build_ansatz(t, L, slack);
    const auto& s = an.sys;
    EchelonForm e = bareiss_echelon(s.m, s.nx + s.np);
    std::optional<Recurrence> best;
    for (auto& v : nullspace(e)) {
        std::vector<RationalFunction> p;
        bool nonzero = false;
        for (int l = 0; l < s.np; ++l) {
            p.push_back(v[s.nx + l] / an.z[l]);
            nonzero |= !p.back().is_zero();
        }
        if (!nonzero) continue;
        // clear denominators, remove the common factor, fix the sign by p_0
        MultiPoly den(1);
        for (auto& x : p) den = poly_lcm(den, x.den());
        std::vector<MultiPoly> pp;
        MultiPoly g;
        for (auto& x : p) {
            MultiPoly y = *exact_divide(x.num() * den, x.den());
            g = poly_gcd(g, y);
            pp.push_back(y);
        }
        Rational sgn = 1;
        for (auto& y : pp)
            if (!y.is_zero()) {
                sgn = y.leading_coeff() > 0 ? 1 : -1;
                break;
            }
        RationalFunction scale = RationalFunction(den * sgn, g);
        for (auto& y : pp) y = *exact_divide(y * sgn, g);
        Recurrence r;
        r.D = t.D;
        r.order = L;
        r.p = std::move(pp);
        RationalFunction x(0);
        for (int d = 0; d < s.nx; ++d)
            if (!v[d].is_zero()) x += v[d] * RationalFunction::monomial(1, {0, 0, s.range.lo + d});
        r.certificate = RationalFunction::from_laurent(an.bs) * x * scale / (RationalFunction(an.c) * an.V);
        if (!best || detail::n_degree_sum(r.p) < detail::n_degree_sum(best->p)) best = std::move(r);
    }
    return best;
}

inline Recurrence q_zeilberger(const QProperTerm& t, int max_order = kDefaultMaxOrder, int slack = kGosperSlack) {
    if (max_order < 1) fail(ErrorKind::InvalidArgument, "max_order must be positive");
    if (t.sequence) fail(ErrorKind::InvalidArgument, "creative telescoping of a sequence-carrying term");
    for (int L = 1; L <= max_order; ++L)
        if (auto r = zeilberger_order(t, L, slack)) return *r;
    fail(ErrorKind::NoRecurrenceUpToOrder, "no recurrence up to order " + std::to_string(max_order));
}

// sum p_i T(n+i,k)/T(n,k) - (R(n,k+1) T(n,k+1)/T(n,k) - R(n,k)), reduced
inline RationalFunction recurrence_residual(const QProperTerm& t, const Recurrence& r) {
    RationalFunction lhs(0);
    for (int i = 0; i <= r.order; ++i) {
        if (r.p[i].is_zero()) continue;
        lhs += RationalFunction(r.p[i]) * (i == 0 ? RationalFunction(1) : shift_ratio(t, i, 0).to_rf());
    }
    RationalFunction qk = shift_ratio(t, 0, 1).to_rf();
    return lhs - (sigma(r.certificate, t.D, 1) * qk - r.certificate);
}

struct ProofReport {
    bool ok = false;
    RationalFunction residual;
    std::string text;
};

inline ProofReport recurrence_verify(const QProperTerm& t, const Recurrence& r) {
    if (static_cast<int>(r.p.size()) != r.order + 1) fail(ErrorKind::InvalidArgument, "coefficient count != order + 1");
    ProofReport rep;
    rep.residual = recurrence_residual(t, r);
    rep.ok = rep.residual.is_zero();
    rep.text = "residual: " + rep.residual.str();
    if (!rep.ok) fail(ErrorKind::VerificationFailed, rep.text);
    return rep;
}

}  // namespace qwz
