#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qwz/telescoper/linear_solve.hpp"
#include "qwz/term/qproper_term.hpp"

namespace qwz {

// K -> q^^(D j) K
inline LaurentPoly sigma(const LaurentPoly& p, int D, long j) {
    if (j == 0) return p;
    return p.substitute_scale(Var::K, {static_cast<int>(D * j), 0, 0});
}
inline MultiPoly sigma(const MultiPoly& p, int D, long j) {
    if (j == 0) return p;
    if (j < 0) fail(ErrorKind::InvalidArgument, "backward shift of a polynomial");
    return p.substitute_scale(Var::K, {static_cast<int>(D * j), 0, 0});
}
inline RationalFunction sigma(const RationalFunction& f, int D, long j) {
    if (j == 0) return f;
    return f.substitute_scale(Var::K, {static_cast<int>(D * j), 0, 0});
}

// z * K^kpow * prod f_i^{e_i}; each f_i is a primitive polynomial with a K^0 term, K-degree >= 1,
// and no monomial content; z is free of K
struct KFactored {
    RationalFunction z = RationalFunction(1);
    long kpow = 0;
    std::vector<std::pair<MultiPoly, int>> parts;

    void mul_poly(const LaurentPoly& p, int e) {
        if (e == 0) return;
        if (p.is_zero()) fail(ErrorKind::ZeroInput, "zero factor in a hypergeometric ratio");
        auto [poly, m] = split_laurent(p);
        kpow += static_cast<long>(m[2]) * e;
        z *= RationalFunction::monomial(1, {m[0], m[1], 0}).pow(e);
        if (!poly.contains(Var::K)) {
            z *= RationalFunction(poly).pow(e);
            return;
        }
        auto [ct, pr] = poly.primitive();
        z *= RationalFunction(ct).pow(e);
        for (auto& [q, x] : parts)
            if (q == pr) {
                x += e;
                return;
            }
        parts.push_back({pr, e});
    }
    void mul(const KFactored& o, int e = 1) {
        z *= o.z.pow(e);
        kpow += o.kpow * e;
        for (auto& [p, x] : o.parts) mul_poly(p.as<true>(), x * e);
    }
    static KFactored from(const FactoredRatio& r) {
        KFactored k;
        k.z = RationalFunction(r.scalar);
        for (auto& [p, e] : r.parts) k.mul_poly(p, e);
        k.compact();
        return k;
    }
    static KFactored from(const RationalFunction& f) {
        KFactored k;
        k.mul_poly(f.num().as<true>(), 1);
        k.mul_poly(f.den().as<true>(), -1);
        k.compact();
        return k;
    }
    void compact() {
        std::vector<std::pair<MultiPoly, int>> out;
        for (auto& pe : parts)
            if (pe.second != 0) out.push_back(pe);
        parts = std::move(out);
    }
    // apply K -> q^^(D j) K
    KFactored shifted(int D, long j) const {
        KFactored k;
        k.z = z * RationalFunction::monomial(1, {static_cast<int>(D * j * kpow), 0, 0});
        k.kpow = kpow;
        for (auto& [p, e] : parts) k.mul_poly(sigma(p.as<true>(), D, j), e);
        return k;
    }
    RationalFunction to_rf() const {
        RationalFunction r = z * RationalFunction::monomial(1, {0, 0, static_cast<int>(kpow)});
        for (auto& [p, e] : parts) r *= RationalFunction(p).pow(e);
        return r;
    }
};

namespace detail {

// j >= 0 and K-free lambda with f = lambda * g(q^^(D j) K), if any
inline std::optional<std::pair<long, RationalFunction>> shift_match(const MultiPoly& f, const MultiPoly& g, int D) {
    if (f.degree(Var::K) != g.degree(Var::K)) return std::nullopt;
    auto cf = f.coeffs_in(Var::K), cg = g.coeffs_in(Var::K);
    if (cf.size() != cg.size()) return std::nullopt;
    for (auto a = cf.begin(), b = cg.begin(); a != cf.end(); ++a, ++b)
        if (a->first != b->first) return std::nullopt;
    int i0 = cf.begin()->first, i1 = cf.rbegin()->first;
    if (i1 == i0) return std::nullopt;
    RationalFunction rho = RationalFunction(cf[i1] * cg[i0], cf[i0] * cg[i1]);
    // rho must be q^^(D (i1 - i0) j)
    if (!rho.num().is_monomial() || !rho.den().is_monomial()) return std::nullopt;
    if (rho.num().leading_coeff() != rho.den().leading_coeff()) return std::nullopt;
    Exps en = rho.num().terms()[0].first, ed = rho.den().terms()[0].first;
    if (en[1] != ed[1] || en[2] != ed[2]) return std::nullopt;
    long e = en[0] - ed[0], step = static_cast<long>(D) * (i1 - i0);
    if (e < 0 || e % step != 0) return std::nullopt;
    long j = e / step;
    MultiPoly gs = sigma(g, D, j);
    if (!(f * gs.coeff(Var::K, i0) == gs * cf[i0])) return std::nullopt;
    return std::make_pair(j, RationalFunction(cf[i0], gs.coeff(Var::K, i0)));
}

}  // namespace detail

// r = a(K)/b(K) * c(qK)/c(K) with gcd(a(K), b(q^j K)) = 1 for the factors of r
struct GosperForm {
    MultiPoly a, b, c;
};

inline GosperForm gosper_form(KFactored r, int D) {
    std::vector<std::pair<MultiPoly, int>> num, den;
    for (auto& [p, e] : r.parts) (e > 0 ? num : den).push_back({p, std::abs(e)});
    MultiPoly c(1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [f, mf] : num) {
            for (auto& [g, mg] : den) {
                while (mf > 0 && mg > 0) {
                    auto m = detail::shift_match(f, g, D);
                    if (!m) break;
                    auto [j, lambda] = *m;
                    --mf;
                    --mg;
                    r.z *= lambda;
                    for (long i = 0; i < j; ++i) c = c * sigma(g, D, i);
                    changed = true;
                }
            }
        }
    }
    GosperForm g;
    g.a = r.z.num();
    g.b = r.z.den();
    if (r.kpow > 0) g.a = g.a * MultiPoly::monomial(1, {0, 0, static_cast<int>(r.kpow)});
    if (r.kpow < 0) g.b = g.b * MultiPoly::monomial(1, {0, 0, static_cast<int>(-r.kpow)});
    for (auto& [f, m] : num)
        if (m > 0) g.a = g.a * f.pow(static_cast<unsigned>(m));
    for (auto& [f, m] : den)
        if (m > 0) g.b = g.b * f.pow(static_cast<unsigned>(m));
    g.c = c;
    return g;
}

struct DegreeRange {
    int lo = 0, hi = -1;
};

// degree window of a Laurent solution x of a(K) x(qK) - bs(K) x(K) = rhs(K)
inline DegreeRange gosper_degree_range(const LaurentPoly& a, const LaurentPoly& bs, int rhs_lo, int rhs_hi, int D,
                                       int slack) {
    DegreeRange r;
    int da = a.degree(Var::K), db = bs.degree(Var::K), ta = a.min_degree(Var::K), tb = bs.min_degree(Var::K);
    r.hi = rhs_hi - std::max(da, db);
    r.lo = rhs_lo - std::min(ta, tb);
    auto lc = [](const LaurentPoly& p, int deg) { return p.coeff(Var::K, deg); };
    auto special = [&](const LaurentPoly& x, const LaurentPoly& y) -> std::optional<int> {
        // x * q^^(D d) = y, with both Laurent in (q^, N)
        RationalFunction ratio = RationalFunction::from_laurent(y, x);
        if (!ratio.num().is_monomial() || !ratio.den().is_monomial()) return std::nullopt;
        if (ratio.num().leading_coeff() != ratio.den().leading_coeff()) return std::nullopt;
        Exps en = ratio.num().terms()[0].first, ed = ratio.den().terms()[0].first;
        if (en[1] != ed[1]) return std::nullopt;
        int e = en[0] - ed[0];
        if (e % D != 0) return std::nullopt;
        return e / D;
    };
    if (da == db) {
        if (auto d = special(lc(a, da), lc(bs, db))) r.hi = std::max(r.hi, *d);
    }
    if (ta == tb) {
        if (auto d = special(lc(a, ta), lc(bs, tb))) r.lo = std::min(r.lo, *d);
    }
    r.hi += slack;
    r.lo -= slack;
    return r;
}

struct GosperSystem {
    PolyMatrix m;
    int nx = 0, np = 0;
    DegreeRange range;
};

// unknowns: x_lo..x_hi then p_0..p_{np-1}; equations: coefficients of K^i in
// a(K) x(qK) - bs(K) x(K) - c(K) sum_l p_l u_l(K)
inline GosperSystem gosper_system(const LaurentPoly& a, const LaurentPoly& bs, const std::vector<LaurentPoly>& rhs,
                                  int D, int slack) {
    GosperSystem s;
    int rlo = 0, rhi = -1;
    bool any = false;
    for (auto& u : rhs)
        if (!u.is_zero()) {
            int lo = u.min_degree(Var::K), hi = u.degree(Var::K);
            rlo = any ? std::min(rlo, lo) : lo;
            rhi = any ? std::max(rhi, hi) : hi;
            any = true;
        }
    if (!any) fail(ErrorKind::InvalidArgument, "zero right-hand side in Gosper system");
    s.range = gosper_degree_range(a, bs, rlo, rhi, D, slack);
    s.nx = std::max(0, s.range.hi - s.range.lo + 1);
    s.np = static_cast<int>(rhs.size());
    int cols = s.nx + s.np;
    std::map<int, std::vector<LaurentPoly>> rows;
    auto row = [&](int i) -> std::vector<LaurentPoly>& {
        auto it = rows.find(i);
        if (it == rows.end()) it = rows.emplace(i, std::vector<LaurentPoly>(cols)).first;
        return it->second;
    };
    auto ca = a.coeffs_in(Var::K), cb = bs.coeffs_in(Var::K);
    for (int d = s.range.lo; d <= s.range.hi; ++d) {
        int col = d - s.range.lo;
        LaurentPoly qd = LaurentPoly::monomial(1, {D * d, 0, 0});
        for (auto& [i, co] : ca) row(i + d)[col] += co * qd;
        for (auto& [i, co] : cb) row(i + d)[col] -= co;
    }
    for (int l = 0; l < s.np; ++l)
        for (auto& [i, co] : rhs[l].coeffs_in(Var::K)) row(i)[s.nx + l] -= co;
    for (auto& [i, r] : rows) {
        bool nonzero = false;
        Exps mn{0, 0, 0};
        bool first = true;
        for (auto& e : r) {
            if (e.is_zero()) continue;
            nonzero = true;
            Exps m = e.min_exps();
            for (int v = 0; v < 2; ++v) mn[v] = first ? m[v] : std::min(mn[v], m[v]);
            first = false;
        }
        if (!nonzero) continue;
        std::vector<MultiPoly> out;
        out.reserve(cols);
        for (auto& e : r) out.push_back(e.shift({-mn[0], -mn[1], 0}).as<false>());
        s.m.push_back(std::move(out));
    }
    return s;
}

struct GosperCertificate {
    RationalFunction multiplier;  // G(k) = multiplier * F(k)
};

inline constexpr int kGosperSlack = 2;

// F(k+1)/F(k) = ratio, with K = q^^(D k)
inline std::optional<GosperCertificate> q_gosper(const RationalFunction& ratio, int D = 1, int slack = kGosperSlack) {
    if (ratio.is_zero()) fail(ErrorKind::ZeroInput, "zero ratio");
    GosperForm g = gosper_form(KFactored::from(ratio), D);
    LaurentPoly a = g.a.as<true>(), bs = sigma(g.b.as<true>(), D, -1), c = g.c.as<true>();
    GosperSystem s = gosper_system(a, bs, {c}, D, slack);
    if (s.m.empty()) return std::nullopt;
    auto basis = nullspace(bareiss_echelon(s.m, s.nx + s.np));
    for (auto& v : basis) {
        if (v[s.nx].is_zero()) continue;
        RationalFunction x(0);
        for (int d = 0; d < s.nx; ++d)
            if (!v[d].is_zero()) x += v[d] * RationalFunction::monomial(1, {0, 0, s.range.lo + d});
        x /= v[s.nx];
        return GosperCertificate{RationalFunction::from_laurent(bs) * x / RationalFunction(g.c)};
    }
    return std::nullopt;
}

}  // namespace qwz
