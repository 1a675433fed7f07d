#pragma once

#include <optional>

#include "qwz/exact/multipoly.hpp"

namespace qwz {

MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b);

inline MultiPoly normalize_poly(const MultiPoly& p) { return p.primitive().second; }

namespace detail {

inline int main_var(const MultiPoly& a, const MultiPoly& b) {
    for (int i = kNumVars - 1; i >= 0; --i)
        if (a.contains(static_cast<Var>(i)) || b.contains(static_cast<Var>(i))) return i;
    return -1;
}

inline MultiPoly content_in(const MultiPoly& p, Var v) {
    MultiPoly g;
    for (auto& [d, c] : p.coeffs_in(v)) {
        g = poly_gcd(g, c);
        if (g.is_constant()) return MultiPoly(1);
    }
    return g;
}

inline MultiPoly primpart_in(const MultiPoly& p, Var v) {
    MultiPoly c = content_in(p, v);
    MultiPoly r = c.is_constant() ? p : *exact_divide(p, c);
    return normalize_poly(r);
}

// lc(B)^k * A reduced modulo B in the variable v
inline MultiPoly pseudo_rem(MultiPoly A, const MultiPoly& B, Var v) {
    int db = B.degree(v);
    MultiPoly lcb = B.lead_coeff_in(v);
    while (!A.is_zero()) {
        int da = A.degree(v);
        if (da < db) break;
        MultiPoly lca = A.lead_coeff_in(v);
        MultiPoly g = poly_gcd(lca, lcb);
        MultiPoly fa = *exact_divide(lcb, g), fb = *exact_divide(lca, g);
        A = fa * A - fb * B.shift(exps_unit(v, da - db));
    }
    return A;
}


// integer-coefficient polynomial norm helpers for the heuristic gcd
inline Integer max_norm(const MultiPoly& p) {
    Integer m = 0;
    for (auto& [e, c] : p.terms()) m = std::max(m, Integer(abs(c.get_num())));
    return m;
}

inline MultiPoly eval_var_int(const MultiPoly& p, Var v, const Integer& x) {
    std::vector<MultiPoly::Term> ts;
    int i = static_cast<int>(v);
    ts.reserve(p.size());
    for (auto& [e, c] : p.terms()) {
        Exps r = e;
        r[i] = 0;
        Integer xp;
        mpz_pow_ui(xp.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(e[i]));
        ts.push_back({r, Rational(c * xp)});
    }
    return MultiPoly::from_terms(std::move(ts));
}

// xi-adic reconstruction in the variable v, symmetric residues
inline MultiPoly interpolate_int(MultiPoly h, Var v, const Integer& xi) {
    std::vector<MultiPoly::Term> out;
    Integer half = xi / 2;
    for (int d = 0; !h.is_zero(); ++d) {
        std::vector<MultiPoly::Term> g;
        for (auto& [e, c] : h.terms()) {
            Integer r;
            mpz_mod(r.get_mpz_t(), c.get_num_mpz_t(), xi.get_mpz_t());
            if (r > half) r -= xi;
            if (r != 0) g.push_back({e, Rational(r)});
        }
        MultiPoly gp = MultiPoly::from_terms(g);
        for (auto& [e, c] : gp.terms()) {
            Exps r = e;
            r[static_cast<int>(v)] = d;
            out.push_back({r, c});
        }
        h = h - gp;
        std::vector<MultiPoly::Term> nh;
        for (auto& [e, c] : h.terms()) nh.push_back({e, Rational(Integer(c.get_num() / xi))});
        h = MultiPoly::from_terms(std::move(nh));
        if (d > 4096) break;
    }
    return MultiPoly::from_terms(std::move(out));
}

inline Integer isqrt(const Integer& x) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), x.get_mpz_t());
    return r;
}

// f, g: nonzero with integer coefficients
inline std::optional<MultiPoly> heu_gcd(const MultiPoly& f, const MultiPoly& g) {
    Integer cf = f.integer_content().get_num(), cg = g.integer_content().get_num();
    Integer gc = gcd_int(cf, cg);
    if (f.is_constant() || g.is_constant()) return MultiPoly(Rational(gc));
    MultiPoly F = f * Rational(Integer(1), cf), G = g * Rational(Integer(1), cg);
    int vi = main_var(F, G);
    if (vi < 0) return MultiPoly(Rational(gc));
    Var v = static_cast<Var>(vi);
    Integer fn = max_norm(F), gn = max_norm(G);
    Integer B = 2 * std::min(fn, gn) + 29;
    Integer lf = max_norm(F.lead_coeff_in(v)), lg = max_norm(G.lead_coeff_in(v));
    Integer xi = std::max(std::min(B, Integer(99 * isqrt(B))), Integer(2 * std::min(fn / lf, gn / lg) + 2));
    for (int attempt = 0; attempt < 6; ++attempt) {
        MultiPoly ff = eval_var_int(F, v, xi), gg = eval_var_int(G, v, xi);
        if (!ff.is_zero() && !gg.is_zero()) {
            auto h = heu_gcd(ff, gg);
            if (h) {
                MultiPoly H = normalize_poly(interpolate_int(*h, v, xi));
                if (!H.is_zero() && exact_divide(F, H) && exact_divide(G, H)) return H * Rational(gc);
            }
        }
        xi = xi * isqrt(isqrt(xi)) * 27011 / 27182;
    }
    return std::nullopt;
}

inline MultiPoly prs_gcd(MultiPoly A, MultiPoly B, Var v) {
    if (A.degree(v) < B.degree(v)) std::swap(A, B);
    while (true) {
        MultiPoly R = pseudo_rem(A, B, v);
        if (R.is_zero()) return normalize_poly(B);
        if (R.degree(v) == 0) return MultiPoly(1);
        A = std::move(B);
        B = primpart_in(R, v);
    }
}

}  // namespace detail

// content / primitive-part recursion, one variable at a time
inline MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero()) return normalize_poly(b);
    if (b.is_zero()) return normalize_poly(a);
    if (a.is_constant() || b.is_constant()) return MultiPoly(1);
    if (a == b) return normalize_poly(a);
    Exps ma = a.min_exps(), mb = b.min_exps(), mg = exps_min(ma, mb);
    MultiPoly A = a, B = b;
    if (ma != Exps{0, 0, 0}) A = a.as<true>().shift({-ma[0], -ma[1], -ma[2]}).as<false>();
    if (mb != Exps{0, 0, 0}) B = b.as<true>().shift({-mb[0], -mb[1], -mb[2]}).as<false>();
    MultiPoly mono = MultiPoly::monomial(Rational(1), mg);
    if (A.is_constant() || B.is_constant()) return mono;
    A = normalize_poly(A);
    B = normalize_poly(B);
    if (auto h = detail::heu_gcd(A, B)) return normalize_poly(*h * mono);
    int vi = detail::main_var(A, B);
    Var v = static_cast<Var>(vi);
    MultiPoly g;
    if (!A.contains(v)) {
        g = poly_gcd(A, detail::content_in(B, v));
    } else if (!B.contains(v)) {
        g = poly_gcd(detail::content_in(A, v), B);
    } else {
        MultiPoly ca = detail::content_in(A, v), cb = detail::content_in(B, v);
        MultiPoly pa = ca.is_constant() ? A : *exact_divide(A, ca);
        MultiPoly pb = cb.is_constant() ? B : *exact_divide(B, cb);
        MultiPoly c = poly_gcd(ca, cb);
        g = c * detail::prs_gcd(normalize_poly(pa), normalize_poly(pb), v);
    }
    return normalize_poly(g * mono);
}

inline MultiPoly poly_lcm(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero() || b.is_zero()) return MultiPoly();
    MultiPoly g = poly_gcd(a, b);
    return normalize_poly(*exact_divide(a, g) * b);
}

}  // namespace qwz
