#pragma once

#include <map>
#include <utility>
#include <vector>

#include "qwz/term/qproper_term.hpp"

namespace qwz {

// polynomial in n, k with rational coefficients
struct PolyNK {
    std::map<std::pair<int, int>, Rational> c;

    PolyNK() = default;
    PolyNK(const Rational& v) {  // NOLINT
        if (v != 0) c[{0, 0}] = v;
    }
    static PolyNK var_n() {
        PolyNK p;
        p.c[{1, 0}] = 1;
        return p;
    }
    static PolyNK var_k() {
        PolyNK p;
        p.c[{0, 1}] = 1;
        return p;
    }
    bool is_zero() const { return c.empty(); }
    int degree() const {
        int d = 0;
        for (auto& [e, v] : c) d = std::max(d, e.first + e.second);
        return d;
    }
    bool is_constant() const { return degree() == 0; }
    Rational coeff(int a, int b) const {
        auto it = c.find({a, b});
        return it == c.end() ? Rational(0) : it->second;
    }
    Rational constant() const { return coeff(0, 0); }
    void clean() {
        for (auto it = c.begin(); it != c.end();) it = it->second == 0 ? c.erase(it) : std::next(it);
    }
    friend PolyNK operator+(PolyNK a, const PolyNK& b) {
        for (auto& [e, v] : b.c) a.c[e] += v;
        a.clean();
        return a;
    }
    friend PolyNK operator-(PolyNK a, const PolyNK& b) {
        for (auto& [e, v] : b.c) a.c[e] -= v;
        a.clean();
        return a;
    }
    friend PolyNK operator*(const PolyNK& a, const PolyNK& b) {
        PolyNK r;
        for (auto& [ea, va] : a.c)
            for (auto& [eb, vb] : b.c) r.c[{ea.first + eb.first, ea.second + eb.second}] += va * vb;
        r.clean();
        return r;
    }
    Rational eval(const Rational& n, const Rational& k = 0) const {
        Rational s = 0;
        for (auto& [e, v] : c) s += v * rpow(n, e.first) * rpow(k, e.second);
        return s;
    }
    Affine affine() const {
        if (degree() > 1) fail(ErrorKind::NotQProper, "expected an affine expression in n, k");
        return {coeff(0, 0), coeff(1, 0), coeff(0, 1)};
    }
    QuadForm quad() const {
        if (degree() > 2) fail(ErrorKind::NotQProper, "q-power exponent of degree > 2");
        return {coeff(2, 0), coeff(1, 1), coeff(0, 2), coeff(1, 0), coeff(0, 1), coeff(0, 0)};
    }
    friend bool operator==(const PolyNK& a, const PolyNK& b) { return a.c == b.c; }
};

// Gamma_{q^base}(x)^power
struct GammaAtom {
    Rational x;
    Rational base = 1;
    int power = 1;
    friend bool operator==(const GammaAtom& a, const GammaAtom& b) {
        return a.x == b.x && a.base == b.base && a.power == b.power;
    }
};

// constant * prod factors * prod Gamma_q * pi^pi_power * sqrt(sqrt_arg) * prod_i (sum_n inner_i(n))
struct ClosedFormRHS {
    int D = 1;
    RationalFunction constant = RationalFunction(1);  // in q^ only
    std::vector<QPochFactor> factors;                 // infinite or constant rational order
    std::vector<GammaAtom> gammas;
    int pi_power = 0;
    Rational sqrt_arg = 1;
    std::vector<QProperTerm> sums;

    bool is_classical() const { return factors.empty() && gammas.empty() && sums.empty() && !constant.contains(Var::q); }
};

// z^n * prod (a)_n^m * poly(n) * constant, the ordinary (q = 1) summand
struct ClassicalTerm {
    Rational rate = 1;
    std::vector<std::pair<Rational, int>> poch;
    PolyNK poly = PolyNK(Rational(1));
    Rational constant = 1;

    Rational eval(long n) const {
        Rational v = constant * rpow(rate, n) * poly.eval(Rational(n));
        for (auto& [a, m] : poch) {
            Rational p = 1;
            for (long j = 0; j < n; ++j) p *= a + j;
            if (p == 0 && m < 0) fail(ErrorKind::PoleEncountered, "Pochhammer pole");
            v = m > 0 ? Rational(v * rpow(p, m)) : Rational(v / rpow(p, -m));
        }
        return v;
    }
    friend bool operator==(const ClassicalTerm& a, const ClassicalTerm& b) {
        return a.rate == b.rate && a.poch == b.poch && a.poly == b.poly && a.constant == b.constant;
    }
};

}  // namespace qwz
