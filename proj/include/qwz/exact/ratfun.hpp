#pragma once

#include <string>
#include <utility>

#include "qwz/exact/gcd.hpp"

namespace qwz {

struct QOneOrder {
    int order = 0;
    Rational limit;
};

class RationalFunction {
public:
    RationalFunction() : num_(), den_(1) {}
    RationalFunction(long c) : num_(c), den_(1) {}                 // NOLINT
    RationalFunction(const Rational& c) : num_(c), den_(1) {}      // NOLINT
    RationalFunction(const MultiPoly& p) : num_(p), den_(1) { normalize_const(); }  // NOLINT
    RationalFunction(const MultiPoly& n, const MultiPoly& d) : num_(n), den_(d) { simplify(); }

    static RationalFunction from_laurent(const LaurentPoly& n, const LaurentPoly& d = LaurentPoly(1)) {
        if (d.is_zero()) fail(ErrorKind::ZeroDenominator, "laurent denominator");
        auto [pn, mn] = split_laurent(n);
        auto [pd, md] = split_laurent(d);
        Exps e = exps_sub(mn, md), up{0, 0, 0}, down{0, 0, 0};
        for (int i = 0; i < kNumVars; ++i) (e[i] >= 0 ? up[i] : down[i]) = std::abs(e[i]);
        return RationalFunction(pn.shift(up), pd.shift(down));
    }
    static RationalFunction monomial(const Rational& c, const Exps& e) {
        return from_laurent(LaurentPoly::monomial(c, e));
    }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool contains(Var v) const { return num_.contains(v) || den_.contains(v); }

    RationalFunction operator-() const {
        RationalFunction r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) { return add(a, b, false); }
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return add(a, b, true); }
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        if (a.is_zero() || b.is_zero()) return {};
        MultiPoly g1 = poly_gcd(a.num_, b.den_), g2 = poly_gcd(b.num_, a.den_);
        MultiPoly n = *exact_divide(a.num_, g1) * *exact_divide(b.num_, g2);
        MultiPoly d = *exact_divide(a.den_, g2) * *exact_divide(b.den_, g1);
        RationalFunction r;
        r.num_ = std::move(n);
        r.den_ = std::move(d);
        r.normalize_const();
        return r;
    }
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.inverse(); }
    RationalFunction& operator+=(const RationalFunction& b) { return *this = *this + b; }
    RationalFunction& operator-=(const RationalFunction& b) { return *this = *this - b; }
    RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }
    RationalFunction& operator/=(const RationalFunction& b) { return *this = *this / b; }
    friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

    RationalFunction inverse() const {
        if (num_.is_zero()) fail(ErrorKind::ZeroDenominator, "inverse of zero rational function");
        RationalFunction r;
        r.num_ = den_;
        r.den_ = num_;
        r.normalize_const();
        return r;
    }
    RationalFunction pow(int e) const {
        if (e < 0) return inverse().pow(-e);
        RationalFunction r;
        r.num_ = num_.pow(static_cast<unsigned>(e));
        r.den_ = den_.pow(static_cast<unsigned>(e));
        r.normalize_const();
        return r;
    }

    // x_v -> c * monomial * x_v
    RationalFunction substitute_scale(Var v, const Exps& per_unit, const Rational& c = Rational(1)) const {
        LaurentPoly n = num_.as<true>().substitute_scale(v, per_unit, c);
        LaurentPoly d = den_.as<true>().substitute_scale(v, per_unit, c);
        return from_laurent(n, d);
    }

    Rational eval(const Rational& q, const Rational& N, const Rational& K) const {
        Rational d = den_.eval(q, N, K);
        if (d == 0) fail(ErrorKind::ZeroDenominator, "rational function pole");
        return num_.eval(q, N, K) / d;
    }

    std::string str() const {
        if (den_ == MultiPoly(1)) return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

private:
    void simplify() {
        if (den_.is_zero()) fail(ErrorKind::ZeroDenominator, "rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = MultiPoly(1);
            return;
        }
        MultiPoly g = poly_gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = *exact_divide(num_, g);
            den_ = *exact_divide(den_, g);
        }
        normalize_const();
    }
    void normalize_const() {
        if (num_.is_zero()) {
            den_ = MultiPoly(1);
            return;
        }
        auto [c, d] = den_.primitive();
        den_ = std::move(d);
        if (c != 1) num_ = num_ * Rational(1 / c);
    }
    static RationalFunction add(const RationalFunction& a, const RationalFunction& b, bool sub) {
        if (b.is_zero()) return a;
        if (a.is_zero()) return sub ? -b : b;
        RationalFunction r;
        if (a.den_ == b.den_) {
            r.num_ = sub ? a.num_ - b.num_ : a.num_ + b.num_;
            r.den_ = a.den_;
        } else {
            MultiPoly g = poly_gcd(a.den_, b.den_);
            MultiPoly da = *exact_divide(a.den_, g), db = *exact_divide(b.den_, g);
            r.num_ = sub ? a.num_ * db - b.num_ * da : a.num_ * db + b.num_ * da;
            r.den_ = a.den_ * db;
        }
        r.simplify();
        return r;
    }

    MultiPoly num_, den_;
};

inline RationalFunction rf_simplify(const MultiPoly& num, const MultiPoly& den) { return RationalFunction(num, den); }

namespace detail {

// multiplicity of the root q = 1 of a univariate polynomial, and the value of p/(1-q)^m at q = 1
inline std::pair<int, Rational> root_one_split(MultiPoly p) {
    int m = 0;
    MultiPoly one_minus_q = MultiPoly(1) - qvar();
    while (true) {
        Rational v = p.eval(Rational(1), Rational(1), Rational(1));
        if (v != 0) return {m, v};
        auto d = exact_divide(p, one_minus_q);
        p = *d;
        ++m;
    }
}

}  // namespace detail

inline QOneOrder vanishing_order_q1(const RationalFunction& f) {
    if (f.is_zero()) fail(ErrorKind::ZeroInput, "vanishing order of the zero function");
    if (f.contains(Var::N) || f.contains(Var::K))
        fail(ErrorKind::InvalidArgument, "vanishing_order_q1 expects a function of q alone");
    auto [mn, vn] = detail::root_one_split(f.num());
    auto [md, vd] = detail::root_one_split(f.den());
    return {mn - md, vn / vd};
}

}  // namespace qwz
