#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qwz/exact/rational.hpp"

namespace qwz {

enum class Var : int { q = 0, N = 1, K = 2 };
constexpr int kNumVars = 3;
using Exps = std::array<int, kNumVars>;

inline const char* var_name(Var v) {
    switch (v) {
    case Var::q: return "q";
    case Var::N: return "N";
    case Var::K: return "K";
    }
    return "?";
}

// lex order with K most significant, then N, then q
struct LexLess {
    bool operator()(const Exps& a, const Exps& b) const {
        for (int i = kNumVars - 1; i >= 0; --i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }
};

inline Exps exps_add(const Exps& a, const Exps& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Exps exps_sub(const Exps& a, const Exps& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Exps exps_min(const Exps& a, const Exps& b) {
    return {std::min(a[0], b[0]), std::min(a[1], b[1]), std::min(a[2], b[2])};
}
inline Exps exps_max(const Exps& a, const Exps& b) {
    return {std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(a[2], b[2])};
}
inline Exps exps_unit(Var v, int e = 1) {
    Exps x{0, 0, 0};
    x[static_cast<int>(v)] = e;
    return x;
}

// Sparse polynomial in (q, N, K). Terms are kept sorted descending in lex order.
// AllowNeg = false is the MultiPoly of the algebra layer; true gives Laurent polynomials.
template <bool AllowNeg>
class BasicPoly {
public:
    using Term = std::pair<Exps, Rational>;

    BasicPoly() = default;
    BasicPoly(long c) {  // NOLINT
        if (c != 0) terms_.push_back({{0, 0, 0}, Rational(c)});
    }
    BasicPoly(const Rational& c) {  // NOLINT
        if (c != 0) terms_.push_back({{0, 0, 0}, c});
    }

    static BasicPoly monomial(const Rational& c, const Exps& e) {
        BasicPoly p;
        check_exps(e);
        if (c != 0) p.terms_.push_back({e, c});
        return p;
    }
    static BasicPoly var(Var v, int e = 1) { return monomial(Rational(1), exps_unit(v, e)); }

    static BasicPoly from_map(const std::map<Exps, Rational, LexLess>& m) {
        BasicPoly p;
        p.terms_.reserve(m.size());
        for (auto it = m.rbegin(); it != m.rend(); ++it)
            if (it->second != 0) {
                check_exps(it->first);
                p.terms_.push_back(*it);
            }
        return p;
    }
    static BasicPoly from_terms(std::vector<Term> t) {
        std::map<Exps, Rational, LexLess> m;
        for (auto& [e, c] : t) m[e] += c;
        return from_map(m);
    }

    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Exps{0, 0, 0}); }
    bool is_monomial() const { return terms_.size() == 1; }
    Rational constant_value() const {
        for (auto& [e, c] : terms_)
            if (e == Exps{0, 0, 0}) return c;
        return Rational(0);
    }
    const Exps& leading_exps() const { return terms_.front().first; }
    const Rational& leading_coeff() const { return terms_.front().second; }

    int degree(Var v) const {
        int d = AllowNeg ? -(1 << 30) : 0;
        if (terms_.empty()) return AllowNeg ? 0 : -1;
        for (auto& t : terms_) d = std::max(d, t.first[static_cast<int>(v)]);
        return d;
    }
    int min_degree(Var v) const {
        if (terms_.empty()) return 0;
        int d = 1 << 30;
        for (auto& t : terms_) d = std::min(d, t.first[static_cast<int>(v)]);
        return d;
    }
    bool contains(Var v) const {
        for (auto& t : terms_)
            if (t.first[static_cast<int>(v)] != 0) return true;
        return false;
    }
    Exps min_exps() const {
        Exps m{1 << 30, 1 << 30, 1 << 30};
        if (terms_.empty()) return {0, 0, 0};
        for (auto& t : terms_) m = exps_min(m, t.first);
        return m;
    }
    Exps max_exps() const {
        Exps m{-(1 << 30), -(1 << 30), -(1 << 30)};
        if (terms_.empty()) return {0, 0, 0};
        for (auto& t : terms_) m = exps_max(m, t.first);
        return m;
    }

    BasicPoly operator-() const {
        BasicPoly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }
    friend BasicPoly operator+(const BasicPoly& a, const BasicPoly& b) { return merge(a, b, false); }
    friend BasicPoly operator-(const BasicPoly& a, const BasicPoly& b) { return merge(a, b, true); }
    friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (b.is_monomial()) return a.mul_term(b.terms_[0].first, b.terms_[0].second);
        if (a.is_monomial()) return b.mul_term(a.terms_[0].first, a.terms_[0].second);
        std::map<Exps, Rational, LexLess> acc;
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) acc[exps_add(ea, eb)] += ca * cb;
        return from_map(acc);
    }
    friend BasicPoly operator*(const BasicPoly& a, const Rational& c) {
        if (c == 0) return {};
        BasicPoly r = a;
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }
    friend BasicPoly operator*(const Rational& c, const BasicPoly& a) { return a * c; }
    BasicPoly& operator+=(const BasicPoly& b) { return *this = *this + b; }
    BasicPoly& operator-=(const BasicPoly& b) { return *this = *this - b; }
    BasicPoly& operator*=(const BasicPoly& b) { return *this = *this * b; }
    friend bool operator==(const BasicPoly& a, const BasicPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const BasicPoly& a, const BasicPoly& b) { return !(a == b); }

    BasicPoly pow(unsigned e) const {
        BasicPoly r(1), b = *this;
        while (e) {
            if (e & 1u) r *= b;
            e >>= 1u;
            if (e) b *= b;
        }
        return r;
    }

    BasicPoly mul_term(const Exps& e, const Rational& c) const {
        BasicPoly r;
        if (c == 0) return r;
        r.terms_.reserve(terms_.size());
        for (auto& [ea, ca] : terms_) {
            Exps s = exps_add(ea, e);
            check_exps(s);
            r.terms_.push_back({s, ca * c});
        }
        return r;
    }
    BasicPoly shift(const Exps& e) const { return mul_term(e, Rational(1)); }

    // coefficients with respect to v: exponent of v -> polynomial free of v
    std::map<int, BasicPoly> coeffs_in(Var v) const {
        std::map<int, std::vector<Term>> buckets;
        int i = static_cast<int>(v);
        for (auto& [e, c] : terms_) {
            Exps r = e;
            r[i] = 0;
            buckets[e[i]].push_back({r, c});
        }
        std::map<int, BasicPoly> out;
        for (auto& [d, ts] : buckets) out[d] = from_terms(std::move(ts));
        return out;
    }
    static BasicPoly from_coeffs(Var v, const std::map<int, BasicPoly>& cs) {
        BasicPoly r;
        for (auto& [d, c] : cs) r += c.shift(exps_unit(v, d));
        return r;
    }
    BasicPoly coeff(Var v, int d) const {
        std::vector<Term> ts;
        int i = static_cast<int>(v);
        for (auto& [e, c] : terms_)
            if (e[i] == d) {
                Exps r = e;
                r[i] = 0;
                ts.push_back({r, c});
            }
        return from_terms(std::move(ts));
    }
    BasicPoly lead_coeff_in(Var v) const { return coeff(v, degree(v)); }

    // x_v -> scale * x_v with scale a monomial (possibly Laurent); only valid when the result fits
    BasicPoly substitute_scale(Var v, const Exps& per_unit, const Rational& c_per_unit = Rational(1)) const {
        std::vector<Term> ts;
        int i = static_cast<int>(v);
        for (auto& [e, c] : terms_) {
            Exps r = e;
            for (int j = 0; j < kNumVars; ++j) r[j] += per_unit[j] * e[i];
            Rational cc = c * rpow(c_per_unit, e[i]);
            ts.push_back({r, cc});
        }
        for (auto& t : ts) check_exps(t.first);
        return from_terms(std::move(ts));
    }

    BasicPoly derivative(Var v) const {
        std::vector<Term> ts;
        int i = static_cast<int>(v);
        for (auto& [e, c] : terms_)
            if (e[i] != 0) {
                Exps r = e;
                r[i] -= 1;
                ts.push_back({r, c * e[i]});
            }
        return from_terms(std::move(ts));
    }

    template <class T, class PowFn>
    T eval_with(const T& zero, PowFn&& powfn) const {
        T acc = zero;
        for (auto& [e, c] : terms_) acc = acc + powfn(e) * c;
        return acc;
    }

    Rational eval(const Rational& q, const Rational& N, const Rational& K) const {
        Rational acc = 0;
        for (auto& [e, c] : terms_) acc += c * rpow(q, e[0]) * rpow(N, e[1]) * rpow(K, e[2]);
        return acc;
    }

    // LCM of coefficient denominators and GCD of numerators
    Rational integer_content() const {
        if (terms_.empty()) return Rational(1);
        Integer g = 0, l = 1;
        for (auto& [e, c] : terms_) {
            g = gcd_int(g, c.get_num());
            l = lcm_int(l, c.get_den());
        }
        Rational r(g, l);
        r.canonicalize();
        return r;
    }
    // integer coefficients, content 1, positive leading coefficient; returns factor f with this = f * result
    std::pair<Rational, BasicPoly> primitive() const {
        if (terms_.empty()) return {Rational(1), {}};
        Rational ct = integer_content();
        if (leading_coeff() < 0) ct = -ct;
        BasicPoly r = *this;
        Rational inv = 1 / ct;
        for (auto& t : r.terms_) t.second *= inv;
        return {ct, r};
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [e, c] : terms_) {
            Rational a = abs(c);
            bool neg = c < 0;
            if (first) {
                if (neg) os << "-";
            } else {
                os << (neg ? " - " : " + ");
            }
            first = false;
            bool unit = e == Exps{0, 0, 0};
            if (a != 1 || unit) {
                os << a.get_str();
                if (!unit) os << "*";
            }
            bool firstvar = true;
            for (int i = 0; i < kNumVars; ++i) {
                if (e[i] == 0) continue;
                if (!firstvar) os << "*";
                firstvar = false;
                os << var_name(static_cast<Var>(i));
                if (e[i] != 1) os << "^" << (e[i] < 0 ? "(" + std::to_string(e[i]) + ")" : std::to_string(e[i]));
            }
        }
        return os.str();
    }

    template <bool B>
    BasicPoly<B> as() const {
        std::vector<typename BasicPoly<B>::Term> ts(terms_.begin(), terms_.end());
        return BasicPoly<B>::from_terms(std::move(ts));
    }

private:
    template <bool>
    friend class BasicPoly;

    static void check_exps(const Exps& e) {
        if constexpr (!AllowNeg) {
            for (int x : e)
                if (x < 0) fail(ErrorKind::InvalidArgument, "negative exponent in MultiPoly");
        }
    }

    static BasicPoly merge(const BasicPoly& a, const BasicPoly& b, bool sub) {
        BasicPoly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        LexLess lt;
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && lt(b.terms_[j].first, a.terms_[i].first))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || lt(a.terms_[i].first, b.terms_[j].first)) {
                r.terms_.push_back({b.terms_[j].first, sub ? Rational(-b.terms_[j].second) : b.terms_[j].second});
                ++j;
            } else {
                Rational c = sub ? Rational(a.terms_[i].second - b.terms_[j].second)
                                 : Rational(a.terms_[i].second + b.terms_[j].second);
                if (c != 0) r.terms_.push_back({a.terms_[i].first, c});
                ++i;
                ++j;
            }
        }
        return r;
    }

    std::vector<Term> terms_;
};

using MultiPoly = BasicPoly<false>;
using LaurentPoly = BasicPoly<true>;

inline MultiPoly qvar(int e = 1) { return MultiPoly::var(Var::q, e); }
inline MultiPoly Nvar(int e = 1) { return MultiPoly::var(Var::N, e); }
inline MultiPoly Kvar(int e = 1) { return MultiPoly::var(Var::K, e); }

// Laurent -> (poly, monomial shift) with laurent = poly * x^shift and poly free of monomial content
inline std::pair<MultiPoly, Exps> split_laurent(const LaurentPoly& p) {
    if (p.is_zero()) return {MultiPoly(), {0, 0, 0}};
    Exps m = p.min_exps();
    LaurentPoly s = p.shift({-m[0], -m[1], -m[2]});
    return {s.as<false>(), m};
}

// exact quotient a / b, or nullopt if b does not divide a
inline std::optional<MultiPoly> exact_divide(const MultiPoly& a, const MultiPoly& b) {
    if (b.is_zero()) fail(ErrorKind::ZeroDenominator, "division by zero polynomial");
    if (a.is_zero()) return MultiPoly();
    if (b.is_constant()) return a * Rational(1 / b.constant_value());
    const Exps& lb = b.leading_exps();
    const Rational& cb = b.leading_coeff();
    if (b.is_monomial()) {
        Exps m = a.min_exps();
        for (int i = 0; i < kNumVars; ++i)
            if (m[i] < lb[i]) return std::nullopt;
        return a.as<true>().mul_term({-lb[0], -lb[1], -lb[2]}, Rational(1 / cb)).as<false>();
    }
    Exps bound = exps_sub(a.max_exps(), b.max_exps());
    for (int x : bound)
        if (x < 0) return std::nullopt;
    MultiPoly rem = a;
    std::map<Exps, Rational, LexLess> quot;
    while (!rem.is_zero()) {
        const Exps& lr = rem.leading_exps();
        Exps d = exps_sub(lr, lb);
        for (int i = 0; i < kNumVars; ++i)
            if (d[i] < 0 || d[i] > bound[i]) return std::nullopt;
        Rational c = rem.leading_coeff() / cb;
        quot[d] += c;
        rem -= b.mul_term(d, c);
    }
    return MultiPoly::from_map(quot);
}

}  // namespace qwz
