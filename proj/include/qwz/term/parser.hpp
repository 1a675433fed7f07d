#pragma once

#include <cctype>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qwz/term/closed_form.hpp"

namespace qwz {

namespace parse {

struct Token {
    enum Kind { Num, Ident, Sym, End } kind;
    std::string text;
};

inline std::vector<Token> lex(std::string_view s, int line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Num, std::string(s.substr(i, j - i))});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Token::Ident, std::string(s.substr(i, j - i))});
            i = j;
        } else if (std::string_view("()*/+-^;,|").find(c) != std::string_view::npos) {
            out.push_back({Token::Sym, std::string(1, c)});
            ++i;
        } else {
            throw ParseError(line, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::End, ""});
    return out;
}

class Cursor {
public:
    Cursor(std::string_view s, int line) : toks_(lex(s, line)), line_(line), src_(s) {}

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
    Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool is_sym(const char* s, std::size_t ahead = 0) const { return peek(ahead).kind == Token::Sym && peek(ahead).text == s; }
    bool is_ident(const char* s) const { return peek().kind == Token::Ident && peek().text == s; }
    bool accept(const char* s) {
        if (is_sym(s)) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(const char* s) {
        if (!accept(s)) error(std::string("expected '") + s + "'");
    }
    bool at_end() const { return peek().kind == Token::End; }
    [[noreturn]] void error(const std::string& msg) const {
        std::string near = peek().kind == Token::End ? "end of input" : "'" + peek().text + "'";
        throw ParseError(line_, msg + " near " + near + " in \"" + std::string(src_) + "\"");
    }
    int line() const { return line_; }
    void separator() {
        if (!accept(";") && !accept(",")) error("expected ';'");
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int line_;
    std::string_view src_;
};

inline Rational parse_number(Cursor& c) {
    if (c.peek().kind != Token::Num) c.error("expected a number");
    return Rational(Integer(c.next().text));
}

// optional sign, integer, optional /integer
inline Rational parse_signed_rational(Cursor& c) {
    bool neg = false;
    while (c.is_sym("-") || c.is_sym("+")) neg ^= c.next().text == "-";
    Rational r;
    if (c.accept("(")) {
        r = parse_signed_rational(c);
        c.expect(")");
    } else {
        r = parse_number(c);
        if (c.is_sym("/") && c.peek(1).kind == Token::Num) {
            c.next();
            Rational d = parse_number(c);
            if (d == 0) c.error("zero denominator");
            r /= d;
        }
    }
    return neg ? Rational(-r) : r;
}

inline int parse_signed_int(Cursor& c) {
    bool paren = c.accept("(");
    bool neg = false;
    while (c.is_sym("-") || c.is_sym("+")) neg ^= c.next().text == "-";
    Rational r = parse_number(c);
    if (paren) c.expect(")");
    long v = to_long(r);
    return static_cast<int>(neg ? -v : v);
}

// ---- polynomials in n, k ----

PolyNK parse_nk_sum(Cursor& c);

inline PolyNK parse_nk_primary(Cursor& c) {
    if (c.peek().kind == Token::Num) return PolyNK(parse_number(c));
    if (c.is_ident("n")) {
        c.next();
        return PolyNK::var_n();
    }
    if (c.is_ident("k")) {
        c.next();
        return PolyNK::var_k();
    }
    if (c.accept("(")) {
        PolyNK p = parse_nk_sum(c);
        c.expect(")");
        return p;
    }
    c.error("expected a polynomial in n, k");
}

inline PolyNK parse_nk_pow(Cursor& c) {
    PolyNK b = parse_nk_primary(c);
    if (c.accept("^")) {
        int e = parse_signed_int(c);
        if (e < 0) c.error("negative power in polynomial");
        PolyNK r(Rational(1));
        for (int i = 0; i < e; ++i) r = r * b;
        return r;
    }
    return b;
}

inline PolyNK parse_nk_unary(Cursor& c) {
    if (c.accept("-")) return PolyNK(Rational(0)) - parse_nk_unary(c);
    if (c.accept("+")) return parse_nk_unary(c);
    return parse_nk_pow(c);
}

inline bool starts_primary(const Cursor& c) {
    auto& t = c.peek();
    return t.kind == Token::Num || t.kind == Token::Ident || (t.kind == Token::Sym && t.text == "(");
}

inline PolyNK parse_nk_prod(Cursor& c) {
    PolyNK p = parse_nk_unary(c);
    while (true) {
        if (c.accept("*")) {
            p = p * parse_nk_unary(c);
        } else if (c.accept("/")) {
            PolyNK d = parse_nk_unary(c);
            if (!d.is_constant() || d.constant() == 0) c.error("division by a non-constant or zero");
            p = p * PolyNK(Rational(1 / d.constant()));
        } else if (starts_primary(c)) {
            p = p * parse_nk_pow(c);  // implicit multiplication, e.g. 2n
        } else {
            return p;
        }
    }
}

inline PolyNK parse_nk_sum(Cursor& c) {
    PolyNK p = parse_nk_prod(c);
    while (true) {
        if (c.accept("+")) p = p + parse_nk_prod(c);
        else if (c.accept("-")) p = p - parse_nk_prod(c);
        else return p;
    }
}

// ---- Laurent expressions in q with rational q-exponents ----

struct QKey {
    Rational e;
    long a = 0, b = 0;
    friend bool operator<(const QKey& x, const QKey& y) {
        if (x.b != y.b) return x.b < y.b;
        if (x.a != y.a) return x.a < y.a;
        return x.e < y.e;
    }
};

struct QExpr {
    std::map<QKey, Rational> t;

    QExpr() = default;
    QExpr(const Rational& v) {  // NOLINT
        if (v != 0) t[QKey{Rational(0), 0, 0}] = v;
    }
    static QExpr mono(const Rational& c, const Rational& e, long a, long b) {
        QExpr x;
        if (c != 0) x.t[QKey{e, a, b}] = c;
        return x;
    }
    void clean() {
        for (auto it = t.begin(); it != t.end();) it = it->second == 0 ? t.erase(it) : std::next(it);
    }
    bool is_zero() const { return t.empty(); }
    bool is_monomial() const { return t.size() == 1; }
    friend QExpr operator+(QExpr x, const QExpr& y) {
        for (auto& [k, v] : y.t) x.t[k] += v;
        x.clean();
        return x;
    }
    friend QExpr operator-(QExpr x, const QExpr& y) {
        for (auto& [k, v] : y.t) x.t[k] -= v;
        x.clean();
        return x;
    }
    friend QExpr operator*(const QExpr& x, const QExpr& y) {
        QExpr r;
        for (auto& [kx, vx] : x.t)
            for (auto& [ky, vy] : y.t) r.t[QKey{kx.e + ky.e, kx.a + ky.a, kx.b + ky.b}] += vx * vy;
        r.clean();
        return r;
    }
    QExpr inverse_monomial() const {
        if (!is_monomial()) fail(ErrorKind::InvalidArgument, "division by a non-monomial q-expression");
        auto& [k, v] = *t.begin();
        return mono(1 / v, -k.e, -k.a, -k.b);
    }
    QExpr pow(int e) const {
        if (e < 0) return inverse_monomial().pow(-e);
        QExpr r(Rational(1));
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }
    void collect_denominators(Integer& l) const {
        for (auto& [k, v] : t) l = lcm_int(l, k.e.get_den());
    }
    LaurentPoly to_laurent(int D) const {
        std::vector<LaurentPoly::Term> ts;
        for (auto& [k, v] : t) {
            Rational e = k.e * D;
            if (!is_integer(e)) fail(ErrorKind::NotQProper, "q-exponent " + k.e.get_str() + " outside (1/D)Z");
            ts.push_back({{static_cast<int>(to_long(e)), static_cast<int>(k.a), static_cast<int>(k.b)}, v});
        }
        return LaurentPoly::from_terms(std::move(ts));
    }
};

QExpr parse_q_sum(Cursor& c);

// exponent after '^': (poly), n, k, or a signed rational
inline PolyNK parse_exponent(Cursor& c) {
    if (c.accept("(")) {
        PolyNK p = parse_nk_sum(c);
        c.expect(")");
        return p;
    }
    if (c.is_ident("n") || c.is_ident("k")) return parse_nk_primary(c);
    return PolyNK(parse_signed_rational(c));
}

// q^(affine) monomial from a polynomial exponent
inline QExpr q_power(Cursor& c, const PolyNK& p) {
    Affine a = p.affine();
    if (!is_integer(a.cn) || !is_integer(a.ck)) c.error("n/k coefficients of a q-exponent must be integers");
    return QExpr::mono(Rational(1), a.c0, to_long(a.cn), to_long(a.ck));
}

inline QExpr parse_q_primary(Cursor& c) {
    if (c.peek().kind == Token::Num) return QExpr(parse_number(c));
    if (c.is_ident("q")) {
        c.next();
        if (c.accept("^")) return q_power(c, parse_exponent(c));
        return QExpr::mono(1, 1, 0, 0);
    }
    if (c.is_ident("N")) {
        c.next();
        return QExpr::mono(1, 0, 1, 0);
    }
    if (c.is_ident("K")) {
        c.next();
        return QExpr::mono(1, 0, 0, 1);
    }
    if (c.accept("(")) {
        QExpr x = parse_q_sum(c);
        c.expect(")");
        return x;
    }
    c.error("expected a q-expression");
}

inline QExpr parse_q_pow(Cursor& c) {
    QExpr b = parse_q_primary(c);
    if (c.accept("^")) return b.pow(parse_signed_int(c));
    return b;
}

inline QExpr parse_q_unary(Cursor& c) {
    if (c.accept("-")) return QExpr(Rational(0)) - parse_q_unary(c);
    if (c.accept("+")) return parse_q_unary(c);
    return parse_q_pow(c);
}

inline QExpr parse_q_prod(Cursor& c) {
    QExpr x = parse_q_unary(c);
    while (true) {
        if (c.accept("*")) x = x * parse_q_unary(c);
        else if (c.accept("/")) x = x * parse_q_unary(c).inverse_monomial();
        else if (starts_primary(c) && !c.is_sym("(") ) x = x * parse_q_pow(c);
        else return x;
    }
}

inline QExpr parse_q_sum(Cursor& c) {
    QExpr x = parse_q_prod(c);
    while (true) {
        if (c.accept("+")) x = x + parse_q_prod(c);
        else if (c.accept("-")) x = x - parse_q_prod(c);
        else return x;
    }
}

// ---- products of atoms ----

struct RawFactor {
    int sign = 1;
    Affine arg;
    Rational base = 1;
    bool infinite = false;
    Affine order;
    int power = 1;
};

struct Build {
    int sn = 0, sk = 0;
    QuadForm qp;
    std::vector<RawFactor> factors;
    QExpr num = QExpr(Rational(1)), den = QExpr(Rational(1));
    std::vector<GammaAtom> gammas;
    int pi_power = 0;
    Rational sqrt_arg = 1;
    std::vector<std::pair<std::string, int>> sums;  // raw inner expressions
    // classical pieces
    Rational rate = 1;
    bool has_rate = false;
    std::vector<std::pair<Rational, int>> poch;
    PolyNK poly = PolyNK(Rational(1));
    bool has_poly = false;
};

enum class Mode { Summand, RHS, Classical };

inline RawFactor parse_qpoch_args(Cursor& c, bool infinite, Mode mode) {
    RawFactor f;
    QExpr a = parse_q_sum(c);
    if (a.is_zero()) {
        c.error("zero q-Pochhammer argument is not supported");
    }
    if (!a.is_monomial()) c.error("q-Pochhammer argument must be +-q^(...)");
    auto& [key, coef] = *a.t.begin();
    if (coef != 1 && coef != -1) c.error("q-Pochhammer argument coefficient must be +-1");
    f.sign = coef > 0 ? 1 : -1;
    f.arg = {key.e, Rational(key.a), Rational(key.b)};
    c.separator();
    f.base = parse_signed_rational(c);
    if (f.base <= 0) c.error("base exponent must be positive");
    f.infinite = infinite;
    if (!infinite) {
        c.separator();
        if (c.is_ident("inf")) {
            c.next();
            f.infinite = true;
        } else {
            PolyNK o = parse_nk_sum(c);
            f.order = o.affine();
            if (mode != Mode::Summand && !f.order.is_constant()) c.error("RHS order must be constant");
        }
    }
    if (f.infinite && !f.arg.is_constant()) c.error("infinite q-Pochhammer with n/k dependent argument");
    return f;
}

inline void apply_atom(Cursor& c, Build& b, Mode mode, int power);

inline void parse_product(Cursor& c, Build& b, Mode mode, int sign_power);

inline void parse_factor(Cursor& c, Build& b, Mode mode, int power) {
    if (c.accept("-")) {
        b.num = b.num * QExpr(Rational(-1));
        parse_factor(c, b, mode, power);
        return;
    }
    if (c.accept("(")) {
        Build inner;
        parse_product(c, inner, mode, 1);
        c.expect(")");
        int p = 1;
        if (c.accept("^")) p = parse_signed_int(c);
        for (int i = 0; i < std::abs(p); ++i) {
            int s = power * (p > 0 ? 1 : -1);
            b.sn += s * inner.sn;
            b.sk += s * inner.sk;
            Rational rs = s;
            b.qp = b.qp + QuadForm{rs * inner.qp.nn, rs * inner.qp.nk, rs * inner.qp.kk, rs * inner.qp.n, rs * inner.qp.k, rs * inner.qp.c};
            for (auto f : inner.factors) {
                f.power *= s;
                b.factors.push_back(f);
            }
            if (s > 0) {
                b.num = b.num * inner.num;
                b.den = b.den * inner.den;
            } else {
                b.num = b.num * inner.den;
                b.den = b.den * inner.num;
            }
            for (auto g : inner.gammas) {
                g.power *= s;
                b.gammas.push_back(g);
            }
            b.pi_power += s * inner.pi_power;
            b.sqrt_arg *= s > 0 ? inner.sqrt_arg : Rational(1 / inner.sqrt_arg);
            for (auto [e, sp] : inner.sums) b.sums.push_back({e, sp * s});
            b.rate *= s > 0 ? inner.rate : Rational(1 / inner.rate);
            b.has_rate |= inner.has_rate;
            for (auto [a, m] : inner.poch) b.poch.push_back({a, m * s});
            if (inner.has_poly) {
                if (s < 0) c.error("poly() cannot be in a denominator");
                b.poly = b.poly * inner.poly;
                b.has_poly = true;
            }
        }
        return;
    }
    apply_atom(c, b, mode, power);
}

inline void parse_product(Cursor& c, Build& b, Mode mode, int sign_power) {
    parse_factor(c, b, mode, sign_power);
    while (true) {
        if (c.accept("*")) parse_factor(c, b, mode, sign_power);
        else if (c.accept("/")) parse_factor(c, b, mode, -sign_power);
        else return;
    }
}

inline int atom_power(Cursor& c) {
    if (c.accept("^")) return parse_signed_int(c);
    return 1;
}

inline void apply_atom(Cursor& c, Build& b, Mode mode, int power) {
    if (c.peek().kind == Token::Num) {
        Rational v = parse_number(c);
        if (c.is_sym("/") && c.peek(1).kind == Token::Num) {
            // a/b literal stays a single rational only when followed by a number
            c.next();
            v /= parse_number(c);
        }
        int p = atom_power(c) * power;
        if (v == 0) c.error("zero factor");
        b.num = b.num * QExpr(rpow(v, p));
        return;
    }
    if (c.peek().kind != Token::Ident) c.error("expected an atom");
    std::string name = c.next().text;
    if (name == "pi") {
        int p = atom_power(c);
        b.pi_power += p * power;
        return;
    }
    if (name == "q") {
        // bare q-power factor, e.g. q^(n^2)
        PolyNK p = c.accept("^") ? parse_exponent(c) : PolyNK(Rational(1));
        QuadForm qf = p.quad();
        Rational s = power;
        b.qp = b.qp + QuadForm{s * qf.nn, s * qf.nk, s * qf.kk, s * qf.n, s * qf.k, s * qf.c};
        return;
    }
    c.expect("(");
    if (name == "qpow") {
        PolyNK p = parse_nk_sum(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        QuadForm qf = p.quad();
        Rational s = pw;
        b.qp = b.qp + QuadForm{s * qf.nn, s * qf.nk, s * qf.kk, s * qf.n, s * qf.k, s * qf.c};
    } else if (name == "sign") {
        int sn = parse_signed_int(c);
        c.separator();
        int sk = parse_signed_int(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        b.sn += sn * pw;
        b.sk += sk * pw;
    } else if (name == "qpoch" || name == "qpochinf") {
        RawFactor f = parse_qpoch_args(c, name == "qpochinf", mode);
        c.expect(")");
        f.power = atom_power(c) * power;
        if (f.power != 0) b.factors.push_back(f);
    } else if (name == "bracket") {
        PolyNK p = parse_nk_sum(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        QExpr x = QExpr(Rational(1)) - q_power(c, p), y = QExpr(Rational(1)) - QExpr::mono(1, 1, 0, 0);
        for (int i = 0; i < std::abs(pw); ++i) {
            b.num = b.num * (pw > 0 ? x : y);
            b.den = b.den * (pw > 0 ? y : x);
        }
    } else if (name == "ratfun" || name == "const") {
        QExpr n = parse_q_sum(c), d(Rational(1));
        if (c.accept(";") || c.accept(",")) d = parse_q_sum(c);
        c.expect(")");
        if (d.is_zero()) c.error("zero denominator");
        int pw = atom_power(c) * power;
        if (name == "const" && mode == Mode::Summand) {
            for (auto* x : {&n, &d})
                for (auto& [k, v] : x->t)
                    if (k.a != 0 || k.b != 0) c.error("const() must not depend on n or k");
        }
        for (int i = 0; i < std::abs(pw); ++i) {
            b.num = b.num * (pw > 0 ? n : d);
            b.den = b.den * (pw > 0 ? d : n);
        }
    } else if (name == "gammaq") {
        GammaAtom g;
        g.x = parse_signed_rational(c);
        if (c.accept(";") || c.accept(",")) g.base = parse_signed_rational(c);
        c.expect(")");
        g.power = atom_power(c) * power;
        if (mode == Mode::Summand) c.error("gammaq() is only allowed in closed forms");
        b.gammas.push_back(g);
    } else if (name == "sqrt") {
        Rational r = parse_signed_rational(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        if (r <= 0) c.error("sqrt of a non-positive number");
        if (pw % 2 == 0) b.num = b.num * QExpr(rpow(r, pw / 2));
        else b.sqrt_arg *= rpow(r, pw);
    } else if (name == "sum") {
        int depth = 1;
        std::string inner;
        while (depth > 0) {
            if (c.at_end()) c.error("unbalanced parentheses in sum()");
            Token t = c.next();
            if (t.kind == Token::Sym && t.text == "(") ++depth;
            if (t.kind == Token::Sym && t.text == ")") {
                if (--depth == 0) break;
            }
            inner += t.text + " ";
        }
        int pw = atom_power(c) * power;
        if (mode != Mode::RHS || pw != 1) c.error("sum() is only allowed once, in a closed-form numerator");
        b.sums.push_back({inner, pw});
    } else if (name == "rate") {
        Rational z = parse_signed_rational(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        if (mode != Mode::Classical || pw != 1) c.error("rate() belongs to classical summands");
        b.rate *= z;
        b.has_rate = true;
    } else if (name == "poch") {
        Rational a = parse_signed_rational(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        if (mode != Mode::Classical) c.error("poch() belongs to classical summands");
        b.poch.push_back({a, pw});
    } else if (name == "poly") {
        PolyNK p = parse_nk_sum(c);
        c.expect(")");
        int pw = atom_power(c) * power;
        if (mode != Mode::Classical || pw != 1) c.error("poly() belongs to classical summand numerators");
        b.poly = b.poly * p;
        b.has_poly = true;
    } else {
        c.error("unknown atom '" + name + "'");
    }
}

inline int common_denominator(const Build& b) {
    Integer l = 1;
    auto add = [&](const Rational& r) { l = lcm_int(l, r.get_den()); };
    for (const Rational* r : {&b.qp.nn, &b.qp.kk, &b.qp.n, &b.qp.k, &b.qp.c, &b.qp.nk}) add(*r);
    add(b.qp.nn + b.qp.n);
    add(b.qp.kk + b.qp.k);
    for (auto& f : b.factors) {
        add(f.arg.c0);
        add(f.base);
        if (!f.infinite) add(f.base * f.order.c0);
    }
    for (auto& g : b.gammas) {
        add(g.base);
        add(g.base * g.x);
    }
    b.num.collect_denominators(l);
    b.den.collect_denominators(l);
    if (!l.fits_sint_p() || l > 64) fail(ErrorKind::NotQProper, "exponent denominator too large");
    return static_cast<int>(l.get_si());
}

inline Build parse_build(std::string_view text, Mode mode, int line) {
    Cursor c(text, line);
    Build b;
    if (c.at_end()) c.error("empty expression");
    parse_product(c, b, mode, 1);
    if (!c.at_end()) c.error("trailing input");
    return b;
}

inline QProperTerm term_from_build(const Build& b, int line, int D = 0) {
    if (!b.gammas.empty() || b.pi_power != 0 || b.sqrt_arg != 1 || !b.sums.empty())
        throw ParseError(line, "closed-form atoms in a summand");
    QProperTerm t;
    t.D = D > 0 ? D : common_denominator(b);
    t.sign_n = b.sn;
    t.sign_k = b.sk;
    t.qpow = b.qp;
    for (auto& r : b.factors) {
        QPochFactor f;
        f.arg_sign = r.sign;
        f.arg = r.arg;
        f.base = r.base;
        f.infinite = r.infinite;
        f.order = r.order;
        f.power = r.power;
        t.factors.push_back(f);
    }
    t.cofactor = RationalFunction::from_laurent(b.num.to_laurent(t.D), b.den.to_laurent(t.D));
    // move the n,k-free numeric content to the constant slot
    auto [cn, pn] = t.cofactor.num().primitive();
    t.cofactor = RationalFunction(pn, t.cofactor.den());
    t.constant = RationalFunction(cn);
    validate_qproper(t);
    return t;
}

}  // namespace parse

inline QProperTerm build_term(std::string_view text, int line = 0) {
    try {
        parse::Build b = parse::parse_build(text, parse::Mode::Summand, line);
        return parse::term_from_build(b, line);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotQProper) throw;
        throw ParseError(line, e.what());
    }
}

inline ClosedFormRHS build_rhs(std::string_view text, int line = 0) {
    parse::Build b;
    try {
        b = parse::parse_build(text, parse::Mode::RHS, line);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(line, e.what());
    }
    ClosedFormRHS r;
    if (b.sn != 0 || b.sk != 0 || b.qp.nn != 0 || b.qp.nk != 0 || b.qp.kk != 0 || b.qp.n != 0 || b.qp.k != 0)
        throw ParseError(line, "closed form depends on n or k");
    for (auto* x : {&b.num, &b.den})
        for (auto& [k, v] : x->t)
            if (k.a != 0 || k.b != 0) throw ParseError(line, "closed form depends on n or k");
    std::vector<QProperTerm> inner;
    for (auto& [src, p] : b.sums) inner.push_back(build_term(src, line));
    int D = parse::common_denominator(b);
    for (auto& t : inner) D = std::lcm(D, t.D);
    for (auto& f : b.factors) {
        if (!f.infinite) D = std::lcm(D, static_cast<int>(Rational(f.base * f.order.c0).get_den().get_si()));
    }
    r.D = D;
    b.num = b.num * parse::QExpr::mono(1, b.qp.c, 0, 0);
    r.constant = RationalFunction::from_laurent(b.num.to_laurent(D), b.den.to_laurent(D));
    for (auto& x : b.factors) {
        QPochFactor f;
        f.arg_sign = x.sign;
        f.arg = x.arg;
        f.base = x.base;
        f.infinite = x.infinite;
        f.order = x.order;
        f.power = x.power;
        r.factors.push_back(f);
    }
    r.gammas = b.gammas;
    r.pi_power = b.pi_power;
    r.sqrt_arg = b.sqrt_arg;
    for (auto& t : inner) r.sums.push_back(with_denominator(t, D));
    return r;
}

inline ClassicalTerm build_classical(std::string_view text, int line = 0) {
    parse::Build b;
    try {
        b = parse::parse_build(text, parse::Mode::Classical, line);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(line, e.what());
    }
    if (!b.factors.empty() || !b.gammas.empty() || b.pi_power != 0 || b.sqrt_arg != 1 || b.sn != 0 || b.sk != 0 ||
        !(b.qp == QuadForm{}))
        throw ParseError(line, "q-atoms in a classical summand");
    ClassicalTerm t;
    t.rate = b.rate;
    t.poch = b.poch;
    t.poly = b.poly;
    for (auto* x : {&b.num, &b.den})
        for (auto& [k, v] : x->t)
            if (!(k.e == 0) || k.a != 0 || k.b != 0) throw ParseError(line, "q-dependence in a classical summand");
    t.constant = (b.num.is_zero() ? Rational(0) : b.num.t.begin()->second) / b.den.t.begin()->second;
    if (b.num.t.size() > 1 || b.den.t.size() > 1) throw ParseError(line, "classical constant must be a single rational");
    return t;
}

// "num" or "num; den" over q (rational exponents), N, K; D = 0 picks the least common denominator
inline std::pair<RationalFunction, int> build_ratfun(std::string_view text, int D = 0, int line = 0) {
    parse::Cursor c(text, line);
    try {
        parse::QExpr n = parse::parse_q_sum(c), d(Rational(1));
        if (c.accept(";") || c.accept(",")) d = parse::parse_q_sum(c);
        if (!c.at_end()) c.error("trailing input");
        if (d.is_zero()) c.error("zero denominator");
        if (D == 0) {
            Integer l = 1;
            n.collect_denominators(l);
            d.collect_denominators(l);
            D = static_cast<int>(l.get_si());
        }
        return {RationalFunction::from_laurent(n.to_laurent(D), d.to_laurent(D)), D};
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(line, e.what());
    }
}

}  // namespace qwz
