#pragma once

#include <gmpxx.h>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "qwz/errors.hpp"

namespace qwz {

// mpq_class keeps num/den reduced with den > 0 after canonicalize()
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational parse_rational(std::string_view s) {
    std::string str(s);
    auto trim = [](std::string& x) {
        while (!x.empty() && std::isspace(static_cast<unsigned char>(x.front()))) x.erase(x.begin());
        while (!x.empty() && std::isspace(static_cast<unsigned char>(x.back()))) x.pop_back();
    };
    trim(str);
    if (str.empty()) fail(ErrorKind::InvalidArgument, "empty rational");
    if (str.front() == '+') str.erase(str.begin());
    Rational r;
    auto slash = str.find('/');
    auto valid_int = [](const std::string& x) {
        if (x.empty()) return false;
        std::size_t i = (x[0] == '-') ? 1 : 0;
        if (i == x.size()) return false;
        for (; i < x.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(x[i]))) return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!valid_int(str)) fail(ErrorKind::InvalidArgument, "bad rational '" + str + "'");
        r = Rational(Integer(str));
    } else {
        std::string a = str.substr(0, slash), b = str.substr(slash + 1);
        trim(a);
        trim(b);
        if (!valid_int(a) || !valid_int(b)) fail(ErrorKind::InvalidArgument, "bad rational '" + str + "'");
        Integer den(b);
        if (den == 0) fail(ErrorKind::ZeroDenominator, "rational '" + str + "'");
        r = Rational(Integer(a), den);
        r.canonicalize();
    }
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational rpow(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (e < 0) {
        if (base == 0) fail(ErrorKind::ZeroDenominator, "0 to a negative power");
        Rational inv = 1 / base;
        return rpow(inv, -e);
    }
    Integer n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// exact k-th root when it exists; odd roots keep the sign
inline std::optional<Rational> exact_root(const Rational& x, unsigned k) {
    if (k == 1) return x;
    if (x < 0 && k % 2 == 0) return std::nullopt;
    Integer n = abs(x.get_num()), d = x.get_den(), rn, rd;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k)) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    if (x < 0) r = -r;
    return r;
}

inline Integer lcm_int(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Integer gcd_int(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline long to_long(const Rational& r) {
    if (!is_integer(r) || !r.get_num().fits_slong_p()) fail(ErrorKind::InvalidArgument, "not a machine integer: " + r.get_str());
    return r.get_num().get_si();
}

}  // namespace qwz
