#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qwz/exact/rational.hpp"

namespace qwz {

// RAII mpfr_t
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec), mpfr_set_zero(v_, 1); }
    Mpfr(const Mpfr& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Mpfr(Mpfr&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Mpfr& operator=(const Mpfr& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Mpfr& operator=(Mpfr&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Mpfr() { mpfr_clear(v_); }

    static Mpfr from(const Rational& r, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        Mpfr x(prec);
        mpfr_set_q(x.v_, r.get_mpq_t(), rnd);
        return x;
    }
    static Mpfr from_d(double d, mpfr_prec_t prec) {
        Mpfr x(prec);
        mpfr_set_d(x.v_, d, MPFR_RNDN);
        return x;
    }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    long exponent() const { return is_zero() ? LONG_MIN / 2 : mpfr_get_exp(v_); }

    std::string str(int digits = 40) const {
        if (mpfr_nan_p(v_)) return "nan";
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

private:
    mpfr_t v_;
};

inline constexpr mpfr_prec_t kRadPrec = 64;

// error radius arithmetic, always rounded up
namespace rad {

inline Mpfr zero() { return Mpfr(kRadPrec); }
inline Mpfr abs_up(const Mpfr& x) {
    Mpfr r(kRadPrec);
    mpfr_abs(r.get(), x.get(), MPFR_RNDU);
    return r;
}
inline Mpfr add(const Mpfr& a, const Mpfr& b) {
    Mpfr r(kRadPrec);
    mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDU);
    return r;
}
inline Mpfr mul(const Mpfr& a, const Mpfr& b) {
    Mpfr r(kRadPrec);
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDU);
    return r;
}
inline Mpfr div(const Mpfr& a, const Mpfr& b) {
    Mpfr r(kRadPrec);
    mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDU);
    return r;
}
// |x| - r rounded down, clamped at zero
inline Mpfr lower(const Mpfr& x, const Mpfr& r) {
    Mpfr a(kRadPrec), out(kRadPrec);
    mpfr_abs(a.get(), x.get(), MPFR_RNDD);
    mpfr_sub(out.get(), a.get(), r.get(), MPFR_RNDD);
    if (mpfr_sgn(out.get()) < 0) mpfr_set_zero(out.get(), 1);
    return out;
}
// one ulp of x at precision p (plus a little)
inline Mpfr ulp(const Mpfr& x, mpfr_prec_t p) {
    Mpfr r(kRadPrec);
    if (x.is_zero()) return r;
    mpfr_set_ui_2exp(r.get(), 1, mpfr_get_exp(x.get()) - p + 1, MPFR_RNDU);
    return r;
}
inline bool le(const Mpfr& a, const Mpfr& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
inline Mpfr from(const Rational& r) { return Mpfr::from(r, kRadPrec, MPFR_RNDU); }

}  // namespace rad

// midpoint-radius real: the true value lies in [mid - rad, mid + rad]
class Ball {
public:
    Ball() : mid_(64), rad_(kRadPrec) {}
    Ball(const Rational& r, mpfr_prec_t prec) : mid_(Mpfr::from(r, prec)), rad_(kRadPrec) {
        Mpfr back(prec);
        mpfr_set_q(back.get(), r.get_mpq_t(), MPFR_RNDN);
        Rational exact;
        mpfr_get_q(exact.get_mpq_t(), back.get());
        if (exact != r) rad_ = rad::ulp(mid_, prec);
    }
    Ball(Mpfr mid, Mpfr r) : mid_(std::move(mid)), rad_(std::move(r)) {}

    static Ball exact_int(long v, mpfr_prec_t prec) { return Ball(Rational(v), prec); }

    const Mpfr& mid() const { return mid_; }
    const Mpfr& rad() const { return rad_; }
    mpfr_prec_t prec() const { return mid_.prec(); }
    double to_double() const { return mid_.to_double(); }
    bool contains_zero() const { return rad::le(rad::abs_up(mid_), rad_); }
    bool is_exact_zero() const { return mid_.is_zero() && rad_.is_zero(); }

    Mpfr mag() const { return rad::add(rad::abs_up(mid_), rad_); }   // upper bound of |x|
    Mpfr mig() const { return rad::lower(mid_, rad_); }              // lower bound of |x|

    Ball& add_error(const Mpfr& e) {
        rad_ = rad::add(rad_, e);
        return *this;
    }

    Ball operator-() const {
        Ball r = *this;
        mpfr_neg(r.mid_.get(), mid_.get(), MPFR_RNDN);
        return r;
    }
    friend Ball operator+(const Ball& a, const Ball& b) { return addsub(a, b, false); }
    friend Ball operator-(const Ball& a, const Ball& b) { return addsub(a, b, true); }
    friend Ball operator*(const Ball& a, const Ball& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Mpfr m(p);
        mpfr_mul(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        Mpfr e = rad::add(rad::add(rad::mul(rad::abs_up(a.mid_), b.rad_), rad::mul(rad::abs_up(b.mid_), a.rad_)),
                          rad::mul(a.rad_, b.rad_));
        e = rad::add(e, rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }
    friend Ball operator/(const Ball& a, const Ball& b) {
        if (b.contains_zero()) fail(ErrorKind::PoleEncountered, "division by a ball containing zero");
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Mpfr m(p);
        mpfr_div(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        // |a/b - ma/mb| <= (|ma| rb + |mb| ra) / (|mb| (|mb| - rb))
        Mpfr lo = b.mig();
        Mpfr num = rad::add(rad::mul(rad::abs_up(a.mid_), b.rad_), rad::mul(rad::abs_up(b.mid_), a.rad_));
        Mpfr den(kRadPrec);
        Mpfr bm(kRadPrec);
        mpfr_abs(bm.get(), b.mid_.get(), MPFR_RNDD);
        mpfr_mul(den.get(), bm.get(), lo.get(), MPFR_RNDD);
        Mpfr e = rad::add(rad::div(num, den), rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }
    Ball& operator+=(const Ball& b) { return *this = *this + b; }
    Ball& operator-=(const Ball& b) { return *this = *this - b; }
    Ball& operator*=(const Ball& b) { return *this = *this * b; }
    Ball& operator/=(const Ball& b) { return *this = *this / b; }

    Ball pow(long e) const {
        Ball one(Rational(1), prec());
        if (e == 0) return one;
        Ball b = e > 0 ? *this : one / *this, r = one;
        unsigned long x = static_cast<unsigned long>(e > 0 ? e : -e);
        while (x) {
            if (x & 1ul) r *= b;
            x >>= 1ul;
            if (x) b *= b;
        }
        return r;
    }

    // k-th root of a positive ball (or odd k)
    Ball root(unsigned long k) const {
        if (k == 1) return *this;
        mpfr_prec_t p = prec();
        if (k % 2 == 0 && mid_.sign() <= 0) fail(ErrorKind::InvalidArgument, "even root of a non-positive number");
        Mpfr m(p);
        mpfr_rootn_ui(m.get(), mid_.get(), k, MPFR_RNDN);
        // |x^(1/k) - m^(1/k)| <= r / (k * lo^((k-1)/k)), lo = min |x|
        Mpfr lo = mig();
        if (lo.is_zero()) fail(ErrorKind::InvalidArgument, "root of a ball containing zero");
        Mpfr lr(kRadPrec), den(kRadPrec);
        mpfr_rootn_ui(lr.get(), lo.get(), k, MPFR_RNDD);
        mpfr_div(den.get(), lo.get(), lr.get(), MPFR_RNDD);
        mpfr_mul_ui(den.get(), den.get(), k, MPFR_RNDD);
        Mpfr e = rad::add(rad::div(rad_, den), rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }

    Ball sqrt() const { return root(2); }

    // x^y for x > 0 and rational y
    Ball pow(const Rational& y) const {
        if (y.get_den() == 1) return pow(to_long(y));
        if (mid_.sign() <= 0 || contains_zero()) fail(ErrorKind::InvalidArgument, "fractional power of a non-positive number");
        long num = y.get_num().get_si();
        unsigned long den = y.get_den().get_ui();
        return root(den).pow(num);
    }

    Ball log() const {
        if (mid_.sign() <= 0 || contains_zero()) fail(ErrorKind::InvalidArgument, "log of a non-positive number");
        mpfr_prec_t p = prec();
        Mpfr m(p);
        mpfr_log(m.get(), mid_.get(), MPFR_RNDN);
        Mpfr e = rad::add(rad::div(rad_, mig()), rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }

    Ball exp() const {
        mpfr_prec_t p = prec();
        Mpfr m(p), hi(kRadPrec), up(kRadPrec);
        mpfr_exp(m.get(), mid_.get(), MPFR_RNDN);
        // |e^x - e^m| <= e^(m + r) * r
        mpfr_add(up.get(), mid_.get(), rad_.get(), MPFR_RNDU);
        mpfr_exp(hi.get(), up.get(), MPFR_RNDU);
        Mpfr e = rad::add(rad::mul(hi, rad_), rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }

    std::string str(int digits = 40) const { return mid_.str(digits) + " +/- " + rad_.str(3); }

private:
    static Ball addsub(const Ball& a, const Ball& b, bool sub) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Mpfr m(p);
        if (sub) mpfr_sub(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        else mpfr_add(m.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
        Mpfr e = rad::add(rad::add(a.rad_, b.rad_), rad::ulp(m, p));
        return Ball(std::move(m), std::move(e));
    }

    Mpfr mid_, rad_;
};

// |a - b| as an upper bound, and whether the balls' difference fits within tol
inline Mpfr abs_diff_upper(const Ball& a, const Ball& b) { return (a - b).mag(); }
inline Mpfr abs_diff_mid(const Ball& a, const Ball& b) {
    Mpfr d(std::max(a.prec(), b.prec()));
    mpfr_sub(d.get(), a.mid().get(), b.mid().get(), MPFR_RNDN);
    mpfr_abs(d.get(), d.get(), MPFR_RNDU);
    return d;
}

}  // namespace qwz
