#pragma once

#include <deque>
#include <map>
#include <mutex>

#include "qwz/numeric/qpoch.hpp"
#include "qwz/term/closed_form.hpp"
#include "qwz/term/evaluate.hpp"

namespace qwz {

struct SumResult {
    Ball value;
    long terms = 0;
    double ratio = 0;  // empirical ratio used for the tail
};

// q^ as a ball: exact D-th root when q is a D-th power of a rational
inline Ball qhat_ball(const Rational& q, int D, const PrecisionContext& ctx) {
    if (q == 0) fail(ErrorKind::InvalidArgument, "q = 0");
    if (auto r = exact_root(q, static_cast<unsigned>(D))) return ctx.ball(*r);
    if (q < 0 && D % 2 == 0) fail(ErrorKind::QOutsideValidity, "negative q has no real " + std::to_string(D) + "-th root");
    if (q < 0) return -ctx.ball(-q).root(static_cast<unsigned long>(D));
    return ctx.ball(q).root(static_cast<unsigned long>(D));
}

namespace detail {

// ratio-test bookkeeping shared by the q and classical paths
class TailTracker {
public:
    explicit TailTracker(const PrecisionContext& ctx) : half_eps_(rad::div(ctx.eps_up(), rad::from(Rational(2)))) {}

    // feed |t_n|; returns the tail bound once the stopping rule holds
    std::optional<Mpfr> push(const Ball& t) {
        Mpfr m = t.mag();
        if (have_prev_) {
            double r;
            if (prev_.is_zero()) r = m.is_zero() ? 0.0 : HUGE_VAL;
            else r = rad::div(m, prev_).to_double();
            ratios_.push_back(r);
            if (ratios_.size() > 5) ratios_.pop_front();
        }
        prev_ = m;
        have_prev_ = true;
        if (ratios_.size() < 5) return std::nullopt;
        double rh = *std::max_element(ratios_.begin(), ratios_.end());
        if (!(rh <= 0.99)) return std::nullopt;
        rhat_ = rh;
        // stop when |t_N| <= eps/2 (1 - r)
        Mpfr one_minus = rad::from(Rational(1));
        mpfr_set_d(one_minus.get(), 1.0 - rh, MPFR_RNDD);
        if (!rad::le(m, rad::mul(half_eps_, one_minus))) return std::nullopt;
        // remaining tail <= |t_N| r / (1 - r)
        Mpfr r = rad::zero();
        mpfr_set_d(r.get(), rh, MPFR_RNDU);
        return rad::div(rad::mul(m, r), one_minus);
    }
    double ratio() const { return rhat_; }

private:
    Mpfr half_eps_;
    Mpfr prev_ = rad::zero();
    bool have_prev_ = false;
    std::deque<double> ratios_;
    double rhat_ = 0;
};

inline TermEvaluator<Ball> ball_evaluator(const Ball& qhat, const PrecisionContext& ctx) {
    mpfr_prec_t b = ctx.bits;
    return TermEvaluator<Ball>(qhat, [b](const Rational& r) { return Ball(r, b); });
}

}  // namespace detail

// sum_{n>=n0} t(n) with k fixed; vanishing factors resolved in the n direction
inline SumResult sum_lhs(const QProperTerm& t, const Ball& qhat, const PrecisionContext& ctx, long k = 0, long n0 = 0) {
    auto ev = detail::ball_evaluator(qhat, ctx);
    detail::TailTracker tail(ctx);
    Ball s = ctx.ball(0);
    for (long n = n0; n < n0 + ctx.max_terms; ++n) {
        Ball v = ev.evaluate(t, n, k, 1, 0);
        s += v;
        if (auto b = tail.push(v)) {
            s.add_error(*b);
            return {s, n - n0 + 1, tail.ratio()};
        }
    }
    fail(ErrorKind::NoDecayDetected, "no geometric decay within " + std::to_string(ctx.max_terms) + " terms");
}

// sum_n sum_i t_i(n), all terms on the same q-root
inline SumResult sum_lhs(const std::vector<QProperTerm>& ts, const Ball& qhat, const PrecisionContext& ctx, long k = 0) {
    if (ts.empty()) fail(ErrorKind::InvalidArgument, "empty term sum");
    for (auto& t : ts)
        if (t.D != ts[0].D) fail(ErrorKind::InvalidArgument, "terms use different q-roots");
    auto ev = detail::ball_evaluator(qhat, ctx);
    detail::TailTracker tail(ctx);
    Ball s = ctx.ball(0);
    for (long n = 0; n < ctx.max_terms; ++n) {
        Ball v = ctx.ball(0);
        for (auto& t : ts) v += ev.evaluate(t, n, k, 1, 0);
        s += v;
        if (auto b = tail.push(v)) {
            s.add_error(*b);
            return {s, n + 1, tail.ratio()};
        }
    }
    fail(ErrorKind::NoDecayDetected, "no geometric decay within " + std::to_string(ctx.max_terms) + " terms");
}

inline SumResult sum_lhs(const QProperTerm& t, const Rational& q, const PrecisionContext& ctx) {
    return sum_lhs(t, qhat_ball(q, t.D, ctx), ctx);
}

enum class SeriesMode { Geometric, Alternating };

// classical sum at q = 1; the alternating mode uses the Leibniz bound and stops at max_terms
inline SumResult sum_classical(const ClassicalTerm& t, const PrecisionContext& ctx, SeriesMode mode = SeriesMode::Geometric) {
    Ball s = ctx.ball(0);
    Ball part = ctx.ball(t.constant);  // constant * rate^n * prod (a)_n^m
    Ball rate = ctx.ball(t.rate);
    detail::TailTracker tail(ctx);
    Mpfr eps = ctx.eps_up();
    for (long n = 0; n < ctx.max_terms; ++n) {
        Ball v = part * ctx.ball(t.poly.eval(Rational(n)));
        s += v;
        if (mode == SeriesMode::Geometric) {
            if (auto b = tail.push(v)) {
                s.add_error(*b);
                return {s, n + 1, tail.ratio()};
            }
        }
        part *= rate;
        for (auto& [a, m] : t.poch) {
            Rational f = a + n;
            if (f == 0 && m < 0) fail(ErrorKind::PoleEncountered, "Pochhammer pole");
            Ball fb = ctx.ball(f);
            part = m > 0 ? part * fb.pow(static_cast<long>(m)) : part / fb.pow(static_cast<long>(-m));
        }
        if (mode == SeriesMode::Alternating && n + 1 == ctx.max_terms) {
            // next term bounds the tail of an alternating series with decreasing terms
            Ball next = part * ctx.ball(t.poly.eval(Rational(n + 1)));
            s.add_error(next.mag());
            return {s, n + 1, -1.0};
        }
        if (mode == SeriesMode::Alternating) {
            Ball next = part * ctx.ball(t.poly.eval(Rational(n + 1)));
            if (rad::le(next.mag(), eps)) {
                s.add_error(next.mag());
                return {s, n + 1, -1.0};
            }
        }
    }
    fail(ErrorKind::NoDecayDetected, "classical series did not converge within " + std::to_string(ctx.max_terms) + " terms");
}

// pi from sum (-1)^n (1/2)_n^5/(1)_n^5 (820n^2+180n+13)/2^(10n) = 128/pi^2
inline ClassicalTerm guillera_pi_series() {
    ClassicalTerm t;
    t.rate = Rational(-1, 1024);
    t.poch = {{Rational(1, 2), 5}, {Rational(1), -5}};
    t.poly = PolyNK(Rational(820)) * PolyNK::var_n() * PolyNK::var_n() + PolyNK(Rational(180)) * PolyNK::var_n() + PolyNK(Rational(13));
    return t;
}

// 16/pi = sum (1/2)_n^3/(1)_n^3 (42n+5)/64^n
inline ClassicalTerm ramanujan_pi_series() {
    ClassicalTerm t;
    t.rate = Rational(1, 64);
    t.poch = {{Rational(1, 2), 3}, {Rational(1), -3}};
    t.poly = PolyNK(Rational(42)) * PolyNK::var_n() + PolyNK(Rational(5));
    return t;
}

inline Ball compute_pi(mpfr_prec_t bits) {
    static std::mutex mu;
    static std::map<mpfr_prec_t, Ball> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
    PrecisionContext c;
    c.bits = bits + 32;
    c.eps = rpow(Rational(2), -static_cast<long>(bits) - 16);
    c.max_terms = 100000;
    Ball s = sum_classical(guillera_pi_series(), c).value;
    Ball pi = (c.ball(128) / s).sqrt();
    cache.emplace(bits, pi);
    return pi;
}

inline Ball compute_pi_ramanujan(mpfr_prec_t bits) {
    PrecisionContext c;
    c.bits = bits + 32;
    c.eps = rpow(Rational(2), -static_cast<long>(bits) - 16);
    c.max_terms = 100000;
    return c.ball(16) / sum_classical(ramanujan_pi_series(), c).value;
}

namespace detail {

inline Ball laurent_ball(const LaurentPoly& p, const Ball& qhat, const PrecisionContext& ctx) {
    Ball acc = ctx.ball(0);
    for (auto& [e, c] : p.terms()) acc += ctx.ball(c) * qhat.pow(static_cast<long>(e[0]));
    return acc;
}

inline Ball ratfun_ball(const RationalFunction& f, const Ball& qhat, const PrecisionContext& ctx) {
    Ball d = laurent_ball(f.den().as<true>(), qhat, ctx);
    if (d.contains_zero()) fail(ErrorKind::PoleEncountered, "closed form constant has a pole");
    return laurent_ball(f.num().as<true>(), qhat, ctx) / d;
}

}  // namespace detail

// q-power q^^e for integer e; fractional q-exponents must be integral in q^ units
inline Ball qunits_pow(const Ball& qhat, const Rational& x, int D, const char* what) {
    return qhat.pow(qhat_units(x, D, what));
}

inline Ball eval_rhs(const ClosedFormRHS& r, const Ball& qhat, const PrecisionContext& ctx) {
    const int D = r.D;
    Ball v = detail::ratfun_ball(r.constant, qhat, ctx);
    for (auto& f : r.factors) {
        Ball a = qunits_pow(qhat, f.arg.c0, D, "argument");
        if (f.arg_sign < 0) a = -a;
        Ball base = qunits_pow(qhat, f.base, D, "base");
        Ball x;
        if (f.infinite) x = qpoch_infinite(a, base, ctx);
        else if (f.order.c0.get_den() == 1 && f.order.c0 >= 0) x = qpoch_finite(a, base, to_long(f.order.c0));
        else {
            Ball den = qpoch_infinite(a * qunits_pow(qhat, f.base * f.order.c0, D, "order"), base, ctx);
            if (den.contains_zero()) fail(ErrorKind::PoleEncountered, "fractional-order factor has a pole");
            x = qpoch_infinite(a, base, ctx) / den;
        }
        if (f.power < 0 && x.contains_zero()) fail(ErrorKind::PoleEncountered, "closed form has a pole");
        v = f.power > 0 ? v * x.pow(static_cast<long>(f.power)) : v / x.pow(static_cast<long>(-f.power));
    }
    for (auto& g : r.gammas) {
        Ball qb = qunits_pow(qhat, g.base, D, "Gamma base");
        Ball x = qgamma(g.x, qb, ctx);
        v = g.power > 0 ? v * x.pow(static_cast<long>(g.power)) : v / x.pow(static_cast<long>(-g.power));
    }
    if (r.pi_power != 0) v *= compute_pi(ctx.bits).pow(static_cast<long>(r.pi_power));
    if (r.sqrt_arg != 1) v *= ctx.ball(r.sqrt_arg).sqrt();
    for (auto& t : r.sums) {
        if (t.D != D) fail(ErrorKind::InvalidArgument, "inner sum uses a different q-root");
        v *= sum_lhs(t, qhat, ctx).value;
    }
    return v;
}

inline Ball eval_rhs(const ClosedFormRHS& r, const Rational& q, const PrecisionContext& ctx) {
    return eval_rhs(r, qhat_ball(q, r.D, ctx), ctx);
}

// classical RHS: rational constant * pi^p * sqrt(s)
inline Ball eval_classical_rhs(const ClosedFormRHS& r, const PrecisionContext& ctx) {
    if (!r.is_classical()) fail(ErrorKind::InvalidArgument, "closed form depends on q");
    Ball v = ctx.ball(r.constant.num().constant_value() / r.constant.den().constant_value());
    if (r.pi_power != 0) v *= compute_pi(ctx.bits).pow(static_cast<long>(r.pi_power));
    if (r.sqrt_arg != 1) v *= ctx.ball(r.sqrt_arg).sqrt();
    return v;
}

}  // namespace qwz
