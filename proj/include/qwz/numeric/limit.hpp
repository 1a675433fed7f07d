#pragma once

#include <string>
#include <vector>

#include "qwz/numeric/series.hpp"

namespace qwz {

// scale(q) * t(n;q) / (1-q)^scale_power -> classical summand(n) as q -> 1
struct LimitSpec {
    RationalFunction scale = RationalFunction(1);  // in q
    int scale_power = 0;
    ClassicalTerm classical;
    ClosedFormRHS target;  // classical constant, e.g. 8 pi^-1
};

struct LimitReport {
    bool termwise_ok = true;
    long checked = 0;
    std::vector<std::pair<int, double>> rhs_errors;  // (d, |scaled RHS(1 - 10^-d) - target|)
    bool rhs_trend_ok = true;
    std::string text;
};

inline QProperTerm scaled_summand(const QProperTerm& t, const LimitSpec& spec) {
    QProperTerm s = t;
    s.constant *= rescale_qhat(spec.scale, t.D);
    return s;
}

// exact termwise comparison for n = 0..n_max
inline LimitReport limit_termwise(const QProperTerm& t, const LimitSpec& spec, long n_max) {
    LimitReport rep;
    QProperTerm s = scaled_summand(t, spec);
    for (long n = 0; n <= n_max; ++n) {
        Rational a = term_q1_limit(s, spec.scale_power, n, 0);
        Rational b = spec.classical.eval(n);
        if (a != b)
            fail(ErrorKind::TermwiseMismatch, "n = " + std::to_string(n) + ": q-limit " + a.get_str() + " vs classical " + b.get_str());
        ++rep.checked;
    }
    rep.text = "termwise limits agree for n = 0.." + std::to_string(n_max);
    return rep;
}

// scaled RHS at q = 1 - 10^-d, d = 3, 4, 5
inline void limit_rhs_trend(const ClosedFormRHS& rhs, const LimitSpec& spec, LimitReport& rep, const std::vector<int>& ds = {3, 4, 5}) {
    PrecisionContext ctx;
    ctx.bits = 128;
    ctx.eps = pow10_neg(20);
    ctx.q_max = 1.0;
    Ball target = eval_classical_rhs(spec.target, ctx);
    double prev = HUGE_VAL;
    for (int d : ds) {
        Rational q = Rational(1) - pow10_neg(d);
        Ball qh = qhat_ball(q, rhs.D, ctx);
        Ball v = eval_rhs(rhs, qh, ctx);
        Ball sc = detail::ratfun_ball(rescale_qhat(spec.scale, rhs.D), qh, ctx);
        Ball scaled = v * sc / (ctx.ball(1) - qh.pow(static_cast<long>(rhs.D))).pow(static_cast<long>(spec.scale_power));
        double err = std::fabs((scaled - target).to_double());
        rep.rhs_errors.push_back({d, err});
        if (!(err < prev)) rep.rhs_trend_ok = false;
        prev = err;
    }
    if (!rep.rhs_trend_ok) fail(ErrorKind::RHSDivergence, "scaled right-hand side does not approach the target");
}

}  // namespace qwz
