#include <gtest/gtest.h>

#include <random>

#include "qwz/numeric/limit.hpp"
#include "qwz/term/parser.hpp"
#include "support/known_terms.hpp"

using namespace qwz;
using namespace qwz::fixtures;

namespace {

const char* kBracket = "qpoch(q;2;1/2)^2 / (qpoch(q^2;2;1/2) * qpoch(q^3;2;1/2))";

PrecisionContext ctx_with(mpfr_prec_t bits, long eps_digits) {
    PrecisionContext c;
    c.bits = bits;
    c.eps = pow10_neg(eps_digits);
    return c;
}

// |a - b| <= ra + rb
bool overlaps(const Ball& a, const Ball& b) { return (a - b).contains_zero(); }

bool within(const Ball& a, const Ball& b, const Rational& tol) { return rad::le((a - b).mag(), rad::from(tol)); }

Ball golden(const char* digits, mpfr_prec_t bits = 256) {
    Mpfr m(bits);
    mpfr_set_str(m.get(), digits, 10, MPFR_RNDN);
    Mpfr r = rad::from(pow10_neg(58));
    return Ball(std::move(m), std::move(r));
}

}  // namespace

TEST(QPochFinite, Examples) {
    PrecisionContext c;
    EXPECT_TRUE(overlaps(qpoch_finite(c.ball(Rational(1, 3)), c.ball(Rational(1, 2)), 0), c.ball(1)));
    Ball v = qpoch_finite(c.ball(Rational(1, 2)), c.ball(Rational(1, 2)), 2);
    EXPECT_TRUE(overlaps(v, c.ball(Rational(3, 8))));
    Rational q(1, 3);
    Rational exact = eval_exact(build_term("qpoch(q;2;n)"), 3, 0, q);
    EXPECT_EQ(exact, Rational(2, 3) * Rational(26, 27) * Rational(242, 243));
    Ball w = qpoch_finite(c.ball(q), c.ball(q * q), 3);
    EXPECT_TRUE(overlaps(w, c.ball(exact)));
    EXPECT_TRUE(rad::le(w.rad(), rad::from(pow10_neg(50))));
}

TEST(QPochInfinite, Examples) {
    PrecisionContext c;
    EXPECT_TRUE(overlaps(qpoch_infinite(c.ball(0), c.ball(Rational(1, 2)), c), c.ball(1)));
    Ball v = qpoch_infinite(c.ball(Rational(1, 2)), c.ball(Rational(1, 2)), c);
    EXPECT_TRUE(within(v, golden("0.288788095086602421278899721929230780088911904840685784114741"), pow10_neg(30)));
    EXPECT_TRUE(overlaps(v, golden("0.288788095086602421278899721929230780088911904840685784114741")));
}

TEST(QPochInfinite, GuoLiuBracketMatchesSeries) {
    PrecisionContext c;
    Rational q(1, 2);
    ClosedFormRHS rhs = build_rhs("qpochinf(q^3;4) * qpochinf(q^5;4) / qpochinf(q^4;4)^2");
    Ball r = eval_rhs(rhs, q, c);
    EXPECT_TRUE(within(r, golden("0.96242057279208155123536845241622114929800725245835185382459"), pow10_neg(30)));
    QProperTerm lhs = build_term("sign(1,0) * qpow(3n^2) * bracket(6n+1) * qpoch(q;2;n)^3 / qpoch(q^4;4;n)^3");
    SumResult s = sum_lhs(lhs, q, c);
    EXPECT_TRUE(within(s.value, r, pow10_neg(28)));
}

TEST(QPochInfinite, RejectsQNearOne) {
    PrecisionContext c;
    try {
        qpoch_infinite(c.ball(Rational(1, 2)), c.ball(Rational(99, 100)), c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::QTooCloseToOne);
    }
}

TEST(QPochFractional, Examples) {
    PrecisionContext c;
    Ball a = c.ball(Rational(1, 3)), q = c.ball(Rational(2, 5));
    EXPECT_TRUE(overlaps(qpoch_fractional(a, q, 0, c), c.ball(1)));
    EXPECT_TRUE(overlaps(qpoch_fractional(a, q, 4, c), qpoch_finite(a, q, 4)));
    Ball b = eval_rhs(build_rhs(kBracket), Rational(1, 2), ctx_with(192, 35));
    EXPECT_GT(b.to_double(), 0);
    EXPECT_TRUE(within(b, golden("0.494751160656093073351493840980355405872629850137906032165147"), pow10_neg(30)));
}

TEST(QGamma, Examples) {
    PrecisionContext c;
    Ball q = c.ball(Rational(3, 5));
    EXPECT_TRUE(within(qgamma(1, q, c), c.ball(1), pow10_neg(28)));
    EXPECT_TRUE(within(qgamma(2, q, c), c.ball(1), pow10_neg(28)));
    EXPECT_THROW(qgamma(0, q, c), Error);

    PrecisionContext near = ctx_with(128, 20);
    near.q_max = 1.0;
    Ball qq = near.ball(Rational(1) - pow10_neg(4));
    Ball g = qgamma(Rational(1, 2), qq * qq, near);
    Ball rootpi = compute_pi(128).sqrt();
    EXPECT_TRUE(within(g, rootpi, pow10_neg(3)));
}

TEST(Pi, SelfConsistency) {
    Ball a = compute_pi(192), b = compute_pi_ramanujan(192);
    EXPECT_TRUE(within(a, b, pow10_neg(20)));
    EXPECT_TRUE(overlaps(a, b));
    Mpfr ref(256);
    mpfr_const_pi(ref.get(), MPFR_RNDN);
    EXPECT_TRUE(overlaps(a, Ball(std::move(ref), rad::from(pow10_neg(70)))));
}

TEST(SumLhs, NegQuartAtHalf) {
    PrecisionContext c = ctx_with(192, 33);
    Rational q(1, 2);
    SumResult s = sum_lhs(build_term(kNegQuart), q, c);
    Ball r = eval_rhs(build_rhs(std::string("const((q-1)*(q+1)^3; q^3) * ") + kBracket), q, c);
    EXPECT_TRUE(within(s.value, r, pow10_neg(30)));
    EXPECT_LE(s.terms, 300);
}

TEST(SumLhs, ZeroSummand) {
    PrecisionContext c;
    QProperTerm z;
    z.constant = RationalFunction(0);
    SumResult s = sum_lhs(z, c.ball(Rational(1, 2)), c);
    EXPECT_TRUE(s.value.is_exact_zero());
}

TEST(SumLhs, NoDecay) {
    PrecisionContext c;
    c.max_terms = 50;
    try {
        sum_lhs(build_term("const(1)"), Rational(1, 2), c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoDecayDetected);
    }
}

TEST(SumClassical, FirstGuillera) {
    PrecisionContext c = ctx_with(192, 22);
    SumResult s = sum_classical(build_classical("rate(-1/1024) * poch(1/2)^5 / poch(1)^5 * poly(820n^2 + 180n + 13)"), c);
    Ball target = eval_classical_rhs(build_rhs("const(128) * pi^-2"), c);
    EXPECT_TRUE(within(s.value, target, pow10_neg(20)));
    EXPECT_LE(s.terms, 15);
}

TEST(SumClassical, AlternatingSlowSeries) {
    PrecisionContext c = ctx_with(128, 20);
    c.max_terms = 4000;
    SumResult s = sum_classical(build_classical("rate(-1) * poch(1/2)^3 / poch(1)^3 * poly(4n+1)"), c, SeriesMode::Alternating);
    Ball target = eval_classical_rhs(build_rhs("const(2) * pi^-1"), c);
    EXPECT_TRUE(overlaps(s.value, target));
    EXPECT_TRUE(within(s.value, target, pow10_neg(1)));
}

TEST(NumericProperty, FiniteVsFractional) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> an(-9, 9), qn(1, 8), m(0, 12);
    PrecisionContext c;
    for (int i = 0; i < 50; ++i) {
        Ball a = c.ball(Rational(an(rng), 10)), q = c.ball(Rational(qn(rng), 10));
        long mm = m(rng);
        EXPECT_TRUE(overlaps(qpoch_finite(a, q, mm), qpoch_fractional(a, q, mm, c))) << i;
    }
}

TEST(NumericProperty, Splicing) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> an(-9, 9), qn(1, 9), m(0, 10);
    PrecisionContext c;
    for (int i = 0; i < 50; ++i) {
        Ball a = c.ball(Rational(an(rng), 10)), q = c.ball(Rational(qn(rng), 10));
        long mm = m(rng);
        Ball whole = qpoch_infinite(a, q, c);
        Ball spliced = qpoch_finite(a, q, mm) * qpoch_infinite(a * q.pow(mm), q, c);
        EXPECT_TRUE(overlaps(whole, spliced)) << i;
    }
}

TEST(NumericProperty, ErrorBoundHonesty) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> qn(1, 9);
    QProperTerm lhs = build_term(kGuilleraFirst);
    ClosedFormRHS rhs = build_rhs(std::string("const((q-1)^2*(q+1)^4) * qpoch(q;2;1/2)^3 / (qpoch(q^2;2;1/2)^2 * qpoch(q^3;2;1/2))"));
    for (int i = 0; i < 10; ++i) {
        Rational q(qn(rng), 10);
        PrecisionContext lo = ctx_with(128, 30), hi = ctx_with(256, 60);
        Ball a = qpoch_infinite(lo.ball(q), lo.ball(q * q), lo), b = qpoch_infinite(hi.ball(q), hi.ball(q * q), hi);
        EXPECT_TRUE(rad::le(abs_diff_mid(a, b), a.rad())) << q;
        Ball g1 = qgamma(Rational(1, 3), lo.ball(q), lo), g2 = qgamma(Rational(1, 3), hi.ball(q), hi);
        EXPECT_TRUE(rad::le(abs_diff_mid(g1, g2), g1.rad())) << q;
        Ball s1 = sum_lhs(lhs, q, lo).value, s2 = sum_lhs(lhs, q, hi).value;
        EXPECT_TRUE(rad::le(abs_diff_mid(s1, s2), s1.rad())) << q;
        Ball r1 = eval_rhs(rhs, q, lo), r2 = eval_rhs(rhs, q, hi);
        EXPECT_TRUE(rad::le(abs_diff_mid(r1, r2), r1.rad())) << q;
    }
}

TEST(PrecisionContextTest, Validation) {
    EXPECT_THROW(PrecisionContext(64, pow10_neg(30)), Error);
    EXPECT_NO_THROW(PrecisionContext(192, pow10_neg(30)));
}

struct LimitCase {
    const char* name;
    std::string lhs, rhs, scale, classical, target;
    int power;
};

class LimitCheck : public ::testing::TestWithParam<LimitCase> {};

TEST_P(LimitCheck, TermwiseAndTrend) {
    const LimitCase& lc = GetParam();
    LimitSpec spec;
    spec.scale = build_ratfun(lc.scale, 1).first;
    spec.scale_power = lc.power;
    spec.classical = build_classical(lc.classical);
    spec.target = build_rhs(lc.target);
    QProperTerm t = build_term(lc.lhs);
    LimitReport rep = limit_termwise(t, spec, 20);
    EXPECT_EQ(rep.checked, 21);
    limit_rhs_trend(build_rhs(lc.rhs), spec, rep);
    ASSERT_EQ(rep.rhs_errors.size(), 3u);
    EXPECT_LT(rep.rhs_errors.back().second, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(
    Known, LimitCheck,
    ::testing::Values(LimitCase{"motivating", kPosQuart1, std::string("const((1-q)^2*(1+q); q) * ") + kBracket, "1",
                                "const(1/2) * rate(1/4) * poch(1/2)^3 / poch(1)^3 * poly(6n+1)", "const(2) * pi^-1", 2},
                      LimitCase{"q64", kQ64, std::string("const((q-1)^2*(q+1)^2; q^6) * ") + kBracket, "q*(q+1)^2",
                                "rate(1/64) * poch(1/2)^3 / poch(1)^3 * poly(42n+5)", "const(16) * pi^-1", 2},
                      LimitCase{"guillera_first", kGuilleraFirst,
                                "const((q-1)^2*(q+1)^4) * qpoch(q;2;1/2)^3 / (qpoch(q^2;2;1/2)^2 * qpoch(q^3;2;1/2))",
                                "(1+q)^2; 4q^2",
                                "rate(1/16) * poch(1/4) * poch(1/2)^3 * poch(3/4) / poch(1)^5 * poly(120n^2+34n+3)",
                                "const(32) * pi^-2", 2}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(LimitCheckErrors, Mismatch) {
    LimitSpec spec;
    spec.scale_power = 2;
    spec.classical = build_classical("rate(1/4) * poch(1/2)^3 / poch(1)^3 * poly(6n+1)");
    try {
        limit_termwise(build_term(kPosQuart1), spec, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TermwiseMismatch);
    }
}
