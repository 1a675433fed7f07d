#include <gtest/gtest.h>

#include <random>

#include "qwz/term/evaluate.hpp"
#include "qwz/term/parser.hpp"
#include "support/known_terms.hpp"

using namespace qwz;
using fixtures::known_terms;

namespace {

LaurentPoly lmono(long c, int e0, int a, int b) { return LaurentPoly::monomial(Rational(c), {e0, a, b}); }

Rational random_qhat(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(1, 9), den(2, 11), sgn(0, 3);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    if (r == 1) r = Rational(2, 3);
    return sgn(rng) == 0 ? Rational(-r) : r;
}

QProperTerm poch_term(int sign, long u, long d, long order) {
    QProperTerm t;
    QPochFactor f;
    f.arg_sign = sign;
    f.arg.c0 = u;
    f.base = d;
    f.order.c0 = order;
    t.factors.push_back(f);
    return t;
}

}  // namespace

TEST(BuildTerm, QuadraticPowerAndPochhammers) {
    QProperTerm t = build_term("qpow(n^2) * qpoch(q;2;n) / qpoch(q^4;4;n)");
    EXPECT_EQ(t.D, 1);
    EXPECT_EQ(t.qpow.nn, 1);
    ASSERT_EQ(t.factors.size(), 2u);
    EXPECT_EQ(t.factors[0].power, 1);
    EXPECT_EQ(t.factors[1].power, -1);
    EXPECT_EQ(t.factors[1].base, 4);
}

TEST(BuildTerm, KernelHasHalfIntegerDenominator) {
    QProperTerm t = build_term(fixtures::kKernelNegQuart);
    EXPECT_EQ(t.D, 2);
    EXPECT_TRUE(t.depends_on_k());
}

TEST(BuildTerm, FractionalOrderInKIsNotProper) {
    try {
        build_term("qpoch(q^n;1;k/3)");
        FAIL() << "expected NotQProper";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotQProper);
    }
}

TEST(BuildTerm, HalfOrderForbiddenInSummand) {
    try {
        build_term("qpoch(q;2;1/2)");
        FAIL() << "expected NotQProper";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotQProper);
    }
}

TEST(BuildTerm, MalformedInputIsParseError) {
    EXPECT_THROW(build_term("qpoch(q;2;n"), ParseError);
    EXPECT_THROW(build_term("qpow(n^2) * frob(3)"), ParseError);
    EXPECT_THROW(build_term(""), ParseError);
    EXPECT_THROW(build_term("ratfun(1; 1 + q) $"), ParseError);
}

TEST(BuildTerm, AllKnownTermsParse) {
    for (auto& [name, src] : known_terms()) EXPECT_NO_THROW(build_term(src)) << name;
}

TEST(ShiftQuotient, QuadraticPower) {
    QProperTerm t = build_term("qpow(n^2)");
    EXPECT_EQ(shift_quotient(t, Direction::n), RationalFunction::monomial(1, {1, 2, 0}));
}

TEST(ShiftQuotient, PochhammerInK) {
    QProperTerm t = build_term("qpoch(q;1;k)");
    EXPECT_EQ(shift_quotient(t, Direction::k), RationalFunction::from_laurent(LaurentPoly(1) - lmono(1, 1, 0, 1)));
}

TEST(ShiftQuotient, NegQuartKernelInK) {
    QProperTerm t = build_term(fixtures::kKernelNegQuart);
    LaurentPoly a = LaurentPoly(1) - lmono(1, 1, 0, 1);
    LaurentPoly num = lmono(1, 2, 0, 0) * a * a;
    LaurentPoly den = (LaurentPoly(1) - lmono(1, 3, -2, 1)) * (LaurentPoly(1) - lmono(1, 2, 1, 1));
    RationalFunction expected = RationalFunction::from_laurent(num, den);
    EXPECT_EQ(shift_quotient(t, Direction::k), expected);

    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> small(0, 4);
    int checked = 0;
    while (checked < 20) {
        Rational qh = random_qhat(rng);
        long n = small(rng), k = small(rng);
        Rational a0, a1;
        try {
            a0 = eval_exact_qhat(t, n, k, qh);
            a1 = eval_exact_qhat(t, n, k + 1, qh);
        } catch (const Error&) {
            continue;
        }
        if (a0 == 0) continue;
        Rational N = rpow(qh, 2 * n), K = rpow(qh, 2 * k);
        EXPECT_EQ(a1 / a0, expected.eval(qh, N, K));
        ++checked;
    }
}

TEST(EvalExact, EmptyQuadraticAtOrigin) {
    QProperTerm t = build_term("const(3) * ratfun(1 + N + K; (2 - q) * (1 + q))");
    EXPECT_EQ(eval_exact(t, 0, 0, Rational(1, 2)), 4);
}

TEST(EvalExact, NegQuartAtZero) {
    QProperTerm t = build_term(fixtures::kNegQuart);
    for (Rational q : {Rational(1, 2), Rational(2, 3), Rational(-3, 7)}) EXPECT_EQ(eval_exact(t, 0, 0, q), 1 - 1 / (q * q * q));
}

TEST(EvalExact, FinitePochhammer) {
    EXPECT_EQ(eval_exact(build_term("qpoch(q;1;2)"), 0, 0, Rational(1, 2)), Rational(3, 8));
}

TEST(EvalExact, HalfPowerNeedsExactRoot) {
    QProperTerm t = build_term(fixtures::kKernelNegQuart);
    EXPECT_NO_THROW(eval_exact(t, 1, 1, Rational(1, 4)));
    try {
        eval_exact(t, 1, 1, Rational(1, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoExactRoot);
    }
}

TEST(EvalExact, PoleIsReported) {
    QProperTerm t = build_term("1 / qpoch(q^-2;1;n)");
    try {
        eval_exact(t, 3, 0, Rational(1, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleEncountered);
    }
}

TEST(QOneLimit, HalfPochhammer) {
    EXPECT_EQ(term_q1_limit(build_term("qpoch(q^(1/2);1;2)"), 2, 0, 0), Rational(3, 4));
}

TEST(QOneLimit, Bracket) { EXPECT_EQ(term_q1_limit(build_term("bracket(6n+1)"), 0, 1, 0), 7); }

TEST(QOneLimit, PosQuart1AtZero) {
    EXPECT_EQ(term_q1_limit(build_term(fixtures::kPosQuart1), 2, 0, 0), Rational(1, 2));
}

TEST(QOneLimit, DivergentWhenUnderscaled) {
    try {
        term_q1_limit(build_term("qpoch(q;1;1)"), 2, 0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DivergentLimit);
    }
}

TEST(QOneLimit, NegQuartMatchesRamanujanSeries) {
    QProperTerm t = build_term(fixtures::kNegQuart);
    ClassicalTerm c = build_classical("rate(-1/4) * poch(1/4) * poch(1/2) * poch(3/4) / poch(1)^3 * poly(20n+3)");
    Rational ratio = term_q1_limit(t, 1, 0, 0) / c.eval(0);
    for (long n = 0; n <= 20; ++n) EXPECT_EQ(term_q1_limit(t, 1, n, 0), ratio * c.eval(n)) << n;
    EXPECT_EQ(ratio, -1);
}

TEST(TermProperty, PochhammerSplicing) {
    std::mt19937_64 rng(20240612);
    std::uniform_int_distribution<int> u(-3, 3), d(1, 3), m(0, 6), s(0, 1);
    for (int trial = 0; trial < 25; ++trial) {
        int sign = s(rng) ? 1 : -1;
        long uu = u(rng), dd = d(rng), mm = m(rng), nn = m(rng);
        QProperTerm whole = poch_term(sign, uu, dd, mm + nn);
        QProperTerm split = poch_term(sign, uu, dd, mm) * poch_term(sign, uu + dd * mm, dd, nn);
        for (int i = 0; i < 20; ++i) {
            Rational q = random_qhat(rng);
            EXPECT_EQ(eval_exact(whole, 0, 0, q), eval_exact(split, 0, 0, q));
        }
    }
}

TEST(TermProperty, ShiftQuotientConsistency) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> small(0, 5);
    for (auto& [name, src] : known_terms()) {
        QProperTerm t = build_term(src);
        RationalFunction qn = shift_quotient(t, Direction::n), qk = shift_quotient(t, Direction::k);
        int checked = 0, attempts = 0;
        while (checked < 20 && attempts++ < 400) {
            Rational qh = random_qhat(rng);
            long n = small(rng), k = t.depends_on_k() ? small(rng) : 0;
            Rational N = rpow(qh, t.D * n), K = rpow(qh, t.D * k);
            try {
                Rational v = eval_exact_qhat(t, n, k, qh);
                if (v == 0) continue;
                EXPECT_EQ(eval_exact_qhat(t, n + 1, k, qh) / v, qn.eval(qh, N, K)) << name;
                EXPECT_EQ(eval_exact_qhat(t, n, k + 1, qh) / v, qk.eval(qh, N, K)) << name;
            } catch (const Error&) {
                continue;
            }
            ++checked;
        }
        EXPECT_EQ(checked, 20) << name;
    }
}

TEST(TermProperty, IndexSubstitutionMatchesEvaluation) {
    QProperTerm t = build_term(fixtures::kKernelGuillera);
    IndexMap diag{1, 0, 1, 1, 1, 0};  // (n, k) -> (n+1, n+k)
    QProperTerm s = substitute(t, diag);
    for (long n = 0; n < 4; ++n)
        for (long k = 0; k < 4; ++k)
            EXPECT_EQ(eval_exact_qhat(s, n, k, Rational(2, 5)), eval_exact_qhat(t, n + 1, n + k, Rational(2, 5)));
}
