#include <gtest/gtest.h>

#include <random>

#include "qwz/term/parser.hpp"
#include "qwz/wz/normalizer.hpp"
#include "support/known_terms.hpp"

using namespace qwz;
using namespace qwz::fixtures;

namespace {

const Rational kQ(3, 5);

Rational at(const QProperTerm& t, long n, long k, const Rational& qh = kQ) { return eval_exact_qhat(t, n, k, qh); }

Rational at_dir(const QProperTerm& t, long n) { return eval_exact_qhat(t, n, 0, kQ, 1, 0); }

Rational rf_at(const RationalFunction& f, int D, long n, long k, const Rational& qh = kQ) {
    return f.eval(qh, rpow(qh, D * n), rpow(qh, D * k));
}

struct KnownPair {
    const char* name;
    std::string kernel, F, R;
};

std::vector<KnownPair> known_pairs() {
    return {{"negquart", kKernelNegQuart, kPairNegQuartF, kPairNegQuartR},
            {"guillera", kKernelGuillera, kPairGuilleraF, kPairGuilleraR}};
}

class KnownPairTest : public ::testing::TestWithParam<KnownPair> {};

}  // namespace

TEST(FactorQGeometric, Binomials) {
    auto [p, D] = build_ratfun("3q^2 * (1 - q^(n+1))^2 * (1 + q^(2n+3))", 1);
    (void)D;
    auto f = factor_qgeometric(p.num());
    ASSERT_TRUE(f.has_value());
    EXPECT_EQ(f->qexp, 2);
    EXPECT_EQ(f->c, RationalFunction(3));
    ASSERT_EQ(f->binomials.size(), 2u);
}

TEST(FactorQGeometric, IrreducibleRejected) {
    auto [p, D] = build_ratfun("1 + q^n + q^(2n)", 1);
    (void)D;
    EXPECT_FALSE(factor_qgeometric(p.num()).has_value());
}

TEST_P(KnownPairTest, NormalizedKernelMatchesDisplayedPair) {
    const KnownPair& pp = GetParam();
    QProperTerm kernel = build_term(pp.kernel);
    Normalized nz = ekhad_normalize(kernel);
    ASSERT_TRUE(nz.prefactor.closed_form.has_value());

    QProperTerm Fp = build_term(pp.F);
    Rational ratio = at(nz.Fbar, 1, 0) / at(Fp, 1, 0);
    EXPECT_NE(ratio, 0);
    for (auto [n, k] : std::vector<std::pair<long, long>>{{2, 0}, {2, 1}, {3, 2}, {4, 1}})
        EXPECT_EQ(at(nz.Fbar, n, k) / at(Fp, n, k), ratio) << pp.name << " n=" << n << " k=" << k;

    auto [R, D] = build_ratfun(pp.R, kernel.D);
    EXPECT_EQ(D, kernel.D);
    EXPECT_EQ(nz.certificate, R) << nz.certificate.str();
}

TEST_P(KnownPairTest, DisplayedPairVerifies) {
    const KnownPair& pp = GetParam();
    QProperTerm F = build_term(pp.F);
    auto [R, D] = build_ratfun(pp.R, F.D);
    (void)D;
    QWZPair pair{F, R};
    EXPECT_TRUE(wz_verify_symbolic(pair).ok);
    QWZPair bad{F, R * RationalFunction(Rational(11, 10))};
    EXPECT_THROW(wz_verify_symbolic(bad), Error);

    QWZPair mk = make_wz_pair(F);
    EXPECT_EQ(mk.certificate, R);
}

TEST_P(KnownPairTest, KernelIsNotWZ) {
    QProperTerm kernel = build_term(GetParam().kernel);
    try {
        make_wz_pair(kernel);
        FAIL() << "expected NotWZNormalized";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotWZNormalized);
    }
}

TEST_P(KnownPairTest, NormalizationIdempotent) {
    Normalized nz = ekhad_normalize(build_term(GetParam().kernel));
    Normalized again = ekhad_normalize(nz.Fbar);
    ASSERT_TRUE(again.prefactor.closed_form.has_value());
    EXPECT_TRUE(again.prefactor.is_identity());
    EXPECT_EQ(again.certificate, nz.certificate);
}

TEST_P(KnownPairTest, ClosedFormMatchesProduct) {
    QProperTerm kernel = build_term(GetParam().kernel);
    Normalized nz = ekhad_normalize(kernel);
    const auto& cf = *nz.prefactor.closed_form;
    Rational ratio;
    for (long n = 1; n <= 12; ++n) {
        Rational p = prefactor_product(nz.prefactor.p1, nz.prefactor.p2, kernel.D, n, kQ);
        Rational c = at(cf, n, 0);
        if (n == 1) ratio = c / p;
        EXPECT_EQ(c / p, ratio) << "n=" << n;
    }
}

TEST_P(KnownPairTest, SequenceFallbackAgrees) {
    QProperTerm kernel = build_term(GetParam().kernel);
    Normalized nz = ekhad_normalize(kernel);
    QProperTerm seq = kernel;
    seq.sign_n += 1;
    seq.sequence = RationalFunction(nz.prefactor.p1, nz.prefactor.p2);
    Rational ratio = at(nz.Fbar, 1, 1) / at(seq, 1, 1);
    for (long n = 2; n <= 6; ++n)
        for (long k = 0; k <= 3; ++k) EXPECT_EQ(at(nz.Fbar, n, k) / at(seq, n, k), ratio) << n << "," << k;
}

TEST_P(KnownPairTest, TelescopingExact) {
    QWZPair pair = make_wz_pair(ekhad_normalize(build_term(GetParam().kernel)).Fbar);
    QProperTerm G = pair.G();
    for (long n = 1; n <= 5; ++n)
        for (long k = 0; k <= 4; ++k) {
            Rational lhs = at(pair.F, n + 1, k) - at(pair.F, n, k);
            Rational rhs = at(G, n, k + 1) - at(G, n, k);
            EXPECT_EQ(lhs, rhs) << "n=" << n << " k=" << k;
        }
    std::mt19937_64 rng(20261016);
    std::uniform_int_distribution<int> num(1, 9), den(11, 17);
    for (int trial = 0; trial < 3; ++trial) {
        Rational qh(num(rng), den(rng));
        qh.canonicalize();
        for (long k = 0; k <= 2; ++k)
            for (long m = 1; m <= 12; ++m) {
                Rational s = 0;
                for (long n = 0; n < m; ++n) s += at(G, n, k + 1, qh) - at(G, n, k, qh);
                EXPECT_EQ(s, at(pair.F, m, k, qh) - at(pair.F, 0, k, qh)) << "q^=" << qh << " m=" << m << " k=" << k;
            }
    }
}

TEST_P(KnownPairTest, NumericSpotChecks) {
    QWZPair pair = make_wz_pair(ekhad_normalize(build_term(GetParam().kernel)).Fbar);
    QProperTerm G = pair.G();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(1, 9), den(10, 19), small(0, 8);
    int checked = 0;
    for (int attempt = 0; checked < 20 && attempt < 200; ++attempt) {
        Rational qh(num(rng), den(rng));
        qh.canonicalize();
        long n = small(rng), k = small(rng);
        try {
            Rational lhs = at(pair.F, n + 1, k, qh) - at(pair.F, n, k, qh);
            Rational rhs = at(G, n, k + 1, qh) - at(G, n, k, qh);
            EXPECT_EQ(lhs, rhs) << "q^=" << qh << " n=" << n << " k=" << k;
            ++checked;
        } catch (const Error&) {
        }
    }
    EXPECT_EQ(checked, 20);
}

INSTANTIATE_TEST_SUITE_P(Pairs, KnownPairTest, ::testing::ValuesIn(known_pairs()),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(WZPair, TauDividesGuilleraCertificate) {
    QWZPair pair = make_wz_pair(build_term(kPairGuilleraF));
    auto [tau, D] = build_ratfun(kPairGuilleraTau, 2);
    (void)D;
    EXPECT_TRUE(exact_divide(pair.certificate.num(), tau.num()).has_value());
}

TEST(WZPair, OrderMismatch) {
    QProperTerm t = build_term(kKernelNegQuart);
    Recurrence r = q_zeilberger(t, 1);
    r.order = 2;
    r.p.push_back(MultiPoly(1));
    EXPECT_THROW(ekhad_normalize(t, r), Error);
}

TEST(BuildH, MatchesDirectEvaluation) {
    QWZPair pair = make_wz_pair(ekhad_normalize(build_term(kKernelPosQuart1)).Fbar);
    TermSum H = build_H(pair);
    ASSERT_EQ(H.terms.size(), 2u);
    QProperTerm G = pair.G();
    for (long n = 1; n <= 4; ++n)
        for (long k = 0; k <= 3; ++k) {
            Rational h = at(H.terms[0], n, k) + at(H.terms[1], n, k);
            EXPECT_EQ(h, at(pair.F, n + 1, n + k) + at(G, n, n + k)) << n << "," << k;
        }
}

TEST(BuildH, ColumnProportionalToTheoremSummand) {
    // the theorem's q is the kernel's q^(1/2)
    QWZPair pair = make_wz_pair(ekhad_normalize(build_term(kKernelPosQuart1)).Fbar);
    TermSum H = build_H(pair);
    QProperTerm thm = build_term(kPosQuart1);
    auto h = [&](long n) -> Rational { return at_dir(H.terms[0], n) + at_dir(H.terms[1], n); };
    Rational ratio = h(0) / at_dir(thm, 0);
    EXPECT_EQ(ratio, -10);
    for (long n = 1; n <= 8; ++n) EXPECT_EQ(h(n) / at_dir(thm, n), ratio) << "n=" << n;
}

TEST(BuildH, PosQuart2UsesGColumn) {
    QWZPair pair = make_wz_pair(ekhad_normalize(build_term(kKernelPosQuart2)).Fbar);
    QProperTerm G = pair.G(), thm = build_term(kPosQuart2);
    Rational ratio = at_dir(G, 0) / at_dir(thm, 0);
    EXPECT_EQ(ratio, Rational(800, 9));
    for (long n = 1; n <= 8; ++n) EXPECT_EQ(at_dir(G, n) / at_dir(thm, n), ratio) << "n=" << n;
}
