#include <gtest/gtest.h>

#include "qwz/catalog/commands.hpp"
#include "support/known_terms.hpp"

using namespace qwz;

namespace {

const std::string kDir = QWZ_DATA_DIR;
const std::string kCatalog = kDir + "/catalog.qwz";

const std::vector<Identity>& catalog() {
    static const std::vector<Identity> cat = catalog_load(kCatalog);
    return cat;
}

const std::vector<std::string> kTheorems = {"qnegquart", "q64", "qguillera-16", "qguillera-1024", "qposquart1", "qposquart2"};

const std::vector<std::string> kSurvey = {"guo-liu-1",       "guo-liu-2",       "guo-zudilin-simplest", "guo-zudilin-neg-quarter",
                                          "guo-zudilin-ninth", "guillera-neg512", "guillera-neg48",       "guo-2020",
                                          "chu-gamma",       "chen-chu",        "guo-2018-central"};

VerifyOptions defaults() { return VerifyOptions{}; }

std::vector<std::string> q_identity_ids() {
    std::vector<std::string> out;
    for (auto& id : catalog())
        if (id.kind == IdentityKind::QIdentity) out.push_back(id.id);
    return out;
}

}  // namespace

TEST(CatalogLoad, BundledCatalogSize) {
    auto& cat = catalog();
    EXPECT_GE(cat.size(), 25u);
    long classical = 0;
    for (auto& id : cat) classical += id.kind == IdentityKind::Classical;
    EXPECT_GE(classical, 7);
    for (auto& t : kTheorems) EXPECT_NO_THROW(find_identity(cat, t)) << t;
    for (auto& t : kSurvey) EXPECT_NO_THROW(find_identity(cat, t)) << t;
    EXPECT_NO_THROW(find_identity(cat, "motivating"));
    EXPECT_EQ(kSurvey.size(), 11u);
}

TEST(CatalogLoad, EmptyFile) {
    EXPECT_TRUE(catalog_parse("").empty());
    EXPECT_TRUE(catalog_parse("# only a comment\n\n").empty());
}

TEST(CatalogLoad, UnbalancedBracketIsParseError) {
    std::string text =
        "[bad]\n"
        "kind = q-identity\n"
        "lhs = qpow(n^2 * qpoch(q;1;n)\n"
        "rhs = 1\n"
        "validity = 0 < |q| < 1\n";
    try {
        catalog_parse(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(CatalogLoad, DuplicateId) {
    std::string rec = "[a]\nkind = classical\nlhs = rate(1/4) * poly(1)\nrhs = 4/3\n\n";
    try {
        catalog_parse(rec + rec);
        FAIL() << "expected DuplicateId";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DuplicateId);
    }
}

TEST(CatalogLoad, FieldErrors) {
    EXPECT_THROW(catalog_parse("[a]\nkind = q-identity\nbogus = 1\n"), ParseError);
    EXPECT_THROW(catalog_parse("kind = classical\n"), ParseError);
    EXPECT_THROW(catalog_parse("[a]\nkind = classical\nlhs = rate(1/2)\n"), ParseError);  // no rhs
    EXPECT_THROW(catalog_parse("[a]\nkind = q-identity\nlhs = qpow(n^2)\nrhs = 1\nvalidity = 0 < q < 1\nprobes = -1/2\n"),
                 ParseError);
    EXPECT_THROW(catalog_parse("[a]\nkind = q-identity\nlhs = qpow(n^2)\nrhs = 1\nvalidity = q < 2\n"), ParseError);
}

TEST(CatalogLoad, ContinuationLines) {
    auto cat = catalog_parse("[a]\nkind = classical\nlhs = rate(1/4) *\n    poly(2n+1)\nrhs = 3\n");
    ASSERT_EQ(cat.size(), 1u);
    EXPECT_EQ(cat[0].classical.poly.coeff(1, 0), 2);
    EXPECT_EQ(cat[0].classical.rate, Rational(1, 4));
}

TEST(CatalogLoad, RoundTrip) {
    auto& cat = catalog();
    std::string text = serialize(cat);
    auto again = catalog_parse(text);
    ASSERT_EQ(again.size(), cat.size());
    for (std::size_t i = 0; i < cat.size(); ++i) EXPECT_TRUE(again[i] == cat[i]) << cat[i].id;
    EXPECT_EQ(serialize(again), text);
}

TEST(CatalogLoad, TheoremSummandsMatchFixtures) {
    auto& cat = catalog();
    EXPECT_EQ(find_identity(cat, "qnegquart").lhs, build_term(fixtures::kNegQuart));
    EXPECT_EQ(find_identity(cat, "q64").lhs, build_term(fixtures::kQ64));
    EXPECT_EQ(find_identity(cat, "qguillera-16").lhs, build_term(fixtures::kGuilleraFirst));
    EXPECT_EQ(find_identity(cat, "qposquart1").lhs, build_term(fixtures::kPosQuart1));
    EXPECT_EQ(find_identity(cat, "motivating").lhs, build_term(fixtures::kPosQuart1));
    EXPECT_EQ(find_identity(cat, "qposquart2").lhs, build_term(fixtures::kPosQuart2));
}

TEST(CatalogLoad, NumberLiterals) {
    EXPECT_EQ(parse_number_literal("0.6"), Rational(3, 5));
    EXPECT_EQ(parse_number_literal("-0.25"), Rational(-1, 4));
    EXPECT_EQ(parse_number_literal("7/10"), Rational(7, 10));
    EXPECT_EQ(parse_number_literal("10^-30"), pow10_neg(30));
    EXPECT_EQ(parse_number_literal("1e-25"), pow10_neg(25));
    EXPECT_EQ(parse_number_literal("2.5e2"), Rational(250));
    EXPECT_THROW(parse_number_literal("abc"), Error);
}

TEST(CatalogLoad, DefaultProbes) {
    auto cat = catalog_parse(
        "[a]\nkind = q-identity\nlhs = qpow(n^2)\nrhs = 1\nvalidity = 0 < |q| < 1\n\n"
        "[b]\nkind = q-identity\nlhs = qpow(n^2)\nrhs = 1\nvalidity = 0 < q < 1\n");
    EXPECT_EQ(default_probes(cat[0]), (std::vector<Rational>{Rational(1, 3), Rational(1, 2), Rational(7, 10), Rational(-1, 2)}));
    EXPECT_EQ(default_probes(cat[1]), (std::vector<Rational>{Rational(1, 3), Rational(1, 2), Rational(7, 10)}));
}

// every q-identity at its probe values (at least two distinct q)
class CatalogVerify : public ::testing::TestWithParam<std::string> {};

TEST_P(CatalogVerify, PassesAtProbes) {
    const Identity& id = find_identity(catalog(), GetParam());
    auto qs = default_probes(id);
    ASSERT_GE(qs.size(), 2u);
    VerificationReport r = cmd_verify(id, qs, defaults());
    EXPECT_TRUE(r.pass) << r.text;
    for (auto& p : r.points) EXPECT_LE(p.terms, 1000) << p.q.get_str();
}

INSTANTIATE_TEST_SUITE_P(All, CatalogVerify, ::testing::ValuesIn(q_identity_ids()), [](const auto& info) {
    std::string s = info.param;
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
});

TEST(CatalogVerify, TheoremsWithinBudget) {
    for (auto& name : kTheorems) {
        VerificationReport r = cmd_verify(find_identity(catalog(), name), {Rational(1, 3), Rational(1, 2), Rational(7, 10)}, defaults());
        EXPECT_TRUE(r.pass) << r.text;
        for (auto& p : r.points) {
            EXPECT_LE(p.terms, 300);
            EXPECT_LT(p.seconds, 10.0);
        }
    }
}

TEST(CatalogVerify, ClassicalGuillera) {
    VerificationReport r = cmd_verify(find_identity(catalog(), "guillera-1024"), {}, defaults());
    EXPECT_TRUE(r.pass) << r.text;
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_LE(r.points[0].terms, 30);
}

TEST(CatalogVerify, AllClassicalPass) {
    for (auto& id : catalog())
        if (id.kind == IdentityKind::Classical) {
            VerificationReport r = cmd_verify(id, {}, defaults());
            EXPECT_TRUE(r.pass) << r.text;
        }
}

TEST(CatalogVerify, WrongRhsFails) {
    Identity id = find_identity(catalog(), "qnegquart");
    id.rhs.constant *= RationalFunction(Rational(1) + pow10_neg(28));
    VerificationReport r = cmd_verify(id, {Rational(1, 2)}, defaults());
    EXPECT_FALSE(r.pass);
}

TEST(CatalogVerify, Errors) {
    auto& cat = catalog();
    try {
        cmd_verify(find_identity(cat, "qnegquart"), {Rational(2)}, defaults());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::QOutsideValidity);
    }
    try {
        cmd_verify(find_identity(cat, "chu-gamma"), {Rational(-1, 2)}, defaults());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::QOutsideValidity);
    }
    try {
        find_identity(cat, "no-such-identity");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownId);
    }
}

class CatalogTheorem : public ::testing::TestWithParam<std::string> {};

TEST_P(CatalogTheorem, Certifies) {
    CertifyReport r = cmd_certify(find_identity(catalog(), GetParam()), kDir);
    EXPECT_TRUE(r.pass) << r.text;
    EXPECT_TRUE(r.residual.is_zero());
    ASSERT_TRUE(r.column.has_value());
    EXPECT_NE(r.column->ratio, 0);
}

TEST_P(CatalogTheorem, LimitChecks) {
    LimitReport r = cmd_limit(find_identity(catalog(), GetParam()), 20);
    EXPECT_EQ(r.checked, 21);
    EXPECT_TRUE(r.rhs_trend_ok) << r.text;
    ASSERT_EQ(r.rhs_errors.size(), 3u);
    EXPECT_LT(r.rhs_errors.back().second, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Six, CatalogTheorem, ::testing::ValuesIn(kTheorems), [](const auto& info) {
    std::string s = info.param;
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
});

TEST(CatalogCertify, StoredPairsMatchKernels) {
    for (auto name : {"qnegquart", "qguillera-16"}) {
        CertifyReport r = cmd_certify(find_identity(catalog(), name), kDir);
        EXPECT_TRUE(r.stored_pair);
        ASSERT_TRUE(r.matches_kernel.has_value());
        EXPECT_TRUE(*r.matches_kernel) << name;
    }
}

TEST(CatalogCertify, StoredCertificateIsPrintedR) {
    CertifyReport r = cmd_certify(find_identity(catalog(), "qnegquart"), kDir);
    EXPECT_EQ(r.pair.certificate, build_ratfun(fixtures::kPairNegQuartR, 2).first);
}

TEST(CatalogCertify, GuilleraCertificateCarriesTau) {
    CertifyReport r = cmd_certify(find_identity(catalog(), "qguillera-16"), kDir);
    MultiPoly tau = build_ratfun(fixtures::kPairGuilleraTau, 2).first.num();
    EXPECT_TRUE(exact_divide(r.pair.certificate.num(), tau).has_value());
}

TEST(CatalogCertify, ColumnRatios) {
    // the kernel's q^ plays the theorem's q; values at q = 3/5
    std::map<std::string, Rational> expect = {{"qnegquart", 4}, {"qposquart1", -10}, {"qposquart2", Rational(800, 9)}};
    for (auto& [name, v] : expect) {
        CertifyReport r = cmd_certify(find_identity(catalog(), name), kDir);
        ASSERT_TRUE(r.column.has_value());
        EXPECT_EQ(r.column->ratio, v) << name;
    }
}

TEST(CatalogCertify, Errors) {
    try {
        cmd_certify(find_identity(catalog(), "guo-zudilin-neg-quarter"), kDir);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoPairAttached);
    }
    Identity id = find_identity(catalog(), "qnegquart");
    id.wz_R = *id.wz_R + RationalFunction(1);
    try {
        cmd_certify(id, kDir);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::VerificationFailed);
    }
}

TEST(CatalogLimit, Targets) {
    auto& cat = catalog();
    LimitReport a = cmd_limit(find_identity(cat, "motivating"), 20);
    EXPECT_TRUE(a.termwise_ok);
    try {
        cmd_limit(find_identity(cat, "guo-liu-1"), 20);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoLimitTarget);
    }
    Identity id = find_identity(cat, "q64");
    id.limit->scale = RationalFunction(2) * id.limit->scale;
    try {
        cmd_limit(id, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TermwiseMismatch);
    }
}

TEST(CatalogNormalize, NegQuartKernelReproducesTheorem) {
    KernelSpec ks = kernel_load(kDir + "/kernels/negquart.qwz");
    ks.probe = Rational(3, 5);
    NormalizeReport r = cmd_normalize(ks, &catalog(), PrecisionContext{}, pow10_neg(25));
    EXPECT_EQ(r.recurrence.order, 1);
    EXPECT_TRUE(wz_residual(r.pair).is_zero());
    ASSERT_TRUE(r.rhs && r.column_sum && r.ratio);
    EXPECT_TRUE(r.pass) << r.text;
    Ball scaled = r.column_sum->value / Ball(r.ratio->ratio, 192);
    EXPECT_LT(abs_diff_upper(scaled, *r.rhs).to_double(), 1e-25);
}

TEST(CatalogNormalize, AllKernels) {
    for (auto f : {"negquart", "negquart_h", "guillera", "guillera_h", "posquart1", "posquart2"}) {
        KernelSpec ks = kernel_load(kDir + "/kernels/" + f + ".qwz");
        NormalizeReport r = cmd_normalize(ks, &catalog(), PrecisionContext{}, pow10_neg(30));
        EXPECT_TRUE(r.pass) << f << "\n" << r.text;
    }
}

TEST(CatalogNormalize, KernelFileErrors) {
    EXPECT_THROW(kernel_parse(""), ParseError);
    EXPECT_THROW(kernel_parse("[k]\ntarget = x\n"), ParseError);
    EXPECT_THROW(kernel_parse("[k]\nkernel = qpow(k)\ncolumn = F\n"), ParseError);
    try {
        kernel_parse("[k]\nkernel = qpoch(q^(n^2);1;k)\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::NotQProper || e.kind() == ErrorKind::ParseError);
    }
}

TEST(CatalogReport, SortedAndPassing) {
    std::vector<Identity> sub;
    for (auto name : {"qposquart2", "guo-liu-1", "guillera-1024", "chu-gamma"}) sub.push_back(find_identity(catalog(), name));
    auto rep = cmd_report(sub, kDir, defaults(), 10, 2);
    ASSERT_EQ(rep.size(), 4u);
    EXPECT_EQ(rep[0].id, "chu-gamma");
    EXPECT_EQ(rep[1].id, "guillera-1024");
    EXPECT_EQ(rep[2].id, "guo-liu-1");
    EXPECT_EQ(rep[3].id, "qposquart2");
    for (auto& e : rep) EXPECT_TRUE(e.pass) << e.text;
    EXPECT_TRUE(rep[3].certify && rep[3].limit);
}
