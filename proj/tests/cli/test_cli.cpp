#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + std::string(QWZ_CLI) + " " + args + " 2>/dev/null";
    Outcome r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

}  // namespace

TEST(Cli, VerifyPass) {
    Outcome r = run("verify qnegquart --q 1/2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("pass"), std::string::npos);
}

TEST(Cli, VerifyJson) {
    Outcome r = run("verify qnegquart guillera-1024 --q 1/3 --q 7/10 --json");
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["id"], "qnegquart");
    EXPECT_EQ(j[0]["points"].size(), 2u);
    EXPECT_EQ(j[0]["points"][1]["q"], "7/10");
    EXPECT_TRUE(j[1]["pass"].get<bool>());
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("verify qnegquart --q 2").code, 2);
    EXPECT_EQ(run("verify no-such-id").code, 2);
    EXPECT_EQ(run("certify guo-zudilin-neg-quarter").code, 2);
    EXPECT_EQ(run("limit guo-liu-1").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("verify").code, 2);
    EXPECT_EQ(run("verify qnegquart --prec 8").code, 2);
}

TEST(Cli, VerificationFailureExitsOne) {
    auto dir = std::filesystem::temp_directory_path() / "qwz_cli_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bad.qwz") << "[wrong]\nkind = classical\nlhs = rate(1/4) * poch(1/2)^3 / poch(1)^3 * poly(6n+1)\n"
                                      "rhs = 3 * pi^-1\n";
    Outcome r = run("verify wrong --catalog " + (dir / "bad.qwz").string());
    EXPECT_EQ(r.code, 1) << r.out;
    std::ofstream(dir / "broken.qwz") << "[x]\nkind = classical\nlhs = rate(1/4\nrhs = 1\n";
    EXPECT_EQ(run("list --catalog " + (dir / "broken.qwz").string()).code, 2);
}

TEST(Cli, CertifyAndLimit) {
    Outcome c = run("certify qnegquart qguillera-16");
    EXPECT_EQ(c.code, 0) << c.out;
    EXPECT_NE(c.out.find("WZ residual 0"), std::string::npos);
    Outcome l = run("limit motivating --terms 20 --json");
    ASSERT_EQ(l.code, 0) << l.out;
    auto j = nlohmann::json::parse(l.out);
    EXPECT_EQ(j[0]["checked"], 21);
}

TEST(Cli, NormalizeKernel) {
    Outcome r = run("normalize " + std::string(QWZ_DATA_DIR) + "/kernels/negquart.qwz --q 0.6 --json");
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["order"], 1);
    EXPECT_EQ(j["ratio"], "4");
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, ListAndReportFile) {
    Outcome l = run("list --json");
    ASSERT_EQ(l.code, 0);
    EXPECT_GE(nlohmann::json::parse(l.out).size(), 25u);
    auto path = std::filesystem::temp_directory_path() / "qwz_cli_report.txt";
    Outcome v = run("verify motivating --report " + path.string());
    EXPECT_EQ(v.code, 0);
    std::ifstream f(path);
    std::string s((std::istreambuf_iterator<char>(f)), {});
    EXPECT_EQ(s, v.out);
}

TEST(Cli, PrecisionFromEnvironment) {
    Outcome r = run("verify guillera-1024 --eps 10^-20 --json", "QWZ_PREC=96");
    ASSERT_EQ(r.code, 0) << r.out;
    Outcome bad = run("verify guillera-1024", "QWZ_PREC=64");
    EXPECT_EQ(bad.code, 2);  // 10^-30 is below what 64 bits can certify
}
