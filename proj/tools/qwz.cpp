#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "qwz/catalog/commands.hpp"

using namespace qwz;
using json = nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct Common {
    std::string catalog = std::string(QWZ_DATA_DIR) + "/catalog.qwz";
    std::vector<std::string> qs;
    long prec = 0;
    std::string eps;
    long terms = 0;
    std::string report;
    bool as_json = false;
};

void add_common(CLI::App* c, Common& o, bool numeric) {
    c->add_option("--catalog", o.catalog, "catalog file");
    if (numeric) {
        c->add_option("--q", o.qs, "probe value of q (repeatable), e.g. 1/2");
        c->add_option("--prec", o.prec, "working precision in bits (default 192, or QWZ_PREC)");
        c->add_option("--eps", o.eps, "target tolerance, e.g. 10^-30");
    }
    c->add_option("--terms", o.terms, "term budget (verify) or n_max (limit)");
    c->add_option("--report", o.report, "also write the report to this file");
    c->add_flag("--json", o.as_json, "machine-readable output");
}

VerifyOptions options(const Common& o) {
    VerifyOptions v;
    v.ctx = PrecisionContext::from_env();
    if (o.prec) v.ctx.bits = o.prec;
    if (!o.eps.empty()) {
        v.ctx.eps = parse_number_literal(o.eps);
        v.eps_set = true;
    }
    if (o.terms) {
        v.ctx.max_terms = o.terms;
        v.terms_set = true;
    }
    v.ctx.validate();
    return v;
}

std::string catalog_dir(const Common& o) { return std::filesystem::path(o.catalog).parent_path().string(); }

json ball_json(const Ball& b) { return {{"mid", b.mid().str(40)}, {"rad", b.rad().str(6)}}; }

json to_json(const VerificationReport& r) {
    json pts = json::array();
    for (auto& p : r.points)
        pts.push_back({{"q", p.q.get_str()},
                       {"lhs", ball_json(p.lhs)},
                       {"rhs", ball_json(p.rhs)},
                       {"residual", p.diff},
                       {"bound", p.bound},
                       {"terms", p.terms},
                       {"pass", p.pass},
                       {"seconds", p.seconds}});
    return {{"id", r.id}, {"mode", r.mode}, {"points", pts}, {"pass", r.pass}, {"seconds", r.seconds}};
}

json to_json(const CertifyReport& r) {
    json j = {{"id", r.id},
              {"mode", "symbolic"},
              {"residual", r.residual.str()},
              {"certificate", r.pair.certificate.str()},
              {"stored_pair", r.stored_pair},
              {"pass", r.pass}};
    if (r.matches_kernel) j["matches_kernel"] = *r.matches_kernel;
    if (r.column) j["column"] = {{"name", std::string(1, r.column->column)}, {"ratio", r.column->ratio.get_str()}};
    return j;
}

json to_json(const LimitReport& r, const std::string& id) {
    json e = json::array();
    for (auto& [d, v] : r.rhs_errors) e.push_back({{"q", "1-10^-" + std::to_string(d)}, {"error", v}});
    return {{"id", id}, {"mode", "limit"}, {"termwise", r.termwise_ok}, {"checked", r.checked}, {"rhs", e}, {"pass", r.termwise_ok && r.rhs_trend_ok}};
}

void emit(const Common& o, const std::string& text, const json& j) {
    std::string out = o.as_json ? j.dump(2) + "\n" : text;
    std::cout << out;
    if (!o.report.empty()) {
        std::ofstream f(o.report);
        if (!f) fail(ErrorKind::InvalidArgument, "cannot write '" + o.report + "'");
        f << out;
    }
}

int exit_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::VerificationFailed:
    case ErrorKind::TermwiseMismatch:
    case ErrorKind::RHSDivergence:
    case ErrorKind::NotWZNormalized:
    case ErrorKind::NoDecayDetected:
        return kFail;
    default:
        return kUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qwz: q-WZ identity catalog, certificates and numeric verification"};
    app.require_subcommand(1);
    Common o;
    std::vector<std::string> ids;
    std::string kernel_path;

    auto* verify = app.add_subcommand("verify", "numeric check of catalog identities");
    verify->add_option("ids", ids, "identity ids")->required();
    add_common(verify, o, true);
    auto* certify = app.add_subcommand("certify", "symbolic WZ certificate check");
    certify->add_option("ids", ids, "identity ids")->required();
    add_common(certify, o, false);
    auto* normalize = app.add_subcommand("normalize", "EKHAD-normalize a kernel file into a WZ pair");
    normalize->add_option("kernel", kernel_path, "kernel file")->required();
    add_common(normalize, o, true);
    auto* limit = app.add_subcommand("limit", "termwise q -> 1 limit against the classical series");
    limit->add_option("ids", ids, "identity ids")->required();
    add_common(limit, o, false);
    auto* list = app.add_subcommand("list", "list catalog identities");
    add_common(list, o, false);
    auto* report = app.add_subcommand("report", "verify, certify and limit-check the whole catalog");
    add_common(report, o, true);
    unsigned threads = 0;
    report->add_option("--threads", threads, "worker threads (default: hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kPass : kUsage;
    }

    try {
        if (*normalize) {
            VerifyOptions v = options(o);
            KernelSpec ks = kernel_load(kernel_path);
            if (!o.qs.empty()) ks.probe = parse_number_literal(o.qs.front());
            std::vector<Identity> cat;
            if (!ks.target.empty()) cat = catalog_load(o.catalog);
            NormalizeReport r = cmd_normalize(ks, ks.target.empty() ? nullptr : &cat, v.ctx, v.ctx.eps);
            json j = {{"kernel", ks.name},
                      {"order", r.recurrence.order},
                      {"p1", r.recurrence.p[1].str()},
                      {"p2", r.recurrence.p[0].str()},
                      {"prefactor_closed_form", r.normalized.prefactor.closed_form.has_value()},
                      {"Fbar", describe(r.normalized.Fbar)},
                      {"certificate", r.pair.certificate.str()},
                      {"column", std::string(1, r.column)},
                      {"probe", r.probe.get_str()},
                      {"pass", r.pass}};
            if (r.column_sum) j["column_sum"] = ball_json(r.column_sum->value);
            if (r.ratio) j["ratio"] = r.ratio->ratio.get_str();
            if (r.rhs) j["rhs"] = ball_json(*r.rhs), j["residual"] = r.diff, j["target"] = r.target;
            emit(o, r.text, j);
            return r.pass ? kPass : kFail;
        }

        std::vector<Identity> cat = catalog_load(o.catalog);
        if (*list) {
            std::ostringstream os;
            json j = json::array();
            for (auto& id : cat) {
                os << id.id << "  " << to_string(id.kind) << (id.has_pair() ? "  pair" : "") << (id.limit ? "  limit" : "") << "  "
                   << id.provenance << "\n";
                j.push_back({{"id", id.id}, {"kind", to_string(id.kind)}, {"pair", id.has_pair()}, {"limit", id.limit.has_value()},
                             {"provenance", id.provenance}});
            }
            emit(o, os.str(), j);
            return kPass;
        }
        if (*report) {
            VerifyOptions v = options(o);
            auto entries = cmd_report(cat, catalog_dir(o), v, 20, threads);
            std::ostringstream os;
            json j = json::array();
            int failed = 0;
            for (auto& e : entries) {
                os << e.text;
                json x = {{"id", e.id}, {"pass", e.pass}, {"errors", e.errors}};
                if (e.verify) x["verify"] = to_json(*e.verify);
                if (e.certify) x["certify"] = to_json(*e.certify);
                if (e.limit) x["limit"] = to_json(*e.limit, e.id);
                j.push_back(x);
                failed += !e.pass;
            }
            os << entries.size() - failed << "/" << entries.size() << " identities pass\n";
            emit(o, os.str(), j);
            return failed ? kFail : kPass;
        }

        int failed = 0;
        std::ostringstream os;
        json j = json::array();
        if (*verify) {
            VerifyOptions v = options(o);
            std::vector<Rational> qs;
            for (auto& s : o.qs) qs.push_back(parse_number_literal(s));
            for (auto& name : ids) {
                VerificationReport r = cmd_verify(find_identity(cat, name), qs, v);
                os << r.text;
                j.push_back(to_json(r));
                failed += !r.pass;
            }
        } else if (*certify) {
            for (auto& name : ids) {
                CertifyReport r = cmd_certify(find_identity(cat, name), catalog_dir(o));
                os << r.text;
                j.push_back(to_json(r));
                failed += !r.pass;
            }
        } else if (*limit) {
            long n_max = o.terms ? o.terms : 20;
            for (auto& name : ids) {
                LimitReport r = cmd_limit(find_identity(cat, name), n_max);
                os << r.text << "\n";
                j.push_back(to_json(r, name));
            }
        }
        emit(o, os.str(), j);
        return failed ? kFail : kPass;
    } catch (const Error& e) {
        std::cerr << "qwz: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "qwz: " << e.what() << "\n";
        return kUsage;
    }
}
