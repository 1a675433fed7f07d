#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "qwz/catalog/catalog.hpp"
#include "qwz/wz/normalizer.hpp"

namespace qwz {

// kernel file: one record with the kernel, the identity it proves and the column (G or H) that carries it
struct KernelSpec {
    std::string name;
    std::string kernel_text;
    QProperTerm kernel;
    std::string target;
    char column = 'G';
    Rational probe = Rational(3, 5);  // q^ for the numeric check
};

inline KernelSpec kernel_parse(const std::string& text) {
    auto raw = detail::read_records(text, {"kernel", "target", "column", "probe"});
    if (raw.size() != 1) throw ParseError(raw.empty() ? 1 : raw[1].line, "a kernel file holds exactly one record");
    auto& r = raw[0];
    KernelSpec k;
    k.name = r.id;
    auto it = r.fields.find("kernel");
    if (it == r.fields.end()) throw ParseError(r.line, "missing field 'kernel'");
    k.kernel_text = it->second.first;
    k.kernel = build_term(k.kernel_text, it->second.second);
    if (auto t = r.fields.find("target"); t != r.fields.end()) k.target = t->second.first;
    if (auto c = r.fields.find("column"); c != r.fields.end()) {
        if (c->second.first != "G" && c->second.first != "H") throw ParseError(c->second.second, "column must be G or H");
        k.column = c->second.first[0];
    }
    if (auto p = r.fields.find("probe"); p != r.fields.end()) {
        try {
            k.probe = parse_number_literal(p->second.first);
        } catch (const Error& e) {
            throw ParseError(p->second.second, e.what());
        }
    }
    return k;
}

inline KernelSpec kernel_load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return kernel_parse(ss.str());
}

inline std::string linear_str(const std::vector<std::pair<Rational, const char*>>& ms) {
    std::string s;
    for (auto& [c, v] : ms) {
        if (c == 0) continue;
        std::string x = c.get_str();
        if (*v && (c == 1 || c == -1)) x = c < 0 ? "-" : "";
        if (!s.empty() && c > 0) s += "+";
        s += x + v;
    }
    return s.empty() ? "0" : s;
}

inline std::string affine_str(const Affine& a) { return linear_str({{a.c0, ""}, {a.cn, "n"}, {a.ck, "k"}}); }

inline std::string describe(const QProperTerm& t) {
    std::ostringstream os;
    os << "D=" << t.D << "  const " << t.constant.str();
    if (t.sign_n || t.sign_k) os << "  (-1)^(" << affine_str({0, Rational(t.sign_n), Rational(t.sign_k)}) << ")";
    const QuadForm& p = t.qpow;
    std::string e = linear_str({{p.nn, "n^2"}, {p.nk, "nk"}, {p.kk, "k^2"}, {p.n, "n"}, {p.k, "k"}, {p.c, ""}});
    if (e != "0") os << "  q^(" << e << ")";
    for (auto& f : t.factors) {
        os << "  (" << (f.arg_sign < 0 ? "-" : "") << "q^(" << affine_str(f.arg) << ");q^" << f.base.get_str() << ")_";
        os << (f.infinite ? std::string("inf") : "(" + affine_str(f.order) + ")");
        if (f.power != 1) os << "^" << f.power;
    }
    os << "  cofactor " << t.cofactor.str();
    if (t.sequence) os << "  seq " << t.sequence->str();
    return os.str();
}

struct VerifyOptions {
    PrecisionContext ctx;
    bool eps_set = false;    // --eps overrides the entry's own tolerance
    bool terms_set = false;
};

struct PointResult {
    Rational q;
    Ball lhs, rhs;
    std::string diff;   // |mid(lhs) - mid(rhs)|
    std::string bound;  // rad(lhs) + rad(rhs) + eps
    long terms = 0;
    bool pass = false;
    double seconds = 0;
};

struct VerificationReport {
    std::string id;
    std::string mode = "numeric";
    std::vector<PointResult> points;
    bool pass = false;
    double seconds = 0;
    std::string text;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// internal tolerance three digits below the target, as far as the precision allows
inline PrecisionContext inner_context(const PrecisionContext& c) {
    PrecisionContext in = c;
    Rational floor = rpow(Rational(2), 8 - static_cast<long>(c.bits));
    in.eps = std::max(Rational(c.eps / 1000), floor);
    return in;
}

inline PointResult compare(const Ball& l, const Ball& r, const Rational& eps) {
    PointResult p;
    p.lhs = l;
    p.rhs = r;
    Mpfr d = abs_diff_mid(l, r);
    d = rad::add(rad::abs_up(d), rad::ulp(d, d.prec()));
    Mpfr b = rad::add(rad::add(l.rad(), r.rad()), rad::from(eps));
    p.pass = rad::le(d, b);
    p.diff = d.str(6);
    p.bound = b.str(6);
    return p;
}

}  // namespace detail

inline VerificationReport cmd_verify(const Identity& id, std::vector<Rational> qs, const VerifyOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    PrecisionContext ctx = opt.ctx;
    if (!opt.eps_set && id.eps) ctx.eps = *id.eps;
    if (!opt.terms_set && id.terms > 0) ctx.max_terms = id.terms;
    ctx.validate();
    PrecisionContext in = detail::inner_context(ctx);
    VerificationReport rep;
    rep.id = id.id;
    std::ostringstream os;
    if (id.kind == IdentityKind::Classical) {
        SumResult s = sum_classical(id.classical, in, id.series);
        Ball r = eval_classical_rhs(id.rhs, in);
        PointResult p = detail::compare(s.value, r, ctx.eps);
        p.q = 1;
        p.terms = s.terms;
        p.seconds = detail::seconds_since(t0);
        rep.points.push_back(p);
    } else {
        if (qs.empty()) qs = default_probes(id);
        for (auto& q : qs)
            if (!id.validity.contains(q)) fail(ErrorKind::QOutsideValidity, id.id + ": q = " + q.get_str() + " outside " + id.validity.str());
        for (auto& q : qs) {
            auto tq = std::chrono::steady_clock::now();
            Ball qh = qhat_ball(q, id.lhs.D, in);
            SumResult s = sum_lhs(id.lhs, qh, in);
            Ball r = eval_rhs(id.rhs, q, in);
            PointResult p = detail::compare(s.value, r, ctx.eps);
            p.q = q;
            p.terms = s.terms;
            p.seconds = detail::seconds_since(tq);
            rep.points.push_back(p);
        }
    }
    rep.pass = !rep.points.empty();
    for (auto& p : rep.points) {
        rep.pass = rep.pass && p.pass;
        os << "  " << (id.kind == IdentityKind::Classical ? std::string("q = 1 (classical)") : "q = " + p.q.get_str()) << ": lhs "
           << p.lhs.mid().str(36) << "  rhs " << p.rhs.mid().str(36) << "  |diff| " << p.diff << " <= " << p.bound << "  terms "
           << p.terms << "  " << (p.pass ? "pass" : "FAIL") << "\n";
    }
    rep.seconds = detail::seconds_since(t0);
    rep.text = id.id + ": " + (rep.pass ? "pass" : "FAIL") + "\n" + os.str();
    return rep;
}

struct ColumnCheck {
    char column = 'G';
    Rational ratio;  // column(n,0) / summand(n) at the probe, the same for all n checked
    long checked = 0;
};

// column(n,0) = ratio * summand(n) for n = 0..n_max at q^ = probe; the theorem's q is the kernel's q^
inline ColumnCheck column_check(const QWZPair& pair, char column, const QProperTerm& summand, const Rational& probe, long n_max = 8) {
    std::vector<QProperTerm> col;
    if (column == 'H') col = build_H(pair).terms;
    else col.push_back(pair.G());
    auto c = [&](long n) -> Rational {
        Rational s = 0;
        for (auto& t : col) s += eval_exact_qhat(t, n, 0, probe, 1, 0);
        return s;
    };
    std::optional<Rational> qs = exact_root(probe, static_cast<unsigned>(summand.D));
    if (!qs) fail(ErrorKind::NoExactRoot, "probe has no exact root for the summand");
    ColumnCheck out;
    out.column = column;
    bool have = false;
    for (long n = 0; n <= n_max; ++n) {
        Rational a = c(n), b = eval_exact_qhat(summand, n, 0, *qs, 1, 0);
        if (b == 0) {
            if (a != 0) fail(ErrorKind::VerificationFailed, "column nonzero where the summand vanishes, n = " + std::to_string(n));
            continue;
        }
        Rational r = a / b;
        if (!have) {
            out.ratio = r;
            have = true;
        } else if (r != out.ratio) {
            fail(ErrorKind::VerificationFailed, "column/summand ratio depends on n: " + out.ratio.get_str() + " vs " + r.get_str() +
                                                    " at n = " + std::to_string(n));
        }
        ++out.checked;
    }
    if (!have || out.ratio == 0) fail(ErrorKind::VerificationFailed, "column vanishes identically");
    return out;
}

struct NormalizeReport {
    Recurrence recurrence;
    Normalized normalized;
    QWZPair pair;
    std::string target;
    char column = 'G';
    Rational probe;
    std::optional<ColumnCheck> ratio;
    std::optional<SumResult> column_sum;
    std::optional<Ball> rhs;
    std::string diff;
    bool pass = true;
    std::string text;
};

// kernel -> recurrence -> EKHAD prefactor -> WZ pair -> numeric column sum against the target identity
inline NormalizeReport cmd_normalize(const KernelSpec& ks, const std::vector<Identity>* cat, const PrecisionContext& ctx,
                                     const Rational& tol) {
    NormalizeReport rep;
    rep.recurrence = q_zeilberger(ks.kernel);
    recurrence_verify(ks.kernel, rep.recurrence);
    rep.normalized = ekhad_normalize(ks.kernel, rep.recurrence);
    rep.pair = make_wz_pair(rep.normalized.Fbar);
    rep.target = ks.target;
    rep.column = ks.column;
    rep.probe = ks.probe;
    std::ostringstream os;
    os << "kernel " << ks.name << ": " << ks.kernel_text << "\n";
    os << "recurrence (order " << rep.recurrence.order << ")\n";
    os << "  p1 = " << rep.recurrence.p[1].str() << "\n  p2 = " << rep.recurrence.p[0].str() << "\n";
    const NormalizationPrefactor& pf = rep.normalized.prefactor;
    if (pf.closed_form) os << "prefactor " << describe(*pf.closed_form) << "\n";
    else os << "prefactor (-1)^n prod_{i=1}^{n-1} p1(i)/p2(i), no closed form\n";
    os << "Fbar " << describe(rep.normalized.Fbar) << "\n";
    os << "certificate R = " << rep.pair.certificate.str() << "\n";
    os << "WZ residual " << wz_residual(rep.pair).str() << "\n";

    PrecisionContext in = detail::inner_context(ctx);
    Ball qh = in.ball(ks.probe);
    std::vector<QProperTerm> col;
    if (ks.column == 'H') col = build_H(rep.pair).terms;
    else col.push_back(rep.pair.G());
    rep.column_sum = sum_lhs(col, qh, in);
    os << "sum_n " << ks.column << "(n,0) at q^ = " << ks.probe.get_str() << ": " << rep.column_sum->value.mid().str(36) << "  ("
       << rep.column_sum->terms << " terms)\n";
    if (cat && !ks.target.empty()) {
        const Identity& id = find_identity(*cat, ks.target);
        rep.ratio = column_check(rep.pair, ks.column, id.lhs, ks.probe);
        Ball scaled = rep.column_sum->value / in.ball(rep.ratio->ratio);
        rep.rhs = eval_rhs(id.rhs, ks.probe, in);
        PointResult p = detail::compare(scaled, *rep.rhs, tol);
        rep.diff = p.diff;
        rep.pass = p.pass;
        os << ks.column << "(n,0) = " << rep.ratio->ratio.get_str() << " * [" << ks.target << " summand](n) at q = " << ks.probe.get_str()
           << " for n = 0.." << rep.ratio->checked - 1 << "\n";
        os << "sum / ratio " << scaled.mid().str(36) << "\n" << ks.target << " rhs    " << rep.rhs->mid().str(36) << "\n";
        os << "|diff| " << p.diff << " <= " << p.bound << "  " << (p.pass ? "pass" : "FAIL") << "\n";
    }
    rep.text = os.str();
    return rep;
}

struct CertifyReport {
    std::string id;
    QWZPair pair;
    RationalFunction residual;
    bool stored_pair = false;
    std::optional<bool> matches_kernel;  // stored pair vs the EKHAD-normalized kernel
    std::optional<ColumnCheck> column;
    bool pass = false;
    std::string text;
};

inline CertifyReport cmd_certify(const Identity& id, const std::string& catalog_dir) {
    if (!id.has_pair()) fail(ErrorKind::NoPairAttached, id.id + " has no WZ pair or kernel attached");
    CertifyReport rep;
    rep.id = id.id;
    std::ostringstream os;
    std::optional<KernelSpec> ks;
    std::optional<QWZPair> derived;
    if (!id.kernel.empty()) {
        ks = kernel_load((std::filesystem::path(catalog_dir) / id.kernel).string());
        derived = make_wz_pair(ekhad_normalize(ks->kernel).Fbar);
    }
    if (id.wz_F) {
        rep.stored_pair = true;
        rep.pair = QWZPair{*id.wz_F, *id.wz_R};
    } else {
        rep.pair = *derived;
    }
    rep.residual = wz_verify_symbolic(rep.pair).residual;
    os << id.id << ": WZ residual " << rep.residual.str() << "\n";
    os << "  certificate R = " << rep.pair.certificate.str() << "\n";
    if (rep.stored_pair && derived) {
        // normalized kernel is a constant multiple of the stored F and carries the same certificate
        Rational qh(3, 5);
        Rational r0 = eval_exact_qhat(derived->F, 1, 1, qh) / eval_exact_qhat(rep.pair.F, 1, 1, qh);
        bool same = derived->certificate == rep.pair.certificate;
        for (long n = 1; n <= 3 && same; ++n)
            for (long k = 0; k <= 2 && same; ++k)
                same = eval_exact_qhat(derived->F, n, k, qh) == r0 * eval_exact_qhat(rep.pair.F, n, k, qh);
        rep.matches_kernel = same;
        os << "  EKHAD-normalized kernel " << (same ? "reproduces" : "does NOT reproduce") << " the stored pair (F ratio "
           << r0.get_str() << " at q^ = 3/5)\n";
    }
    if (ks) {
        rep.column = column_check(derived ? *derived : rep.pair, ks->column, id.lhs, ks->probe);
        os << "  " << ks->column << "(n,0) = " << rep.column->ratio.get_str() << " * summand(n) at q = " << ks->probe.get_str()
           << ", n = 0.." << rep.column->checked - 1 << "\n";
    }
    rep.pass = rep.residual.is_zero() && rep.matches_kernel.value_or(true);
    rep.text = os.str();
    return rep;
}

inline LimitReport cmd_limit(const Identity& id, long n_max) {
    if (!id.limit) fail(ErrorKind::NoLimitTarget, id.id + " has no classical limit attached");
    LimitReport rep = limit_termwise(id.lhs, *id.limit, n_max);
    limit_rhs_trend(id.rhs, *id.limit, rep);
    std::ostringstream os;
    os << id.id << ": " << rep.text << "; scaled rhs error";
    for (auto& [d, e] : rep.rhs_errors) os << "  q=1-10^-" << d << ": " << e;
    os << "  (target " << id.limit_target_text << ")";
    rep.text = os.str();
    return rep;
}

struct ReportEntry {
    std::string id;
    bool pass = false;
    std::optional<VerificationReport> verify;
    std::optional<CertifyReport> certify;
    std::optional<LimitReport> limit;
    std::vector<std::string> errors;
    std::string text;
};

// verify every entry, certify and limit-check where data is attached; entries run on worker threads
inline std::vector<ReportEntry> cmd_report(const std::vector<Identity>& cat, const std::string& catalog_dir, const VerifyOptions& opt,
                                           long n_max = 20, unsigned threads = 0) {
    std::vector<ReportEntry> out(cat.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < cat.size();) {
            const Identity& id = cat[i];
            ReportEntry& e = out[i];
            e.id = id.id;
            std::ostringstream os;
            auto guard = [&](const char* what, auto&& fn) {
                try {
                    fn();
                } catch (const Error& ex) {
                    e.errors.push_back(std::string(what) + ": " + ex.what());
                    os << id.id << " " << what << ": " << ex.what() << "\n";
                }
            };
            guard("verify", [&] {
                e.verify = cmd_verify(id, {}, opt);
                os << e.verify->text;
            });
            if (id.has_pair())
                guard("certify", [&] {
                    e.certify = cmd_certify(id, catalog_dir);
                    os << e.certify->text;
                });
            if (id.limit)
                guard("limit", [&] {
                    e.limit = cmd_limit(id, n_max);
                    os << e.limit->text << "\n";
                });
            e.pass = e.errors.empty() && e.verify && e.verify->pass && (!e.certify || e.certify->pass);
            e.text = os.str();
        }
    };
    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::sort(out.begin(), out.end(), [](const ReportEntry& a, const ReportEntry& b) { return a.id < b.id; });
    return out;
}

}  // namespace qwz
