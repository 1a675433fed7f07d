#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qwz/numeric/limit.hpp"
#include "qwz/term/parser.hpp"

namespace qwz {

enum class IdentityKind { QIdentity, Classical };

inline const char* to_string(IdentityKind k) { return k == IdentityKind::QIdentity ? "q-identity" : "classical"; }

// "0 < |q| < 1" or "0 < q < 1"
struct Validity {
    bool negative_allowed = true;

    static Validity parse(const std::string& s, int line) {
        std::string t;
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (t == "0<|q|<1" || t == "|q|<1") return {true};
        if (t == "0<q<1") return {false};
        throw ParseError(line, "unknown validity region '" + s + "'");
    }
    std::string str() const { return negative_allowed ? "0 < |q| < 1" : "0 < q < 1"; }
    bool contains(const Rational& q) const {
        if (q == 0 || q >= 1 || q <= -1) return false;
        return negative_allowed || q > 0;
    }
    friend bool operator==(const Validity& a, const Validity& b) { return a.negative_allowed == b.negative_allowed; }
};

struct Identity {
    std::string id;
    IdentityKind kind = IdentityKind::QIdentity;
    std::string lhs_text, rhs_text;
    QProperTerm lhs;            // q-identity
    ClassicalTerm classical;    // classical
    ClosedFormRHS rhs;
    Validity validity;
    std::vector<Rational> probes;
    // q -> 1 data
    std::string limit_scale_text, limit_summand_text, limit_target_text;
    int scale_power = 0;
    std::optional<LimitSpec> limit;
    // stored WZ pair (F, certificate) or a kernel file
    std::string wz_F_text, wz_R_text;
    std::optional<QProperTerm> wz_F;
    std::optional<RationalFunction> wz_R;
    std::string kernel;
    SeriesMode series = SeriesMode::Geometric;
    std::optional<Rational> eps;
    long terms = 0;
    std::string provenance;
    int line = 0;

    bool has_pair() const { return wz_F.has_value() || !kernel.empty(); }

    friend bool operator==(const Identity& a, const Identity& b) {
        auto same_limit = [](const std::optional<LimitSpec>& x, const std::optional<LimitSpec>& y) {
            if (x.has_value() != y.has_value()) return false;
            if (!x) return true;
            return x->scale == y->scale && x->scale_power == y->scale_power && x->classical == y->classical &&
                   same_rhs(x->target, y->target);
        };
        return a.id == b.id && a.kind == b.kind && a.lhs == b.lhs && a.classical == b.classical && same_rhs(a.rhs, b.rhs) &&
               a.validity == b.validity && a.probes == b.probes && a.scale_power == b.scale_power &&
               same_limit(a.limit, b.limit) && a.wz_F == b.wz_F && a.wz_R == b.wz_R && a.kernel == b.kernel &&
               a.series == b.series && a.eps == b.eps && a.terms == b.terms && a.provenance == b.provenance;
    }

private:
    static bool same_rhs(const ClosedFormRHS& x, const ClosedFormRHS& y) {
        return x.D == y.D && x.constant == y.constant && x.factors == y.factors && x.gammas == y.gammas &&
               x.pi_power == y.pi_power && x.sqrt_arg == y.sqrt_arg && x.sums == y.sums;
    }
};

// decimals, a/b, 1e-30 and 10^-30
inline Rational parse_number_literal(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) fail(ErrorKind::InvalidArgument, "empty number");
    if (s.rfind("10^", 0) == 0) {
        std::string e = s.substr(3);
        if (!e.empty() && e.front() == '(' && e.back() == ')') e = e.substr(1, e.size() - 2);
        long d = to_long(parse_rational(e));
        return d < 0 ? pow10_neg(-d) : rpow(Rational(10), d);
    }
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        Rational m = parse_number_literal(s.substr(0, epos));
        Rational e = parse_rational(s.substr(epos + 1));
        if (e.get_den() != 1) fail(ErrorKind::InvalidArgument, "bad exponent in '" + s + "'");
        long d = to_long(e);
        return m * (d < 0 ? pow10_neg(-d) : rpow(Rational(10), d));
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        bool neg = !s.empty() && s[0] == '-';
        std::string ip = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0)), fp = s.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (fp.empty() || fp.find_first_not_of("0123456789") != std::string::npos || ip.find_first_not_of("0123456789") != std::string::npos)
            fail(ErrorKind::InvalidArgument, "bad number '" + s + "'");
        Rational r = Rational(Integer(ip)) + Rational(Integer(fp)) * pow10_neg(static_cast<long>(fp.size()));
        return neg ? Rational(-r) : r;
    }
    return parse_rational(s);
}

namespace detail {

inline const std::vector<std::string>& catalog_keys() {
    static const std::vector<std::string> keys = {"kind",          "lhs",         "rhs",          "validity",
                                                  "probes",        "limit_scale", "scale_power",  "limit_summand",
                                                  "limit_target",  "wz_F",        "wz_R",         "kernel",
                                                  "series",        "eps",         "terms",        "provenance"};
    return keys;
}

inline std::string trim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

struct RawRecord {
    std::string id;
    int line = 0;
    std::map<std::string, std::pair<std::string, int>> fields;
};

inline std::vector<Rational> parse_probe_list(const std::string& s, int line) {
    std::vector<Rational> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(parse_number_literal(item));
        } catch (const Error& e) {
            throw ParseError(line, e.what());
        }
    }
    return out;
}

inline Identity build_identity(const RawRecord& r) {
    Identity id;
    id.id = r.id;
    id.line = r.line;
    auto get = [&](const std::string& k) -> const std::pair<std::string, int>* {
        auto it = r.fields.find(k);
        return it == r.fields.end() ? nullptr : &it->second;
    };
    auto need = [&](const std::string& k) -> const std::pair<std::string, int>& {
        if (auto p = get(k)) return *p;
        throw ParseError(r.line, "[" + r.id + "] missing field '" + k + "'");
    };
    auto wrap = [&](int line, auto&& fn) {
        try {
            fn();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line, "[" + r.id + "] " + e.what());
        }
    };
    auto& kind = need("kind");
    if (kind.first == "q-identity") id.kind = IdentityKind::QIdentity;
    else if (kind.first == "classical") id.kind = IdentityKind::Classical;
    else throw ParseError(kind.second, "unknown kind '" + kind.first + "'");

    auto& lhs = need("lhs");
    auto& rhs = need("rhs");
    id.lhs_text = lhs.first;
    id.rhs_text = rhs.first;
    wrap(lhs.second, [&] {
        if (id.kind == IdentityKind::QIdentity) id.lhs = build_term(lhs.first, lhs.second);
        else id.classical = build_classical(lhs.first, lhs.second);
    });
    wrap(rhs.second, [&] { id.rhs = build_rhs(rhs.first, rhs.second); });
    if (id.kind == IdentityKind::Classical && !id.rhs.is_classical())
        throw ParseError(rhs.second, "classical identity with a q-dependent right-hand side");

    if (auto v = get("validity")) id.validity = Validity::parse(v->first, v->second);
    else if (id.kind == IdentityKind::QIdentity) throw ParseError(r.line, "[" + r.id + "] missing field 'validity'");
    if (auto p = get("probes")) {
        id.probes = parse_probe_list(p->first, p->second);
        for (auto& q : id.probes)
            if (!id.validity.contains(q)) throw ParseError(p->second, "probe " + q.get_str() + " outside the validity region");
    }
    if (auto p = get("scale_power")) wrap(p->second, [&] { id.scale_power = static_cast<int>(to_long(parse_rational(p->first))); });
    if (auto s = get("limit_summand")) {
        auto& t = need("limit_target");
        LimitSpec spec;
        spec.scale_power = id.scale_power;
        id.limit_summand_text = s->first;
        id.limit_target_text = t.first;
        wrap(s->second, [&] { spec.classical = build_classical(s->first, s->second); });
        wrap(t.second, [&] { spec.target = build_rhs(t.first, t.second); });
        if (!spec.target.is_classical()) throw ParseError(t.second, "limit target depends on q");
        if (auto sc = get("limit_scale")) {
            id.limit_scale_text = sc->first;
            wrap(sc->second, [&] {
                auto [f, D] = build_ratfun(sc->first, 1, sc->second);
                spec.scale = f;
            });
        }
        id.limit = spec;
    } else if (get("limit_target") || get("limit_scale")) {
        throw ParseError(r.line, "[" + r.id + "] limit fields without limit_summand");
    }
    if (auto f = get("wz_F")) {
        auto& R = need("wz_R");
        id.wz_F_text = f->first;
        id.wz_R_text = R.first;
        wrap(f->second, [&] { id.wz_F = build_term(f->first, f->second); });
        wrap(R.second, [&] { id.wz_R = build_ratfun(R.first, id.wz_F->D, R.second).first; });
    } else if (get("wz_R")) {
        throw ParseError(r.line, "[" + r.id + "] wz_R without wz_F");
    }
    if (auto k = get("kernel")) id.kernel = k->first;
    if (auto s = get("series")) {
        if (s->first == "geometric") id.series = SeriesMode::Geometric;
        else if (s->first == "alternating") id.series = SeriesMode::Alternating;
        else throw ParseError(s->second, "unknown series mode '" + s->first + "'");
    }
    if (auto e = get("eps")) wrap(e->second, [&] { id.eps = parse_number_literal(e->first); });
    if (auto t = get("terms")) wrap(t->second, [&] { id.terms = to_long(parse_rational(t->first)); });
    if (auto p = get("provenance")) id.provenance = p->first;
    return id;
}

}  // namespace detail

namespace detail {

// "[id]" headers, "key = value" fields, indented continuation lines, '#' comments
inline std::vector<RawRecord> read_records(const std::string& text, const std::vector<std::string>& keys) {
    std::vector<RawRecord> raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string* last = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            if (t.empty()) last = nullptr;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(line[0]))) {
            if (!last) throw ParseError(lineno, "continuation line without a field");
            *last += " " + t;
            continue;
        }
        if (t[0] == '[') {
            if (t.back() != ']') throw ParseError(lineno, "unterminated record header");
            RawRecord r;
            r.id = trim(t.substr(1, t.size() - 2));
            if (r.id.empty() || r.id.find_first_of(" \t[]=") != std::string::npos) throw ParseError(lineno, "bad record id '" + r.id + "'");
            r.line = lineno;
            raw.push_back(r);
            last = nullptr;
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
        if (raw.empty()) throw ParseError(lineno, "field outside a record");
        std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ParseError(lineno, "unknown field '" + key + "'");
        auto& f = raw.back().fields;
        if (f.count(key)) throw ParseError(lineno, "duplicate field '" + key + "'");
        f[key] = {val, lineno};
        last = &f[key].first;
    }
    return raw;
}

}  // namespace detail

inline std::vector<Identity> catalog_parse(const std::string& text) {
    std::vector<detail::RawRecord> raw = detail::read_records(text, detail::catalog_keys());
    std::vector<Identity> out;
    std::set<std::string> seen;
    for (auto& r : raw) {
        if (!seen.insert(r.id).second) fail(ErrorKind::DuplicateId, "identity '" + r.id + "' defined twice (line " + std::to_string(r.line) + ")");
        out.push_back(detail::build_identity(r));
    }
    return out;
}

inline std::vector<Identity> catalog_load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return catalog_parse(ss.str());
}

inline std::string serialize(const Identity& id) {
    std::ostringstream os;
    os << "[" << id.id << "]\n";
    auto put = [&](const char* k, const std::string& v) {
        if (!v.empty()) os << k << " = " << v << "\n";
    };
    put("kind", to_string(id.kind));
    put("lhs", id.lhs_text);
    put("rhs", id.rhs_text);
    if (id.kind == IdentityKind::QIdentity) put("validity", id.validity.str());
    if (!id.probes.empty()) {
        std::string p;
        for (auto& q : id.probes) p += (p.empty() ? "" : ", ") + q.get_str();
        put("probes", p);
    }
    put("limit_scale", id.limit_scale_text);
    if (id.scale_power != 0) put("scale_power", std::to_string(id.scale_power));
    put("limit_summand", id.limit_summand_text);
    put("limit_target", id.limit_target_text);
    put("wz_F", id.wz_F_text);
    put("wz_R", id.wz_R_text);
    put("kernel", id.kernel);
    if (id.series == SeriesMode::Alternating) put("series", "alternating");
    if (id.eps) put("eps", id.eps->get_str());
    if (id.terms) put("terms", std::to_string(id.terms));
    put("provenance", id.provenance);
    return os.str();
}

inline std::string serialize(const std::vector<Identity>& cat) {
    std::string s;
    for (auto& id : cat) s += (s.empty() ? "" : "\n") + serialize(id);
    return s;
}

inline const Identity& find_identity(const std::vector<Identity>& cat, const std::string& id) {
    for (auto& x : cat)
        if (x.id == id) return x;
    fail(ErrorKind::UnknownId, "no identity '" + id + "' in the catalog");
}

// {1/3, 1/2, 7/10} in the region, -1/2 when negative q is allowed
inline std::vector<Rational> default_probes(const Identity& id) {
    if (!id.probes.empty()) return id.probes;
    std::vector<Rational> out;
    for (Rational q : {Rational(1, 3), Rational(1, 2), Rational(7, 10), Rational(-1, 2)})
        if (id.validity.contains(q)) out.push_back(q);
    return out;
}

}  // namespace qwz
