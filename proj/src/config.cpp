#include "ybx/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "ybx/error.hpp"

namespace ybx {

using nlohmann::json;

namespace {

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, _] : obj.items())
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

Expr expression(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be an expression string");
    try {
        return parse(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError("function '" + key + "': " + e.what());
    }
}

std::map<std::string, Interval, std::less<>> boxes(const json& v) {
    std::map<std::string, Interval, std::less<>> out;
    if (!v.is_object()) throw ConfigError("sampling.box must be an object");
    for (const auto& [k, iv] : v.items()) {
        if (!iv.is_array() || iv.size() != 2) throw ConfigError("sampling.box." + k + " must be [lo, hi]");
        Interval i{number(iv[0], k), number(iv[1], k)};
        if (!(i.lo < i.hi)) throw ConfigError("sampling.box." + k + " is empty");
        out[k] = i;
    }
    return out;
}

void read_sampling(const json& s, Config& cfg, std::map<std::string, Interval, std::less<>>& box) {
    only_keys(s, {"samples", "seed", "box", "tolerances"}, "sampling");
    if (s.contains("samples")) {
        if (!s["samples"].is_number_integer() || s["samples"].get<long long>() < 1)
            throw ConfigError("sampling.samples must be a positive integer");
        cfg.sampling.samples = s["samples"].get<int>();
    }
    if (s.contains("seed")) {
        if (!s["seed"].is_number_unsigned()) throw ConfigError("sampling.seed must be a non-negative integer");
        cfg.sampling.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("box")) box = boxes(s["box"]);
    if (s.contains("tolerances")) {
        const auto& t = s["tolerances"];
        only_keys(t, {"ybe_rel", "identity_abs", "constraint_abs", "constancy_std"}, "sampling.tolerances");
        auto& tol = cfg.sampling.tolerances;
        if (t.contains("ybe_rel")) tol.ybe_rel = number(t["ybe_rel"], "ybe_rel");
        if (t.contains("identity_abs")) tol.identity_abs = number(t["identity_abs"], "identity_abs");
        if (t.contains("constraint_abs")) tol.constraint_abs = number(t["constraint_abs"], "constraint_abs");
        if (t.contains("constancy_std")) tol.constancy_std = number(t["constancy_std"], "constancy_std");
        tol.validate();
    }
}

Env zero_env(const json& z) {
    Env out;
    if (!z.is_object()) throw ConfigError("zero must be an object");
    for (const auto& [k, v] : z.items()) out[k] = number(v, k);
    return out;
}

void read_r33(const json& doc, Config& cfg) {
    auto& s = cfg.r33;
    if (doc.contains("constants")) {
        const auto& c = doc["constants"];
        only_keys(c, {"x_f", "alpha", "alphabar", "gamma", "eps1", "eps3"}, "constants");
        if (c.contains("x_f")) s.x_f = number(c["x_f"], "x_f");
        if (c.contains("gamma")) s.gamma = number(c["gamma"], "gamma");
        for (auto [key, dst] : {std::pair{"alpha", &s.alpha}, std::pair{"alphabar", &s.alphabar}}) {
            if (!c.contains(key)) continue;
            const double v = number(c[key], key);
            if (v != 1.0 && v != -1.0) throw ConfigError(std::string("'") + key + "' must be +1 or -1");
            *dst = static_cast<int>(v);
        }
        if (c.contains("eps1")) s.eps1 = number(c["eps1"], "eps1");
        if (c.contains("eps3")) s.eps3 = number(c["eps3"], "eps3");
    }
    if (!doc.contains("functions")) throw ConfigError("missing key 'functions'");
    const auto& f = doc["functions"];
    only_keys(f, {"f", "c1", "c3"}, "functions");
    if (!f.contains("f")) throw ConfigError("missing function 'f'");
    s.f = expression(f["f"], "f");
    if (f.contains("c1")) s.c1 = expression(f["c1"], "c1");
    if (f.contains("c3")) s.c3 = expression(f["c3"], "c3");
    if (doc.contains("gauge")) {
        const auto& g = doc["gauge"];
        only_keys(g, {"s", "t"}, "gauge");
        if (!g.contains("s") || !g.contains("t")) throw ConfigError("gauge needs both 's' and 't'");
        s.gauge_s = expression(g["s"], "gauge.s");
        s.gauge_t = expression(g["t"], "gauge.t");
    }
    if (doc.contains("zero")) s.zero = zero_env(doc["zero"]);
    if (doc.contains("sampling")) read_sampling(doc["sampling"], cfg, s.box);
    s = resolve(s);
}

void read_r22(const json& doc, Config& cfg) {
    auto& s = cfg.r22;
    s.branch = branch_from_name(cfg.family);
    if (doc.contains("constants")) {
        const auto& c = doc["constants"];
        if (!c.is_object()) throw ConfigError("constants must be an object");
        for (const auto& [k, v] : c.items()) s.constants[k] = number(v, k);
    }
    if (doc.contains("functions")) {
        const auto& f = doc["functions"];
        if (!f.is_object()) throw ConfigError("functions must be an object");
        for (const auto& [k, v] : f.items()) s.functions[k] = expression(v, k);
    }
    // names against the branch schema, before anything is evaluated
    const auto& sc = schema(s.branch);
    const std::string tag = "family " + cfg.family;
    for (const auto& [k, _] : s.constants)
        if (std::find(sc.constants.begin(), sc.constants.end(), k) == sc.constants.end() && !sc.defaults.count(k))
            throw ConfigError(tag + ": unknown constant '" + k + "'");
    for (const auto& k : sc.constants)
        if (!s.constants.count(k)) throw ConfigError(tag + ": missing constant '" + k + "'");
    for (const auto& [k, _] : s.functions)
        if (std::find(sc.functions.begin(), sc.functions.end(), k) == sc.functions.end())
            throw ConfigError(tag + ": unknown function '" + k + "'");
    for (const auto& k : sc.functions)
        if (!s.functions.count(k)) throw ConfigError(tag + ": missing function '" + k + "'");
    if (doc.contains("gauge")) {
        const auto& g = doc["gauge"];
        only_keys(g, {"f0", "f1"}, "gauge");
        if (!g.contains("f0") || !g.contains("f1")) throw ConfigError("gauge needs both 'f0' and 'f1'");
        cfg.gauge = {expression(g["f0"], "gauge.f0"), expression(g["f1"], "gauge.f1")};
    }
    if (doc.contains("zero")) s.zero = zero_env(doc["zero"]);
    if (doc.contains("sampling")) read_sampling(doc["sampling"], cfg, s.box);
}

std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line, col = 1;
        else ++col;
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Config parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON at " + position(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
    }
    only_keys(doc, {"family", "constants", "functions", "gauge", "zero", "sampling", "classify", "description"},
              "config");
    if (!doc.contains("family") || !doc["family"].is_string()) throw ConfigError("missing key 'family'");
    Config cfg;
    cfg.family = doc["family"].get<std::string>();
    cfg.source = doc;
    cfg.is_r33 = cfg.family == "r33";
    if (cfg.is_r33) read_r33(doc, cfg);
    else read_r22(doc, cfg);
    if (doc.contains("classify")) {
        const auto& c = doc["classify"];
        only_keys(c, {"direction"}, "classify");
        if (c.contains("direction")) {
            if (!c["direction"].is_array()) throw ConfigError("classify.direction must be an array");
            for (const auto& x : c["direction"]) cfg.direction.push_back(number(x, "direction"));
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ModelPtr build(const Config& cfg) {
    if (cfg.is_r33) return build_r33_model(cfg.r33);
    auto m = build_model(cfg.r22);
    if (!cfg.gauge.empty()) m = gauge_transform(m, cfg.gauge);
    return m;
}

SpectralPoint parse_point(const std::string& text, const Coordinates& coords) {
    SpectralPoint p = coords.zero;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("expected name=value in '" + item + "'");
        const std::string name = item.substr(0, eq);
        if (!coords.zero.has(name)) throw ConfigError("unknown coordinate '" + name + "'");
        try {
            const Complex v = eval(parse(item.substr(eq + 1)), {});
            if (v.imag() != 0.0) throw DomainError("coordinate values must be real");
            p.set(name, v.real());
        } catch (const Error& e) {
            throw ConfigError("bad value for '" + name + "': " + e.what());
        }
    }
    return p;
}

json to_json(const CheckResult& c) {
    json j{{"name", c.name}, {"max_abs", c.max_abs}, {"max_rel", c.max_rel}, {"tolerance", c.tolerance},
           {"asserted", c.asserted}, {"pass", c.pass}, {"argmax", c.argmax}};
    if (!c.extra.empty()) j["extra"] = c.extra;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

json to_json(const ResidualReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"family", r.family}, {"samples", r.samples}, {"resample_count", r.resample_count},
            {"checks", checks}, {"pass", r.pass}};
}

json to_json(const ClassificationReport& r) {
    json consts = json::object();
    for (const auto& [k, v] : r.constants) consts[k] = {v.real(), v.imag()};
    json j{{"branch", branch_name(r.branch)}, {"constants", consts}, {"confidence", r.confidence},
           {"degenerate", r.degenerate}};
    if (!r.x_f_definition.empty()) j["x_f_definition"] = r.x_f_definition;
    return j;
}

json to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

json make_report(const Config& cfg, json fields, bool pass) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json j{{"version", kReportVersion}, {"config", cfg.source}};
    for (auto& [k, v] : fields.items()) j[k] = v;
    j["pass"] = pass;
    j["meta"] = {{"timestamp", stamp}};
    return j;
}

}  // namespace ybx
