#include "ladderkit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ladderkit {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "ladderkit/1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError("config " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "must be an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) fail(path, "unknown key \"" + item.key() + "\"");
    }
}

const json& require_key(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path, std::string("missing required key \"") + key + "\"");
    return j.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

Index as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "must be an integer");
    return v.get<Index>();
}

double number_at(const json& j, const std::string& path, const char* key) {
    return as_number(require_key(j, path, key), path + "." + key);
}

double number_or(const json& j, const std::string& path, const char* key, double fallback) {
    return j.contains(key) ? as_number(j.at(key), path + "." + key) : fallback;
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

SeqFn parse_sequence(const json& v, const std::string& path) {
    if (v.is_number()) {
        const double c = as_number(v, path);
        return [c](Index) { return c; };
    }
    require_object(v, path);
    if (v.size() != 1) fail(path, "sequence must have exactly one of poly, table, exp");
    if (v.contains("poly")) {
        const auto coeffs = number_list(v.at("poly"), path + ".poly");
        if (coeffs.empty()) fail(path + ".poly", "needs at least one coefficient");
        return [coeffs](Index n) {
            const double x = static_cast<double>(n);
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
            return acc;
        };
    }
    if (v.contains("table")) {
        const json& t = v.at("table");
        const std::string tp = path + ".table";
        check_keys(t, tp, {"start", "values"});
        const Index start = as_integer(require_key(t, tp, "start"), tp + ".start");
        const auto values = number_list(require_key(t, tp, "values"), tp + ".values");
        if (values.empty()) fail(tp + ".values", "must not be empty");
        return [start, values, tp](Index n) {
            if (n < start || n >= start + static_cast<Index>(values.size())) {
                throw InputError("config " + tp + ": no value at n=" + std::to_string(n) +
                                 " (table covers [" + std::to_string(start) + ", " +
                                 std::to_string(start + static_cast<Index>(values.size()) - 1) +
                                 "])");
            }
            return values[static_cast<std::size_t>(n - start)];
        };
    }
    if (v.contains("exp")) {
        const json& e = v.at("exp");
        const std::string ep = path + ".exp";
        check_keys(e, ep, {"offset", "scale", "base"});
        const double offset = number_or(e, ep, "offset", 0.0);
        const double scale = number_or(e, ep, "scale", 1.0);
        const double base = number_at(e, ep, "base");
        if (!(base > 0.0)) fail(ep + ".base", "must be positive");
        return [offset, scale, base](Index n) {
            return offset + scale * std::pow(base, static_cast<double>(n));
        };
    }
    fail(path, "sequence must be a number or one of {poly, table, exp}");
}

std::array<double, 3> parse_alpha3(const json& doc) {
    const json& a = require_key(doc, "", "alpha");
    if (a.is_array()) {
        const auto v = number_list(a, ".alpha");
        if (v.size() != 3) fail(".alpha", "must hold exactly three values alpha0, alpha1, alpha2");
        return {v[0], v[1], v[2]};
    }
    check_keys(a, ".alpha", {"alpha0", "alpha1", "alpha2"});
    return {number_at(a, ".alpha", "alpha0"), number_at(a, ".alpha", "alpha1"),
            number_at(a, ".alpha", "alpha2")};
}

void forbid_alpha(const json& doc, const char* why) {
    if (doc.contains("alpha")) fail(".alpha", std::string("not allowed: ") + why);
}

HypergeometricParams parse_hypergeometric(const json& doc, const json& p, ChainConfig& cfg) {
    const std::string path = ".params";
    if (p.contains("preset")) {
        const json& name = p.at("preset");
        if (!name.is_string()) fail(path + ".preset", "must be a string");
        const auto family = classical_family_from_string(name.get<std::string>());
        if (!family) {
            fail(path + ".preset", "unknown preset \"" + name.get<std::string>() +
                                       "\" (expected charlier, meixner, kravchuk or hahn)");
        }
        forbid_alpha(doc, "a classical preset fixes alpha");
        ClassicalParams q;
        switch (*family) {
            case ClassicalFamily::charlier:
                check_keys(p, path, {"preset", "mu"});
                q.mu = number_at(p, path, "mu");
                break;
            case ClassicalFamily::meixner:
                check_keys(p, path, {"preset", "beta", "c"});
                q.beta = number_at(p, path, "beta");
                q.c = number_at(p, path, "c");
                break;
            case ClassicalFamily::kravchuk:
                check_keys(p, path, {"preset", "p"});
                q.p = number_at(p, path, "p");
                break;
            case ClassicalFamily::hahn:
                check_keys(p, path, {"preset", "alpha", "beta"});
                q.alpha = number_at(p, path, "alpha");
                q.beta = number_at(p, path, "beta");
                break;
        }
        cfg.preset = to_string(*family);
        auto hp = classical_preset(*family, q, cfg.grid, cfg.depth);
        hp.weight_seed = cfg.weight_seed;
        return hp;
    }
    check_keys(p, path, {"b00", "c00", "g_diff"});
    const auto alpha = parse_alpha3(doc);
    HypergeometricParams hp;
    hp.alpha0 = alpha[0];
    hp.alpha1 = alpha[1];
    hp.alpha2 = alpha[2];
    hp.b00 = number_at(p, path, "b00");
    hp.c00 = number_at(p, path, "c00");
    hp.g_diff = number_or(p, path, "g_diff", 0.0);
    hp.grid = cfg.grid;
    hp.depth = cfg.depth;
    hp.weight_seed = cfg.weight_seed;
    return hp;
}

Example1Params parse_example1(const json& doc, const json& p, const ChainConfig& cfg) {
    const std::string path = ".params";
    check_keys(p, path, {"c0", "f0", "F0", "G00", "G10"});
    const auto alpha = parse_alpha3(doc);
    Example1Params e;
    e.c0 = parse_sequence(require_key(p, path, "c0"), path + ".c0");
    e.f0 = parse_sequence(require_key(p, path, "f0"), path + ".f0");
    e.F0 = number_at(p, path, "F0");
    e.G00 = number_at(p, path, "G00");
    e.G10 = number_at(p, path, "G10");
    e.alpha0 = alpha[0];
    e.alpha1 = alpha[1];
    e.alpha2 = alpha[2];
    e.grid = cfg.grid;
    e.depth = cfg.depth;
    e.weight_seed = cfg.weight_seed;
    return e;
}

GeometricParams parse_geometric(const json& doc, const json& p, ChainConfig& cfg) {
    const std::string path = ".params";
    const auto K = static_cast<std::size_t>(cfg.depth);
    if (p.contains("preset")) {
        check_keys(p, path, {"preset", "gamma", "amplitude", "alpha0"});
        if (p.at("preset") != "standard") fail(path + ".preset", "unknown geometric preset");
        forbid_alpha(doc, "the geometric preset fixes alpha");
        cfg.preset = "standard";
        auto gp = geometric_preset(number_at(p, path, "gamma"), number_at(p, path, "amplitude"),
                                   number_or(p, path, "alpha0", 0.0), cfg.grid, cfg.depth);
        gp.weight_seed = cfg.weight_seed;
        return gp;
    }
    check_keys(p, path, {"gamma", "f0", "c0", "R0"});
    GeometricParams gp;
    const json& g = require_key(p, path, "gamma");
    if (g.is_number()) {
        gp.gamma.assign(K, as_number(g, path + ".gamma"));
    } else {
        gp.gamma = number_list(g, path + ".gamma");
    }
    gp.f0 = parse_sequence(require_key(p, path, "f0"), path + ".f0");
    gp.c0 = parse_sequence(require_key(p, path, "c0"), path + ".c0");
    gp.R0 = number_list(require_key(p, path, "R0"), path + ".R0");
    gp.alpha = number_list(require_key(doc, "", "alpha"), ".alpha");
    if (gp.alpha.size() != K + 1) {
        fail(".alpha", "geometric family needs K+1 = " + std::to_string(K + 1) + " values");
    }
    gp.grid = cfg.grid;
    gp.weight_seed = cfg.weight_seed;
    return gp;
}

ExplicitParams parse_explicit(const json& doc, const json& p) {
    const std::string path = ".params";
    check_keys(p, path, {"z", "w", "v"});
    forbid_alpha(doc, "alpha is recovered from the coefficients");
    return {parse_sequence(require_key(p, path, "z"), path + ".z"),
            parse_sequence(require_key(p, path, "w"), path + ".w"),
            parse_sequence(require_key(p, path, "v"), path + ".v")};
}

void parse_tolerances(const json& t, Tolerances& tol) {
    const std::string path = ".tolerances";
    check_keys(t, path,
               {"condition", "identity", "boundary", "adjointness", "eigen", "spectrum", "weight"});
    auto read = [&](const char* key, double& slot) {
        if (!t.contains(key)) return;
        slot = as_number(t.at(key), path + "." + key);
        if (!(slot >= 0.0)) fail(path + "." + key, "must be non-negative");
    };
    read("condition", tol.condition);
    read("identity", tol.identity);
    read("boundary", tol.boundary);
    read("adjointness", tol.adjointness);
    read("eigen", tol.eigen);
    read("spectrum", tol.spectrum);
    read("weight", tol.weight);
}

}  // namespace

std::string to_string(OutputFormat format) {
    return format == OutputFormat::csv ? "csv" : "json";
}

ChainConfig parse_config(const json& doc) {
    check_keys(doc, "(root)",
               {"schema", "family", "grid", "levels", "alpha", "params", "weight", "tolerances",
                "verification", "output", "faults", "description"});
    const json& schema = require_key(doc, "(root)", "schema");
    if (schema != kSchema) {
        fail(".schema", std::string("unsupported schema (expected \"") + kSchema + "\")");
    }
    if (doc.contains("description") && !doc.at("description").is_string()) {
        fail(".description", "must be a string");
    }
    ChainConfig cfg;

    const json& grid = require_key(doc, "(root)", "grid");
    check_keys(grid, ".grid", {"a", "b"});
    const Index a = as_integer(require_key(grid, ".grid", "a"), ".grid.a");
    const Index b = as_integer(require_key(grid, ".grid", "b"), ".grid.b");
    if (a >= b) fail(".grid", "requires a < b");
    cfg.grid = Grid(a, b);

    const Index K = as_integer(require_key(doc, "(root)", "levels"), ".levels");
    if (K < 0) fail(".levels", "must be non-negative");
    if (K > b - a) fail(".levels", "K=" + std::to_string(K) + " exceeds the grid capacity b-a");
    cfg.depth = static_cast<int>(K);

    if (doc.contains("weight")) {
        const json& w = doc.at("weight");
        check_keys(w, ".weight", {"seed", "normalize"});
        cfg.weight_seed = number_or(w, ".weight", "seed", 1.0);
        if (!(cfg.weight_seed > 0.0)) fail(".weight.seed", "must be positive");
        if (w.contains("normalize")) {
            if (!w.at("normalize").is_boolean()) fail(".weight.normalize", "must be a boolean");
            cfg.normalize_weight = w.at("normalize").get<bool>();
        }
    }
    if (doc.contains("tolerances")) parse_tolerances(doc.at("tolerances"), cfg.tolerances);
    if (doc.contains("verification")) {
        const json& v = doc.at("verification");
        check_keys(v, ".verification", {"trials", "rng_seed"});
        if (v.contains("trials")) {
            const Index t = as_integer(v.at("trials"), ".verification.trials");
            if (t < 1 || t > 100000) fail(".verification.trials", "must lie in [1, 100000]");
            cfg.trials = static_cast<int>(t);
        }
        if (v.contains("rng_seed")) {
            const json& s = v.at("rng_seed");
            if (!s.is_number_unsigned()) fail(".verification.rng_seed", "must be a non-negative integer");
            cfg.rng_seed = s.get<std::uint64_t>();
        }
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_keys(o, ".output", {"format", "path"});
        if (o.contains("format")) {
            const json& f = o.at("format");
            if (f == "json") {
                cfg.format = OutputFormat::json;
            } else if (f == "csv") {
                cfg.format = OutputFormat::csv;
            } else {
                fail(".output.format", "must be \"json\" or \"csv\"");
            }
        }
        if (o.contains("path")) {
            if (!o.at("path").is_string() || o.at("path").get<std::string>().empty()) {
                fail(".output.path", "must be a non-empty string");
            }
            cfg.output_path = o.at("path").get<std::string>();
        }
    }
    if (doc.contains("faults")) {
        const json& faults = doc.at("faults");
        if (!faults.is_array()) fail(".faults", "must be an array");
        for (std::size_t i = 0; i < faults.size(); ++i) {
            const std::string fp = ".faults[" + std::to_string(i) + "]";
            const json& f = faults[i];
            check_keys(f, fp, {"field", "level", "n", "delta"});
            Fault fault;
            const json& field = require_key(f, fp, "field");
            if (field == "b") {
                fault.field = 'b';
            } else if (field == "c") {
                fault.field = 'c';
            } else if (field == "f") {
                fault.field = 'f';
            } else {
                fail(fp + ".field", "must be \"b\", \"c\" or \"f\"");
            }
            const Index level = as_integer(require_key(f, fp, "level"), fp + ".level");
            if (level < 0 || level > K) fail(fp + ".level", "outside [0, K]");
            fault.level = static_cast<int>(level);
            fault.n = as_integer(require_key(f, fp, "n"), fp + ".n");
            fault.delta = number_at(f, fp, "delta");
            cfg.faults.push_back(fault);
        }
    }

    const json& family = require_key(doc, "(root)", "family");
    if (!family.is_string()) fail(".family", "must be a string");
    const std::string name = family.get<std::string>();
    static const json kEmpty = json::object();
    const json& params = doc.contains("params") ? doc.at("params") : kEmpty;
    require_object(params, ".params");
    if (name == "hypergeometric") {
        cfg.family = Family::hypergeometric;
        cfg.params = parse_hypergeometric(doc, params, cfg);
    } else if (name == "example1") {
        cfg.family = Family::example1;
        cfg.params = parse_example1(doc, params, cfg);
    } else if (name == "geometric") {
        cfg.family = Family::geometric;
        cfg.params = parse_geometric(doc, params, cfg);
    } else if (name == "explicit") {
        cfg.family = Family::explicit_coefficients;
        cfg.params = parse_explicit(doc, params);
    } else {
        fail(".family", "unknown family \"" + name +
                            "\" (expected hypergeometric, example1, geometric or explicit)");
    }
    return cfg;
}

ChainConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ChainConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

BuiltConfig build_chain(const ChainConfig& config) {
    BuiltConfig out = std::visit(
        [&](const auto& p) -> BuiltConfig {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HypergeometricParams>) {
                return {build_hypergeometric(p), {}};
            } else if constexpr (std::is_same_v<T, Example1Params>) {
                auto b = build_example1(p);
                return {std::move(b.chain), std::move(b.diagnostics)};
            } else if constexpr (std::is_same_v<T, GeometricParams>) {
                if (p.depth() != config.depth) {
                    throw InputError("config .alpha: geometric family needs K+1 values");
                }
                auto b = build_geometric(p);
                return {std::move(b.chain), std::move(b.diagnostics)};
            } else {
                auto b = build_explicit(config.grid, config.depth, p.z, p.w, p.v, config.weight_seed);
                return {std::move(b.chain), std::move(b.diagnostics)};
            }
        },
        config.params);
    for (const Fault& f : config.faults) {
        LevelData d = out.chain.level(f.level);
        LevelSequence& s = f.field == 'b' ? d.b : f.field == 'c' ? d.c : d.f;
        if (!s.range().contains(f.n)) {
            throw InputError("fault index n=" + std::to_string(f.n) + " outside the stored range [" +
                             std::to_string(s.range().first) + ", " +
                             std::to_string(s.range().last) + "]");
        }
        s = s.with_value(f.n, s(f.n) + f.delta);
        out.chain = out.chain.with_level_data(d);
    }
    return out;
}

}  // namespace ladderkit
