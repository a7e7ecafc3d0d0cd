#include "ladderkit/reports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ladderkit/spectral_oracle.hpp"

namespace ladderkit {

using nlohmann::json;

namespace {

constexpr double kBoundTolerance = 1e-8;  // min oracle eigenvalue >= alpha_k - this

bool within(double value, double tol) { return value <= tol; }  // false for NaN

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Checklist {
public:
    void add(json& row, const char* name, double value, double tol, int level,
             std::optional<Index> at = {}) {
        row[name] = number(value);
        rows_.push_back({level, name, value, within(value, tol)});
        if (rows_.back().pass) return;
        json f{{"check", name}, {"level", level}, {"residual", number(value)}, {"tolerance", tol}};
        if (at) f["n"] = *at;
        failures_.push_back(std::move(f));
    }
    void fail(json f) { failures_.push_back(std::move(f)); }
    [[nodiscard]] bool pass() const { return failures_.empty(); }
    [[nodiscard]] const json& failures() const { return failures_; }

    struct Row {
        int level;
        std::string check;
        double value;
        bool pass;
    };
    [[nodiscard]] const std::vector<Row>& rows() const { return rows_; }

private:
    json failures_ = json::array();
    std::vector<Row> rows_;
};

int pick_level(const ChainSpec& chain, std::optional<int> level, int fallback) {
    const int k = level.value_or(fallback);
    if (k < 0 || k > chain.depth()) {
        throw InputError("level k=" + std::to_string(k) + " outside [0, " +
                         std::to_string(chain.depth()) + "]");
    }
    return k;
}

OutputFormat pick_format(const ChainConfig& config, const ReportOptions& options) {
    return options.format.value_or(config.format);
}

json header(const char* command, const ChainConfig& config, const ChainSpec& chain) {
    json h{{"command", command},
           {"family", to_string(chain.family())},
           {"grid", {{"a", chain.grid().a()}, {"b", chain.grid().b()}}},
           {"levels", chain.depth()}};
    if (!config.preset.empty()) h["preset"] = config.preset;
    if (!config.faults.empty()) h["faults_injected"] = config.faults.size();
    return h;
}

json boundary_json(const BoundaryReport& b) {
    return {{"left", number(b.left)},
            {"right", number(b.right)},
            {"tolerance", b.tolerance},
            {"pass", b.pass}};
}

std::string render_json(const json& doc) { return doc.dump(2) + "\n"; }

// max_n |z x(n+1)| + |w x(n-1)| + |v x(n)| on [a, b]
double term_scale(const SecondOrderOperator& h, const LevelSequence& x, const Grid& g) {
    double s = 0.0;
    for (Index n = g.a(); n <= g.b(); ++n) {
        s = std::max(s, std::abs(h.z(n) * x(n + 1)) + std::abs(h.w(n) * x(n - 1)) +
                            std::abs(h.v(n) * x(n)));
    }
    return std::max(s, 1e-300);
}

struct IdentityResiduals {
    double lower = 0.0;
    double dual = 0.0;
};

IdentityResiduals identity_residuals(const ChainSpec& chain, int k, int trials, std::mt19937_64& rng) {
    const Grid& g = chain.grid();
    const auto H = compose_hamiltonian(chain, k, Side::lower);
    const bool has_dual = k < chain.depth();
    IdentityResiduals out;
    for (int t = 0; t < trials; ++t) {
        const auto x = random_sequence(g, k, rng);
        const double scale = term_scale(H, x, g);
        const auto hx = H.apply(x);
        const auto fx = apply_factorized(chain, k, x);
        std::optional<LevelSequence> dx;
        if (has_dual) dx = apply_annihilation(chain, k + 1, apply_creation(chain, k + 1, x));
        for (Index n = g.a(); n <= g.b(); ++n) {
            out.lower = std::max(out.lower, std::abs(fx(n) - hx(n)) / scale);
            if (dx) {
                const double d = (*dx)(n) + chain.alpha(k + 1) * x(n) - hx(n);
                out.dual = std::max(out.dual, std::abs(d) / scale);
            }
        }
    }
    return out;
}

std::string csv_line(std::initializer_list<std::string> cells) {
    std::string line;
    for (const auto& c : cells) {
        if (!line.empty()) line += ',';
        line += c;
    }
    return line + "\n";
}

std::string csv_number(const json& v) {
    return v.is_number() ? format_double(v.get<double>()) : std::string("nan");
}

}  // namespace

double descend_deviation(const ChainSpec& chain, int k) {
    if (k < 1 || k > chain.depth()) {
        throw InputError("descend check needs 1 <= k <= K (got k=" + std::to_string(k) + ")");
    }
    const auto d = descend_weight(chain.weight(k), chain.level(k).c);
    const auto& direct = chain.weight(k - 1);
    const Index a = chain.grid().a();
    const double scale = d(a) / direct(a);
    double worst = 0.0;
    for (Index n = a; n <= chain.grid().b() + 1; ++n) {
        const double ref = scale * direct(n);
        if (ref == 0.0 && d(n) == 0.0) continue;
        worst = std::max(worst, std::abs(d(n) - ref) / std::max(std::abs(ref), std::abs(d(n))));
    }
    return std::isfinite(scale) ? worst : std::numeric_limits<double>::infinity();
}

Report verify_report(const ChainConfig& config, const BuiltConfig& built,
                     const ReportOptions& options) {
    const ChainSpec& chain = built.chain;
    const Tolerances& tol = config.tolerances;
    const std::uint64_t seed = options.seed.value_or(config.rng_seed);
    const int K = chain.depth();

    const auto links = check_chain_conditions(chain);
    Checklist checks;
    json levels = json::array();
    for (int k = 0; k <= K; ++k) {
        json row{{"level", k}};
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
        const auto id = identity_residuals(chain, k, config.trials, rng);
        checks.add(row, "factorization", id.lower, tol.identity, k);
        if (k < K) {
            checks.add(row, "dual_factorization", id.dual, tol.condition, k);
            const auto& r = links[static_cast<std::size_t>(k)];
            checks.add(row, "f_link", r.f_link, tol.condition, k, r.worst_f);
            checks.add(row, "c_link", r.c_link, tol.condition, k, r.worst_c);
            checks.add(row, "b_link", r.b_link, tol.condition, k, r.worst_b);
            row["singular_points"] = r.singular_points;
        } else {
            row["dual_factorization"] = nullptr;
            row["f_link"] = nullptr;
            row["c_link"] = nullptr;
            row["b_link"] = nullptr;
        }
        const auto bnd = check_boundary(chain.weight(k), chain.level(k).b, tol.boundary);
        checks.add(row, "boundary_left", bnd.left, tol.boundary, k);
        checks.add(row, "boundary_right", bnd.right, tol.boundary, k);
        if (k >= 1) {
            const auto adj = verify_adjointness(chain, k, config.trials, seed, tol.boundary);
            checks.add(row, "adjointness", adj.max_relative_residual, tol.adjointness, k);
            checks.add(row, "descend", descend_deviation(chain, k), tol.weight, k);
        } else {
            row["adjointness"] = nullptr;
            row["descend"] = nullptr;
        }
        checks.add(row, "pearson",
                   pearson_residual(chain.weight(k), chain.level(k).b, chain.level(k).c),
                   tol.weight, k);
        levels.push_back(std::move(row));
    }

    json doc = header("verify", config, chain);
    doc["trials"] = config.trials;
    doc["rng_seed"] = seed;
    doc["tolerances"] = {{"condition", tol.condition}, {"identity", tol.identity},
                         {"boundary", tol.boundary},   {"adjointness", tol.adjointness},
                         {"weight", tol.weight}};
    if (built.diagnostics.consistency_gap != 0.0) {
        doc["consistency_gap"] = built.diagnostics.consistency_gap;
    }
    doc["per_level"] = std::move(levels);
    doc["failures"] = checks.failures();
    doc["pass"] = checks.pass();

    Report rep;
    rep.pass = checks.pass();
    if (pick_format(config, options) == OutputFormat::csv) {
        std::string out = "level,check,residual,pass\n";
        for (const auto& r : checks.rows()) {
            out += csv_line({std::to_string(r.level), r.check,
                             std::isfinite(r.value) ? format_double(r.value) : "nan",
                             r.pass ? "1" : "0"});
        }
        rep.text = out;
    } else {
        rep.text = render_json(doc);
    }
    rep.doc = std::move(doc);
    return rep;
}

Report spectrum_report(const ChainConfig& config, const BuiltConfig& built,
                       const ReportOptions& options) {
    const ChainSpec& chain = built.chain;
    const int k = pick_level(chain, options.level, chain.depth());
    const Tolerances& tol = config.tolerances;

    const auto ladder = solve_chain_eigens(chain, k);
    const auto H = compose_hamiltonian(chain, k, Side::lower);
    const auto& w = chain.weight(k);
    const auto M = realize_matrix(H, w);
    const auto oracle = eigensolve(M);
    const auto cmp = compare_spectra(ladder.pairs, oracle.values, tol.spectrum, &M, &w);
    const auto bnd = check_boundary(w, chain.level(k).b, tol.boundary);
    const double min_oracle = oracle.values.empty() ? 0.0 : oracle.values.front();

    json rows = json::array();
    double max_tail = 0.0;  // |u(b)| / |u|_inf of the symmetrized ladder vectors
    for (std::size_t i = 0; i < cmp.matches.size(); ++i) {
        const auto& m = cmp.matches[i];
        const auto& pair = ladder.pairs[i];
        const auto u = symmetrize(pair.vector, w);
        double peak = 0.0;
        for (double v : u) peak = std::max(peak, std::abs(v));
        const double tail = peak > 0.0 ? std::abs(u.back()) / peak : 0.0;
        max_tail = std::max(max_tail, tail);
        rows.push_back({{"p", k - m.ladder_index},
                        {"l", m.ladder_index},
                        {"alpha_p", m.lambda},
                        {"nearest_oracle", m.nearest_oracle},
                        {"abs_err", number(m.abs_err)},
                        {"eigen_residual", number(eigen_residual(chain, pair))},
                        {"vector_residual", number(m.vector_residual)},
                        {"tail", number(tail)},
                        {"pass", m.pass}});
    }
    std::sort(rows.begin(), rows.end(),
              [](const json& x, const json& y) { return x["p"].get<int>() < y["p"].get<int>(); });

    json doc = header("spectrum", config, chain);
    doc["level"] = k;
    doc["tolerance"] = tol.spectrum;
    doc["ladder"] = rows;
    doc["oracle_eigenvalues"] = oracle.values;
    doc["matrix_asymmetry"] = M.asymmetry;
    doc["min_oracle"] = min_oracle;
    doc["spectrum_bound"] = {{"alpha_k", chain.alpha(k)},
                             {"tolerance", kBoundTolerance},
                             {"pass", min_oracle >= chain.alpha(k) - kBoundTolerance}};
    doc["boundary"] = boundary_json(bnd);
    doc["max_tail"] = number(max_tail);
    doc["duplicate_eigenvalues"] = ladder.duplicate_eigenvalues;
    doc["pass"] = cmp.pass;

    Report rep;
    rep.pass = cmp.pass;
    if (pick_format(config, options) == OutputFormat::csv) {
        std::string out = "p,alpha_p,nearest_oracle,abs_err\n";
        for (const auto& r : rows) {
            out += csv_line({std::to_string(r["p"].get<int>()), csv_number(r["alpha_p"]),
                             csv_number(r["nearest_oracle"]), csv_number(r["abs_err"])});
        }
        rep.text = out;
    } else {
        rep.text = render_json(doc);
    }
    rep.doc = std::move(doc);
    return rep;
}

Report poly_report(const ChainConfig& config, const BuiltConfig& built,
                   const ReportOptions& options) {
    const ChainSpec& chain = built.chain;
    if (!chain.hypergeometric()) {
        throw InputError("poly needs a hypergeometric chain (family is " +
                         to_string(chain.family()) + ")");
    }
    const Grid& g = chain.grid();
    const int k = pick_level(chain, options.level, 0);
    const int span = static_cast<int>(g.b() - g.a());
    const int lmax = options.degree.value_or(std::min(6, span));
    if (lmax < 0) throw InputError("degree must be non-negative");
    const Tolerances& tol = config.tolerances;

    const auto polys = generate_polynomials(chain, k, lmax);
    const auto& w = chain.weight(k);
    const auto bnd = check_boundary(w, chain.level(k).b, tol.boundary);
    Checklist checks;
    if (!bnd.pass) {
        checks.fail({{"check", "boundary"}, {"level", k}, {"left", bnd.left}, {"right", bnd.right},
                     {"tolerance", bnd.tolerance}});
    }

    const std::size_t L = polys.size();
    std::vector<std::vector<double>> gram(L, std::vector<double>(L));
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t m = 0; m <= l; ++m) {
            gram[l][m] = gram[m][l] = inner_product(polys[l].values, polys[m].values, w);
        }
    }
    double offdiag = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t m = 0; m < l; ++m) {
            const double scale = std::sqrt(std::abs(gram[l][l]) * std::abs(gram[m][m]));
            offdiag = std::max(offdiag, std::abs(gram[l][m]) / scale);
        }
    }
    json gram_doc{{"level", k},
                  {"matrix", gram},
                  {"max_offdiag_relative", number(offdiag)},
                  {"tolerance", tol.eigen},
                  {"boundary", boundary_json(bnd)}};
    if (!within(offdiag, tol.eigen)) {
        checks.fail({{"check", "orthogonality"}, {"level", k}, {"residual", number(offdiag)},
                     {"tolerance", tol.eigen}});
    }

    json forms = json::array();
    for (const auto& P : polys) {
        const int l = P.degree;
        const auto form = hypergeometric_form(chain, k, l);
        json row{{"l", l},
                 {"sigma", form.sigma},
                 {"tau", form.tau},
                 {"lambda", form.lambda},
                 {"lambda_formula", form.lambda_formula},
                 {"fit_residual", number(form.fit_residual)}};
        checks.add(row, "eigen_residual", hypergeometric_residual(form, P.values, g), tol.eigen, k);
        const double lambda_gap = std::abs(form.lambda - form.lambda_formula);
        const double lambda_tol = 1e-12 * std::max(1.0, std::abs(form.lambda));
        checks.add(row, "lambda_gap", lambda_gap, lambda_tol, k);
        const auto deg = check_degree(P.values, l, tol.eigen);
        row["degree"] = {{"next_difference", number(deg.next_difference)},
                         {"leading_spread", number(deg.leading_spread)},
                         {"leading_value", number(deg.leading_value)},
                         {"exact", deg.exact_degree}};
        if (!deg.exact_degree) checks.fail({{"check", "degree"}, {"level", k}, {"l", l}});
        forms.push_back(std::move(row));
    }

    json columns = json::array({"n"});
    for (const auto& P : polys) columns.push_back("P" + std::to_string(P.degree));
    json table = json::array();
    for (Index n = g.a(); n <= g.b(); ++n) {
        json row = json::array({n});
        for (const auto& P : polys) row.push_back(P.values(n));
        table.push_back(std::move(row));
    }

    json doc = header("poly", config, chain);
    doc["level"] = k;
    doc["degree"] = lmax;
    doc["columns"] = columns;
    doc["table"] = table;
    doc["gram"] = gram_doc;
    doc["forms"] = forms;
    doc["failures"] = checks.failures();
    doc["pass"] = checks.pass();

    Report rep;
    rep.pass = checks.pass();
    if (pick_format(config, options) == OutputFormat::csv) {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out += (i ? "," : "") + columns[i].get<std::string>();
        }
        out += "\n";
        for (const auto& row : table) {
            std::string line = std::to_string(row[0].get<Index>());
            for (std::size_t i = 1; i < row.size(); ++i) line += "," + csv_number(row[i]);
            out += line + "\n";
        }
        rep.text = out;
        json side = gram_doc;
        side["forms"] = forms;
        side["failures"] = doc["failures"];
        side["pass"] = doc["pass"];
        rep.sidecar = render_json(side);
    } else {
        rep.text = render_json(doc);
    }
    rep.doc = std::move(doc);
    return rep;
}

Report weight_report(const ChainConfig& config, const BuiltConfig& built,
                     const ReportOptions& options) {
    const ChainSpec& chain = built.chain;
    const int k = pick_level(chain, options.level, 0);
    const Tolerances& tol = config.tolerances;
    const Grid& g = chain.grid();

    Checklist checks;
    std::optional<int> first_failure;
    for (int j = 0; j <= chain.depth(); ++j) {
        const auto& wj = chain.weight(j);
        bool positive = true;
        for (Index n = g.a(); n <= g.b(); ++n) positive &= wj(n) > 0.0;
        if (!positive) {
            checks.fail({{"check", "positivity"}, {"level", j}});
            if (!first_failure) first_failure = j;
        }
        if (j >= 1) {
            const double dev = descend_deviation(chain, j);
            if (!within(dev, tol.weight)) {
                checks.fail({{"check", "descend"}, {"level", j}, {"residual", number(dev)},
                             {"tolerance", tol.weight}});
                if (!first_failure) first_failure = j;
            }
        }
    }
    json row;
    const auto& w = chain.weight(k);
    checks.add(row, "pearson", pearson_residual(w, chain.level(k).b, chain.level(k).c),
               tol.weight, k);
    const auto bnd = check_boundary(w, chain.level(k).b, tol.boundary);
    const WeightLevel shown = config.normalize_weight ? w.normalized() : w;

    json doc = header("weight", config, chain);
    doc["level"] = k;
    doc["normalized"] = config.normalize_weight;
    doc["pearson_residual"] = row["pearson"];
    doc["boundary"] = boundary_json(bnd);
    doc["first_failure_level"] = first_failure ? json(*first_failure) : json(nullptr);
    doc["rho"] = to_json(shown);
    doc["failures"] = checks.failures();
    doc["pass"] = checks.pass();

    Report rep;
    rep.pass = checks.pass();
    if (pick_format(config, options) == OutputFormat::csv) {
        std::ostringstream meta;
        meta << "# level=" << k << "\n"
             << "# normalized=" << (config.normalize_weight ? "true" : "false") << "\n"
             << "# pearson_residual=" << csv_number(doc["pearson_residual"]) << "\n"
             << "# boundary_left=" << format_double(bnd.left) << "\n"
             << "# boundary_right=" << format_double(bnd.right) << "\n"
             << "# first_failure_level="
             << (first_failure ? std::to_string(*first_failure) : std::string("none")) << "\n"
             << "# pass=" << (rep.pass ? "true" : "false") << "\n";
        rep.text = meta.str() + to_csv(shown);
    } else {
        rep.text = render_json(doc);
    }
    rep.doc = std::move(doc);
    return rep;
}

json failure_report(const std::string& command, const std::string& error) {
    return {{"command", command}, {"pass", false}, {"error", error}};
}

}  // namespace ladderkit
