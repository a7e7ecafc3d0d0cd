#include "ladderkit/chain_families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ladderkit {

namespace {

// |x - y| / max(1, |x|, |y|)
double mixed_gap(double x, double y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

void require_depth(int depth, const Grid& grid, int lowest) {
    if (depth < lowest) {
        throw InputError("chain depth K must be at least " + std::to_string(lowest) + " (got " +
                         std::to_string(depth) + ")");
    }
    if (depth > grid.b() - grid.a()) {
        throw InputError("chain depth K=" + std::to_string(depth) +
                         " exceeds the grid capacity b-a=" + std::to_string(grid.b() - grid.a()));
    }
}

void require_finite(std::initializer_list<double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
    }
}

std::vector<double> closed_form_alphas(double a0, double a1, double a2, int depth) {
    std::vector<double> out;
    for (int k = 0; k <= depth; ++k) out.push_back(alpha_closed_form(a0, a1, a2, k));
    return out;
}

void require_conditions(const ChainSpec& chain) {
    if (chain.depth() < 1) return;
    for (const ConditionResiduals& r : check_chain_conditions(chain)) {
        const std::pair<const char*, std::pair<double, Index>> items[] = {
            {"f_link", {r.f_link, r.worst_f}},
            {"c_link", {r.c_link, r.worst_c}},
            {"b_link", {r.b_link, r.worst_b}},
        };
        for (const auto& [name, value] : items) {
            if (!(value.first <= kBuilderTolerance)) {
                throw CheckError(std::string(name) + " residual " + format_double(value.first) +
                                 " between levels " + std::to_string(r.level) + " and " +
                                 std::to_string(r.level + 1) + " at n=" +
                                 std::to_string(value.second));
            }
        }
    }
}

std::vector<LevelData> copy_levels(const ChainSpec& chain) {
    std::vector<LevelData> out;
    for (int k = 0; k <= chain.depth(); ++k) out.push_back(chain.level(k));
    return out;
}

ChainSpec relabel(const ChainSpec& chain, Family family,
                  std::optional<HypergeometricParams> hyper) {
    const auto alphas = chain.alphas();
    return ChainSpec(chain.grid(), family, copy_levels(chain),
                     std::vector<double>(alphas.begin(), alphas.end()), chain.weight_seed(),
                     std::move(hyper));
}

double power(double base, Index e) { return std::pow(base, static_cast<double>(e)); }

}  // namespace

double alpha_closed_form(double alpha0, double alpha1, double alpha2, int k) {
    const double kk = k;
    return alpha0 + kk * (alpha1 - alpha0) + kk * (kk - 1.0) / 2.0 * (alpha2 - 2.0 * alpha1 + alpha0);
}

BuiltChain build_example1(const Example1Params& p) {
    if (!p.c0 || !p.f0) throw InputError("example1 needs both c0 and f0");
    require_depth(p.depth, p.grid, 0);
    require_finite({p.alpha0, p.alpha1, p.alpha2, p.F0, p.G00, p.G10}, "example1 constants");
    const int K = p.depth;
    const int kmax = std::max(K, 2);
    const IndexRange work = p.grid.padded(K + 2);
    const double D = p.alpha2 - 2.0 * p.alpha1 + p.alpha0;
    const double gd = p.G00 - p.G10;

    auto F = [&](Index n) {
        const double fm = p.f0(n) - 1.0;
        return fm * fm * p.c0(n);
    };
    for (Index n = work.first - 1 - kmax; n <= work.last; ++n) {
        const double x = static_cast<double>(n);
        const double quad = p.F0 + x * gd - x * (x + 1.0) / 2.0 * D;
        if (mixed_gap(F(n), quad) > kBuilderTolerance) {
            throw CheckError("example1 constraint violated at n=" + std::to_string(n) +
                             ": (f0-1)^2 c0 = " + format_double(F(n)) +
                             ", quadratic gives " + format_double(quad));
        }
    }

    const auto alpha = [&](int k) { return alpha_closed_form(p.alpha0, p.alpha1, p.alpha2, k); };
    const auto G0 = [&](int k) {
        const double kk = k;
        return p.G00 - kk * gd - kk * (kk - 1.0) / 2.0 * D;
    };
    // b(n+1) = F(n-k) - G_k(0) - n (alpha_{k+1} - alpha_k), any k.
    const auto b_from = [&](int k, Index n) {
        const Index m = n - 1;
        return F(m - k) - G0(k) - static_cast<double>(m) * (alpha(k + 1) - alpha(k));
    };

    FamilyDiagnostics diag;
    for (int k = 0; k <= K; ++k) diag.G_k0.push_back(G0(k));
    for (int k = 1; k <= kmax; ++k) {
        for (Index n = work.first; n <= work.last; ++n) {
            diag.consistency_gap = std::max(diag.consistency_gap, mixed_gap(b_from(k, n), b_from(0, n)));
        }
    }
    if (diag.consistency_gap > kBuilderTolerance) {
        throw CheckError("b_0 depends on the level it is computed from (gap " +
                         format_double(diag.consistency_gap) + ")");
    }
    diag.F_of_n = LevelSequence::generate(0, p.grid.ghosted(), F);

    std::vector<LevelData> levels;
    for (int k = 0; k <= K; ++k) {
        levels.push_back({k, LevelSequence::generate(k, work, [&](Index n) { return b_from(0, n); }),
                          LevelSequence::generate(k, work, [&](Index n) { return p.c0(n - k); }),
                          LevelSequence::generate(k, work, [&](Index n) { return p.f0(n - k); })});
    }
    ChainSpec chain(p.grid, Family::example1, std::move(levels),
                    closed_form_alphas(p.alpha0, p.alpha1, p.alpha2, K), p.weight_seed);
    require_conditions(chain);
    return {std::move(chain), std::move(diag)};
}

double hypergeometric_c0(const HypergeometricParams& p, Index n) {
    const double x = static_cast<double>(n);
    const double D = p.alpha2 - 2.0 * p.alpha1 + p.alpha0;
    return p.c00 + x * p.g_diff - x * (x + 1.0) / 2.0 * D;
}

double hypergeometric_b0(const HypergeometricParams& p, Index n, int k) {
    const double dalpha = alpha_closed_form(p.alpha0, p.alpha1, p.alpha2, k + 1) -
                          alpha_closed_form(p.alpha0, p.alpha1, p.alpha2, k);
    return p.b00 - static_cast<double>(n) * dalpha - hypergeometric_c0(p, -1 - k) +
           hypergeometric_c0(p, n - 1 - k);
}

ChainSpec build_hypergeometric(const HypergeometricParams& p) {
    require_depth(p.depth, p.grid, 0);
    require_finite({p.alpha0, p.alpha1, p.alpha2, p.b00, p.c00, p.g_diff}, "hypergeometric parameters");
    const int K = p.depth;
    const IndexRange work = p.grid.padded(K + 2);
    for (int k = 1; k <= std::max(K, 2); ++k) {
        for (Index n = work.first; n <= work.last; ++n) {
            const double gap = mixed_gap(hypergeometric_b0(p, n, k), hypergeometric_b0(p, n, 0));
            if (gap > kBuilderTolerance) {
                throw CheckError("b_0 computed at level " + std::to_string(k) +
                                 " differs from level 0 at n=" + std::to_string(n));
            }
        }
    }
    std::vector<LevelData> levels;
    for (int k = 0; k <= K; ++k) {
        levels.push_back(
            {k, LevelSequence::generate(k, work, [&](Index n) { return hypergeometric_b0(p, n); }),
             LevelSequence::generate(k, work, [&](Index n) { return hypergeometric_c0(p, n - k); }),
             LevelSequence::zeros(k, work)});
    }
    ChainSpec chain(p.grid, Family::hypergeometric, std::move(levels),
                    closed_form_alphas(p.alpha0, p.alpha1, p.alpha2, K), p.weight_seed, p);
    require_conditions(chain);
    return chain;
}

Example1Params as_example1(const HypergeometricParams& p) {
    Example1Params e;
    e.c0 = [p](Index n) { return hypergeometric_c0(p, n); };
    e.f0 = [](Index) { return 0.0; };
    e.alpha0 = p.alpha0;
    e.alpha1 = p.alpha1;
    e.alpha2 = p.alpha2;
    e.F0 = p.c00;
    e.G00 = p.c00 - p.b00 + (p.alpha1 - p.alpha0) - p.g_diff;
    e.G10 = e.G00 - p.g_diff;
    e.grid = p.grid;
    e.depth = p.depth;
    e.weight_seed = p.weight_seed;
    return e;
}

double HypergeometricForm::sigma_at(Index n) const {
    const double x = static_cast<double>(n);
    return sigma[0] + sigma[1] * x + sigma[2] * x * x;
}

double HypergeometricForm::tau_at(Index n) const {
    return tau[0] + tau[1] * static_cast<double>(n);
}

HypergeometricForm hypergeometric_form(const ChainSpec& chain, int k, int l) {
    const auto& hp = chain.hypergeometric();
    if (!hp) throw InputError("hypergeometric form needs a hypergeometric chain");
    if (l < 0) throw InputError("ladder index must be non-negative");
    const LevelData& d = chain.level(k);
    const Grid& g = chain.grid();
    const Index n0 = g.a();
    auto sigma = [&](Index n) { return -d.b(n); };
    auto tau = [&](Index n) { return d.b(n) - d.c(n); };

    HypergeometricForm form;
    form.level = k;
    form.ladder_index = l;
    const double x0 = static_cast<double>(n0);
    const double s2 = (sigma(n0 + 1) - 2.0 * sigma(n0) + sigma(n0 - 1)) / 2.0;
    const double s1 = (sigma(n0 + 1) - sigma(n0 - 1)) / 2.0 - 2.0 * s2 * x0;
    form.sigma = {sigma(n0) - s1 * x0 - s2 * x0 * x0, s1, s2};
    const double t1 = tau(n0 + 1) - tau(n0);
    form.tau = {tau(n0) - t1 * x0, t1};
    for (Index n = g.a() - 1; n <= g.b() + 1; ++n) {
        form.fit_residual = std::max({form.fit_residual, mixed_gap(form.sigma_at(n), sigma(n)),
                                      mixed_gap(form.tau_at(n), tau(n))});
    }
    form.lambda = chain.alpha(k) - alpha_closed_form(hp->alpha0, hp->alpha1, hp->alpha2, k - l);
    const double ll = l;
    form.lambda_formula = -ll * (t1 + (ll - 1.0) / 2.0 * (2.0 * s2));
    return form;
}

double hypergeometric_residual(const HypergeometricForm& form, const LevelSequence& P,
                               const Grid& grid) {
    double worst = 0.0;
    for (Index n = grid.a(); n <= grid.b(); ++n) {
        const double dn = P(n + 1) - 2.0 * P(n) + P(n - 1);
        const double fw = P(n + 1) - P(n);
        worst = std::max(worst,
                         std::abs(form.sigma_at(n) * dn + form.tau_at(n) * fw + form.lambda * P(n)));
    }
    const double norm = max_abs(P, grid.interior());
    return norm > 0.0 ? worst / norm : worst;
}

std::vector<GeneratedPolynomial> generate_polynomials(const ChainSpec& chain, int k, int lmax) {
    const auto& hp = chain.hypergeometric();
    if (!hp) throw InputError("polynomials need a hypergeometric chain");
    (void)chain.level(k);
    const Grid& g = chain.grid();
    if (lmax < 0 || lmax > g.b() - g.a()) {
        throw InputError("degree " + std::to_string(lmax) + " exceeds the grid capacity b-a=" +
                         std::to_string(g.b() - g.a()));
    }
    const IndexRange out_range = g.ghosted();
    std::vector<GeneratedPolynomial> out;
    for (int l = 0; l <= lmax; ++l) {
        const IndexRange start{out_range.first - l, out_range.last};
        std::vector<double> y(static_cast<std::size_t>(start.size()), 1.0);
        Index first_valid = start.first;
        // Innermost factor first: i = l-1 down to 0.
        for (int i = l - 1; i >= 0; --i) {
            for (Index n = start.last; n > first_valid; --n) {
                const auto s = static_cast<std::size_t>(n - start.first);
                y[s] = hypergeometric_b0(*hp, n) * y[s - 1] - hypergeometric_c0(*hp, n - k + i) * y[s];
            }
            ++first_valid;
        }
        std::vector<double> vals(y.begin() + l, y.end());
        out.push_back({l, alpha_closed_form(hp->alpha0, hp->alpha1, hp->alpha2, k - l),
                       LevelSequence(k, out_range.first, std::move(vals))});
    }
    return out;
}

DegreeReport check_degree(const LevelSequence& P, int degree, double tol) {
    if (degree < 0) throw InputError("degree must be non-negative");
    const IndexRange r = P.valid();
    if (r.size() < degree + 2) throw InputError("sequence too short for a degree check");
    std::vector<double> d(P.values().begin() + (r.first - P.range().first),
                          P.values().begin() + (r.last - P.range().first) + 1);
    double norm = 0.0;
    for (double v : d) norm = std::max(norm, std::abs(v));
    if (norm == 0.0) return {};
    auto diff = [](std::vector<double>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
        v.pop_back();
    };
    for (int i = 0; i < degree; ++i) diff(d);
    DegreeReport rep;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const double spread = *hi - *lo;
    rep.leading_spread = spread / norm;
    double sum = 0.0;
    for (double v : d) sum += v;
    rep.leading_value = sum / static_cast<double>(d.size());
    diff(d);
    for (double v : d) rep.next_difference = std::max(rep.next_difference, std::abs(v) / norm);
    rep.exact_degree = rep.next_difference <= tol && rep.leading_spread <= tol &&
                       rep.leading_value != 0.0 &&
                       std::abs(rep.leading_value) > 1e3 * spread;
    return rep;
}

std::optional<ClassicalFamily> classical_family_from_string(const std::string& name) {
    if (name == "charlier") return ClassicalFamily::charlier;
    if (name == "meixner") return ClassicalFamily::meixner;
    if (name == "kravchuk") return ClassicalFamily::kravchuk;
    if (name == "hahn") return ClassicalFamily::hahn;
    return std::nullopt;
}

std::string to_string(ClassicalFamily family) {
    switch (family) {
        case ClassicalFamily::charlier: return "charlier";
        case ClassicalFamily::meixner: return "meixner";
        case ClassicalFamily::kravchuk: return "kravchuk";
        case ClassicalFamily::hahn: return "hahn";
    }
    return "unknown";
}

HypergeometricParams classical_preset(ClassicalFamily family, const ClassicalParams& q,
                                      const Grid& grid, int depth) {
    require_depth(depth, grid, 0);
    require_finite({q.mu, q.beta, q.c, q.p, q.alpha}, "classical parameters");
    const double N = static_cast<double>(grid.b() - grid.a());
    // Pearson data b(m), c(m) in the shifted variable m = n - a.
    std::function<double(double)> b, c;
    switch (family) {
        case ClassicalFamily::charlier:
            if (!(q.mu > 0.0)) throw InputError("charlier requires mu > 0");
            b = [](double m) { return m; };
            c = [mu = q.mu](double) { return mu; };
            break;
        case ClassicalFamily::meixner:
            if (!(q.c > 0.0 && q.c < 1.0)) throw InputError("meixner requires 0 < c < 1");
            if (!(q.beta > depth)) {
                throw InputError("meixner requires beta > K so every level has a positive weight");
            }
            b = [](double m) { return m; };
            c = [cc = q.c, beta = q.beta](double m) { return cc * (m + beta); };
            break;
        case ClassicalFamily::kravchuk:
            if (!(q.p > 0.0 && q.p < 1.0)) throw InputError("kravchuk requires 0 < p < 1");
            b = [p = q.p](double m) { return (1.0 - p) * m; };
            c = [p = q.p, N](double m) { return p * (N - m); };
            break;
        case ClassicalFamily::hahn:
            if (!(q.alpha > depth - 1.0)) {
                throw InputError("hahn requires alpha > K-1 so every level has a positive weight");
            }
            if (!(q.beta > -1.0) || q.beta == 0.0) {
                throw InputError("hahn requires beta > -1 and beta != 0");
            }
            b = [beta = q.beta, N](double m) { return m * (beta + N + 1.0 - m); };
            c = [alpha = q.alpha, N](double m) { return (m + alpha + 1.0) * (N - m); };
            break;
    }
    const double a = static_cast<double>(grid.a());
    auto c0 = [&](double n) { return c(n - a); };
    auto b0 = [&](double n) { return b(n - a); };
    HypergeometricParams hp;
    hp.grid = grid;
    hp.depth = depth;
    hp.c00 = c0(0.0);
    hp.g_diff = c0(0.0) - c0(-1.0);
    const double D = -(c0(1.0) - 2.0 * c0(0.0) + c0(-1.0));
    hp.b00 = b0(0.0);
    hp.alpha0 = 0.0;
    hp.alpha1 = b0(0.0) - b0(1.0) - c0(-1.0) + c0(0.0);
    hp.alpha2 = 2.0 * hp.alpha1 - hp.alpha0 + D;
    return hp;
}

double geometric_sum(double q, Index n) {
    double sum = 0.0;
    if (n >= 0) {
        double term = 1.0;
        for (Index j = 0; j < n; ++j) {
            sum += term;
            term *= q;
        }
        return sum;
    }
    for (Index j = n; j <= -1; ++j) sum += power(q, j);
    return -sum;
}

namespace {

void validate_geometric(const GeometricParams& p) {
    const int K = p.depth();
    if (K < 1) throw InputError("geometric chain needs at least two alpha values");
    if (static_cast<int>(p.gamma.size()) != K) {
        throw InputError("geometric chain with K=" + std::to_string(K) + " needs " +
                         std::to_string(K) + " gamma values, got " + std::to_string(p.gamma.size()));
    }
    if (static_cast<int>(p.R0.size()) != K) {
        throw InputError("geometric chain with K=" + std::to_string(K) + " needs " +
                         std::to_string(K) + " R0 values, got " + std::to_string(p.R0.size()));
    }
    for (std::size_t k = 0; k < p.gamma.size(); ++k) {
        const double g = p.gamma[k];
        if (!std::isfinite(g) || g == 0.0 || g == 1.0) {
            throw InputError("gamma_" + std::to_string(k) + " = " + format_double(g) +
                             " violates gamma not in {0, 1}");
        }
    }
    for (double v : p.alpha) require_finite({v}, "alpha values");
    for (double v : p.R0) require_finite({v}, "R0 values");
}

double cumulative_gamma(const GeometricParams& p, int k) {
    double g = 1.0;
    for (int j = 0; j < k; ++j) g *= p.gamma[static_cast<std::size_t>(j)];
    return g;
}

double geometric_F(const GeometricParams& p, Index n) {
    const double fm = p.f0(n) - 1.0;
    return fm * fm * p.c0(n);
}

double closed_R(const GeometricParams& p, int k, Index n) {
    const auto kk = static_cast<std::size_t>(k);
    const double g = p.gamma[kk];
    return power(1.0 / g, n) * p.R0[kk] + geometric_sum(1.0 / g, n) * (p.alpha[kk + 1] - p.alpha[kk]);
}

double closed_S(const GeometricParams& p, int k, Index n) {
    const auto kk = static_cast<std::size_t>(k);
    const double gk = p.gamma[kk];
    const double gk1 = p.gamma[kk + 1];
    const double q = 1.0 / (gk * gk1);
    const double da_k = p.alpha[kk + 1] - p.alpha[kk];
    const double da_k1 = p.alpha[kk + 2] - p.alpha[kk + 1];
    const double s0 = geometric_F(p, -k) / cumulative_gamma(p, k);
    double sum_k = 0.0;
    double sum_k1 = 0.0;
    double qi = 1.0;
    for (Index i = 0; i < n; ++i) {
        sum_k += qi * geometric_sum(1.0 / gk, n - i);
        sum_k1 += qi * geometric_sum(1.0 / gk1, n - i);
        qi *= q;
    }
    return power(q, n) * s0 - power(1.0 / gk1, n + 1) * geometric_sum(1.0 / gk, n) * p.R0[kk + 1] +
           power(1.0 / gk, n) * geometric_sum(1.0 / gk1, n) * p.R0[kk] - da_k1 / gk1 * sum_k1 +
           da_k * sum_k;
}

}  // namespace

GeometricClosedForms geometric_closed_forms(const GeometricParams& p, int k, Index n) {
    validate_geometric(p);
    const int K = p.depth();
    if (k < 0 || k > K - 1) {
        throw InputError("R_k needs 0 <= k <= K-1 (got k=" + std::to_string(k) + ")");
    }
    GeometricClosedForms out;
    out.R = closed_R(p, k, n);
    if (k <= K - 2 && n >= 0) {
        if (!p.f0 || !p.c0) throw InputError("S_k needs f0 and c0");
        out.S = closed_S(p, k, n);
    }
    return out;
}

BuiltChain build_geometric(const GeometricParams& p) {
    validate_geometric(p);
    if (!p.f0 || !p.c0) throw InputError("geometric chain needs both f0 and c0");
    const int K = p.depth();
    require_depth(K, p.grid, 1);
    const IndexRange work = p.grid.padded(K + 2);

    // b_k(n) from the level-k form b_k(n+1) = (E_k(n) - R_k(n)) / gamma_k, E_k(n) = F(n-k) / Gamma_k.
    auto b_from = [&](int k, Index n) {
        const Index m = n - 1;
        const double e = geometric_F(p, m - k) / cumulative_gamma(p, k);
        return (e - closed_R(p, k, m)) / p.gamma[static_cast<std::size_t>(k)];
    };

    FamilyDiagnostics diag;
    for (int k = 1; k <= K - 1; ++k) {
        const double gk = cumulative_gamma(p, k);
        for (Index n = work.first; n <= work.last; ++n) {
            const double gap = mixed_gap(b_from(k, n), gk * b_from(0, n));
            diag.consistency_gap = std::max(diag.consistency_gap, gap);
            if (gap > kBuilderTolerance) {
                throw CheckError("geometric consistency fails at level " + std::to_string(k) +
                                 ", n=" + std::to_string(n) + ": b_k from R_k is " +
                                 format_double(b_from(k, n)) + ", gamma product gives " +
                                 format_double(gk * b_from(0, n)));
            }
        }
    }
    for (int k = 0; k <= K - 2; ++k) {
        const double gk = cumulative_gamma(p, k);
        for (Index n = 0; n <= work.last; ++n) {
            const double direct = geometric_F(p, n - k) / gk;
            const double gap = mixed_gap(closed_S(p, k, n), direct);
            diag.consistency_gap = std::max(diag.consistency_gap, gap);
            if (gap > kBuilderTolerance) {
                throw CheckError("geometric consistency fails at level " + std::to_string(k) +
                                 ", n=" + std::to_string(n) + ": S_k closed form " +
                                 format_double(closed_S(p, k, n)) + " vs data " +
                                 format_double(direct));
            }
        }
    }

    const IndexRange ghost = p.grid.ghosted();
    for (int k = 0; k <= K - 1; ++k) {
        diag.R_k_table.push_back(
            LevelSequence::generate(k, ghost, [&](Index n) { return closed_R(p, k, n); }));
    }
    const IndexRange s_range{std::max<Index>(ghost.first, 0), ghost.last};
    if (!s_range.empty()) {
        for (int k = 0; k <= K - 2; ++k) {
            diag.S_k_table.push_back(
                LevelSequence::generate(k, s_range, [&](Index n) { return closed_S(p, k, n); }));
        }
    }

    std::vector<SeqFn> ratios;
    for (int k = 0; k <= K; ++k) {
        ratios.push_back([g = cumulative_gamma(p, k)](Index) { return g; });
    }
    const auto propagated = propagate_level_data(ratios, p.f0, p.c0, K, work);
    std::vector<LevelData> levels;
    for (int k = 0; k <= K; ++k) {
        const double gk = cumulative_gamma(p, k);
        const auto& pl = propagated[static_cast<std::size_t>(k)];
        levels.push_back(
            {k, LevelSequence::generate(k, work, [&](Index n) { return gk * b_from(0, n); }),
             pl.c, pl.f});
    }
    ChainSpec chain(p.grid, Family::geometric, std::move(levels), p.alpha, p.weight_seed);
    require_conditions(chain);
    return {std::move(chain), std::move(diag)};
}

GeometricParams geometric_preset(double gamma, double amplitude, double alpha0, const Grid& grid,
                                 int depth) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("geometric preset requires 0 < gamma < 1");
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw InputError("geometric preset requires a positive amplitude");
    }
    require_finite({alpha0}, "alpha0");
    require_depth(depth, grid, 1);
    const Index a = grid.a();
    GeometricParams p;
    p.grid = grid;
    p.gamma.assign(static_cast<std::size_t>(depth), gamma);
    p.f0 = [gamma](Index n) { return 1.0 - power(1.0 / gamma, n); };
    p.c0 = [amplitude](Index) { return amplitude; };
    const double scale = amplitude * power(gamma, 1 - 2 * a);
    for (int k = 0; k <= depth; ++k) p.alpha.push_back(alpha0 - scale * (1.0 - power(gamma, k)));
    for (int k = 0; k < depth; ++k) p.R0.push_back(amplitude * power(gamma, k + 2 - 2 * a));
    return p;
}

namespace {

// Constant-f example1 chain matching H_0 = z S+ + w S- + v for a given phi = f_0 - 1.
std::optional<BuiltChain> try_explicit(const Grid& grid, int depth, const SeqFn& z, const SeqFn& w,
                                       const SeqFn& v, double phi, double weight_seed) {
    if (!std::isfinite(phi) || phi == 0.0) return std::nullopt;
    const Index a = grid.a();
    const Index b = grid.b();
    const double alpha0 = v(a) - w(a) / phi - phi * z(a);
    for (Index n = a; n <= b; ++n) {
        if (mixed_gap(v(n) - w(n) / phi - phi * z(n), alpha0) > kBuilderTolerance) return std::nullopt;
    }
    // F(n) = phi z(n) must be quadratic: F(n) = F0 + n gd - n(n+1)/2 D.
    auto F = [&](Index n) { return phi * z(n); };
    const double x0 = static_cast<double>(a);
    const double s2 = (F(a + 2) - 2.0 * F(a + 1) + F(a)) / 2.0;
    const double s1 = F(a + 1) - F(a) - s2 * (2.0 * x0 + 1.0);
    const double s0 = F(a) - s1 * x0 - s2 * x0 * x0;
    auto F_fit = [=](Index n) {
        const double x = static_cast<double>(n);
        return s0 + s1 * x + s2 * x * x;
    };
    for (Index n = a; n <= b; ++n) {
        if (mixed_gap(F_fit(n), F(n)) > kBuilderTolerance) return std::nullopt;
    }
    const double D = -2.0 * s2;
    const double gd = s1 - s2;
    // G(n) = F(n) - b(n+1) = G00 + n dalpha0 must be affine.
    auto G = [&](Index n) { return F(n) - w(n + 1) / phi; };
    const double dalpha0 = G(a + 1) - G(a);
    const double G00 = G(a) - dalpha0 * x0;
    for (Index n = a; n < b; ++n) {
        if (mixed_gap(G00 + dalpha0 * static_cast<double>(n), G(n)) > kBuilderTolerance) {
            return std::nullopt;
        }
    }
    const double alpha1 = alpha0 + dalpha0;
    const double alpha2 = 2.0 * alpha1 - alpha0 + D;

    std::optional<BuiltChain> built;
    if (phi == -1.0) {
        HypergeometricParams hp;
        hp.alpha0 = alpha0;
        hp.alpha1 = alpha1;
        hp.alpha2 = alpha2;
        hp.c00 = s0;
        hp.g_diff = gd;
        hp.b00 = F_fit(-1) - G00 + dalpha0;  // b(0) = F(-1) - G(-1)
        hp.grid = grid;
        hp.depth = depth;
        hp.weight_seed = weight_seed;
        ChainSpec chain = build_hypergeometric(hp);
        built = BuiltChain{relabel(chain, Family::explicit_coefficients, hp), {}};
    } else {
        Example1Params e;
        e.c0 = [F_fit, phi](Index n) { return F_fit(n) / (phi * phi); };
        e.f0 = [phi](Index) { return 1.0 + phi; };
        e.alpha0 = alpha0;
        e.alpha1 = alpha1;
        e.alpha2 = alpha2;
        e.F0 = s0;
        e.G00 = G00;
        e.G10 = G00 - gd;
        e.grid = grid;
        e.depth = depth;
        e.weight_seed = weight_seed;
        BuiltChain b1 = build_example1(e);
        built = BuiltChain{relabel(b1.chain, Family::explicit_coefficients, std::nullopt),
                           std::move(b1.diagnostics)};
    }
    const SecondOrderOperator h = compose_hamiltonian(built->chain, 0, Side::lower);
    double gap = 0.0;
    for (Index n = a; n <= b; ++n) {
        gap = std::max({gap, mixed_gap(h.z(n), z(n)), mixed_gap(h.w(n), w(n)),
                        mixed_gap(h.v(n), v(n))});
    }
    if (gap > kBuilderTolerance) return std::nullopt;
    built->diagnostics.consistency_gap = std::max(built->diagnostics.consistency_gap, gap);
    return built;
}

}  // namespace

BuiltChain build_explicit(const Grid& grid, int depth, const SeqFn& z, const SeqFn& w,
                          const SeqFn& v, double weight_seed) {
    if (!z || !w || !v) throw InputError("explicit family needs z, w and v");
    require_depth(depth, grid, 0);
    if (grid.b() - grid.a() < 2) throw InputError("explicit family needs at least three grid points");

    // Candidates for phi: the hypergeometric value -1, then roots of
    // phi^2 Delta z - phi Delta v + Delta w = 0 at the first informative index.
    std::vector<double> candidates{-1.0};
    for (Index n = grid.a(); n < grid.b(); ++n) {
        const double A = z(n + 1) - z(n);
        const double B = -(v(n + 1) - v(n));
        const double C = w(n + 1) - w(n);
        if (A != 0.0) {
            const double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) break;
            const double r = std::sqrt(disc);
            candidates.push_back((-B + r) / (2.0 * A));
            candidates.push_back((-B - r) / (2.0 * A));
            break;
        }
        if (B != 0.0) {
            candidates.push_back(-C / B);
            break;
        }
    }
    std::string last_error;
    for (double phi : candidates) {
        try {
            if (auto built = try_explicit(grid, depth, z, w, v, phi, weight_seed)) {
                return std::move(*built);
            }
        } catch (const CheckError& e) {
            last_error = e.what();
        }
    }
    throw CheckError("explicit coefficients do not factorize within the supported families" +
                     (last_error.empty() ? std::string() : " (" + last_error + ")"));
}

}  // namespace ladderkit
