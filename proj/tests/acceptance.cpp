// Acceptance suite: one PASS/FAIL line per criterion.
//
//   ladderkit_acceptance <path to ladderkit CLI> <source dir>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ladderkit/chain_families.hpp"
#include "ladderkit/config.hpp"
#include "ladderkit/spectral_oracle.hpp"

using namespace ladderkit;

namespace {

// Tolerances, pinned.
constexpr double kFactorTol = 1e-12;       // (A*A + alpha) x vs H x, times |x|_inf
constexpr double kDualTol = 1e-10;         // (A A* + alpha') x vs H x, times |x|_inf
constexpr double kConditionTol = 1e-10;    // builder link residuals
constexpr double kFaultDelta = 1e-3;
constexpr double kFaultFloor = 5e-4;
constexpr double kAdjointTol = 1e-9;       // Charlier
constexpr double kAdjointExactTol = 1e-12; // finite support
constexpr double kEigenTol = 1e-8;         // ladder residual, times |x|_inf
constexpr double kLambdaTol = 1e-12;
constexpr double kOracleTol = 1e-6;
constexpr double kBoundTol = 1e-8;
constexpr double kHyperTol = 1e-8;         // times |P|_inf
constexpr double kGramTol = 1e-8;
constexpr double kDegreeTol = 1e-12;       // times 2^(l+1) |P|_inf
constexpr double kAlphaTol = 1e-12;
constexpr double kB0Tol = 1e-12;
constexpr double kGeometricTol = 1e-10;
constexpr double kWeightTol = 1e-12;
constexpr double kEigenExampleTol = 1e-12;
constexpr double kInvariantTol = 1e-10;
constexpr int kTrials = 50;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double mixed(double x, double y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

ChainSpec classical(ClassicalFamily f, ClassicalParams q, Index a, Index b, int K) {
    return build_hypergeometric(classical_preset(f, q, Grid(a, b), K));
}

ChainSpec charlier(double mu, Index b, int K) {
    ClassicalParams q;
    q.mu = mu;
    return classical(ClassicalFamily::charlier, q, 0, b, K);
}

ChainSpec meixner() {
    ClassicalParams q;
    q.beta = 6.0;
    q.c = 0.3;
    return classical(ClassicalFamily::meixner, q, 0, 120, 5);
}

// Uniform values on [a-1, b+1], ghosts included.
LevelSequence random_full(const Grid& g, int level, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v;
    for (Index n = g.a() - 1; n <= g.b() + 1; ++n) v.push_back(u(rng));
    return LevelSequence(level, g.a() - 1, std::move(v));
}

// Charlier H_k x(n) = -mu x(n+1) - n x(n-1) + (n + mu - k) x(n).
double charlier_h(double mu, int k, const LevelSequence& x, Index n) {
    const double m = static_cast<double>(n);
    return -mu * x(n + 1) - m * x(n - 1) + (m + mu - k) * x(n);
}

double sup_norm(const LevelSequence& x, Index lo, Index hi) {
    double s = 0.0;
    for (Index n = lo; n <= hi; ++n) s = std::max(s, std::abs(x(n)));
    return s;
}

double worst_condition(const ChainSpec& chain) {
    double w = 0.0;
    for (const auto& r : check_chain_conditions(chain)) w = std::max({w, r.f_link, r.c_link, r.b_link});
    return w;
}

ChainSpec with_fault(const ChainSpec& chain, char field, int level, Index n, double delta) {
    LevelData d = chain.level(level);
    LevelSequence& s = field == 'b' ? d.b : field == 'c' ? d.c : d.f;
    s = s.with_value(n, s(n) + delta);
    return chain.with_level_data(d);
}

// Adjointness from closed-form data: A y(n) = y(n+1) + (f(n)-1) y(n),
// A* x(n) = b(n) x(n-1) + (f(n)-1) c(n) x(n), rho_k = rho_{k-1} / c_k.
double adjoint_oracle(const Grid& g, const std::function<double(Index)>& b,
                      const std::function<double(Index)>& c, const std::function<double(Index)>& f,
                      const std::function<double(Index)>& rho_prev, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Index a = g.a(), bb = g.b();
    auto val = [&](const std::vector<double>& s, Index n) {
        return (n < a || n > bb) ? 0.0 : s[static_cast<std::size_t>(n - a)];
    };
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> x, y;
        for (Index n = a; n <= bb; ++n) {
            x.push_back(u(rng));
            y.push_back(u(rng));
        }
        double lhs = 0.0, rhs = 0.0, xx = 0.0, yy = 0.0;
        for (Index n = a; n <= bb; ++n) {
            const double rp = rho_prev(n), rk = rp / c(n);
            const double astar = b(n) * val(x, n - 1) + (f(n) - 1.0) * c(n) * val(x, n);
            const double ay = val(y, n + 1) + (f(n) - 1.0) * val(y, n);
            lhs += astar * val(y, n) * rk;
            rhs += val(x, n) * ay * rp;
            xx += val(x, n) * val(x, n) * rp;
            yy += val(y, n) * val(y, n) * rk;
        }
        worst = std::max(worst, std::abs(lhs - rhs) / std::sqrt(xx * yy));
    }
    return worst;
}

Outcome factorization_identity() {
    const double mu = 1.0;
    const auto chain = charlier(mu, 40, 5);
    const Grid& g = chain.grid();
    std::mt19937_64 rng(2024);
    double lower = 0.0, dual = 0.0;
    for (int k = 0; k <= 5; ++k) {
        for (int t = 0; t < kTrials; ++t) {
            const auto x = random_full(g, k, rng);
            const double norm = sup_norm(x, g.a() - 1, g.b() + 1);
            const auto fx = apply_factorized(chain, k, x);
            std::optional<LevelSequence> dx;
            if (k < 5) dx = apply_annihilation(chain, k + 1, apply_creation(chain, k + 1, x));
            for (Index n = g.a(); n <= g.b(); ++n) {
                const double h = charlier_h(mu, k, x, n);
                lower = std::max(lower, std::abs(fx(n) - h) / norm);
                if (dx) dual = std::max(dual, std::abs((*dx)(n) + chain.alpha(k + 1) * x(n) - h) / norm);
            }
        }
    }
    return {lower <= kFactorTol && dual <= kDualTol,
            "A*A+alpha " + sci(lower) + " <= " + sci(kFactorTol) + ", AA*+alpha' " + sci(dual) +
                " <= " + sci(kDualTol)};
}

Outcome chain_conditions() {
    std::vector<std::pair<std::string, ChainSpec>> chains;
    chains.emplace_back("charlier", charlier(1.0, 40, 5));
    chains.emplace_back("meixner", meixner());
    ClassicalParams q;
    q.p = 0.3;
    chains.emplace_back("kravchuk", classical(ClassicalFamily::kravchuk, q, 0, 30, 3));
    q = {};
    q.alpha = 4.5;
    q.beta = 1.5;
    chains.emplace_back("hahn", classical(ClassicalFamily::hahn, q, 0, 24, 3));
    chains.emplace_back("geometric",
                        build_geometric(geometric_preset(0.8, 1.0, 0.0, Grid(0, 20), 4)).chain);
    const auto e1 = build_chain(load_config(LADDERKIT_SOURCE_DIR "/configs/example1.json"));
    chains.emplace_back("example1", e1.chain);
    SeqFn z = [](Index) { return -1.5; };
    SeqFn w = [](Index n) { return -static_cast<double>(n); };
    SeqFn v = [](Index n) { return static_cast<double>(n) + 1.5; };
    chains.emplace_back("explicit", build_explicit(Grid(0, 30), 3, z, w, v).chain);

    double worst = 0.0;
    std::string worst_name;
    for (const auto& [name, chain] : chains) {
        const double r = worst_condition(chain);
        if (!(r <= worst)) {
            worst = r;
            worst_name = name;
        }
    }
    const auto base = charlier(1.0, 40, 5);
    double weakest = INFINITY;
    for (char field : {'b', 'c', 'f'}) {
        weakest = std::min(weakest, worst_condition(with_fault(base, field, 2, 10, kFaultDelta)));
    }
    return {worst <= kConditionTol && weakest >= kFaultFloor,
            std::to_string(chains.size()) + " builders, worst " + sci(worst) + " (" + worst_name +
                ") <= " + sci(kConditionTol) + "; faults detected at >= " + sci(weakest)};
}

Outcome adjointness() {
    const double mu = 1.0;
    const auto chain = charlier(mu, 40, 5);
    double lib = 0.0, oracle = 0.0;
    for (int k = 1; k <= 5; ++k) {
        lib = std::max(lib, verify_adjointness(chain, k, kTrials, 42).max_relative_residual);
        oracle = std::max(
            oracle, adjoint_oracle(
                        chain.grid(), [](Index n) { return static_cast<double>(n); },
                        [mu](Index) { return mu; }, [](Index) { return 0.0; },
                        [mu](Index n) {
                            const double m = static_cast<double>(n);
                            return std::exp(m * std::log(mu) - std::lgamma(m + 1.0));
                        },
                        kTrials, 100 + k));
    }
    ClassicalParams q;
    q.p = 0.5;
    const Index N = 20;
    const auto kr = classical(ClassicalFamily::kravchuk, q, 0, N, 3);
    const double edge = std::abs(kr.level(0).b(N + 1) * kr.weight(0)(N + 1));
    double exact = 0.0;
    for (int k = 1; k <= 3; ++k) {
        exact = std::max(exact, verify_adjointness(kr, k, kTrials, 42).max_relative_residual);
        const double p = q.p;
        // rho_{k-1} = C(N+k-1, n) (p/(1-p))^n
        exact = std::max(
            exact, adjoint_oracle(
                       kr.grid(), [p](Index n) { return (1.0 - p) * static_cast<double>(n); },
                       [p, N, k](Index n) { return p * static_cast<double>(N - n + k); },
                       [](Index) { return 0.0; },
                       [p, N, k](Index n) {
                           const double m = static_cast<double>(n);
                           const double top = static_cast<double>(N + k - 1);
                           return std::exp(std::lgamma(top + 1.0) - std::lgamma(m + 1.0) -
                                           std::lgamma(top - m + 1.0) + m * std::log(p / (1.0 - p)));
                       },
                       kTrials, 200 + k));
    }
    return {lib <= kAdjointTol && oracle <= kAdjointTol && exact <= kAdjointExactTol && edge == 0.0,
            "charlier " + sci(std::max(lib, oracle)) + " <= " + sci(kAdjointTol) + "; kravchuk " +
                sci(exact) + " <= " + sci(kAdjointExactTol) + " with b(b+1)rho(b+1) = " + sci(edge)};
}

Outcome ladder_eigenpairs() {
    const double mu = 1.0;
    const auto chain = charlier(mu, 40, 5);
    double resid = 0.0, lam = 0.0;
    int count = 0;
    for (int k = 0; k <= 5; ++k) {
        for (const auto& pair : solve_chain_eigens(chain, k).pairs) {
            const int l = pair.ladder_index;
            lam = std::max(lam, std::abs(pair.lambda - static_cast<double>(l - k)));
            const double norm = sup_norm(pair.vector, 0, 40);
            for (Index n = 0; n <= 40; ++n) {
                const double r = charlier_h(mu, k, pair.vector, n) - pair.lambda * pair.vector(n);
                resid = std::max(resid, std::abs(r) / norm);
            }
            ++count;
        }
    }
    return {count == 21 && resid <= kEigenTol && lam <= kLambdaTol,
            std::to_string(count) + " pairs, residual " + sci(resid) + " <= " + sci(kEigenTol) +
                ", |lambda - (l-k)| " + sci(lam) + " <= " + sci(kLambdaTol)};
}

Outcome oracle_equivalence() {
    const double mu = 1.0;
    const auto chain = charlier(mu, 40, 5);
    double match = 0.0, bound = INFINITY, entries = 0.0;
    for (int k = 0; k <= 5; ++k) {
        TridiagonalMatrix m;
        for (Index n = 0; n <= 40; ++n) m.diag.push_back(static_cast<double>(n) + mu - k);
        for (Index n = 0; n < 40; ++n) m.off.push_back(-std::sqrt(mu * static_cast<double>(n + 1)));
        const auto lib = realize_matrix(compose_hamiltonian(chain, k, Side::lower), chain.weight(k));
        for (std::size_t i = 0; i < m.diag.size(); ++i) entries = std::max(entries, mixed(lib.diag[i], m.diag[i]));
        for (std::size_t i = 0; i < m.off.size(); ++i) entries = std::max(entries, mixed(lib.off[i], m.off[i]));
        const auto spec = eigensolve(m).values;
        for (const auto& pair : solve_chain_eigens(chain, k).pairs) {
            double nearest = INFINITY;
            for (double s : spec) nearest = std::min(nearest, std::abs(s - pair.lambda));
            match = std::max(match, nearest);
        }
        bound = std::min(bound, spec.front() - (chain.alpha(k) - kBoundTol));
    }
    return {match <= kOracleTol && bound >= 0.0 && entries <= 1e-14,
            "ladder vs oracle " + sci(match) + " <= " + sci(kOracleTol) +
                ", min eigenvalue - (alpha_k - 1e-8) = " + sci(bound) + " >= 0"};
}

// sigma Delta nabla P + tau Delta P + lambda P on [a+1, b-1], relative to |P|_inf on [a, b].
double hyper_residual(const LevelSequence& P, Index a, Index b, const std::function<double(double)>& sigma,
                      const std::function<double(double)>& tau, double lambda) {
    const double norm = sup_norm(P, a, b);
    double worst = 0.0;
    for (Index n = a + 1; n <= b - 1; ++n) {
        const double m = static_cast<double>(n);
        const double dn = P(n + 1) - 2.0 * P(n) + P(n - 1);
        const double d = P(n + 1) - P(n);
        worst = std::max(worst, std::abs(sigma(m) * dn + tau(m) * d + lambda * P(n)) / norm);
    }
    return worst;
}

Outcome hypergeometric_reduction() {
    const double mu = 1.0;
    const auto ch = charlier(mu, 40, 5);
    double resid = 0.0, lam = 0.0;
    for (int k = 0; k <= 5; ++k) {
        for (const auto& P : generate_polynomials(ch, k, 6)) {
            const int l = P.degree;
            resid = std::max(resid, hyper_residual(
                                        P.values, 0, 40, [](double m) { return -m; },
                                        [mu](double m) { return m - mu; }, -static_cast<double>(l)));
            const auto form = hypergeometric_form(ch, k, l);
            resid = std::max(resid, hypergeometric_residual(form, P.values, ch.grid()));
            // tau' = 1, sigma'' = 0
            const double formula = -l * (1.0 + (l - 1) / 2.0 * 0.0);
            lam = std::max({lam, std::abs(form.lambda - formula), std::abs(form.lambda_formula - formula)});
        }
    }
    const double c = 0.3, beta = 6.0;
    const auto mx = meixner();
    for (const auto& P : generate_polynomials(mx, 0, 6)) {
        const int l = P.degree;
        const double formula = -l * (1.0 - c);
        resid = std::max(resid, hyper_residual(
                                    P.values, 0, 120, [](double m) { return -m; },
                                    [c, beta](double m) { return m - c * (m + beta); }, formula));
        const auto form = hypergeometric_form(mx, 0, l);
        lam = std::max({lam, std::abs(form.lambda - formula), std::abs(form.lambda_formula - formula)});
    }
    return {resid <= kHyperTol && lam <= kLambdaTol,
            "residual " + sci(resid) + " <= " + sci(kHyperTol) + ", lambda gap " + sci(lam) +
                " <= " + sci(kLambdaTol)};
}

struct OrthoResult {
    double offdiag = 0.0;
    double degree = 0.0;
    bool leading_nonzero = true;
};

void orthogonality_on(const ChainSpec& chain, int k, const std::function<double(Index)>& weight,
                      OrthoResult& out) {
    const Index a = chain.grid().a(), b = chain.grid().b();
    const auto polys = generate_polynomials(chain, k, 6);
    std::vector<std::vector<double>> G(polys.size(), std::vector<double>(polys.size(), 0.0));
    for (std::size_t l = 0; l < polys.size(); ++l) {
        for (std::size_t m = 0; m <= l; ++m) {
            double s = 0.0;
            for (Index n = a; n <= b; ++n) s += polys[l].values(n) * polys[m].values(n) * weight(n);
            G[l][m] = G[m][l] = s;
        }
    }
    for (std::size_t l = 0; l < polys.size(); ++l) {
        for (std::size_t m = 0; m < l; ++m) {
            out.offdiag = std::max(out.offdiag, std::abs(G[l][m]) / std::sqrt(G[l][l] * G[m][m]));
        }
    }
    for (const auto& P : polys) {
        std::vector<double> d;
        for (Index n = a; n <= b; ++n) d.push_back(P.values(n));
        double norm = 0.0;
        for (double v : d) norm = std::max(norm, std::abs(v));
        for (int i = 0; i < P.degree; ++i) {
            for (std::size_t j = 0; j + 1 < d.size(); ++j) d[j] = d[j + 1] - d[j];
            d.pop_back();
        }
        const double scale = std::ldexp(norm, P.degree + 1);
        double lo = d.front(), hi = d.front();
        for (double v : d) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.degree = std::max(out.degree, (hi - lo) / scale);
        out.leading_nonzero &= std::abs(d.front()) > kDegreeTol * scale;
        for (std::size_t j = 0; j + 1 < d.size(); ++j) {
            out.degree = std::max(out.degree, std::abs(d[j + 1] - d[j]) / scale);
        }
    }
}

Outcome orthogonality() {
    OrthoResult r;
    const double mu = 1.0;
    const auto ch = charlier(mu, 40, 5);
    for (int k = 0; k <= 5; ++k) {
        orthogonality_on(ch, k, [](Index n) { return std::exp(-std::lgamma(static_cast<double>(n) + 1.0)); }, r);
    }
    const double c = 0.3, beta = 6.0;
    orthogonality_on(meixner(), 0,
                     [c, beta](Index n) {
                         const double m = static_cast<double>(n);
                         return std::exp(std::lgamma(beta + m) - std::lgamma(beta) + m * std::log(c) -
                                         std::lgamma(m + 1.0));
                     },
                     r);
    return {r.offdiag <= kGramTol && r.degree <= kDegreeTol && r.leading_nonzero,
            "Gram off-diagonal " + sci(r.offdiag) + " <= " + sci(kGramTol) + ", degree defect " +
                sci(r.degree) + " <= " + sci(kDegreeTol) + (r.leading_nonzero ? "" : ", zero leading difference")};
}

Outcome example1_closed_forms() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double alpha = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double a0 = u(rng), a1 = u(rng), a2 = u(rng);
        const double D = a2 - 2.0 * a1 + a0;
        double prev = a0, cur = a1;
        alpha = std::max({alpha, mixed(alpha_closed_form(a0, a1, a2, 0), a0),
                          mixed(alpha_closed_form(a0, a1, a2, 1), a1)});
        for (int k = 2; k <= 50; ++k) {
            const double next = 2.0 * cur - prev + D;
            prev = cur;
            cur = next;
            alpha = std::max(alpha, mixed(alpha_closed_form(a0, a1, a2, k), cur));
        }
    }
    double b0 = 0.0;
    ClassicalParams q;
    q.beta = 6.0;
    q.c = 0.3;
    const auto mp = classical_preset(ClassicalFamily::meixner, q, Grid(0, 30), 5);
    q = {};
    q.alpha = 4.5;
    q.beta = 1.5;
    const auto hp = classical_preset(ClassicalFamily::hahn, q, Grid(0, 24), 3);
    for (Index n = -3; n <= 31; ++n) {
        const double m = static_cast<double>(n);
        for (int k = 0; k <= 2; ++k) {
            b0 = std::max(b0, mixed(hypergeometric_b0(mp, n, k), m));
            b0 = std::max(b0, mixed(hypergeometric_b0(hp, n, k), m * (1.5 + 24.0 + 1.0 - m)));
        }
    }
    const auto e1 = build_chain(load_config(LADDERKIT_SOURCE_DIR "/configs/example1.json")).chain;
    for (Index n = 0; n <= 101; ++n) {
        for (int k = 1; k <= 2; ++k) b0 = std::max(b0, mixed(e1.level(k).b(n), e1.level(0).b(n)));
        b0 = std::max(b0, mixed(e1.level(0).b(n), 1.1 * static_cast<double>(n)));
    }
    return {alpha <= kAlphaTol && b0 <= kB0Tol,
            "alpha closed form " + sci(alpha) + " <= " + sci(kAlphaTol) + ", b_0 across k = 0,1,2 " +
                sci(b0) + " <= " + sci(kB0Tol)};
}

Outcome geometric_closed_forms_check() {
    const double gammas[] = {0.5, 0.9, 1.1, 2.0};
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (double g : gammas) {
        GeometricParams p;
        p.gamma.assign(6, g);
        for (int k = 0; k <= 6; ++k) p.alpha.push_back(u(rng));
        for (int k = 0; k < 6; ++k) p.R0.push_back(u(rng));
        const double s = u(rng), t = u(rng);
        p.f0 = [s](Index n) { return s * static_cast<double>(n); };
        p.c0 = [t](Index n) { return 1.0 + t * static_cast<double>(n * n); };
        for (int k = 0; k <= 4; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double da = p.alpha[kk + 1] - p.alpha[kk];
            const double da1 = p.alpha[kk + 2] - p.alpha[kk + 1];
            double big = 1.0;
            for (int j = 0; j < k; ++j) big *= g;
            const double fm = p.f0(-k) - 1.0;
            double R = p.R0[kk], R1 = p.R0[kk + 1], S = fm * fm * p.c0(-k) / big;
            for (int n = 0; n <= 30; ++n) {
                if (n > 0) {
                    R = R / g + da;
                    R1 = R1 / g + da1;
                    S = S / (g * g) + R - R1 / g;
                }
                const auto cf = geometric_closed_forms(p, k, n);
                worst = std::max(worst, mixed(cf.R, R));
                worst = cf.S ? std::max(worst, mixed(*cf.S, S)) : INFINITY;
            }
        }
    }
    return {worst <= kGeometricTol, "R_k, S_k closed vs iterated " + sci(worst) + " <= " + sci(kGeometricTol)};
}

Outcome weight_consistency() {
    std::vector<std::pair<std::string, ChainSpec>> chains;
    chains.emplace_back("charlier", charlier(1.0, 40, 5));
    chains.emplace_back("meixner", meixner());
    ClassicalParams q;
    q.p = 0.5;
    chains.emplace_back("kravchuk", classical(ClassicalFamily::kravchuk, q, 0, 20, 3));
    q = {};
    q.alpha = 4.5;
    q.beta = 1.5;
    chains.emplace_back("hahn", classical(ClassicalFamily::hahn, q, 0, 24, 3));
    chains.emplace_back("geometric",
                        build_geometric(geometric_preset(0.8, 1.0, 0.0, Grid(0, 20), 4)).chain);
    chains.emplace_back("example1",
                        build_chain(load_config(LADDERKIT_SOURCE_DIR "/configs/example1.json")).chain);
    double worst = 0.0;
    for (const auto& [name, chain] : chains) {
        const Index a = chain.grid().a(), b = chain.grid().b();
        for (int k = 1; k <= chain.depth(); ++k) {
            const auto d = descend_weight(chain.weight(k), chain.level(k).c);
            const auto& direct = chain.weight(k - 1);
            const double r0 = d(a) / direct(a);
            for (Index n = a; n <= b; ++n) {
                worst = std::max(worst, std::abs(d(n) / direct(n) / r0 - 1.0));
            }
        }
    }
    return {worst <= kWeightTol, std::to_string(chains.size()) + " chains, proportionality defect " +
                                     sci(worst) + " <= " + sci(kWeightTol)};
}

Outcome eigensolver_self_test() {
    double ex = 0.0;
    {
        TridiagonalMatrix m;
        m.diag = {5.0};
        ex = std::max(ex, std::abs(eigensolve(m).values[0] - 5.0));
    }
    {
        TridiagonalMatrix m;
        m.diag = {0.0, 0.0};
        m.off = {1.0};
        const auto v = eigensolve(m).values;
        ex = std::max({ex, std::abs(v[0] + 1.0), std::abs(v[1] - 1.0)});
    }
    {
        TridiagonalMatrix m;
        m.diag = {2.0, 2.0, 2.0};
        m.off = {-1.0, -1.0};
        const auto v = eigensolve(m).values;
        const double r = std::sqrt(2.0);
        ex = std::max({ex, std::abs(v[0] - (2.0 - r)), std::abs(v[1] - 2.0), std::abs(v[2] - (2.0 + r))});
    }
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double trace_gap = 0.0, frob_gap = 0.0;
    for (int t = 0; t < 10; ++t) {
        TridiagonalMatrix m;
        for (int i = 0; i < 50; ++i) m.diag.push_back(u(rng));
        for (int i = 0; i < 49; ++i) m.off.push_back(u(rng));
        const auto v = eigensolve(m).values;
        double tr = 0.0, fr = 0.0, s1 = 0.0, s2 = 0.0;
        for (double d : m.diag) {
            tr += d;
            fr += d * d;
        }
        for (double o : m.off) fr += 2.0 * o * o;
        for (double l : v) {
            s1 += l;
            s2 += l * l;
        }
        double abs_sum = 0.0;
        for (double d : m.diag) abs_sum += std::abs(d);
        trace_gap = std::max(trace_gap, std::abs(s1 - tr) / std::max(std::abs(tr), abs_sum));
        frob_gap = std::max(frob_gap, std::abs(s2 - fr) / fr);
    }
    return {ex <= kEigenExampleTol && trace_gap <= kInvariantTol && frob_gap <= kInvariantTol,
            "examples " + sci(ex) + " <= " + sci(kEigenExampleTol) + ", trace " + sci(trace_gap) +
                ", Frobenius " + sci(frob_gap) + " <= " + sci(kInvariantTol)};
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run_cli(const std::string& cli, const std::string& args) {
    const std::string out = "ladderkit_acceptance.out", err = "ladderkit_acceptance.err";
    const std::string cmd = "'" + cli + "' " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return r;
}

Outcome cli_contract(const std::string& cli, const std::string& root) {
    if (cli.empty()) return {false, "no CLI path given"};
    std::string detail;
    bool ok = true;
    auto expect = [&](const std::string& label, const std::string& args, int code,
                      const std::string& needle, bool in_err) {
        const auto r = run_cli(cli, args);
        const std::string& hay = in_err ? r.err : r.out;
        const bool good = r.code == code && (needle.empty() || hay.find(needle) != std::string::npos);
        if (!good) {
            ok = false;
            detail += " [" + label + ": exit " + std::to_string(r.code) + "]";
        }
    };
    const std::string charlier = " --config '" + root + "/configs/charlier.json'";
    for (const char* cmd : {"verify", "spectrum", "poly", "weight"}) {
        expect(std::string("charlier ") + cmd, std::string(cmd) + charlier, 0, "\"pass\": true", false);
    }
    const std::string tc = root + "/tests/configs/";
    expect("unknown key", "verify --config '" + tc + "unknown_key.json'", 2, "unknown key", true);
    expect("gamma = 1", "verify --config '" + tc + "gamma_one.json'", 2, "gamma not in {0, 1}", true);
    expect("level > K", "spectrum" + charlier + " --level 6", 2, "outside", true);
    expect("poly on geometric", "poly --config '" + root + "/configs/geometric.json'", 2, "", false);
    expect("fault c", "verify --config '" + tc + "fault_c.json'", 1, "\"check\": \"c_link\"", false);
    expect("descend fault", "weight --config '" + tc + "geometric_descend.json'", 1,
           "\"first_failure_level\": 2", false);
    return {ok, ok ? "4 commands exit 0 on charlier; schema 2, range 2, faults 1 with residual named"
                   : "mismatch:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::string root = argc > 2 ? argv[2] : LADDERKIT_SOURCE_DIR;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"factorization identity", factorization_identity},
        {"level-link conditions", chain_conditions},
        {"adjointness", adjointness},
        {"ladder eigenpairs", ladder_eigenpairs},
        {"oracle equivalence", oracle_equivalence},
        {"hypergeometric reduction", hypergeometric_reduction},
        {"orthogonality and degree", orthogonality},
        {"example 1 closed forms", example1_closed_forms},
        {"geometric closed forms", geometric_closed_forms_check},
        {"weight consistency", weight_consistency},
        {"eigensolver self-test", eigensolver_self_test},
        {"CLI contract", [&] { return cli_contract(cli, root); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("criterion %2zu %s  %-26s %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
