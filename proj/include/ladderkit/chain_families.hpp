#pragma once

// Builders for the solved factorization families:
//
//   example1        b_k independent of k, f_k(n) = f_0(n-k), c_k(n) = c_0(n-k)
//   hypergeometric  the f == 0 special case; c_0 quadratic, b_0 quadratic
//   geometric       b_{k+1} = gamma_k b_k
//
// plus the hypergeometric standard form sigma Delta nabla x + tau Delta x + lambda x = 0,
// its polynomial solutions and presets for the classical discrete families.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ladderkit/family_params.hpp"
#include "ladderkit/ladder_ops.hpp"

namespace ladderkit {

// alpha_k = alpha_0 + k (alpha_1 - alpha_0) + k(k-1)/2 (alpha_2 - 2 alpha_1 + alpha_0).
// Defined for every integer k (negative k extends the quadratic).
[[nodiscard]] double alpha_closed_form(double alpha0, double alpha1, double alpha2, int k);

struct FamilyDiagnostics {
    std::vector<double> G_k0;              // example1: G_k(0), k = 0..K
    std::optional<LevelSequence> F_of_n;   // example1: (f_0(n) - 1)^2 c_0(n) on [a-1, b+1]
    std::vector<LevelSequence> R_k_table;  // geometric: R_k(n) on [a-1, b+1], k = 0..K-1
    std::vector<LevelSequence> S_k_table;  // geometric: S_k(n) on [a-1, b+1], k = 0..K-2
    double consistency_gap = 0.0;          // largest gap between equivalent routes
};

struct BuiltChain {
    ChainSpec chain;
    FamilyDiagnostics diagnostics;
};

// Largest condition residual allowed for a builder's output.
inline constexpr double kBuilderTolerance = 1e-10;

[[nodiscard]] BuiltChain build_example1(const Example1Params& p);

// c_0(n) of the hypergeometric family.
[[nodiscard]] double hypergeometric_c0(const HypergeometricParams& p, Index n);
// b_0(n) = b_0(0) - n (alpha_{k+1} - alpha_k) - c_0(-1-k) + c_0(n-1-k); independent of k.
[[nodiscard]] double hypergeometric_b0(const HypergeometricParams& p, Index n, int k = 0);
[[nodiscard]] ChainSpec build_hypergeometric(const HypergeometricParams& p);
// The same chain expressed as example1 data (f_0 == 0).
[[nodiscard]] Example1Params as_example1(const HypergeometricParams& p);

// Coefficients in absolute n: sigma(n) = s0 + s1 n + s2 n^2, tau(n) = t0 + t1 n.
struct HypergeometricForm {
    int level = 0;
    int ladder_index = 0;
    std::array<double, 3> sigma{};
    std::array<double, 2> tau{};
    double lambda = 0.0;          // alpha_k - alpha_{k-l}
    double lambda_formula = 0.0;  // -l (tau' + (l-1)/2 sigma'')
    double fit_residual = 0.0;    // deviation of the chain's b_0, c_k from the fitted polynomials

    [[nodiscard]] double sigma_at(Index n) const;
    [[nodiscard]] double tau_at(Index n) const;
};

[[nodiscard]] HypergeometricForm hypergeometric_form(const ChainSpec& chain, int k, int l);

// max |sigma Delta nabla P + tau Delta P + lambda P| / |P|_inf on [a, b].
[[nodiscard]] double hypergeometric_residual(const HypergeometricForm& form, const LevelSequence& P,
                                             const Grid& grid);

struct GeneratedPolynomial {
    int degree = 0;
    double eigenvalue = 0.0;  // lambda^l_k = alpha_{k-l}
    LevelSequence values;     // on [a-1, b+1], level k
};

// P_l = prod_{i=0}^{l-1} (b_0(n) S- - c_0(n-k+i)) 1 for l = 0..lmax.
[[nodiscard]] std::vector<GeneratedPolynomial> generate_polynomials(const ChainSpec& chain, int k,
                                                                    int lmax);

struct DegreeReport {
    double next_difference = 0.0;   // |Delta^{l+1} P|_inf / |P|_inf
    double leading_spread = 0.0;    // spread of Delta^l P relative to |P|_inf
    double leading_value = 0.0;     // mean of Delta^l P
    bool exact_degree = false;
};

[[nodiscard]] DegreeReport check_degree(const LevelSequence& P, int degree, double tol);

enum class ClassicalFamily { charlier, meixner, kravchuk, hahn };

[[nodiscard]] std::optional<ClassicalFamily> classical_family_from_string(const std::string& name);
[[nodiscard]] std::string to_string(ClassicalFamily family);

// charlier: mu. meixner: beta, c. kravchuk: p. hahn: alpha, beta.
// Finite families use N = b - a.
struct ClassicalParams {
    double mu = 1.0;
    double beta = 0.0;
    double c = 0.0;
    double p = 0.5;
    double alpha = 0.0;
};

[[nodiscard]] HypergeometricParams classical_preset(ClassicalFamily family,
                                                    const ClassicalParams& params,
                                                    const Grid& grid, int depth);

// Sum_{j=0}^{n-1} q^j for n >= 0 and -Sum_{j=n}^{-1} q^j for n < 0, evaluated
// term by term.
[[nodiscard]] double geometric_sum(double q, Index n);

struct GeometricClosedForms {
    double R = 0.0;
    std::optional<double> S;  // needs gamma_{k+1}: only for k <= K-2
};

[[nodiscard]] GeometricClosedForms geometric_closed_forms(const GeometricParams& p, int k, Index n);

[[nodiscard]] BuiltChain build_geometric(const GeometricParams& p);

// A geometric chain with constant gamma in (0,1): f_0(n) = 1 - gamma^{-n},
// c_0 = amplitude, b_0(n) = amplitude (gamma^{1-2n} - gamma^{1-2a}).
[[nodiscard]] GeometricParams geometric_preset(double gamma, double amplitude, double alpha0,
                                               const Grid& grid, int depth);

// Tries to write H_0 = z S+ + w S- + v as A_0* A_0 + alpha_0 with constant f_0
// and b independent of k (the hypergeometric family is f_0 = 0), and extends the
// result to a chain of depth K.
[[nodiscard]] BuiltChain build_explicit(const Grid& grid, int depth, const SeqFn& z, const SeqFn& w,
                                        const SeqFn& v, double weight_seed = 1.0);

}  // namespace ladderkit
