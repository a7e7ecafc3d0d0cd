#pragma once

// Annihilation / creation operators of a factorization chain
//
//     A_k  = S+ + f_k - 1
//     A_k* = b_k S- + (f_k - 1) c_k
//     H_k  = A_k* A_k + alpha_k = A_{k+1} A_{k+1}* + alpha_{k+1},
//
// the checks that a chain really factorizes, and the ladder of eigenpairs
// obtained by raising ground states.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ladderkit/family_params.hpp"
#include "ladderkit/seq_core.hpp"

namespace ladderkit {

enum class Family { example1, hypergeometric, geometric, explicit_coefficients };

[[nodiscard]] std::string to_string(Family family);

struct LevelData {
    int level = 0;
    LevelSequence b;
    LevelSequence c;
    LevelSequence f;
};

struct Tolerances {
    double condition = 1e-10;    // level-link conditions, dual factorization
    double identity = 1e-12;     // A*A + alpha against the composed H
    double boundary = 1e-10;     // |b rho| at both ends
    double adjointness = 1e-9;
    double eigen = 1e-8;         // ladder eigen-residuals, orthogonality
    double spectrum = 1e-6;      // ladder vs matrix oracle
    double weight = 1e-12;       // Pearson residual, descended vs direct weights
};

// Complete chain: per-level (b_k, c_k, f_k), constants alpha_0..alpha_K and
// the weights rho_k. Level data must cover grid.padded(halo()) where
// halo() = K + 2, so that K raising steps still leave valid ghost cells.
//
// Weights are generated by the Pearson recursion at every level with seeds
// linked through rho_{k-1}(a) = c_k(a) rho_k(a), so the adjointness identity
// holds without an extra constant.
class ChainSpec {
public:
    ChainSpec(Grid grid, Family family, std::vector<LevelData> levels, std::vector<double> alpha,
              double weight_seed = 1.0, std::optional<HypergeometricParams> hypergeometric = {});

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] Family family() const { return family_; }
    [[nodiscard]] int depth() const { return static_cast<int>(levels_.size()) - 1; }
    [[nodiscard]] Index halo() const { return depth() + 2; }
    [[nodiscard]] IndexRange work_range() const { return grid_.padded(halo()); }
    [[nodiscard]] double weight_seed() const { return weight_seed_; }

    [[nodiscard]] const LevelData& level(int k) const;
    [[nodiscard]] double alpha(int k) const;
    [[nodiscard]] std::span<const double> alphas() const { return alpha_; }
    [[nodiscard]] const WeightLevel& weight(int k) const;
    [[nodiscard]] const std::optional<HypergeometricParams>& hypergeometric() const {
        return hypergeometric_;
    }

    // Copy with one level's data replaced and all weights rebuilt.
    [[nodiscard]] ChainSpec with_level_data(const LevelData& data) const;

private:
    Grid grid_;
    Family family_;
    std::vector<LevelData> levels_;
    std::vector<double> alpha_;
    std::vector<WeightLevel> weights_;
    double weight_seed_;
    std::optional<HypergeometricParams> hypergeometric_;
};

// (A_k x)(n) = x(n+1) + (f_k(n) - 1) x(n). x at level k, 1 <= k <= K.
[[nodiscard]] LevelSequence apply_annihilation(const ChainSpec& chain, int k,
                                               const LevelSequence& x);
// (A_k* y)(n) = b_k(n) y(n-1) + (f_k(n) - 1) c_k(n) y(n). y at level k-1.
[[nodiscard]] LevelSequence apply_creation(const ChainSpec& chain, int k, const LevelSequence& y);
// (A_k* A_k + alpha_k) x without materializing the level k-1 intermediate
// (valid for k = 0 as well).
[[nodiscard]] LevelSequence apply_factorized(const ChainSpec& chain, int k, const LevelSequence& x);

// H = z S+ + w S- + v with coefficients on [a, b].
class SecondOrderOperator {
public:
    SecondOrderOperator(int level, Grid grid, std::vector<double> z, std::vector<double> w,
                        std::vector<double> v);

    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] double z(Index n) const { return z_.at(slot(n)); }
    [[nodiscard]] double w(Index n) const { return w_.at(slot(n)); }
    [[nodiscard]] double v(Index n) const { return v_.at(slot(n)); }

    // (H x)(n) on [a, b]; x must be valid on [a-1, b+1].
    [[nodiscard]] LevelSequence apply(const LevelSequence& x) const;

private:
    [[nodiscard]] std::size_t slot(Index n) const;

    int level_;
    Grid grid_;
    std::vector<double> z_, w_, v_;
};

enum class Side { lower, upper };  // A_k* A_k + alpha_k  |  A_{k+1} A_{k+1}* + alpha_{k+1}

[[nodiscard]] SecondOrderOperator compose_hamiltonian(const ChainSpec& chain, int k, Side side);

// Largest relative deviation |z rho - w(+1) rho(+1)| of the self-adjointness
// balance on [a, b-1].
[[nodiscard]] double balance_residual(const SecondOrderOperator& h, const WeightLevel& w);

// Random test sequences on [a, b] at the given level; ghost cells are zero.
[[nodiscard]] LevelSequence random_sequence(const Grid& grid, int level, std::mt19937_64& rng);

struct AdjointnessReport {
    int level = 0;
    int trials = 0;
    double max_relative_residual = 0.0;
    BoundaryReport boundary;
};

// |<A_k* x | y>_k - <x | A_k y>_{k-1}| / (|x|_{k-1} |y|_k) over random pairs
// supported on [a, b].
[[nodiscard]] AdjointnessReport verify_adjointness(const ChainSpec& chain, int k, int trials,
                                                   std::uint64_t rng_seed,
                                                   double boundary_tol = Tolerances{}.boundary);

struct ConditionResiduals {
    int level = 0;  // pair (k, k+1)
    double f_link = 0.0;
    double c_link = 0.0;
    double b_link = 0.0;
    Index worst_f = 0;
    Index worst_c = 0;
    Index worst_b = 0;
    int singular_points = 0;  // indices with b_k(n) = b_{k+1}(n) = 0
};

// The three conditions tying level k to level k+1, cross-multiplied so that no
// division by b happens, and scaled by max(|b_k(n)|, |b_{k+1}(n)|):
//
//   f_link  b_{k+1}(n) (f_{k+1}(n) - 1) = b_k(n) (f_k(n-1) - 1)               on [a, b+1]
//   c_link  b_k(n) c_{k+1}(n) = b_{k+1}(n) c_k(n-1)                             on [a, b+1]
//   b_link  b_{k+1}(n) [b_k(n) - b_{k+1}(n+1) - (alpha_{k+1} - alpha_k) + E_k(n)]
//             = b_k(n) E_k(n-1),  E_k = (f_k - 1)^2 c_k                         on [a, b]
[[nodiscard]] std::vector<ConditionResiduals> check_chain_conditions(const ChainSpec& chain);

struct PropagatedLevel {
    LevelSequence f;
    LevelSequence c;
};

// f_k and c_k from f_0, c_0 and the b_k via the product transformation formulas.
[[nodiscard]] std::vector<PropagatedLevel> propagate_level_data(const std::vector<SeqFn>& b_levels,
                                                                const SeqFn& f0, const SeqFn& c0,
                                                                int depth, IndexRange range);

struct EigenPair {
    double lambda = 0.0;
    LevelSequence vector;
    int level = 0;
    int ladder_index = 0;
    bool degenerate = false;  // zero barrier f(n) = 1 met while solving A x = 0
};

[[nodiscard]] EigenPair ground_state(const ChainSpec& chain, int p);
[[nodiscard]] EigenPair raise_state(const ChainSpec& chain, const EigenPair& x, int k);

struct EigenLadder {
    int level = 0;
    std::vector<EigenPair> pairs;  // p = 0..k
    bool duplicate_eigenvalues = false;
};

[[nodiscard]] EigenLadder solve_chain_eigens(const ChainSpec& chain, int k);

// |H_k x - lambda x|_inf / |x|_inf on [a, b].
[[nodiscard]] double eigen_residual(const ChainSpec& chain, const EigenPair& pair);

}  // namespace ladderkit
