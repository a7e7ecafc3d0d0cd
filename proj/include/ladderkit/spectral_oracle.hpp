#pragma once

// Second verification path: H_k as a symmetric tridiagonal matrix in the
// weighted space, diagonalized by an in-repo implicit QL iteration.

#include <optional>
#include <vector>

#include "ladderkit/ladder_ops.hpp"

namespace ladderkit {

struct TridiagonalMatrix {
    std::vector<double> diag;  // N
    std::vector<double> off;   // N-1
    double asymmetry = 0.0;    // largest relative gap between the two off-diagonal routes

    [[nodiscard]] std::size_t size() const { return diag.size(); }
};

// diag(i) = v(a+i), off(i) = z(a+i) sqrt(rho(a+i) / rho(a+i+1)).
// The second route w(a+i+1) sqrt(rho(a+i+1) / rho(a+i)) must agree within max_asymmetry.
[[nodiscard]] TridiagonalMatrix realize_matrix(const SecondOrderOperator& h, const WeightLevel& w,
                                               double max_asymmetry = 1e-10);

struct EigenDecomposition {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[j] belongs to values[j]; empty unless asked
};

[[nodiscard]] EigenDecomposition eigensolve(const TridiagonalMatrix& m, bool with_vectors = false,
                                            int max_sweeps = 60);

// (M u)(i) for the symmetric tridiagonal matrix.
[[nodiscard]] std::vector<double> multiply(const TridiagonalMatrix& m, const std::vector<double>& u);

struct SpectrumMatch {
    int ladder_index = 0;
    double lambda = 0.0;
    double nearest_oracle = 0.0;
    double abs_err = 0.0;
    double vector_residual = 0.0;  // |M u - lambda u| / |u|, u = sqrt(rho) x
    bool pass = false;
};

struct SpectrumReport {
    std::vector<SpectrumMatch> matches;
    bool pass = true;
};

[[nodiscard]] SpectrumReport compare_spectra(const std::vector<EigenPair>& ladder,
                                             const std::vector<double>& oracle, double tol,
                                             const TridiagonalMatrix* matrix = nullptr,
                                             const WeightLevel* weight = nullptr);

// u(i) = sqrt(rho(a+i)) x(a+i) on [a, b].
[[nodiscard]] std::vector<double> symmetrize(const LevelSequence& x, const WeightLevel& w);

}  // namespace ladderkit
