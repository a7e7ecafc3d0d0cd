#pragma once

#include <functional>
#include <vector>

#include "ladderkit/seq_core.hpp"

namespace ladderkit {

// A sequence given as a rule on all of Z. Builders sample it wherever a shift
// n -> n-k reaches outside the grid.
using SeqFn = std::function<double(Index)>;

// Second-order factorization with f == 0 (hypergeometric-type chain).
// c_0 is the quadratic c_0(n) = c00 + n g_diff - n(n+1)/2 (alpha2 - 2 alpha1 + alpha0),
// with g_diff = G_0(0) - G_1(0). All constants refer to absolute index n = 0.
struct HypergeometricParams {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double b00 = 0.0;  // b_0(0)
    double c00 = 0.0;  // c_0(0)
    double g_diff = 0.0;
    Grid grid{0, 1};
    int depth = 0;  // K: levels 0..K
    double weight_seed = 1.0;
};

// b_k independent of k; (f_0, c_0) constrained by
// (f_0(n) - 1)^2 c_0(n) = F0 + n (G00 - G10) - n(n+1)/2 (alpha2 - 2 alpha1 + alpha0).
struct Example1Params {
    SeqFn c0;
    SeqFn f0;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double F0 = 0.0;
    double G00 = 0.0;
    double G10 = 0.0;
    Grid grid{0, 1};
    int depth = 0;
    double weight_seed = 1.0;
};

// b_{k+1} = gamma_k b_k. Chain depth K = alpha.size() - 1; gamma and R0
// (the values R_k(0)) carry K entries each.
struct GeometricParams {
    std::vector<double> gamma;
    SeqFn f0;
    SeqFn c0;
    std::vector<double> alpha;
    std::vector<double> R0;
    Grid grid{0, 1};
    double weight_seed = 1.0;

    [[nodiscard]] int depth() const { return static_cast<int>(alpha.size()) - 1; }
};

}  // namespace ladderkit
