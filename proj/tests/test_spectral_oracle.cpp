#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ladderkit/spectral_oracle.hpp"
#include "test_support.hpp"

using namespace ladderkit;
using lk_test::charlier;

namespace {

// det(M - x I) by the three-term continuant, scaled to avoid overflow; only the sign matters.
int sign_of_charpoly(const TridiagonalMatrix& m, double x) {
    double p_prev = 1.0;
    double p = m.diag[0] - x;
    for (std::size_t i = 1; i < m.size(); ++i) {
        const double next = (m.diag[i] - x) * p - m.off[i - 1] * m.off[i - 1] * p_prev;
        p_prev = p;
        p = next;
        const double s = std::max(std::abs(p), std::abs(p_prev));
        if (s > 1e100) {
            p /= s;
            p_prev /= s;
        }
    }
    return (p > 0.0) - (p < 0.0);
}

// Roots of the characteristic polynomial by scanning for sign changes and bisecting.
std::vector<double> charpoly_roots(const TridiagonalMatrix& m, double lo, double hi, int steps) {
    std::vector<double> roots;
    double x0 = lo;
    int s0 = sign_of_charpoly(m, x0);
    for (int i = 1; i <= steps; ++i) {
        const double x1 = lo + (hi - lo) * double(i) / double(steps);
        const int s1 = sign_of_charpoly(m, x1);
        if (s1 == 0) {
            roots.push_back(x1);
        } else if (s0 != 0 && s1 != s0) {
            double a = x0, b = x1;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (sign_of_charpoly(m, mid) == s0) a = mid; else b = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        s0 = s1;
    }
    return roots;
}

TridiagonalMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TridiagonalMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.diag.push_back(u(rng));
    for (std::size_t i = 0; i + 1 < n; ++i) m.off.push_back(u(rng));
    return m;
}

}  // namespace

TEST_CASE("eigensolve small examples") {
    TridiagonalMatrix one{{5.0}, {}};
    CHECK(eigensolve(one).values == std::vector<double>{5.0});

    TridiagonalMatrix two{{0.0, 0.0}, {1.0}};
    const auto e2 = eigensolve(two).values;
    CHECK(std::abs(e2[0] + 1.0) <= 1e-12);
    CHECK(std::abs(e2[1] - 1.0) <= 1e-12);

    TridiagonalMatrix three{{2.0, 2.0, 2.0}, {-1.0, -1.0}};
    const auto e3 = eigensolve(three).values;
    const double r2 = std::sqrt(2.0);
    CHECK(std::abs(e3[0] - (2.0 - r2)) <= 1e-12);
    CHECK(std::abs(e3[1] - 2.0) <= 1e-12);
    CHECK(std::abs(e3[2] - (2.0 + r2)) <= 1e-12);
    const auto roots = charpoly_roots(three, 0.0, 4.0, 1000);
    REQUIRE(roots.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(roots[i] - e3[i]) <= 1e-12);

    CHECK_THROWS_AS((void)eigensolve(TridiagonalMatrix{}), InputError);
    CHECK_THROWS_AS((void)eigensolve(TridiagonalMatrix{{1.0, 2.0}, {}}), InputError);
}

TEST_CASE("eigensolve matches characteristic polynomial roots") {
    std::mt19937_64 rng(123);
    for (std::size_t n : {4u, 7u, 12u}) {
        const auto m = random_matrix(n, rng);
        const auto vals = eigensolve(m).values;
        const auto roots = charpoly_roots(m, -4.0, 4.0, 20000);
        REQUIRE(roots.size() == n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(vals[i] - roots[i]) <= 1e-12);
    }
}

TEST_CASE("eigensolve invariants on N = 50") {
    std::mt19937_64 rng(2024);
    const auto m = random_matrix(50, rng);
    const auto dec = eigensolve(m, true);
    CHECK(std::is_sorted(dec.values.begin(), dec.values.end()));
    double trace = 0.0, frob = 0.0, s1 = 0.0, s2 = 0.0;
    for (double d : m.diag) {
        trace += d;
        frob += d * d;
    }
    for (double e : m.off) frob += 2.0 * e * e;
    for (double l : dec.values) {
        s1 += l;
        s2 += l * l;
    }
    CHECK(std::abs(s1 - trace) <= 1e-10 * std::max(1.0, std::abs(trace)));
    CHECK(std::abs(s2 - frob) <= 1e-10 * frob);
    for (std::size_t j = 0; j < 50; ++j) {
        const auto& v = dec.vectors[j];
        const auto mv = multiply(m, v);
        double res = 0.0;
        for (std::size_t i = 0; i < 50; ++i) res = std::max(res, std::abs(mv[i] - dec.values[j] * v[i]));
        CHECK(res <= 1e-12);
        for (std::size_t k = j; k < 50; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < 50; ++i) dot += v[i] * dec.vectors[k][i];
            CHECK(std::abs(dot - (j == k ? 1.0 : 0.0)) <= 1e-12);
        }
    }
}

TEST_CASE("eigensolve reports non-convergence") {
    TridiagonalMatrix m{{1.0, 2.0, 3.0}, {1.0, 1.0}};
    CHECK_THROWS_WITH_AS((void)eigensolve(m, false, 0), doctest::Contains("index 0"), Error);
}

TEST_CASE("realized Charlier matrix") {
    const double mu = 1.0;
    const auto chain = charlier(mu, 0, 40, 5);
    for (int k = 0; k <= 5; ++k) {
        const auto h = compose_hamiltonian(chain, k, Side::lower);
        const auto m = realize_matrix(h, chain.weight(k));
        CHECK(m.size() == 41);
        CHECK(m.asymmetry <= 1e-12);
        for (std::size_t i = 0; i < 41; ++i) CHECK(m.diag[i] == double(i) + mu - double(k));
        for (std::size_t i = 0; i < 40; ++i) CHECK(m.off[i] == doctest::Approx(-std::sqrt(mu * double(i + 1))));
    }
    const SecondOrderOperator diag_only(0, Grid(0, 3), {0, 0, 0, 0}, {0, 0, 0, 0}, {1, 2, 3, 4});
    const auto md = realize_matrix(diag_only, WeightLevel(0, Grid(0, 3), {1, 2, 3, 4, 5}));
    for (double e : md.off) CHECK(e == 0.0);
    const SecondOrderOperator skew(0, Grid(0, 2), {1, 1, 1}, {1, 5, 1}, {0, 0, 0});
    CHECK_THROWS_AS((void)realize_matrix(skew, WeightLevel(0, Grid(0, 2), {1, 1, 1, 1})), CheckError);
}

TEST_CASE("ladder eigenvalues lie in the oracle spectrum") {
    const auto chain = charlier(1.0, 0, 40, 5);
    for (int k = 0; k <= 5; ++k) {
        const auto h = compose_hamiltonian(chain, k, Side::lower);
        const auto& w = chain.weight(k);
        const auto m = realize_matrix(h, w);
        const auto vals = eigensolve(m).values;
        CHECK(vals.front() >= chain.alpha(k) - 1e-8);
        const auto ladder = solve_chain_eigens(chain, k);
        const auto rep = compare_spectra(ladder.pairs, vals, 1e-6, &m, &w);
        CHECK(rep.pass);
        REQUIRE(rep.matches.size() == std::size_t(k + 1));
        for (const auto& match : rep.matches) {
            CHECK(match.abs_err <= 1e-6);
            CHECK(match.vector_residual <= 1e-6);
        }
        for (const auto& pair : ladder.pairs) {
            const auto hx = h.apply(pair.vector);
            const double rq = inner_product(pair.vector, hx, w) / inner_product(pair.vector, pair.vector, w);
            CHECK(std::abs(rq - pair.lambda) <= 1e-10 * std::max(1.0, std::abs(pair.lambda)));
        }
    }
    CHECK(compare_spectra({}, {1.0, 2.0}, 1e-6).matches.empty());
    const auto ladder = solve_chain_eigens(chain, 3);
    const auto vals = eigensolve(realize_matrix(compose_hamiltonian(chain, 3, Side::lower), chain.weight(3))).values;
    CHECK_FALSE(compare_spectra(ladder.pairs, vals, 0.0).pass);
}
