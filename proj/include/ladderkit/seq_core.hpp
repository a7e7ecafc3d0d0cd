#pragma once

// Integer grids, level-attached real sequences, shift/difference operators,
// weighted inner products and weights generated by the Pearson recursion
//
//     b_k(n+1) rho_k(n+1) = c_k(n) rho_k(n),
//
// which is the telescoped form of  Delta(b_k rho_k) = (c_k - b_k) rho_k.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladderkit/errors.hpp"

namespace ladderkit {

using Index = std::int64_t;

// Closed integer interval [first, last]. Empty when last < first.
struct IndexRange {
    Index first = 0;
    Index last = -1;

    [[nodiscard]] bool empty() const { return last < first; }
    [[nodiscard]] Index size() const { return empty() ? 0 : last - first + 1; }
    [[nodiscard]] bool contains(Index n) const { return n >= first && n <= last; }
    [[nodiscard]] bool contains(const IndexRange& r) const {
        return r.empty() || (contains(r.first) && contains(r.last));
    }
    [[nodiscard]] IndexRange intersect(const IndexRange& r) const;
    [[nodiscard]] IndexRange shifted(Index by) const { return {first + by, last + by}; }

    bool operator==(const IndexRange&) const = default;
};

// The summation window [a, b] of the weighted inner product.
class Grid {
public:
    Grid(Index a, Index b);

    [[nodiscard]] Index a() const { return a_; }
    [[nodiscard]] Index b() const { return b_; }
    [[nodiscard]] Index size() const { return b_ - a_ + 1; }

    [[nodiscard]] IndexRange interior() const { return {a_, b_}; }
    // [a-1, b+1]: the interior plus one ghost cell on each side.
    [[nodiscard]] IndexRange ghosted() const { return {a_ - 1, b_ + 1}; }
    // [a-1-halo, b+1+halo]
    [[nodiscard]] IndexRange padded(Index halo) const { return {a_ - 1 - halo, b_ + 1 + halo}; }

    bool operator==(const Grid&) const = default;

private:
    Index a_;
    Index b_;
};

// Real sequence attached to chain level k.
//
// Storage covers a contiguous index range, at least the ghosted range of the
// grid it lives on. Operators that need a neighbour outside the storage cannot
// produce a value at the vacated end; such cells hold 0 and fall outside
// valid(). Chains keep a wider halo than one ghost cell so that repeated
// ladder steps still leave valid ghost values around [a, b].
class LevelSequence {
public:
    LevelSequence() = default;
    LevelSequence(int level, Index first, std::vector<double> values);
    LevelSequence(int level, Index first, std::vector<double> values, IndexRange valid);

    static LevelSequence zeros(int level, IndexRange range);

    template <class Fn>
    static LevelSequence generate(int level, IndexRange range, Fn&& fn) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(range.size()));
        for (Index n = range.first; n <= range.last; ++n) v.push_back(static_cast<double>(fn(n)));
        return LevelSequence(level, range.first, std::move(v));
    }

    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] IndexRange range() const {
        return {first_, first_ + static_cast<Index>(values_.size()) - 1};
    }
    [[nodiscard]] IndexRange valid() const { return valid_; }
    [[nodiscard]] bool is_valid_on(const IndexRange& r) const { return valid_.contains(r); }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    // Value at index n. Throws InputError when n lies outside the storage.
    [[nodiscard]] double operator()(Index n) const;

    [[nodiscard]] LevelSequence with_level(int level) const;
    // Copy restricted to r (r must lie inside the storage).
    [[nodiscard]] LevelSequence restricted(const IndexRange& r) const;
    // Copy with the single value at n replaced.
    [[nodiscard]] LevelSequence with_value(Index n, double value) const;
    [[nodiscard]] LevelSequence scaled(double factor) const;

private:
    int level_ = 0;
    Index first_ = 0;
    std::vector<double> values_;
    IndexRange valid_{};
};

enum class Direction { forward, backward };

// S+ x(n) = x(n+1), S- x(n) = x(n-1).
[[nodiscard]] LevelSequence apply_shift(const LevelSequence& x, Direction direction);
// Delta x(n) = x(n+1) - x(n), nabla x(n) = x(n) - x(n-1).
[[nodiscard]] LevelSequence apply_difference(const LevelSequence& x, Direction direction);

[[nodiscard]] double max_abs(const LevelSequence& x, const IndexRange& r);

// rho_k on [a, b+1]. The cell b+1 is only used by boundary certificates.
class WeightLevel {
public:
    WeightLevel(int level, Grid grid, std::vector<double> rho);

    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] IndexRange range() const { return {grid_.a(), grid_.b() + 1}; }
    [[nodiscard]] std::span<const double> values() const { return rho_; }
    [[nodiscard]] double operator()(Index n) const;

    [[nodiscard]] WeightLevel scaled(double factor) const;
    // Rescaled so that sum_{n=a}^{b} rho(n) = 1.
    [[nodiscard]] WeightLevel normalized() const;

private:
    int level_;
    Grid grid_;
    std::vector<double> rho_;
};

// sum_{n=a}^{b} x(n) y(n) rho_k(n). All three arguments must share the level.
[[nodiscard]] double inner_product(const LevelSequence& x, const LevelSequence& y,
                                   const WeightLevel& w);
[[nodiscard]] double weighted_norm(const LevelSequence& x, const WeightLevel& w);

// rho(a) = seed; rho(n+1) = c(n) rho(n) / b(n+1) for n = a..b.
// Throws CheckError on a zero pivot b(n+1) or a non-positive interior value.
[[nodiscard]] WeightLevel build_weight(const LevelSequence& bk, const LevelSequence& ck,
                                       const Grid& grid, double seed = 1.0);

// rho_{k-1}(n) = c_k(n) rho_k(n) on [a, b+1].
[[nodiscard]] WeightLevel descend_weight(const WeightLevel& w, const LevelSequence& ck);

struct BoundaryReport {
    double left = 0.0;   // |b_k(a) rho_k(a)|
    double right = 0.0;  // |b_k(b+1) rho_k(b+1)|
    double tolerance = 0.0;
    bool pass = false;
};

[[nodiscard]] BoundaryReport check_boundary(const WeightLevel& w, const LevelSequence& bk,
                                            double tol);

// max_n |b(n+1) rho(n+1) - c(n) rho(n)| / max_n |b(n+1) rho(n+1)| over n = a..b.
[[nodiscard]] double pearson_residual(const WeightLevel& w, const LevelSequence& bk,
                                      const LevelSequence& ck);

// Shortest round-trip decimal form, independent of the C locale.
[[nodiscard]] std::string format_double(double v);

// CSV "n,value" (LF line endings) and JSON [{n, value}, ...] over r.
[[nodiscard]] std::string to_csv(const LevelSequence& x, const IndexRange& r);
[[nodiscard]] nlohmann::json to_json(const LevelSequence& x, const IndexRange& r);
// CSV "n,rho" and JSON [{n, rho}, ...] over [a, b+1].
[[nodiscard]] std::string to_csv(const WeightLevel& w);
[[nodiscard]] nlohmann::json to_json(const WeightLevel& w);

}  // namespace ladderkit
