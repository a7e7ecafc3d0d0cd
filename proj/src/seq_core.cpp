#include "ladderkit/seq_core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace ladderkit {

IndexRange IndexRange::intersect(const IndexRange& r) const {
    return {std::max(first, r.first), std::min(last, r.last)};
}

Grid::Grid(Index a, Index b) : a_(a), b_(b) {
    if (a >= b) {
        throw InputError("grid requires a < b (got a=" + std::to_string(a) +
                         ", b=" + std::to_string(b) + ")");
    }
}

LevelSequence::LevelSequence(int level, Index first, std::vector<double> values)
    : LevelSequence(level, first, std::move(values),
                    IndexRange{std::numeric_limits<Index>::min(),
                               std::numeric_limits<Index>::max()}) {}

LevelSequence::LevelSequence(int level, Index first, std::vector<double> values,
                             IndexRange valid)
    : level_(level), first_(first), values_(std::move(values)) {
    if (level < 0) throw InputError("sequence level must be non-negative");
    for (double v : values_) {
        if (!std::isfinite(v)) throw CheckError("sequence holds a non-finite value");
    }
    valid_ = valid.intersect(range());
}

LevelSequence LevelSequence::zeros(int level, IndexRange range) {
    return LevelSequence(level, range.first,
                         std::vector<double>(static_cast<std::size_t>(range.size()), 0.0));
}

double LevelSequence::operator()(Index n) const {
    if (!range().contains(n)) {
        throw InputError("index " + std::to_string(n) + " outside sequence storage [" +
                         std::to_string(range().first) + ", " + std::to_string(range().last) +
                         "]");
    }
    return values_[static_cast<std::size_t>(n - first_)];
}

LevelSequence LevelSequence::with_level(int level) const {
    return LevelSequence(level, first_, values_, valid_);
}

LevelSequence LevelSequence::restricted(const IndexRange& r) const {
    if (!range().contains(r) || r.empty()) {
        throw InputError("restriction range lies outside the sequence storage");
    }
    auto begin = values_.begin() + (r.first - first_);
    return LevelSequence(level_, r.first, std::vector<double>(begin, begin + r.size()),
                         valid_.intersect(r));
}

LevelSequence LevelSequence::with_value(Index n, double value) const {
    if (!range().contains(n)) throw InputError("index outside sequence storage");
    auto v = values_;
    v[static_cast<std::size_t>(n - first_)] = value;
    return LevelSequence(level_, first_, std::move(v), valid_);
}

LevelSequence LevelSequence::scaled(double factor) const {
    auto v = values_;
    for (double& e : v) e *= factor;
    return LevelSequence(level_, first_, std::move(v), valid_);
}

namespace {

// Builds out(n) = fn(n) for n in `valid`, zero elsewhere on the storage of x.
template <class Fn>
LevelSequence map_valid(const LevelSequence& x, IndexRange valid, int level, Fn&& fn) {
    const IndexRange storage = x.range();
    valid = valid.intersect(storage);
    std::vector<double> out(static_cast<std::size_t>(storage.size()), 0.0);
    for (Index n = valid.first; n <= valid.last; ++n) {
        out[static_cast<std::size_t>(n - storage.first)] = fn(n);
    }
    return LevelSequence(level, storage.first, std::move(out), valid);
}

}  // namespace

LevelSequence apply_shift(const LevelSequence& x, Direction direction) {
    const Index s = direction == Direction::forward ? 1 : -1;
    return map_valid(x, x.valid().shifted(-s), x.level(), [&](Index n) { return x(n + s); });
}

LevelSequence apply_difference(const LevelSequence& x, Direction direction) {
    const IndexRange v = x.valid();
    if (direction == Direction::forward) {
        return map_valid(x, {v.first, v.last - 1}, x.level(),
                         [&](Index n) { return x(n + 1) - x(n); });
    }
    return map_valid(x, {v.first + 1, v.last}, x.level(),
                     [&](Index n) { return x(n) - x(n - 1); });
}

double max_abs(const LevelSequence& x, const IndexRange& r) {
    double m = 0.0;
    for (Index n = r.first; n <= r.last; ++n) m = std::max(m, std::abs(x(n)));
    return m;
}

WeightLevel::WeightLevel(int level, Grid grid, std::vector<double> rho)
    : level_(level), grid_(grid), rho_(std::move(rho)) {
    if (static_cast<Index>(rho_.size()) != grid_.size() + 1) {
        throw InputError("weight must cover [a, b+1]");
    }
    for (double v : rho_) {
        if (!std::isfinite(v)) throw CheckError("weight holds a non-finite value");
    }
}

double WeightLevel::operator()(Index n) const {
    if (!range().contains(n)) {
        throw InputError("weight index " + std::to_string(n) + " outside [a, b+1]");
    }
    return rho_[static_cast<std::size_t>(n - grid_.a())];
}

WeightLevel WeightLevel::scaled(double factor) const {
    auto v = rho_;
    for (double& e : v) e *= factor;
    return WeightLevel(level_, grid_, std::move(v));
}

WeightLevel WeightLevel::normalized() const {
    double total = 0.0;
    for (Index n = grid_.a(); n <= grid_.b(); ++n) total += (*this)(n);
    if (!(total > 0.0)) throw CheckError("cannot normalize a weight with non-positive mass");
    return scaled(1.0 / total);
}

namespace {

void require_same_level(int x, int y, const char* what) {
    if (x != y) {
        throw InputError(std::string("level mismatch in ") + what + ": " + std::to_string(x) +
                         " vs " + std::to_string(y));
    }
}

void require_positive(const WeightLevel& w, const char* what) {
    for (Index n = w.grid().a(); n <= w.grid().b(); ++n) {
        if (!(w(n) > 0.0)) {
            throw CheckError(std::string(what) + ": weight at level " + std::to_string(w.level()) +
                             " is not positive at n=" + std::to_string(n) + " (rho=" +
                             format_double(w(n)) + ")");
        }
    }
}

}  // namespace

double inner_product(const LevelSequence& x, const LevelSequence& y, const WeightLevel& w) {
    require_same_level(x.level(), y.level(), "inner_product");
    require_same_level(x.level(), w.level(), "inner_product");
    double sum = 0.0;
    for (Index n = w.grid().a(); n <= w.grid().b(); ++n) sum += x(n) * y(n) * w(n);
    return sum;
}

double weighted_norm(const LevelSequence& x, const WeightLevel& w) {
    return std::sqrt(inner_product(x, x, w));
}

WeightLevel build_weight(const LevelSequence& bk, const LevelSequence& ck, const Grid& grid,
                         double seed) {
    require_same_level(bk.level(), ck.level(), "build_weight");
    if (!(seed > 0.0)) throw InputError("weight seed must be positive");
    std::vector<double> rho(static_cast<std::size_t>(grid.size() + 1));
    rho[0] = seed;
    for (Index n = grid.a(); n <= grid.b(); ++n) {
        const double pivot = bk(n + 1);
        if (pivot == 0.0) {
            throw CheckError("singular pivot in weight recursion: b_" +
                             std::to_string(bk.level()) + "(" + std::to_string(n + 1) + ") = 0");
        }
        const auto i = static_cast<std::size_t>(n - grid.a());
        rho[i + 1] = ck(n) * rho[i] / pivot;
    }
    WeightLevel w(bk.level(), grid, std::move(rho));
    require_positive(w, "build_weight");
    return w;
}

WeightLevel descend_weight(const WeightLevel& w, const LevelSequence& ck) {
    require_same_level(w.level(), ck.level(), "descend_weight");
    if (w.level() == 0) throw InputError("cannot descend below level 0");
    std::vector<double> rho;
    rho.reserve(static_cast<std::size_t>(w.grid().size() + 1));
    for (Index n = w.grid().a(); n <= w.grid().b() + 1; ++n) rho.push_back(ck(n) * w(n));
    WeightLevel out(w.level() - 1, w.grid(), std::move(rho));
    require_positive(out, "descend_weight");
    return out;
}

BoundaryReport check_boundary(const WeightLevel& w, const LevelSequence& bk, double tol) {
    require_same_level(w.level(), bk.level(), "check_boundary");
    const Grid& g = w.grid();
    BoundaryReport r;
    r.left = std::abs(bk(g.a()) * w(g.a()));
    r.right = std::abs(bk(g.b() + 1) * w(g.b() + 1));
    r.tolerance = tol;
    r.pass = r.left <= tol && r.right <= tol;
    return r;
}

double pearson_residual(const WeightLevel& w, const LevelSequence& bk, const LevelSequence& ck) {
    const Grid& g = w.grid();
    double worst = 0.0;
    double scale = 0.0;
    for (Index n = g.a(); n <= g.b(); ++n) {
        const double lhs = bk(n + 1) * w(n + 1);
        worst = std::max(worst, std::abs(lhs - ck(n) * w(n)));
        scale = std::max(scale, std::abs(lhs));
    }
    return scale > 0.0 ? worst / scale : worst;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

std::string to_csv(const LevelSequence& x, const IndexRange& r) {
    std::string out = "n,value\n";
    for (Index n = r.first; n <= r.last; ++n) {
        out += std::to_string(n) + "," + format_double(x(n)) + "\n";
    }
    return out;
}

nlohmann::json to_json(const LevelSequence& x, const IndexRange& r) {
    auto arr = nlohmann::json::array();
    for (Index n = r.first; n <= r.last; ++n) arr.push_back({{"n", n}, {"value", x(n)}});
    return arr;
}

std::string to_csv(const WeightLevel& w) {
    std::string out = "n,rho\n";
    for (Index n = w.range().first; n <= w.range().last; ++n) {
        out += std::to_string(n) + "," + format_double(w(n)) + "\n";
    }
    return out;
}

nlohmann::json to_json(const WeightLevel& w) {
    auto arr = nlohmann::json::array();
    for (Index n = w.range().first; n <= w.range().last; ++n) {
        arr.push_back({{"n", n}, {"rho", w(n)}});
    }
    return arr;
}

}  // namespace ladderkit
