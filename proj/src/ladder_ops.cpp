#include "ladderkit/ladder_ops.hpp"

#include <algorithm>
#include <cmath>

namespace ladderkit {

std::string to_string(Family family) {
    switch (family) {
        case Family::example1: return "example1";
        case Family::hypergeometric: return "hypergeometric";
        case Family::geometric: return "geometric";
        case Family::explicit_coefficients: return "explicit";
    }
    return "unknown";
}

namespace {

WeightLevel chain_weight(const Grid& grid, const LevelData& d, double seed) {
    return build_weight(d.b, d.c, grid, seed);
}

std::vector<WeightLevel> build_chain_weights(const Grid& grid, const std::vector<LevelData>& levels,
                                             double seed) {
    std::vector<WeightLevel> out;
    out.reserve(levels.size());
    out.push_back(chain_weight(grid, levels[0], seed));
    for (std::size_t k = 1; k < levels.size(); ++k) {
        const double ca = levels[k].c(grid.a());
        if (!(ca > 0.0)) {
            throw CheckError("weight at level " + std::to_string(k - 1) +
                             " cannot be positive: c_" + std::to_string(k) + "(a) = " +
                             format_double(ca));
        }
        out.push_back(chain_weight(grid, levels[k], out.back()(grid.a()) / ca));
    }
    return out;
}

// out(n) = fn(n) on `valid` (clipped to the storage of x), zero elsewhere.
template <class Fn>
LevelSequence map_over(const LevelSequence& x, IndexRange valid, int level, Fn&& fn) {
    const IndexRange storage = x.range();
    valid = valid.intersect(storage);
    std::vector<double> out(static_cast<std::size_t>(storage.size()), 0.0);
    for (Index n = valid.first; n <= valid.last; ++n) {
        out[static_cast<std::size_t>(n - storage.first)] = fn(n);
    }
    return LevelSequence(level, storage.first, std::move(out), valid);
}

LevelSequence annihilate(const LevelData& d, const LevelSequence& x, int out_level) {
    const IndexRange valid = IndexRange{x.valid().first, x.valid().last - 1}.intersect(d.f.range());
    return map_over(x, valid, out_level,
                    [&](Index n) { return x(n + 1) + (d.f(n) - 1.0) * x(n); });
}

LevelSequence create(const LevelData& d, const LevelSequence& y, int out_level) {
    const IndexRange valid = IndexRange{y.valid().first + 1, y.valid().last}.intersect(d.b.range());
    return map_over(y, valid, out_level, [&](Index n) {
        return d.b(n) * y(n - 1) + (d.f(n) - 1.0) * d.c(n) * y(n);
    });
}

void require_level(const ChainSpec& chain, int k, int lowest) {
    if (k < lowest || k > chain.depth()) {
        throw InputError("level " + std::to_string(k) + " outside [" + std::to_string(lowest) +
                         ", " + std::to_string(chain.depth()) + "]");
    }
}

void require_seq_level(const LevelSequence& x, int expected, const char* what) {
    if (x.level() != expected) {
        throw InputError(std::string(what) + ": expected a level-" + std::to_string(expected) +
                         " sequence, got level " + std::to_string(x.level()));
    }
}

double relative_gap(double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
}

}  // namespace

ChainSpec::ChainSpec(Grid grid, Family family, std::vector<LevelData> levels,
                     std::vector<double> alpha, double weight_seed,
                     std::optional<HypergeometricParams> hypergeometric)
    : grid_(grid),
      family_(family),
      levels_(std::move(levels)),
      alpha_(std::move(alpha)),
      weight_seed_(weight_seed),
      hypergeometric_(std::move(hypergeometric)) {
    if (levels_.empty()) throw InputError("chain needs at least one level");
    if (alpha_.size() != levels_.size()) {
        throw InputError("chain with K=" + std::to_string(depth()) + " needs " +
                         std::to_string(levels_.size()) + " alpha values, got " +
                         std::to_string(alpha_.size()));
    }
    if (depth() > grid_.b() - grid_.a()) {
        throw InputError("chain depth K=" + std::to_string(depth()) +
                         " exceeds the grid capacity b-a=" + std::to_string(grid_.b() - grid_.a()));
    }
    const IndexRange work = work_range();
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const LevelData& d = levels_[k];
        const int kk = static_cast<int>(k);
        if (d.level != kk || d.b.level() != kk || d.c.level() != kk || d.f.level() != kk) {
            throw InputError("level data out of order at k=" + std::to_string(k));
        }
        for (const LevelSequence* s : {&d.b, &d.c, &d.f}) {
            if (!s->is_valid_on(work)) {
                throw InputError("level " + std::to_string(k) + " data must cover [" +
                                 std::to_string(work.first) + ", " + std::to_string(work.last) +
                                 "]");
            }
        }
    }
    for (double a : alpha_) {
        if (!std::isfinite(a)) throw InputError("alpha values must be finite");
    }
    weights_ = build_chain_weights(grid_, levels_, weight_seed_);
}

const LevelData& ChainSpec::level(int k) const {
    require_level(*this, k, 0);
    return levels_[static_cast<std::size_t>(k)];
}

double ChainSpec::alpha(int k) const {
    require_level(*this, k, 0);
    return alpha_[static_cast<std::size_t>(k)];
}

const WeightLevel& ChainSpec::weight(int k) const {
    require_level(*this, k, 0);
    return weights_[static_cast<std::size_t>(k)];
}

ChainSpec ChainSpec::with_level_data(const LevelData& data) const {
    require_level(*this, data.level, 0);
    auto levels = levels_;
    levels[static_cast<std::size_t>(data.level)] = data;
    return ChainSpec(grid_, family_, std::move(levels), alpha_, weight_seed_, hypergeometric_);
}

LevelSequence apply_annihilation(const ChainSpec& chain, int k, const LevelSequence& x) {
    require_level(chain, k, 1);
    require_seq_level(x, k, "apply_annihilation");
    return annihilate(chain.level(k), x, k - 1);
}

LevelSequence apply_creation(const ChainSpec& chain, int k, const LevelSequence& y) {
    require_level(chain, k, 1);
    require_seq_level(y, k - 1, "apply_creation");
    return create(chain.level(k), y, k);
}

LevelSequence apply_factorized(const ChainSpec& chain, int k, const LevelSequence& x) {
    require_level(chain, k, 0);
    require_seq_level(x, k, "apply_factorized");
    const LevelData& d = chain.level(k);
    const LevelSequence ax = annihilate(d, x, k);
    const LevelSequence aax = create(d, ax, k);
    const double alpha = chain.alpha(k);
    return map_over(x, aax.valid(), k, [&](Index n) { return aax(n) + alpha * x(n); });
}

SecondOrderOperator::SecondOrderOperator(int level, Grid grid, std::vector<double> z,
                                         std::vector<double> w, std::vector<double> v)
    : level_(level), grid_(grid), z_(std::move(z)), w_(std::move(w)), v_(std::move(v)) {
    const auto n = static_cast<std::size_t>(grid_.size());
    if (z_.size() != n || w_.size() != n || v_.size() != n) {
        throw InputError("operator coefficients must cover [a, b]");
    }
}

std::size_t SecondOrderOperator::slot(Index n) const {
    if (!grid_.interior().contains(n)) {
        throw InputError("operator coefficient index " + std::to_string(n) + " outside [a, b]");
    }
    return static_cast<std::size_t>(n - grid_.a());
}

LevelSequence SecondOrderOperator::apply(const LevelSequence& x) const {
    if (!x.is_valid_on(grid_.ghosted())) {
        throw InputError("operator input must be valid on [a-1, b+1]");
    }
    return map_over(x, grid_.interior(), x.level(), [&](Index n) {
        return z(n) * x(n + 1) + w(n) * x(n - 1) + v(n) * x(n);
    });
}

SecondOrderOperator compose_hamiltonian(const ChainSpec& chain, int k, Side side) {
    require_level(chain, side == Side::lower ? k : k + 1, 0);
    require_level(chain, k, 0);
    const Grid& g = chain.grid();
    std::vector<double> z, w, v;
    const auto size = static_cast<std::size_t>(g.size());
    z.reserve(size);
    w.reserve(size);
    v.reserve(size);
    if (side == Side::lower) {
        const LevelData& d = chain.level(k);
        const double alpha = chain.alpha(k);
        for (Index n = g.a(); n <= g.b(); ++n) {
            const double fm = d.f(n) - 1.0;
            z.push_back(fm * d.c(n));
            w.push_back(d.b(n) * (d.f(n - 1) - 1.0));
            v.push_back(d.b(n) + fm * fm * d.c(n) + alpha);
        }
    } else {
        const LevelData& d = chain.level(k + 1);
        const double alpha = chain.alpha(k + 1);
        for (Index n = g.a(); n <= g.b(); ++n) {
            const double fm = d.f(n) - 1.0;
            z.push_back((d.f(n + 1) - 1.0) * d.c(n + 1));
            w.push_back(fm * d.b(n));
            v.push_back(d.b(n + 1) + fm * fm * d.c(n) + alpha);
        }
    }
    return SecondOrderOperator(k, g, std::move(z), std::move(w), std::move(v));
}

double balance_residual(const SecondOrderOperator& h, const WeightLevel& w) {
    const Grid& g = h.grid();
    double worst = 0.0;
    for (Index n = g.a(); n < g.b(); ++n) {
        worst = std::max(worst, relative_gap(h.z(n) * w(n), h.w(n + 1) * w(n + 1)));
    }
    return worst;
}

LevelSequence random_sequence(const Grid& grid, int level, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return LevelSequence::generate(level, grid.ghosted(), [&](Index n) {
        return grid.interior().contains(n) ? dist(rng) : 0.0;
    });
}

AdjointnessReport verify_adjointness(const ChainSpec& chain, int k, int trials,
                                     std::uint64_t rng_seed, double boundary_tol) {
    require_level(chain, k, 1);
    if (trials < 0) throw InputError("trial count must be non-negative");
    const WeightLevel& upper = chain.weight(k);
    const WeightLevel& lower = chain.weight(k - 1);
    std::mt19937_64 rng(rng_seed);
    AdjointnessReport report;
    report.level = k;
    report.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const LevelSequence x = random_sequence(chain.grid(), k - 1, rng);
        const LevelSequence y = random_sequence(chain.grid(), k, rng);
        const double lhs = inner_product(apply_creation(chain, k, x), y, upper);
        const double rhs = inner_product(x, apply_annihilation(chain, k, y), lower);
        const double norms = weighted_norm(x, lower) * weighted_norm(y, upper);
        const double r = norms > 0.0 ? std::abs(lhs - rhs) / norms : std::abs(lhs - rhs);
        report.max_relative_residual = std::max(report.max_relative_residual, r);
    }
    report.boundary = check_boundary(upper, chain.level(k).b, boundary_tol);
    return report;
}

std::vector<ConditionResiduals> check_chain_conditions(const ChainSpec& chain) {
    if (chain.depth() < 1) throw InputError("condition check needs at least two levels");
    const Grid& g = chain.grid();
    std::vector<ConditionResiduals> out;
    for (int k = 0; k < chain.depth(); ++k) {
        const LevelData& lo = chain.level(k);
        const LevelData& hi = chain.level(k + 1);
        const double dalpha = chain.alpha(k + 1) - chain.alpha(k);
        ConditionResiduals r;
        r.level = k;
        auto track = [](double value, Index n, double& worst, Index& where) {
            if (value > worst) {
                worst = value;
                where = n;
            }
        };
        for (Index n = g.a(); n <= g.b() + 1; ++n) {
            const double bk = lo.b(n);
            const double bk1 = hi.b(n);
            const double scale = std::max(std::abs(bk), std::abs(bk1));
            if (scale == 0.0) {
                ++r.singular_points;
                continue;
            }
            const double fk_prev = lo.f(n - 1) - 1.0;
            track(std::abs(bk1 * (hi.f(n) - 1.0) - bk * fk_prev) / scale, n, r.f_link,
                  r.worst_f);
            track(std::abs(bk * hi.c(n) - bk1 * lo.c(n - 1)) / scale, n, r.c_link,
                  r.worst_c);
            if (n <= g.b()) {
                const double fk = lo.f(n) - 1.0;
                const double lhs = bk1 * (bk - hi.b(n + 1) - dalpha + fk * fk * lo.c(n));
                const double rhs = bk * fk_prev * fk_prev * lo.c(n - 1);
                track(std::abs(lhs - rhs) / scale, n, r.b_link, r.worst_b);
            }
        }
        out.push_back(r);
    }
    return out;
}

std::vector<PropagatedLevel> propagate_level_data(const std::vector<SeqFn>& b_levels,
                                                  const SeqFn& f0, const SeqFn& c0, int depth,
                                                  IndexRange range) {
    if (depth < 0) throw InputError("depth must be non-negative");
    if (static_cast<int>(b_levels.size()) < depth + 1) {
        throw InputError("propagate_level_data needs b_0..b_K");
    }
    std::vector<PropagatedLevel> out;
    for (int k = 0; k <= depth; ++k) {
        std::vector<double> f, c;
        for (Index n = range.first; n <= range.last; ++n) {
            double ratio = 1.0;  // prod b_{k-i}(n-i+1) / b_{k-i+1}(n-i+1)
            for (int i = 1; i <= k; ++i) {
                const Index m = n - i + 1;
                const double num = b_levels[static_cast<std::size_t>(k - i)](m);
                const double den = b_levels[static_cast<std::size_t>(k - i + 1)](m);
                if (den == 0.0 || num == 0.0) {
                    throw CheckError("singular ratio in level propagation at k=" +
                                     std::to_string(k) + ", n=" + std::to_string(n) +
                                     ", i=" + std::to_string(i));
                }
                ratio *= num / den;
            }
            f.push_back(ratio * (f0(n - k) - 1.0) + 1.0);
            c.push_back(c0(n - k) / ratio);
        }
        out.push_back({LevelSequence(k, range.first, std::move(f)),
                       LevelSequence(k, range.first, std::move(c))});
    }
    return out;
}

EigenPair ground_state(const ChainSpec& chain, int p) {
    require_level(chain, p, 0);
    const LevelData& d = chain.level(p);
    const IndexRange work = chain.work_range();
    const Index a = chain.grid().a();
    std::vector<double> x(static_cast<std::size_t>(work.size()), 0.0);
    auto at = [&](Index n) -> double& { return x[static_cast<std::size_t>(n - work.first)]; };
    EigenPair pair;
    at(a) = 1.0;
    for (Index n = a; n < work.last; ++n) {
        const double factor = 1.0 - d.f(n);
        if (factor == 0.0) pair.degenerate = true;
        at(n + 1) = factor * at(n);
    }
    IndexRange valid = work;
    for (Index n = a - 1; n >= work.first; --n) {
        const double factor = 1.0 - d.f(n);
        if (factor == 0.0) {
            valid.first = n + 1;
            break;
        }
        at(n) = at(n + 1) / factor;
    }
    double peak = 0.0;
    for (Index n = a; n <= chain.grid().b(); ++n) peak = std::max(peak, std::abs(at(n)));
    if (peak > 0.0) {
        for (double& e : x) e /= peak;
    }
    pair.lambda = chain.alpha(p);
    pair.vector = LevelSequence(p, work.first, std::move(x), valid);
    pair.level = p;
    pair.ladder_index = 0;
    return pair;
}

EigenPair raise_state(const ChainSpec& chain, const EigenPair& x, int k) {
    require_level(chain, k, 0);
    if (k < x.level) {
        throw InputError("raise_state: target level " + std::to_string(k) +
                         " below source level " + std::to_string(x.level));
    }
    EigenPair out = x;
    for (int j = x.level + 1; j <= k; ++j) out.vector = apply_creation(chain, j, out.vector);
    out.level = k;
    out.ladder_index = x.ladder_index + (k - x.level);
    return out;
}

EigenLadder solve_chain_eigens(const ChainSpec& chain, int k) {
    require_level(chain, k, 0);
    EigenLadder ladder;
    ladder.level = k;
    for (int p = 0; p <= k; ++p) ladder.pairs.push_back(raise_state(chain, ground_state(chain, p), k));
    for (int p = 0; p <= k; ++p) {
        for (int q = p + 1; q <= k; ++q) {
            const double scale = std::max({1.0, std::abs(chain.alpha(p)), std::abs(chain.alpha(q))});
            if (std::abs(chain.alpha(p) - chain.alpha(q)) <= 1e-12 * scale) {
                ladder.duplicate_eigenvalues = true;
            }
        }
    }
    return ladder;
}

double eigen_residual(const ChainSpec& chain, const EigenPair& pair) {
    const SecondOrderOperator h = compose_hamiltonian(chain, pair.level, Side::lower);
    const LevelSequence hx = h.apply(pair.vector);
    const IndexRange interior = chain.grid().interior();
    double worst = 0.0;
    for (Index n = interior.first; n <= interior.last; ++n) {
        worst = std::max(worst, std::abs(hx(n) - pair.lambda * pair.vector(n)));
    }
    const double norm = max_abs(pair.vector, interior);
    return norm > 0.0 ? worst / norm : worst;
}

}  // namespace ladderkit
