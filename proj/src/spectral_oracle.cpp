#include "ladderkit/spectral_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ladderkit {

TridiagonalMatrix realize_matrix(const SecondOrderOperator& h, const WeightLevel& w,
                                 double max_asymmetry) {
    const Grid& g = h.grid();
    if (!(w.grid() == g)) throw InputError("operator and weight live on different grids");
    if (w.level() != h.level()) throw InputError("operator and weight belong to different levels");
    for (Index n = g.a(); n <= g.b(); ++n) {
        if (!(w(n) > 0.0)) {
            throw CheckError("matrix realization needs a positive weight (rho(" + std::to_string(n) +
                             ") = " + format_double(w(n)) + ")");
        }
    }
    TridiagonalMatrix m;
    for (Index n = g.a(); n <= g.b(); ++n) m.diag.push_back(h.v(n));
    for (Index n = g.a(); n < g.b(); ++n) {
        const double ratio = std::sqrt(w(n) / w(n + 1));
        const double from_z = h.z(n) * ratio;
        const double from_w = h.w(n + 1) / ratio;
        const double scale = std::max(std::abs(from_z), std::abs(from_w));
        if (scale > 0.0) m.asymmetry = std::max(m.asymmetry, std::abs(from_z - from_w) / scale);
        m.off.push_back(0.5 * (from_z + from_w));
    }
    if (!(m.asymmetry <= max_asymmetry)) {
        throw CheckError("operator is not self-adjoint in the weighted space: asymmetry " +
                         format_double(m.asymmetry) + " exceeds " + format_double(max_asymmetry));
    }
    return m;
}

std::vector<double> multiply(const TridiagonalMatrix& m, const std::vector<double>& u) {
    const std::size_t n = m.size();
    if (u.size() != n) throw InputError("vector length does not match the matrix");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = m.diag[i] * u[i];
        if (i > 0) s += m.off[i - 1] * u[i - 1];
        if (i + 1 < n) s += m.off[i] * u[i + 1];
        out[i] = s;
    }
    return out;
}

EigenDecomposition eigensolve(const TridiagonalMatrix& m, bool with_vectors, int max_sweeps) {
    const std::size_t n = m.size();
    if (n == 0) throw InputError("eigensolve needs a non-empty matrix");
    if (m.off.size() + 1 != n) throw InputError("off-diagonal must have length N-1");
    for (double x : m.diag) {
        if (!std::isfinite(x)) throw InputError("matrix entries must be finite");
    }
    for (double x : m.off) {
        if (!std::isfinite(x)) throw InputError("matrix entries must be finite");
    }
    std::vector<double> d = m.diag;
    std::vector<double> e(m.off);
    e.push_back(0.0);
    // z[row][col]; column j holds eigenvector j.
    std::vector<std::vector<double>> z;
    if (with_vectors) {
        z.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) z[i][i] = 1.0;
    }
    const double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int sweeps = 0;
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < n; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) break;
            }
            if (mm == l) break;
            if (sweeps++ == max_sweeps) {
                throw Error("eigensolve did not converge for eigenvalue index " + std::to_string(l) +
                            " within " + std::to_string(max_sweeps) + " sweeps");
            }
            // Wilkinson-type shift from the leading 2x2 block.
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool deflated = false;
            for (std::size_t ii = mm; ii-- > l;) {
                double f = s * e[ii];
                const double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                if (with_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z[k][ii + 1];
                        z[k][ii + 1] = s * z[k][ii] + c * f;
                        z[k][ii] = c * z[k][ii] - s * f;
                    }
                }
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        } while (true);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    EigenDecomposition out;
    for (std::size_t j : order) {
        out.values.push_back(d[j]);
        if (with_vectors) {
            std::vector<double> col(n);
            for (std::size_t k = 0; k < n; ++k) col[k] = z[k][j];
            out.vectors.push_back(std::move(col));
        }
    }
    return out;
}

std::vector<double> symmetrize(const LevelSequence& x, const WeightLevel& w) {
    std::vector<double> u;
    for (Index n = w.grid().a(); n <= w.grid().b(); ++n) u.push_back(std::sqrt(w(n)) * x(n));
    return u;
}

SpectrumReport compare_spectra(const std::vector<EigenPair>& ladder,
                               const std::vector<double>& oracle, double tol,
                               const TridiagonalMatrix* matrix, const WeightLevel* weight) {
    SpectrumReport report;
    for (const EigenPair& pair : ladder) {
        SpectrumMatch match;
        match.ladder_index = pair.ladder_index;
        match.lambda = pair.lambda;
        match.abs_err = std::numeric_limits<double>::infinity();
        for (double o : oracle) {
            const double err = std::abs(o - pair.lambda);
            if (err < match.abs_err) {
                match.abs_err = err;
                match.nearest_oracle = o;
            }
        }
        match.pass = match.abs_err <= tol;
        if (matrix != nullptr && weight != nullptr) {
            const std::vector<double> u = symmetrize(pair.vector, *weight);
            const std::vector<double> mu = multiply(*matrix, u);
            double res = 0.0;
            double norm = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double r = mu[i] - pair.lambda * u[i];
                res += r * r;
                norm += u[i] * u[i];
            }
            match.vector_residual = norm > 0.0 ? std::sqrt(res / norm) : std::sqrt(res);
        }
        report.pass = report.pass && match.pass;
        report.matches.push_back(match);
    }
    return report;
}

}  // namespace ladderkit
