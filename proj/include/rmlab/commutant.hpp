/* Copyright 2026 The rmlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rmlab/braid.hpp"
#include "rmlab/random.hpp"

namespace rmlab {

inline constexpr double kNullTol = 1e-9;
inline constexpr double kClosureTol = 1e-9;
inline constexpr long kLSpanBudget = 4096;  // max d^{2m} for the braid-generated span

using BlockProfile = std::vector<int>;

inline std::string profile_string(const BlockProfile& p) {
    int ones = 0;
    std::vector<int> big;
    for (int k : p) (k == 1 ? ++ones : (big.push_back(k), 0));
    std::sort(big.begin(), big.end());
    std::string s;
    if (ones == 1) s = "C";
    else if (ones > 1) s = "C^" + std::to_string(ones);
    for (int k : big) s += (s.empty() ? "" : " (+) ") + std::string("M_") + std::to_string(k);
    return s.empty() ? "0" : s;
}

struct SubalgebraBasis {
    int d = 2;
    int level = 1;
    std::vector<AlgebraElement> basis;
    std::optional<BlockProfile> blockProfile;
    double closureResidual = 0;
    bool converged = true;
    int iterations = 0;
    std::string note;

    long dimension() const { return long(basis.size()); }
    std::string profile() const { return blockProfile ? profile_string(*blockProfile) : "unresolved"; }
};

namespace detail {

// Column-orthonormal matrix of row-major flattened basis elements.
inline Eigen::MatrixXcd span_columns(const std::vector<AlgebraElement>& basis, long dim) {
    Eigen::MatrixXcd q(dim * dim, long(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) q.col(long(i)) = vec(basis[i].matrix) / std::sqrt(double(dim));
    return q;
}

inline std::vector<AlgebraElement> elements_from_columns(const Eigen::MatrixXcd& q, int d, int level) {
    const long dim = ipow(d, level);
    std::vector<AlgebraElement> out;
    for (long c = 0; c < q.cols(); ++c) out.emplace_back(d, level, ComplexMatrix(unvec(q.col(c), dim) * std::sqrt(double(dim))));
    return out;
}

// Matrix of the linear map x -> f(x) on d^level x d^level matrices, in matrix-unit coordinates.
inline Eigen::MatrixXcd operator_matrix(long dim, const std::function<Eigen::VectorXcd(const ComplexMatrix&)>& f) {
    Eigen::MatrixXcd a;
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
            e(i, j) = 1.0;
            const Eigen::VectorXcd col = f(e);
            if (a.size() == 0) a.resize(col.size(), dim * dim);
            a.col(i * dim + j) = col;
        }
    return a;
}

inline double relative_residual(const Eigen::VectorXcd& v, const Eigen::MatrixXcd& q) {
    const double n = v.norm();
    if (n == 0) return 0;
    if (q.cols() == 0) return 1.0;
    return (v - q * (q.adjoint() * v)).norm() / n;
}

}  // namespace detail

// max over a in A of |a - P_B a| / |a|
inline double subspace_residual(const std::vector<AlgebraElement>& a, const std::vector<AlgebraElement>& b) {
    if (a.empty()) return 0;
    const long dim = a.front().dim();
    const Eigen::MatrixXcd qb = column_span(detail::span_columns(b, dim), kNullTol);
    double worst = 0;
    for (const auto& x : a) worst = std::max(worst, detail::relative_residual(vec(x.matrix), qb));
    return worst;
}

inline double membership_residual(const ComplexMatrix& x, const SubalgebraBasis& s) {
    const Eigen::MatrixXcd q = detail::span_columns(s.basis, x.rows());
    return detail::relative_residual(vec(x), q);
}

// Largest residual of projecting pairwise products (and adjoints) back onto the span.
inline double closure_residual(const std::vector<AlgebraElement>& basis) {
    if (basis.empty()) return 0;
    const long dim = basis.front().dim();
    const Eigen::MatrixXcd q = column_span(detail::span_columns(basis, dim), kNullTol);
    if (q.cols() == dim * dim) return 0;  // the full matrix algebra
    const long k = long(basis.size());
    double worst = 0;
    Eigen::MatrixXcd prods(dim * dim, k + 1);
    // residuals are measured against |a| |b| so that products vanishing up to rounding do not count
    for (const auto& a : basis) {
        const double na = a.matrix.norm();
        if (na == 0) continue;
        prods.col(k) = vec(ComplexMatrix(a.matrix.adjoint()));
        for (long j = 0; j < k; ++j) prods.col(j) = vec(ComplexMatrix(a.matrix * basis[std::size_t(j)].matrix));
        const Eigen::MatrixXcd resid = prods - q * (q.adjoint() * prods);
        for (long j = 0; j <= k; ++j) {
            const double scale = j < k ? na * basis[std::size_t(j)].matrix.norm() / std::sqrt(double(dim)) : na;
            if (scale > 0) worst = std::max(worst, resid.col(j).norm() / scale);
        }
    }
    return worst;
}

namespace detail {

// Block sizes for an orthonormal basis already known to span a *-algebra.
inline BlockProfile wedderburn_blocks(const std::vector<AlgebraElement>& basis, std::uint64_t seed) {
    if (basis.empty()) throw DomainError("wedderburn: empty basis");
    const long dim = basis.front().dim();
    const long k = long(basis.size());
    if (k == dim * dim) return {int(dim)};
    const int kMaxRetries = 8;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        Rng rng(seed + std::uint64_t(attempt) * 7919);
        // the center is the part of the algebra commuting with two generic elements and their adjoints
        std::vector<ComplexMatrix> probes;
        for (int t = 0; t < 2; ++t) {
            ComplexMatrix g = ComplexMatrix::Zero(dim, dim);
            for (const auto& b : basis) g += cplx(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1) * b.matrix;
            probes.push_back(g);
            probes.push_back(g.adjoint());
        }
        Eigen::MatrixXcd eqs(dim * dim * long(probes.size()), k);
        for (long i = 0; i < k; ++i)
            for (std::size_t t = 0; t < probes.size(); ++t) {
                const ComplexMatrix& b = basis[std::size_t(i)].matrix;
                eqs.block(long(t) * dim * dim, i, dim * dim, 1) = vec(ComplexMatrix(b * probes[t] - probes[t] * b));
            }
        const Eigen::MatrixXcd coeffs = null_space(eqs, kNullTol, double(dim));
        ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
        for (long c = 0; c < coeffs.cols(); ++c) {
            ComplexMatrix z = ComplexMatrix::Zero(dim, dim);
            for (long i = 0; i < k; ++i) z += coeffs(i, c) * basis[std::size_t(i)].matrix;
            h += (2.0 * uniform01(rng) - 1.0) * ComplexMatrix((z + z.adjoint()) / 2.0);
            h += (2.0 * uniform01(rng) - 1.0) * ComplexMatrix((z - z.adjoint()) / cplx(0, 2));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
        const Eigen::VectorXd ev = es.eigenvalues();
        const double spread = std::max(1e-300, ev.cwiseAbs().maxCoeff());
        std::vector<cplx> vals(static_cast<std::size_t>(ev.size()));
        for (long i = 0; i < ev.size(); ++i) vals[std::size_t(i)] = ev(i);
        const auto groups = cluster_values(vals, 1e-8 * spread);
        // distinct clusters must be well separated, otherwise the combination was not generic
        bool generic = true;
        for (std::size_t a = 0; a + 1 < groups.size(); ++a) {
            const double gap = std::abs(vals[std::size_t(groups[a + 1].front())] - vals[std::size_t(groups[a].front())]);
            if (gap < 1e-5 * spread) generic = false;
        }
        if (!generic) continue;
        BlockProfile prof;
        bool ok = true;
        long total = 0;
        for (const auto& g : groups) {
            Eigen::MatrixXcd v(dim, long(g.size()));
            for (std::size_t c = 0; c < g.size(); ++c) v.col(long(c)) = es.eigenvectors().col(g[c]);
            const ComplexMatrix p = v * v.adjoint();
            Eigen::MatrixXcd cols(dim * dim, k);
            for (long i = 0; i < k; ++i) cols.col(i) = vec(ComplexMatrix(p * basis[std::size_t(i)].matrix));
            const long r = column_span(cols, kNullTol).cols();
            if (r == 0) continue;
            const long s = std::lround(std::sqrt(double(r)));
            if (s * s != r) {
                ok = false;
                break;
            }
            prof.push_back(int(s));
            total += r;
        }
        if (!ok || total != k) continue;
        std::sort(prof.begin(), prof.end());
        return prof;
    }
    throw NumericalDegeneracyError("wedderburn: could not resolve block sizes", kMaxRetries);
}

}  // namespace detail

// Block sizes k_i of a finite-dimensional *-algebra given by a spanning set.
inline BlockProfile wedderburn_decompose(const std::vector<AlgebraElement>& span, std::uint64_t seed = 0x5eed,
                                         double tol = kClosureTol) {
    if (span.empty()) throw DomainError("wedderburn: empty span");
    const int d = span.front().d, level = span.front().level;
    const long dim = span.front().dim();
    const auto basis = detail::elements_from_columns(column_span(detail::span_columns(span, dim), kNullTol), d, level);
    if (closure_residual(basis) > tol) throw DomainError("wedderburn: span is not a *-algebra");
    return detail::wedderburn_blocks(basis, seed);
}

inline SubalgebraBasis make_subalgebra(int d, int level, const Eigen::MatrixXcd& columns) {
    SubalgebraBasis s;
    s.d = d;
    s.level = level;
    s.basis = detail::elements_from_columns(columns, d, level);
    s.closureResidual = closure_residual(s.basis);
    if (s.closureResidual <= kClosureTol) {
        try {
            s.blockProfile = detail::wedderburn_blocks(s.basis, 0x5eed);
        } catch (const Error& e) {
            s.note = e.what();
        }
    } else {
        s.note = "span not closed under multiplication";
    }
    return s;
}

// lambda_R on level k: R_k (x (x) 1) R_k^*
inline AlgebraElement apply_endo(const RMatrix& r, const AlgebraElement& x) {
    if (x.d != r.d) throw ShapeError("apply_endo: dimension mismatch");
    const int k = x.level;
    if (k == 0) return {r.d, 1, ComplexMatrix(x.matrix(0, 0) * identity(r.d))};
    const ComplexMatrix rk = right_braid_block(r.matrix, r.d, k);
    return {r.d, k + 1, ComplexMatrix(rk * embed(x.matrix, r.d, k, k + 1) * rk.adjoint())};
}

// {x at level n : (nR)^* (x (x) 1) nR = 1 (x) x}
inline SubalgebraBasis relative_commutant_M(const RMatrix& r, int n) {
    if (n < 1) throw LevelError("relative_commutant_M: n < 1");
    const int d = r.d;
    const ComplexMatrix nr = left_braid_block(r.matrix, d, n);
    const ComplexMatrix nra = nr.adjoint();
    const Eigen::MatrixXcd a = detail::operator_matrix(ipow(d, n), [&](const ComplexMatrix& x) {
        return Eigen::VectorXcd(vec(ComplexMatrix(nra * embed(x, d, n, n + 1) * nr - shift(x, d, 1))));
    });
    return make_subalgebra(d, n, null_space(a, kNullTol, 1.0));
}

// Fixed points of lambda_R at level n: R_n (x (x) 1) R_n^* = x (x) 1
inline SubalgebraBasis fixed_subalgebra(const RMatrix& r, int n) {
    if (n < 1) throw LevelError("fixed_subalgebra: n < 1");
    const int d = r.d;
    const ComplexMatrix rn = right_braid_block(r.matrix, d, n);
    const ComplexMatrix rna = rn.adjoint();
    const Eigen::MatrixXcd a = detail::operator_matrix(ipow(d, n), [&](const ComplexMatrix& x) {
        const ComplexMatrix e = embed(x, d, n, n + 1);
        return Eigen::VectorXcd(vec(ComplexMatrix(rn * e * rna - e)));
    });
    return make_subalgebra(d, n, null_space(a, kNullTol, 1.0));
}

// Commutant of {phi^k(R) : k <= n-2} at level n
inline SubalgebraBasis braid_image_commutant(const RMatrix& r, int n) {
    if (n < 2) throw LevelError("braid_image_commutant: n < 2");
    const int d = r.d;
    std::vector<ComplexMatrix> gens;
    for (int k = 0; k <= n - 2; ++k) gens.push_back(local_operator(r.matrix, d, k, n));
    const long dim = ipow(d, n);
    const Eigen::MatrixXcd a = detail::operator_matrix(dim, [&](const ComplexMatrix& x) {
        Eigen::VectorXcd out(long(gens.size()) * dim * dim);
        for (std::size_t k = 0; k < gens.size(); ++k)
            out.segment(long(k) * dim * dim, dim * dim) = vec(ComplexMatrix(x * gens[k] - gens[k] * x));
        return out;
    });
    return make_subalgebra(d, n, null_space(a, kNullTol, 1.0));
}

// Largest subspace V of level-n matrices with nR (1 (x) V) nR^* inside V (x) 1.
inline SubalgebraBasis relative_commutant_N(const RMatrix& r, int n) {
    if (n < 1) throw LevelError("relative_commutant_N: n < 1");
    const int d = r.d;
    const long dim = ipow(d, n), dim2 = dim * d;
    const ComplexMatrix nr = left_braid_block(r.matrix, d, n);
    const ComplexMatrix nra = nr.adjoint();
    // images of matrix units under T and under the embedding
    Eigen::MatrixXcd timg(dim2 * dim2, dim * dim), eimg(dim2 * dim2, dim * dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
            e(i, j) = 1.0;
            timg.col(i * dim + j) = vec(ComplexMatrix(nr * shift(e, d, 1) * nra));
            eimg.col(i * dim + j) = vec(embed(e, d, n, n + 1)) / std::sqrt(double(d));
        }
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(dim * dim, dim * dim);
    int iterations = 0;
    while (v.cols() > 0) {
        ++iterations;
        const Eigen::MatrixXcd emb = eimg * v;  // orthonormal since the embedding is an isometry up to sqrt(d)
        const Eigen::MatrixXcd t = timg * v;
        const Eigen::MatrixXcd resid = t - emb * (emb.adjoint() * t);
        const Eigen::MatrixXcd c = null_space(resid, kNullTol, 1.0);
        if (c.cols() == v.cols()) break;
        v = v * c;
        if (iterations > dim * dim + 1) throw InternalConsistencyError("relative_commutant_N: no stabilization");
    }
    SubalgebraBasis s = make_subalgebra(d, n, v);
    s.iterations = iterations;
    return s;
}

namespace detail {

// Span of words of length <= len in phi^k(R)^{+-1}, k <= m-2, at level m (orthonormal columns).
inline Eigen::MatrixXcd braid_span(const RMatrix& r, int m, int len, long budget) {
    const int d = r.d;
    const long dim = ipow(d, m);
    std::vector<ComplexMatrix> gens;
    for (int k = 0; k + 2 <= m; ++k) {
        gens.push_back(local_operator(r.matrix, d, k, m));
        gens.push_back(gens.back().adjoint());
    }
    std::vector<Eigen::VectorXcd> basis;
    std::vector<ComplexMatrix> frontier;
    auto try_add = [&](const ComplexMatrix& x) {
        Eigen::VectorXcd v = vec(x);
        const double n0 = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b * b.dot(v);
        if (v.norm() <= 1e-9 * n0) return false;
        basis.push_back(v / v.norm());
        return true;
    };
    try_add(identity(dim));
    frontier.push_back(identity(dim));
    for (int step = 0; step < len && !frontier.empty(); ++step) {
        std::vector<ComplexMatrix> next;
        for (const auto& f : frontier)
            for (const auto& g : gens) {
                ComplexMatrix x = g * f;
                if (try_add(x)) next.push_back(std::move(x));
                if (long(basis.size()) > budget) throw ResourceError("braid span exceeds budget");
            }
        frontier = std::move(next);
    }
    Eigen::MatrixXcd q(dim * dim, long(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) q.col(long(i)) = basis[i];
    return q;
}

// Smallest *-algebra containing the span of the given columns (level-n matrices).
inline Eigen::MatrixXcd algebra_closure(Eigen::MatrixXcd q, long dim) {
    for (int round = 0; round < 64; ++round) {
        const long k = q.cols();
        Eigen::MatrixXcd cand(dim * dim, k + k * k + k);
        cand.leftCols(k) = q;
        long c = k;
        for (long i = 0; i < k; ++i) {
            const ComplexMatrix a = unvec(q.col(i), dim);
            cand.col(c++) = vec(ComplexMatrix(a.adjoint()));
            for (long j = 0; j < k; ++j) cand.col(c++) = vec(ComplexMatrix(a * unvec(q.col(j), dim)));
        }
        Eigen::MatrixXcd next = column_span(cand, kNullTol);
        if (next.cols() == k) return next;
        q = next;
    }
    throw InternalConsistencyError("algebra_closure: no stabilization");
}

}  // namespace detail

// E_n of the braid-generated algebra, grown in (strands, length) until stable.
// maxStrands / maxLen = 0 select the automatic budget.
inline SubalgebraBasis relative_commutant_L(const RMatrix& r, int n, int maxStrands = 0, int maxLen = 0) {
    if (n < 1) throw LevelError("relative_commutant_L: n < 1");
    const int d = r.d;
    const long dim = ipow(d, n);
    const long upper = relative_commutant_M(r, n).dimension();
    std::vector<long> dims;
    Eigen::MatrixXcd current;
    bool converged = false;
    int m = n + 1, len = 4, rounds = 0;
    while (true) {
        if (maxStrands > 0 && m > maxStrands) break;
        if (maxLen > 0 && len > maxLen) break;
        if (double(ipow(d, m)) * double(ipow(d, m)) > double(kLSpanBudget)) break;
        Eigen::MatrixXcd span;
        try {
            span = detail::braid_span(r, m, len, kLSpanBudget);
        } catch (const ResourceError&) {
            break;
        }
        const long dm = ipow(d, m);
        Eigen::MatrixXcd proj(dim * dim, span.cols());
        for (long c = 0; c < span.cols(); ++c)
            proj.col(c) = vec(expectation_to_level(unvec(span.col(c), dm), d, m, n));
        current = detail::algebra_closure(column_span(proj, kNullTol), dim);
        dims.push_back(current.cols());
        ++rounds;
        const std::size_t s = dims.size();
        if (s >= 3 && dims[s - 1] == dims[s - 2] && dims[s - 2] == dims[s - 3]) {
            converged = true;
            break;
        }
        // L is contained in M, so reaching dim M settles it
        if (current.cols() == upper) {
            converged = true;
            break;
        }
        ++m;
        ++len;
    }
    if (current.size() == 0) current = vec(identity(dim)) / std::sqrt(double(dim));
    SubalgebraBasis s = make_subalgebra(d, n, current);
    s.converged = converged;
    s.iterations = rounds;
    if (!converged) s.note = "truncation did not stabilize within budget";
    return s;
}

// Minimal projections of a *-algebra: eigenprojections of a generic Hermitian element.
inline std::vector<ComplexMatrix> minimal_projections(const SubalgebraBasis& a, std::uint64_t seed = 0x9e37) {
    const long dim = ipow(a.d, a.level);
    std::vector<ComplexMatrix> herm;
    for (const auto& b : a.basis) {
        herm.push_back((b.matrix + b.matrix.adjoint()) / 2.0);
        herm.push_back((b.matrix - b.matrix.adjoint()) / cplx(0, 2));
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng rng(seed + std::uint64_t(attempt) * 104729);
        ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
        for (const auto& x : herm) h += (2.0 * uniform01(rng) - 1.0) * x;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
        const Eigen::VectorXd ev = es.eigenvalues();
        const double spread = std::max(1e-300, ev.cwiseAbs().maxCoeff());
        std::vector<cplx> vals(static_cast<std::size_t>(ev.size()));
        for (long i = 0; i < ev.size(); ++i) vals[std::size_t(i)] = ev(i);
        const auto groups = detail::cluster_values(vals, 1e-8 * spread);
        bool generic = true;
        for (std::size_t g = 0; g + 1 < groups.size(); ++g)
            if (std::abs(vals[std::size_t(groups[g + 1].front())] - vals[std::size_t(groups[g].front())]) < 1e-5 * spread)
                generic = false;
        if (!generic) continue;
        std::vector<ComplexMatrix> out;
        for (const auto& g : groups) {
            Eigen::MatrixXcd v(dim, long(g.size()));
            for (std::size_t c = 0; c < g.size(); ++c) v.col(long(c)) = es.eigenvectors().col(g[c]);
            out.push_back(v * v.adjoint());
        }
        return out;
    }
    throw NumericalDegeneracyError("minimal_projections: no generic element found", 8);
}

}  // namespace rmlab
