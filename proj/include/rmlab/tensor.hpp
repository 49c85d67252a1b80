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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "rmlab/error.hpp"

namespace rmlab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx I_UNIT{0.0, 1.0};

inline long ipow(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// Element of F_d^n, a d^n x d^n matrix tagged with (d, n).
struct AlgebraElement {
    int d = 2;
    int level = 0;
    ComplexMatrix matrix = ComplexMatrix::Ones(1, 1);

    AlgebraElement() = default;
    AlgebraElement(int d_, int level_, ComplexMatrix m) : d(d_), level(level_), matrix(std::move(m)) {
        if (d < 1 || level < 0) throw LevelError("invalid (d, level)");
        const long n = ipow(d, level);
        if (matrix.rows() != n || matrix.cols() != n)
            throw ShapeError("matrix size does not match d^level");
        if (!matrix.allFinite()) throw ShapeError("non-finite matrix entry");
    }

    static AlgebraElement identity(int d, int level) {
        const long n = ipow(d, level);
        return {d, level, ComplexMatrix::Identity(n, n)};
    }
    static AlgebraElement scalar(int d, cplx v) {
        ComplexMatrix m(1, 1);
        m(0, 0) = v;
        return {d, 0, m};
    }
    long dim() const { return matrix.rows(); }
};

inline ComplexMatrix identity(long n) { return ComplexMatrix::Identity(n, n); }

// First factor is the leftmost tensor slot.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ComplexMatrix embed(const ComplexMatrix& x, int d, int level, int target) {
    if (target < level) throw LevelError("embed: target level below element level");
    if (target == level) return x;
    return kron(x, identity(ipow(d, target - level)));
}

inline AlgebraElement embed(const AlgebraElement& x, int target) {
    return {x.d, target, embed(x.matrix, x.d, x.level, target)};
}

// phi^k(x) = 1_{d^k} (x) x
inline ComplexMatrix shift(const ComplexMatrix& x, int d, int k) {
    if (k < 0) throw LevelError("shift: negative step");
    if (k == 0) return x;
    return kron(identity(ipow(d, k)), x);
}

inline AlgebraElement shift(const AlgebraElement& x, int k = 1) {
    return {x.d, x.level + k, shift(x.matrix, x.d, k)};
}

// R acting on slots (k+1, k+2) of level n, i.e. phi^k(R) embedded at level n.
inline ComplexMatrix local_operator(const ComplexMatrix& r, int d, int k, int n) {
    const int width = static_cast<int>(std::lround(std::log(double(r.rows())) / std::log(double(d))));
    if (k + width > n) throw LevelError("local_operator: slots exceed level");
    return embed(shift(r, d, k), d, k + width, n);
}

inline cplx normalized_trace(const ComplexMatrix& x) {
    if (x.rows() != x.cols()) throw ShapeError("trace of non-square matrix");
    return x.trace() / double(x.rows());
}

inline cplx normalized_trace(const AlgebraElement& x) { return normalized_trace(x.matrix); }

// (1/d)(Tr (x) id)
inline ComplexMatrix partial_trace_left(const ComplexMatrix& x, int d) {
    const long m = x.rows() / d;
    if (m * d != x.rows() || x.rows() != x.cols()) throw ShapeError("partial trace: bad shape");
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    for (int i = 0; i < d; ++i) out += x.block(i * m, i * m, m, m);
    return out / double(d);
}

// (1/d)(id (x) Tr)
inline ComplexMatrix partial_trace_right(const ComplexMatrix& x, int d) {
    const long m = x.rows() / d;
    if (m * d != x.rows() || x.rows() != x.cols()) throw ShapeError("partial trace: bad shape");
    ComplexMatrix out = ComplexMatrix::Zero(m, m);
    for (long r = 0; r < m; ++r)
        for (long s = 0; s < m; ++s) {
            cplx acc = 0;
            for (int i = 0; i < d; ++i) acc += x(r * d + i, s * d + i);
            out(r, s) = acc;
        }
    return out / double(d);
}

inline AlgebraElement partial_trace_left(const AlgebraElement& x) {
    if (x.level < 1) throw LevelError("partial trace of a scalar");
    return {x.d, x.level - 1, partial_trace_left(x.matrix, x.d)};
}

inline AlgebraElement partial_trace_right(const AlgebraElement& x) {
    if (x.level < 1) throw LevelError("partial trace of a scalar");
    return {x.d, x.level - 1, partial_trace_right(x.matrix, x.d)};
}

inline ComplexMatrix expectation_to_level(const ComplexMatrix& x, int d, int level, int n) {
    if (n > level || n < 0) throw LevelError("expectation: target level above element level");
    ComplexMatrix y = x;
    for (int l = level; l > n; --l) y = partial_trace_right(y, d);
    return y;
}

inline AlgebraElement expectation_to_level(const AlgebraElement& x, int n) {
    return {x.d, n, expectation_to_level(x.matrix, x.d, x.level, n)};
}

inline double frobenius_norm(const ComplexMatrix& x) { return x.norm(); }

inline double operator_norm(const ComplexMatrix& x) {
    if (x.size() == 0) return 0.0;
    const Eigen::MatrixXcd g = x.adjoint() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("hs_inner: shape mismatch");
    return (a.array().conjugate() * b.array()).sum() / double(a.rows());
}

inline cplx hs_inner(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.d != b.d || a.level != b.level) throw ShapeError("hs_inner: level mismatch");
    return hs_inner(a.matrix, b.matrix);
}

inline double unitarity_residual(const ComplexMatrix& x) {
    if (x.rows() != x.cols()) throw ShapeError("unitarity of non-square matrix");
    return (x.adjoint() * x - identity(x.rows())).norm();
}

inline bool is_unitary(const ComplexMatrix& x, double tol = 1e-10) {
    return unitarity_residual(x) <= tol;
}

inline double normality_residual(const ComplexMatrix& x) {
    return (x * x.adjoint() - x.adjoint() * x).norm();
}

struct EigenComponent {
    cplx value;
    int multiplicity;
    ComplexMatrix projection;
};

namespace detail {

inline int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

// Single-linkage clusters of values within radius, sorted by (re, im) of the mean.
inline std::vector<std::vector<int>> cluster_values(const std::vector<cplx>& values, double radius) {
    const int n = static_cast<int>(values.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= radius) parent[find_root(parent, i)] = find_root(parent, j);
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find_root(parent, i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    auto mean = [&](const std::vector<int>& g) {
        cplx s = 0;
        for (int i : g) s += values[i];
        return s / double(g.size());
    };
    std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
        const cplx ma = mean(a), mb = mean(b);
        if (std::abs(ma.real() - mb.real()) > radius) return ma.real() < mb.real();
        return ma.imag() < mb.imag();
    });
    return groups;
}

}  // namespace detail

// Spectral decomposition of a normal matrix, eigenvalues merged at relative radius tol.
inline std::vector<EigenComponent> eig_normal(const ComplexMatrix& x, double tol = 1e-9) {
    if (x.rows() != x.cols()) throw ShapeError("eig_normal: non-square");
    const double fn = x.norm();
    if (normality_residual(x) > std::max(tol * fn * fn, 1e-300)) throw NormalityError("eig_normal: matrix is not normal");
    const long n = x.rows();
    Eigen::MatrixXcd m = x;
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m);
    const Eigen::MatrixXcd& t = schur.matrixT();
    const Eigen::MatrixXcd& u = schur.matrixU();
    std::vector<cplx> values(n);
    double scale = 0;
    for (long i = 0; i < n; ++i) {
        values[i] = t(i, i);
        scale = std::max(scale, std::abs(values[i]));
    }
    std::vector<EigenComponent> out;
    for (const auto& g : detail::cluster_values(values, tol * scale)) {
        Eigen::MatrixXcd v(n, static_cast<long>(g.size()));
        cplx s = 0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            v.col(static_cast<long>(c)) = u.col(g[c]);
            s += values[g[c]];
        }
        ComplexMatrix p = v * v.adjoint();
        out.push_back({s / double(g.size()), static_cast<int>(g.size()), p});
    }
    return out;
}

inline std::vector<cplx> distinct_eigenvalues(const ComplexMatrix& x, double tol = 1e-9) {
    std::vector<cplx> vals;
    for (const auto& c : eig_normal(x, tol)) vals.push_back(c.value);
    return vals;
}

// Apply R (d^w x d^w) on slots (k+1..k+w) to the rows of x, in place; x has d^n rows.
inline void apply_local_left(const ComplexMatrix& r, int d, int k, int n, ComplexMatrix& x) {
    const long dw = r.rows();
    const long outer = ipow(d, k);
    const long inner = x.rows() / (outer * dw);
    if (outer * dw * inner != x.rows() || x.rows() != ipow(d, n)) throw ShapeError("apply_local_left: shape");
    const long width = inner * x.cols();
    for (long a = 0; a < outer; ++a) {
        Eigen::Map<ComplexMatrix> blk(x.data() + a * dw * width, dw, width);
        ComplexMatrix tmp = r * blk;
        blk = tmp;
    }
}

namespace detail {

struct SvdParts {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXcd u;      // rows x min(rows, cols)
    Eigen::MatrixXcd v;      // cols x cols
};

// SVD through a QR reduction to a square factor handled by one-sided Jacobi, which stays reliable on the
// structured complex operators met here.
inline SvdParts svd(const Eigen::MatrixXcd& a) {
    const long m = a.rows(), n = a.cols();
    SvdParts out;
    if (m >= n) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
        const Eigen::MatrixXcd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> j(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
        out.values = j.singularValues();
        out.u = qr.householderQ() * (Eigen::MatrixXcd::Identity(m, n) * j.matrixU());
        out.v = j.matrixV();
    } else {
        Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(n, n);
        padded.topRows(m) = a;
        Eigen::JacobiSVD<Eigen::MatrixXcd> j(padded, Eigen::ComputeFullU | Eigen::ComputeFullV);
        out.values = j.singularValues().head(m);
        out.u = j.matrixU().topLeftCorner(m, m);
        out.v = j.matrixV();
    }
    return out;
}

inline long numerical_rank(const Eigen::VectorXd& s, double rel_tol, double scale) {
    const double smax = std::max(s.size() ? s(0) : 0.0, scale);
    long rank = 0;
    for (long i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * smax && smax > 0) ++rank;
    return rank;
}

}  // namespace detail

// Columns span {v : A v = 0}; singular values at most rel_tol * max(sigma_max, scale) count as zero.
// scale sets the magnitude of the operator A came from, so a residual made of rounding noise has full null space.
inline Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol = 1e-9, double scale = 0.0) {
    const long cols = a.cols();
    if (a.rows() == 0 || cols == 0) return Eigen::MatrixXcd::Identity(cols, cols);
    if (cols <= 96) {
        const detail::SvdParts p = detail::svd(a);
        return p.v.rightCols(cols - detail::numerical_rank(p.values, rel_tol, scale));
    }
    // Wide operators: the eigenvectors of A^*A below a loose cut contain the null space, and the exact
    // singular values are then taken on that small subspace.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.adjoint() * a);
    const double smax = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
    const double top = std::max(smax, scale);
    long k = 0;
    while (k < cols && es.eigenvalues()(k) <= 1e-6 * top * top) ++k;
    if (k == 0) return Eigen::MatrixXcd(cols, 0);
    const Eigen::MatrixXcd c = es.eigenvectors().leftCols(k);
    const detail::SvdParts p = detail::svd(a * c);
    return c * p.v.rightCols(k - detail::numerical_rank(p.values, rel_tol, top));
}

// Orthonormal basis (columns) of the column span of a.
inline Eigen::MatrixXcd column_span(const Eigen::MatrixXcd& a, double rel_tol = 1e-9) {
    if (a.cols() == 0 || a.rows() == 0) return Eigen::MatrixXcd(a.rows(), 0);
    const detail::SvdParts p = detail::svd(a);
    return p.u.leftCols(detail::numerical_rank(p.values, rel_tol, 0.0));
}

inline Eigen::VectorXcd vec(const ComplexMatrix& x) {
    return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

inline ComplexMatrix unvec(const Eigen::VectorXcd& v, long n) {
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

}  // namespace rmlab
