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

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "rmlab/error.hpp"
#include "rmlab/tensor.hpp"

namespace rmlab {

inline constexpr double kVerifyTol = 1e-10;
inline constexpr long kMaxCablingEntries = 1L << 22;

struct RMatrix {
    int d = 1;
    ComplexMatrix matrix;
    double ybe_residual = 0;
    double unitarity_residual = 0;
    std::string label;

    AlgebraElement element() const { return {d, 2, matrix}; }
};

// (R (x) 1)(1 (x) R)(R (x) 1) - (1 (x) R)(R (x) 1)(1 (x) R)
inline double ybe_residual(const ComplexMatrix& r, int d) {
    const ComplexMatrix a = kron(r, identity(d));
    const ComplexMatrix b = kron(identity(d), r);
    return (a * b * a - b * a * b).norm();
}

// R phi(R) R - phi(R) R phi(R) at level 3
inline double cuntz_residual(const ComplexMatrix& r, int d) {
    const ComplexMatrix a = embed(r, d, 2, 3);
    const ComplexMatrix b = shift(r, d, 1);
    return (a * b * a - b * a * b).norm();
}

inline RMatrix verify(const ComplexMatrix& m, int d, double tol = kVerifyTol, std::string label = "") {
    const long n = long(d) * d;
    if (d < 1 || m.rows() != n || m.cols() != n) throw ShapeError("verify: matrix is not d^2 x d^2");
    if (!m.allFinite()) throw ShapeError("verify: non-finite entries");
    const double ybe = ybe_residual(m, d);
    const double cuntz = cuntz_residual(m, d);
    if (std::abs(ybe - cuntz) > 1e-12 * std::max(1.0, ybe))
        throw InternalConsistencyError("verify: tensor and Cuntz forms of the YBE disagree");
    const double uni = unitarity_residual(m);
    if (ybe > tol || uni > tol) throw NotAnRMatrixError(ybe, uni);
    return {d, m, ybe, uni, std::move(label)};
}

namespace detail {

inline RMatrix checked(const ComplexMatrix& m, int d, std::string label) {
    try {
        return verify(m, d, kVerifyTol, std::move(label));
    } catch (const NotAnRMatrixError& e) {
        throw InternalConsistencyError(std::string("operation produced a non-R-matrix: ") + e.what());
    }
}

inline void require_unit(cplx q, const char* what) {
    if (std::abs(std::abs(q) - 1.0) > 1e-10) throw DomainError(std::string(what) + ": parameter is not unit modulus");
}

}  // namespace detail

inline ComplexMatrix flip_matrix(int d) {
    const long n = long(d) * d;
    ComplexMatrix f = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) f(j * d + i, i * d + j) = 1.0;
    return f;
}

inline RMatrix make_trivial(int d, cplx q) {
    detail::require_unit(q, "make_trivial");
    if (d < 1) throw DomainError("make_trivial: d < 1");
    return verify(q * identity(long(d) * d), d, kVerifyTol, "trivial");
}

inline RMatrix make_flip(int d) {
    if (d < 1) throw DomainError("make_flip: d < 1");
    return verify(flip_matrix(d), d, kVerifyTol, "flip");
}

struct SimpleRSpec {
    std::vector<ComplexMatrix> projections;
    ComplexMatrix phases;

    int d() const { return projections.empty() ? 0 : int(projections.front().rows()); }

    void validate(double tol = 1e-10) const {
        const std::size_t n = projections.size();
        if (n == 0) throw DomainError("simple spec: no projections");
        if (phases.rows() != long(n) || phases.cols() != long(n)) throw DomainError("simple spec: phase matrix shape");
        const long dd = projections.front().rows();
        ComplexMatrix sum = ComplexMatrix::Zero(dd, dd);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = projections[i];
            if (p.rows() != dd || p.cols() != dd) throw DomainError("simple spec: projection shape");
            if ((p - p.adjoint()).norm() > tol) throw DomainError("simple spec: projection not Hermitian");
            for (std::size_t j = 0; j < n; ++j) {
                const ComplexMatrix pq = p * projections[j];
                const double err = (i == j) ? (pq - p).norm() : pq.norm();
                if (err > tol) throw DomainError("simple spec: projections not orthogonal idempotents");
                detail::require_unit(phases(long(i), long(j)), "simple spec");
            }
            if (p.norm() < tol) throw DomainError("simple spec: zero projection");
            sum += p;
        }
        if ((sum - identity(dd)).norm() > tol) throw DomainError("simple spec: projections do not sum to 1");
    }
};

inline RMatrix make_simple(const SimpleRSpec& spec) {
    spec.validate();
    const int d = spec.d();
    const ComplexMatrix f = flip_matrix(d);
    const long n = long(d) * d;
    ComplexMatrix r = ComplexMatrix::Zero(n, n);
    const std::size_t k = spec.projections.size();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const ComplexMatrix pp = kron(spec.projections[i], spec.projections[j]);
            const cplx c = spec.phases(long(i), long(j));
            r += (i == j) ? ComplexMatrix(c * pp) : ComplexMatrix(c * pp * f);
        }
    return detail::checked(r, d, "simple");
}

// Diagonal R-matrix: rank-one projections u e_i e_i^* u^*.
inline RMatrix make_diagonal(const ComplexMatrix& phases, const ComplexMatrix& u) {
    const long d = phases.rows();
    if (phases.cols() != d || u.rows() != d || u.cols() != d) throw DomainError("make_diagonal: shape");
    if (!is_unitary(u, 1e-10)) throw DomainError("make_diagonal: u not unitary");
    SimpleRSpec spec;
    for (long i = 0; i < d; ++i) spec.projections.push_back(u.col(i) * u.col(i).adjoint());
    spec.phases = phases;
    RMatrix r = make_simple(spec);
    r.label = "diagonal";
    return r;
}

struct NormalBlock {
    int dim = 1;
    int sign = 1;
    bool operator==(const NormalBlock&) const = default;
};

struct NormalFormSpec {
    std::vector<NormalBlock> blocks;

    int d() const {
        int s = 0;
        for (const auto& b : blocks) s += b.dim;
        return s;
    }

    void validate() const {
        if (blocks.empty()) throw DomainError("normal form: no blocks");
        for (const auto& b : blocks)
            if (b.dim < 1 || (b.sign != 1 && b.sign != -1)) throw DomainError("normal form: invalid block");
    }

    // sign descending, then dimension descending
    NormalFormSpec canonical() const {
        NormalFormSpec out = *this;
        std::stable_sort(out.blocks.begin(), out.blocks.end(), [](const NormalBlock& a, const NormalBlock& b) {
            if (a.sign != b.sign) return a.sign > b.sign;
            return a.dim > b.dim;
        });
        return out;
    }

    bool is_canonical() const { return canonical().blocks == blocks; }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(blocks[i].dim) + (blocks[i].sign > 0 ? ":+" : ":-");
        }
        return s;
    }

    bool operator==(const NormalFormSpec&) const = default;
};

inline RMatrix make_normal_form(const NormalFormSpec& spec) {
    spec.validate();
    const int d = spec.d();
    std::vector<int> owner(d);
    for (int b = 0, pos = 0; b < int(spec.blocks.size()); ++b)
        for (int k = 0; k < spec.blocks[b].dim; ++k) owner[pos++] = b;
    const long n = long(d) * d;
    ComplexMatrix r = ComplexMatrix::Zero(n, n);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            if (owner[a] == owner[b]) r(a * d + b, a * d + b) = double(spec.blocks[owner[a]].sign);
            else r(b * d + a, a * d + b) = 1.0;
        }
    RMatrix out = detail::checked(r, d, "normal-form " + spec.to_string());
    return out;
}

inline RMatrix adjoint(const RMatrix& r) { return detail::checked(r.matrix.adjoint(), r.d, r.label + "*"); }

inline RMatrix scalar_multiple(const RMatrix& r, cplx c) {
    detail::require_unit(c, "scalar_multiple");
    return detail::checked(c * r.matrix, r.d, r.label);
}

inline RMatrix flip_conjugate(const RMatrix& r) {
    const ComplexMatrix f = flip_matrix(r.d);
    return detail::checked(f * r.matrix * f, r.d, "F" + r.label + "F");
}

// lambda_u(R) = (u (x) u) R (u (x) u)^*
inline RMatrix quasifree_conjugate(const RMatrix& r, const ComplexMatrix& u) {
    if (u.rows() != r.d || u.cols() != r.d) throw ShapeError("quasifree_conjugate: u shape");
    if (!is_unitary(u, 1e-10)) throw DomainError("quasifree_conjugate: u not unitary");
    const ComplexMatrix uu = kron(u, u);
    return detail::checked(uu * r.matrix * uu.adjoint(), r.d, r.label);
}

// F_23 (R (x) S) F_23 on (C^d (x) C^d') (x) (C^d (x) C^d')
inline RMatrix tensor_product(const RMatrix& r, const RMatrix& s) {
    const int d = r.d, e = s.d, de = d * e;
    const long n = long(de) * de;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int i2 = 0; i2 < d; ++i2)
                for (int j2 = 0; j2 < d; ++j2) {
                    const cplx rv = r.matrix(i * d + j, i2 * d + j2);
                    if (rv == cplx(0)) continue;
                    for (int k = 0; k < e; ++k)
                        for (int l = 0; l < e; ++l)
                            for (int k2 = 0; k2 < e; ++k2)
                                for (int l2 = 0; l2 < e; ++l2) {
                                    const long row = long(i * e + k) * de + (j * e + l);
                                    const long col = long(i2 * e + k2) * de + (j2 * e + l2);
                                    out(row, col) = rv * s.matrix(k * e + l, k2 * e + l2);
                                }
                }
    return detail::checked(out, de, r.label + "[x]" + s.label);
}

// R on V (x) V, S on W (x) W, flip on mixed tensors; coordinates of V first.
inline RMatrix box_sum(const RMatrix& r, const RMatrix& s) {
    const int d = r.d, e = s.d, D = d + e;
    const long n = long(D) * D;
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
            const long col = long(a) * D + b;
            if (a < d && b < d) {
                for (int a2 = 0; a2 < d; ++a2)
                    for (int b2 = 0; b2 < d; ++b2) out(long(a2) * D + b2, col) = r.matrix(a2 * d + b2, a * d + b);
            } else if (a >= d && b >= d) {
                for (int a2 = 0; a2 < e; ++a2)
                    for (int b2 = 0; b2 < e; ++b2)
                        out(long(a2 + d) * D + (b2 + d), col) = s.matrix(a2 * e + b2, (a - d) * e + (b - d));
            } else {
                out(long(b) * D + a, col) = 1.0;
            }
        }
    return detail::checked(out, D, r.label + "[+]" + s.label);
}

// nR = phi^{n-1}(R) ... phi(R) R at level n+1
inline ComplexMatrix left_braid_block(const ComplexMatrix& r, int d, int n) {
    ComplexMatrix out = identity(ipow(d, n + 1));
    for (int k = n - 1; k >= 0; --k) out = out * local_operator(r, d, k, n + 1);
    return out;
}

// R_n = R phi(R) ... phi^{n-1}(R) at level n+1
inline ComplexMatrix right_braid_block(const ComplexMatrix& r, int d, int n) {
    ComplexMatrix out = identity(ipow(d, n + 1));
    for (int k = 0; k < n; ++k) out = out * local_operator(r, d, k, n + 1);
    return out;
}

// Cabling map c_n: slots of M_d^{(x)2n} are grouped in consecutive runs of n, so the slot digits
// (i_1..i_2n) become the pair (sum_{k<=n} i_k d^{n-k}, sum_{k>n} i_k d^{2n-k}) of M_{d^n}^{(x)2}.
inline ComplexMatrix cabling_reindex(const ComplexMatrix& x, int d, int n) {
    const long dn = ipow(d, n);
    const long total = dn * dn;
    if (x.rows() != total || x.cols() != total) throw ShapeError("cabling_reindex: shape");
    auto regroup = [&](long idx) {
        std::vector<int> digits(static_cast<std::size_t>(2 * n));
        for (int k = 2 * n - 1; k >= 0; --k) {
            digits[std::size_t(k)] = int(idx % d);
            idx /= d;
        }
        long first = 0, second = 0;
        for (int k = 0; k < n; ++k) first = first * d + digits[std::size_t(k)];
        for (int k = n; k < 2 * n; ++k) second = second * d + digits[std::size_t(k)];
        return first * dn + second;
    };
    std::vector<long> perm(static_cast<std::size_t>(total));
    for (long i = 0; i < total; ++i) perm[std::size_t(i)] = regroup(i);
    ComplexMatrix out(total, total);
    for (long i = 0; i < total; ++i)
        for (long j = 0; j < total; ++j) out(perm[std::size_t(i)], perm[std::size_t(j)]) = x(i, j);
    return out;
}

// nRn = nR phi(nR) ... phi^{n-1}(nR) at level 2n
inline ComplexMatrix braided_block(const ComplexMatrix& r, int d, int n) {
    const ComplexMatrix nr = left_braid_block(r, d, n);
    ComplexMatrix out = identity(ipow(d, 2 * n));
    for (int k = 0; k < n; ++k) out = out * embed(shift(nr, d, k), d, n + 1 + k, 2 * n);
    return out;
}

inline RMatrix cabling_power(const RMatrix& r, int n) {
    if (n < 1) throw DomainError("cabling_power: n < 1");
    const int d = r.d;
    const double entries = std::pow(double(d), 4.0 * n);
    if (entries > double(kMaxCablingEntries)) throw ResourceError("cabling_power: matrix exceeds memory budget");
    if (n == 1) return r;
    const ComplexMatrix m = cabling_reindex(braided_block(r.matrix, d, n), d, n);
    return detail::checked(m, int(ipow(d, n)), r.label + "^(" + std::to_string(n) + ")");
}

inline bool is_involutive(const RMatrix& r, double tol = 1e-10) {
    return (r.matrix * r.matrix - identity(r.matrix.rows())).norm() <= tol;
}

inline bool is_trivial(const RMatrix& r, double tol = 1e-10) {
    return (r.matrix - r.matrix(0, 0) * identity(r.matrix.rows())).norm() <= tol;
}

// The four d = 2 families.
inline RMatrix make_r1(cplx q) {
    RMatrix r = make_trivial(2, q);
    r.label = "r1";
    return r;
}

inline RMatrix make_r2(cplx p, cplx q, cplx r, cplx s) {
    for (cplx c : {p, q, r, s}) detail::require_unit(c, "make_r2");
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = p;
    m(1, 2) = q;
    m(2, 1) = r;
    m(3, 3) = s;
    return verify(m, 2, kVerifyTol, "r2");
}

inline RMatrix make_r3(cplx p, cplx q, cplx r) {
    for (cplx c : {p, q, r}) detail::require_unit(c, "make_r3");
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 3) = p;
    m(1, 1) = q;
    m(2, 2) = q;
    m(3, 0) = r;
    return verify(m, 2, kVerifyTol, "r3");
}

inline ComplexMatrix r4_shape() {
    ComplexMatrix m(4, 4);
    m << 1, 1, 0, 0, -1, 1, 0, 0, 0, 0, 1, -1, 0, 0, 1, 1;
    return m / std::sqrt(2.0);
}

inline RMatrix make_r4(cplx q) {
    detail::require_unit(q, "make_r4");
    return verify(q * r4_shape(), 2, kVerifyTol, "r4");
}

}  // namespace rmlab
