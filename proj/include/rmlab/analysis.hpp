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
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rmlab/braid.hpp"
#include "rmlab/commutant.hpp"
#include "rmlab/random.hpp"

namespace rmlab {

inline const double kConcentrationThreshold = 1.0 - std::pow(2.0, -0.25);
inline constexpr double kClassifyTol = 1e-8;
inline constexpr long kMaxOperatorEntries = 1L << 22;  // cap on dense operator matrices built by the report

// ---------------------------------------------------------------------------------------------------------------
// Partial-trace invariant

struct PartialTraceInvariant {
    ComplexMatrix value;
    std::vector<EigenComponent> spectrum;
    double leftRightDiscrepancy = 0;
    double normalityResidual = 0;
    double operatorNorm = 0;
};

// Left partial trace of R with the left/right and normality checks; the error threshold grows with the
// residuals of R so that numerically found solutions are judged at their own accuracy.
inline PartialTraceInvariant partial_trace_invariant(const RMatrix& r, double tol = 1e-10) {
    PartialTraceInvariant out;
    out.value = partial_trace_left(r.matrix, r.d);
    out.leftRightDiscrepancy = (out.value - partial_trace_right(r.matrix, r.d)).norm();
    out.normalityResidual = normality_residual(out.value);
    out.operatorNorm = operator_norm(out.value);
    const double limit = std::max(tol, 1e3 * (r.ybe_residual + r.unitarity_residual));
    if (out.leftRightDiscrepancy > limit || out.normalityResidual > limit)
        throw InternalConsistencyError("partial trace invariant: left/right or normality check failed");
    out.spectrum = eig_normal(out.value);
    return out;
}

// ---------------------------------------------------------------------------------------------------------------
// Ergodicity

struct ErgodicityVerdict {
    bool ergodic = false;
    double maxDeviation = 0;
    std::array<int, 4> witness{0, 0, 0, 0};  // (i, j, k, l) of the worst entry
};

// sum_{m,n} R^{im}_{kn} conj(R^{jm}_{ln}) = delta_ij delta_kl, entry by entry.
inline ErgodicityVerdict is_ergodic(const RMatrix& r, double tol = 1e-10) {
    const int d = r.d;
    const ComplexMatrix& m = r.matrix;
    ErgodicityVerdict v;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    cplx acc = 0;
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) acc += m(i * d + a, k * d + b) * std::conj(m(j * d + a, l * d + b));
                    const double dev = std::abs(acc - ((i == j && k == l) ? 1.0 : 0.0));
                    if (dev > v.maxDeviation) {
                        v.maxDeviation = dev;
                        v.witness = {i, j, k, l};
                    }
                }
    v.ergodic = v.maxDeviation <= tol;
    return v;
}

// |tau(R^* phi(R)) - 1/d^2|, with tau(R^* phi(R)) contracted to tau(phi_R(R)^* phi_R(R)) on one site.
inline double ergodicity_necessary_check(const RMatrix& r) {
    const ComplexMatrix left = partial_trace_left(ComplexMatrix(r.matrix.adjoint()), r.d);
    const ComplexMatrix right = partial_trace_right(r.matrix, r.d);
    const cplx t = (left * right).trace() / double(r.d);
    return std::abs(t - 1.0 / double(r.d * r.d));
}

inline bool is_irreducible(const RMatrix& r) { return relative_commutant_M(r, 1).dimension() == 1; }

// ---------------------------------------------------------------------------------------------------------------
// Index bounds and spectral concentration

struct IndexBounds {
    double lowerMinimal = 1;
    double upperJones = 1;
    std::vector<std::string> sources;
    int spectrumSize = 0;
    int partialTraceSpectrumSize = 0;
    double spectralGap = 0;              // smallest distance between distinct eigenvalues of R
    double partialTraceSpectralGap = 0;  // same for phi_R(R)
    std::optional<double> knownIndex;
    std::string knownIndexSource;
};

namespace detail {

inline double min_gap(const std::vector<cplx>& vals) {
    double g = 0;
    for (std::size_t a = 0; a < vals.size(); ++a)
        for (std::size_t b = a + 1; b < vals.size(); ++b) {
            const double x = std::abs(vals[a] - vals[b]);
            if (g == 0 || x < g) g = x;
        }
    return g;
}

}  // namespace detail

inline IndexBounds index_bounds(const RMatrix& r, double tol = 1e-9) {
    IndexBounds b;
    const double d2 = double(r.d) * r.d;
    const auto sr = distinct_eigenvalues(r.matrix, tol);
    const ComplexMatrix phi = partial_trace_left(r.matrix, r.d);
    const auto sp = distinct_eigenvalues(phi, tol);
    b.spectrumSize = int(sr.size());
    b.partialTraceSpectrumSize = int(sp.size());
    b.spectralGap = detail::min_gap(sr);
    b.partialTraceSpectralGap = detail::min_gap(sp);
    b.lowerMinimal = 1;
    b.sources.push_back("trivial lower bound 1");
    if (b.spectrumSize > b.lowerMinimal) b.lowerMinimal = b.spectrumSize;
    b.sources.push_back("|spec R| = " + std::to_string(b.spectrumSize));
    const double sq = double(b.partialTraceSpectrumSize) * b.partialTraceSpectrumSize;
    if (sq > b.lowerMinimal) b.lowerMinimal = sq;
    b.sources.push_back("|spec phi_R(R)|^2 = " + std::to_string(int(sq)));
    b.upperJones = d2;
    b.sources.push_back("d^2 upper bound");
    double smallest = std::numeric_limits<double>::infinity();
    for (const cplx& v : sp) smallest = std::min(smallest, std::abs(v));
    if (smallest > tol) {
        const double inv4 = std::pow(1.0 / smallest, 4);
        b.sources.push_back("||phi_R(R)^-1||^4 = " + std::to_string(inv4));
        if (inv4 < b.upperJones) b.upperJones = inv4;
    } else {
        b.sources.push_back("phi_R(R) not invertible, inverse-norm bound skipped");
    }
    // rounding of the inverse-norm bound can push it a hair below an integer lower bound
    if (b.upperJones < b.lowerMinimal && b.lowerMinimal - b.upperJones <= 1e-9 * b.lowerMinimal) b.upperJones = b.lowerMinimal;
    if (!(1 <= b.lowerMinimal && b.lowerMinimal <= b.upperJones && b.upperJones <= d2 + 1e-12))
        throw InternalConsistencyError("index bounds: interval is empty");
    return b;
}

struct ConcentrationVerdict {
    double minDistance = 0;  // min over |mu| = 1 of ||R - mu||
    cplx mu = 1.0;
    double threshold = kConcentrationThreshold;
    bool concludesTrivial = false;
};

inline ConcentrationVerdict triviality_by_concentration(const RMatrix& r) {
    const auto vals = distinct_eigenvalues(r.matrix, 1e-12);
    auto f = [&](double t) {
        const cplx mu = std::polar(1.0, t);
        double m = 0;
        for (const cplx& v : vals) m = std::max(m, std::abs(v - mu));
        return m;
    };
    const int grid = 4096;
    const double h = 2 * std::numbers::pi / grid;
    int best = 0;
    double fb = f(0);
    for (int i = 1; i < grid; ++i) {
        const double v = f(i * h);
        if (v < fb) fb = v, best = i;
    }
    // golden-section refinement inside the neighbouring grid cells
    double a = (best - 1) * h, b = (best + 1) * h;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), dd = a + g * (b - a);
    double fc = f(c), fd = f(dd);
    for (int it = 0; it < 100; ++it) {
        if (fc < fd) b = dd, dd = c, fd = fc, c = b - g * (b - a), fc = f(c);
        else a = c, c = dd, fc = fd, dd = a + g * (b - a), fd = f(dd);
    }
    const double t = fc < fd ? c : dd;
    ConcentrationVerdict v;
    v.minDistance = std::min(fb, f(t));
    v.mu = std::polar(1.0, f(t) <= fb ? t : best * h);
    v.concludesTrivial = v.minDistance < v.threshold;
    if (v.concludesTrivial && !is_trivial(r, 1e-8))
        throw InternalConsistencyError("concentration test concluded triviality for a nontrivial R-matrix");
    return v;
}

// ---------------------------------------------------------------------------------------------------------------
// Involutive R-matrices

inline NormalFormSpec normal_form_of_involutive(const RMatrix& r, double tol = 1e-8) {
    if (!is_involutive(r, std::max(tol, 1e-10))) throw DomainError("normal form: R is not involutive");
    const int d = r.d;
    const ComplexMatrix phi = partial_trace_left(r.matrix, d);
    const ComplexMatrix herm = (phi + phi.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(herm), Eigen::EigenvaluesOnly};
    std::vector<cplx> vals;
    for (long i = 0; i < es.eigenvalues().size(); ++i) vals.push_back(es.eigenvalues()(i));
    NormalFormSpec spec;
    for (const auto& group : detail::cluster_values(vals, 1e-6)) {
        double v = 0;
        for (int i : group) v += vals[std::size_t(i)].real();
        v /= double(group.size());
        const double k = std::abs(v) * d;
        const long ki = std::lround(k);
        if (ki < 1 || std::abs(k - double(ki)) > tol * d) throw NotNormalFormError("eigenvalue of phi_R(R) is not +-k/d");
        const double count = double(group.size()) / double(ki);
        const long ci = std::lround(count);
        if (ci < 1 || std::abs(count - double(ci)) > tol) throw NotNormalFormError("non-integer block count");
        for (long c = 0; c < ci; ++c) spec.blocks.push_back({int(ki), v > 0 ? 1 : -1});
    }
    return spec.canonical();
}

struct ReductionNode {
    int d = 1;
    ComplexMatrix matrix;
    double splitResidual = 0;             // size of the part of R mixing pV (x) pV with its complement
    std::vector<NormalBlock> leafBlocks;  // set on leaves
    std::vector<ReductionNode> children;  // set on inner nodes (S, T)
    bool leaf() const { return children.empty(); }
};

namespace detail {

inline ComplexMatrix restrict_to_coordinates(const ComplexMatrix& m, int d, int lo, int hi) {
    const int k = hi - lo;
    ComplexMatrix out(long(k) * k, long(k) * k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            for (int c = 0; c < k; ++c)
                for (int e = 0; e < k; ++e)
                    out(a * k + b, c * k + e) = m((lo + a) * d + lo + b, (lo + c) * d + lo + e);
    return out;
}

inline ReductionNode reduce_node(const RMatrix& r, double tol, int depth) {
    ReductionNode node;
    node.d = r.d;
    node.matrix = r.matrix;
    const int d = r.d;
    const SubalgebraBasis m = relative_commutant_M(r, 1);
    if (m.dimension() > 1 && d > 1) {
        const auto projs = minimal_projections(m);
        const ComplexMatrix& p = projs.front();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(p)};
        // eigenvalues ascending: columns of 1 - p first, then p; reorder so p comes first
        const long rank = std::lround(p.trace().real());
        Eigen::MatrixXcd u(d, d);
        u.leftCols(rank) = es.eigenvectors().rightCols(rank);
        u.rightCols(d - rank) = es.eigenvectors().leftCols(d - rank);
        const ComplexMatrix uu = kron(ComplexMatrix(u), ComplexMatrix(u));
        const ComplexMatrix rp = uu.adjoint() * r.matrix * uu;
        ComplexMatrix pp = ComplexMatrix::Zero(d * d, d * d);
        for (long a = 0; a < rank; ++a)
            for (long b = 0; b < rank; ++b) pp(a * d + b, a * d + b) = 1.0;
        node.splitResidual = (pp * rp - rp * pp).norm();
        if (node.splitResidual > 1e-8) throw InternalConsistencyError("reduce_involutive: p (x) p does not commute with R");
        try {
            const RMatrix s = verify(restrict_to_coordinates(rp, d, 0, int(rank)), int(rank), 1e-9, "S");
            const RMatrix t = verify(restrict_to_coordinates(rp, d, int(rank), d), d - int(rank), 1e-9, "T");
            node.children.push_back(reduce_node(s, tol, depth + 1));
            node.children.push_back(reduce_node(t, tol, depth + 1));
        } catch (const NotAnRMatrixError& e) {
            throw InternalConsistencyError(std::string("reduce_involutive: restriction is not an R-matrix: ") + e.what());
        }
        return node;
    }
    // irreducible leaf: +-1, or character-equivalent to +-F
    const cplx c = r.matrix(0, 0);
    if ((r.matrix - c * identity(r.matrix.rows())).norm() <= tol && std::abs(std::abs(c.real()) - 1) <= tol) {
        node.leafBlocks.push_back({d, c.real() > 0 ? 1 : -1});
        return node;
    }
    const ComplexMatrix phi = partial_trace_left(r.matrix, d);
    for (int sign : {1, -1})
        if ((phi - double(sign) / d * identity(d)).norm() <= tol) {
            for (int i = 0; i < d; ++i) node.leafBlocks.push_back({1, sign});
            return node;
        }
    throw InternalConsistencyError("reduce_involutive: irreducible leaf is neither +-1 nor equivalent to +-F");
}

inline void collect_leaves(const ReductionNode& n, NormalFormSpec& out) {
    if (n.leaf()) out.blocks.insert(out.blocks.end(), n.leafBlocks.begin(), n.leafBlocks.end());
    for (const auto& c : n.children) collect_leaves(c, out);
}

}  // namespace detail

inline NormalFormSpec leaf_spec(const ReductionNode& root) {
    NormalFormSpec s;
    detail::collect_leaves(root, s);
    return s.canonical();
}

// Splits R along minimal projections of M_{R,1} until the pieces are irreducible; the leaves must reproduce
// the normal form read off from phi_R(R).
inline ReductionNode reduce_involutive(const RMatrix& r, double tol = 1e-8) {
    if (!is_involutive(r, std::max(tol, 1e-10))) throw DomainError("reduce_involutive: R is not involutive");
    ReductionNode root = detail::reduce_node(r, tol, 0);
    if (!(leaf_spec(root) == normal_form_of_involutive(r, tol)))
        throw InternalConsistencyError("reduce_involutive: leaves disagree with the normal form");
    return root;
}

// ---------------------------------------------------------------------------------------------------------------
// d = 2 classification

struct Dim2Classification {
    int family = 0;  // 1..4, 0 = unclassified
    std::vector<cplx> parameters;
    std::optional<ComplexMatrix> conjugator;
    double residual = 0;
    std::string note;
    std::vector<int> alsoFits;  // other families whose shape fits within tolerance
    bool classified() const { return family != 0; }
    bool fits(int f) const { return family == f || std::find(alsoFits.begin(), alsoFits.end(), f) != alsoFits.end(); }
};

inline std::optional<double> known_index_of_family(int family) {
    switch (family) {
        case 1: return 1.0;
        case 2: return 4.0;
        case 3: return 4.0;
        case 4: return 2.0;
        default: return std::nullopt;
    }
}

inline ComplexMatrix family_matrix(int family, const std::vector<cplx>& p) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    switch (family) {
        case 1: m = p.at(0) * identity(4); break;
        case 2: m(0, 0) = p.at(0), m(1, 2) = p.at(1), m(2, 1) = p.at(2), m(3, 3) = p.at(3); break;
        case 3: m(0, 3) = p.at(0), m(1, 1) = p.at(1), m(2, 2) = p.at(1), m(3, 0) = p.at(2); break;
        case 4: m = p.at(0) * r4_shape(); break;
        default: throw DomainError("family_matrix: unknown family");
    }
    return m;
}

namespace detail {

// Unitary whose first column is the Bloch vector (theta, phi).
inline ComplexMatrix bloch_frame(double theta, double phi) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    ComplexMatrix u(2, 2);
    u << c, -std::polar(s, -phi), std::polar(s, phi), c;
    return u;
}

inline std::pair<double, double> bloch_angles(const Eigen::Vector2cd& v) {
    const double a = std::abs(v(0)), b = std::abs(v(1));
    const double theta = 2 * std::atan2(b, a);
    const double phi = b > 0 && a > 0 ? std::arg(v(1)) - std::arg(v(0)) : 0.0;
    return {theta, phi};
}

inline ComplexMatrix conjugate_back(const ComplexMatrix& r, const ComplexMatrix& u) {
    const ComplexMatrix uu = kron(u, u);
    return uu.adjoint() * r * uu;
}

// Entries of R' that must vanish (and equalities that must hold) for the family-2 or family-3 shape.
inline Eigen::VectorXcd shape_residual(const ComplexMatrix& rp, int family) {
    std::vector<cplx> out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool keep = family == 2 ? ((i == 0 && j == 0) || (i == 1 && j == 2) || (i == 2 && j == 1) || (i == 3 && j == 3))
                                          : ((i == 0 && j == 3) || (i == 3 && j == 0) || (i == 1 && j == 1) || (i == 2 && j == 2));
            if (!keep) out.push_back(rp(i, j));
        }
    if (family == 3) out.push_back((rp(1, 1) - rp(2, 2)) / std::sqrt(2.0));
    return Eigen::Map<Eigen::VectorXcd>(out.data(), long(out.size()));
}

inline std::pair<double, double> nelder_mead_2d(const std::function<double(double, double)>& f, double x0, double y0,
                                                double step, int maxIter) {
    std::array<std::array<double, 2>, 3> s{{{x0, y0}, {x0 + step, y0}, {x0, y0 + step}}};
    std::array<double, 3> fv{f(x0, y0), f(x0 + step, y0), f(x0, y0 + step)};
    for (int it = 0; it < maxIter; ++it) {
        std::array<int, 3> o{0, 1, 2};
        std::sort(o.begin(), o.end(), [&](int a, int b) { return fv[std::size_t(a)] < fv[std::size_t(b)]; });
        auto& best = s[std::size_t(o[0])];
        auto& mid = s[std::size_t(o[1])];
        auto& worst = s[std::size_t(o[2])];
        const double fbest = fv[std::size_t(o[0])], fmid = fv[std::size_t(o[1])], fworst = fv[std::size_t(o[2])];
        if (fworst - fbest <= 1e-30) break;
        const double cx = (best[0] + mid[0]) / 2, cy = (best[1] + mid[1]) / 2;
        const double rx = 2 * cx - worst[0], ry = 2 * cy - worst[1];
        const double fr = f(rx, ry);
        if (fr < fbest) {
            const double ex = 3 * cx - 2 * worst[0], ey = 3 * cy - 2 * worst[1];
            const double fe = f(ex, ey);
            if (fe < fr) worst = {ex, ey}, fv[std::size_t(o[2])] = fe;
            else worst = {rx, ry}, fv[std::size_t(o[2])] = fr;
        } else if (fr < fmid) {
            worst = {rx, ry}, fv[std::size_t(o[2])] = fr;
        } else {
            const double kx = (cx + worst[0]) / 2, ky = (cy + worst[1]) / 2;
            const double fk = f(kx, ky);
            if (fk < fworst) {
                worst = {kx, ky}, fv[std::size_t(o[2])] = fk;
            } else {
                for (int i : {o[1], o[2]}) {
                    auto& p = s[std::size_t(i)];
                    p = {(p[0] + best[0]) / 2, (p[1] + best[1]) / 2};
                    fv[std::size_t(i)] = f(p[0], p[1]);
                }
            }
        }
    }
    int b = 0;
    for (int i = 1; i < 3; ++i)
        if (fv[std::size_t(i)] < fv[std::size_t(b)]) b = i;
    return {s[std::size_t(b)][0], s[std::size_t(b)][1]};
}

// Levenberg-Marquardt on the shape residual with a central-difference Jacobian.
inline std::pair<double, double> polish_shape(const ComplexMatrix& r, int family, double th, double ph) {
    auto res = [&](double a, double b) {
        const Eigen::VectorXcd c = shape_residual(conjugate_back(r, bloch_frame(a, b)), family);
        Eigen::VectorXd v(2 * c.size());
        v << c.real(), c.imag();
        return v;
    };
    double lambda = 1e-6;
    Eigen::VectorXd cur = res(th, ph);
    for (int it = 0; it < 60 && cur.norm() > 1e-15; ++it) {
        const double h = 1e-6;
        Eigen::MatrixXd j(cur.size(), 2);
        j.col(0) = (res(th + h, ph) - res(th - h, ph)) / (2 * h);
        j.col(1) = (res(th, ph + h) - res(th, ph - h)) / (2 * h);
        const Eigen::Matrix2d jtj = j.transpose() * j;
        const Eigen::Vector2d g = j.transpose() * cur;
        bool improved = false;
        for (int tries = 0; tries < 20; ++tries) {
            Eigen::Matrix2d a = jtj;
            a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
            const Eigen::Vector2d step = a.ldlt().solve(-g);
            const Eigen::VectorXd trial = res(th + step(0), ph + step(1));
            if (trial.norm() < cur.norm()) {
                th += step(0), ph += step(1), cur = trial;
                lambda = std::max(lambda / 10, 1e-12);
                improved = true;
                break;
            }
            lambda *= 10;
        }
        if (!improved) break;
    }
    return {th, ph};
}

inline Dim2Classification try_family4(const RMatrix& r, const SubalgebraBasis& fixed) {
    Dim2Classification best;
    best.residual = std::numeric_limits<double>::infinity();
    // a traceless Hermitian element of the fixed algebra; its eigenvectors align the fixed projection
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    for (const auto& b : fixed.basis) {
        ComplexMatrix x = (b.matrix + b.matrix.adjoint()) / 2.0;
        x -= normalized_trace(x) * identity(2);
        if (x.norm() > h.norm()) h = x;
        x = (b.matrix - b.matrix.adjoint()) / cplx(0, 2);
        x -= normalized_trace(x) * identity(2);
        if (x.norm() > h.norm()) h = x;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
    for (int order = 0; order < 2; ++order) {
        ComplexMatrix u0(2, 2);
        u0.col(0) = es.eigenvectors().col(order);
        u0.col(1) = es.eigenvectors().col(1 - order);
        const ComplexMatrix rp = conjugate_back(r.matrix, u0);
        const cplx a = rp(0, 0), b = rp(0, 1);
        if (std::abs(a) < 1e-6 || std::abs(b) < 1e-6) continue;
        const cplx w = b / a / std::abs(b / a);
        ComplexMatrix dphase = ComplexMatrix::Identity(2, 2);
        dphase(1, 1) = std::conj(w);
        const ComplexMatrix u = u0 * dphase;
        cplx q = std::sqrt(2.0) * a;
        q /= std::abs(q);
        const ComplexMatrix uu = kron(u, u);
        const double res = (uu * family_matrix(4, {q}) * uu.adjoint() - r.matrix).norm();
        if (res < best.residual) {
            best.family = 4;
            best.parameters = {q};
            best.conjugator = u;
            best.residual = res;
        }
    }
    return best;
}

inline Dim2Classification read_shape(const RMatrix& r, int family, double th, double ph) {
    const ComplexMatrix u = bloch_frame(th, ph);
    const ComplexMatrix rp = conjugate_back(r.matrix, u);
    Dim2Classification c;
    c.family = family;
    if (family == 2) c.parameters = {rp(0, 0), rp(1, 2), rp(2, 1), rp(3, 3)};
    else c.parameters = {rp(0, 3), (rp(1, 1) + rp(2, 2)) / 2.0, rp(3, 0)};
    for (auto& p : c.parameters)
        if (std::abs(p) > 0) p /= std::abs(p);
    const ComplexMatrix uu = kron(u, u);
    c.residual = (uu * family_matrix(family, c.parameters) * uu.adjoint() - r.matrix).norm();
    c.conjugator = u;
    return c;
}

}  // namespace detail

// Decision tree: trivial, nontrivial level-1 fixed points, then a projection search for the diagonal-flip and
// anti-diagonal shapes. The conjugator u satisfies R = (u (x) u) R_family (u (x) u)^*.
inline Dim2Classification classify_dim2(const RMatrix& r, double tol = kClassifyTol, std::uint64_t seed = 0xc1a55,
                                        int starts = 32) {
    if (r.d != 2) throw DomainError("classify_dim2: d must be 2");
    if (is_trivial(r, tol)) {
        Dim2Classification c;
        c.family = 1;
        c.parameters = {r.matrix(0, 0) / std::abs(r.matrix(0, 0))};
        c.conjugator = ComplexMatrix(identity(2));
        c.residual = (r.matrix - c.parameters[0] * identity(4)).norm();
        return c;
    }
    const SubalgebraBasis fixed = fixed_subalgebra(r, 1);
    Dim2Classification best;
    best.residual = std::numeric_limits<double>::infinity();
    if (fixed.dimension() > 1) {
        best = detail::try_family4(r, fixed);
        if (best.residual <= tol) return best;
    }

    std::vector<std::pair<double, double>> seeds;
    auto add_eigvecs = [&](const ComplexMatrix& x) {
        const ComplexMatrix h = (x + x.adjoint()) / 2.0, k = (x - x.adjoint()) / cplx(0, 2);
        for (const ComplexMatrix& y : {h, k}) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(y)};
            for (int c = 0; c < 2; ++c) seeds.push_back(detail::bloch_angles(es.eigenvectors().col(c)));
        }
    };
    add_eigvecs(partial_trace_left(r.matrix, 2));
    const ComplexMatrix r2 = r.matrix * r.matrix;
    add_eigvecs(partial_trace_left(r2, 2));
    for (const auto& comp : eig_normal(r.matrix, 1e-8)) {
        add_eigvecs(partial_trace_left(comp.projection, 2));
        add_eigvecs(partial_trace_right(comp.projection, 2));
    }
    Rng rng(seed);
    for (int i = 0; i < starts; ++i)
        seeds.push_back({std::acos(1 - 2 * uniform01(rng)), 2 * std::numbers::pi * uniform01(rng)});

    auto search_family = [&](int family) {
        Dim2Classification fb;
        fb.residual = std::numeric_limits<double>::infinity();
        auto f = [&](double th, double ph) {
            return detail::shape_residual(detail::conjugate_back(r.matrix, detail::bloch_frame(th, ph)), family).squaredNorm();
        };
        for (const auto& [th0, ph0] : seeds) {
            auto [th, ph] = detail::nelder_mead_2d(f, th0, ph0, 0.3, 300);
            std::tie(th, ph) = detail::polish_shape(r.matrix, family, th, ph);
            const Dim2Classification c = detail::read_shape(r, family, th, ph);
            if (c.residual < fb.residual) fb = c;
            if (fb.residual <= tol) break;
        }
        return fb;
    };
    for (int family : {2, 3}) {
        Dim2Classification c = search_family(family);
        if (c.residual <= tol) {
            // q^2 = pr in the anti-diagonal family is also conjugate to a diagonal-flip representative
            if (family == 2 && search_family(3).residual <= tol) c.alsoFits.push_back(3);
            return c;
        }
        if (c.residual < best.residual) best = c;
    }
    const double bestResidual = best.residual;
    best = Dim2Classification{};
    best.residual = bestResidual;
    best.note = "no family matched within tolerance";
    return best;
}

// ---------------------------------------------------------------------------------------------------------------
// Report

struct AnalysisCaps {
    int commutantLevels = 2;  // M/N/L at n = 1..commutantLevels
    int fixedPointLevels = 4;
    bool includeL = true;
    std::uint64_t seed = 0x5eed;
};

struct CommutantEntry {
    std::string kind;  // "M", "N", "L"
    int level = 1;
    long dimension = 0;
    std::string profile;
    bool converged = true;
    std::string note;
};

struct AnalysisReport {
    std::string label;
    int d = 0;
    double ybeResidual = 0;
    double unitarityResidual = 0;
    std::vector<EigenComponent> spectrum;
    std::optional<PartialTraceInvariant> partialTrace;
    std::vector<CommutantEntry> commutants;
    std::vector<std::pair<int, long>> fixedPointDims;
    std::optional<ErgodicityVerdict> ergodicity;
    double ergodicityNecessary = 0;
    bool ergodic = false;
    std::optional<bool> irreducible;
    bool involutive = false;
    bool trivial = false;
    std::optional<IndexBounds> indexBounds;
    std::optional<ConcentrationVerdict> concentration;
    std::optional<NormalFormSpec> normalForm;
    std::optional<Dim2Classification> dim2;
    std::map<std::string, std::string> sectionErrors;
    std::vector<std::string> consistencyNotes;
};

namespace detail {

template <class F>
void run_section(AnalysisReport& rep, const std::string& name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        rep.sectionErrors[name] = e.what();
    }
}

inline bool level_fits(int d, int n) {
    return double(ipow(d, n + 1)) * double(ipow(d, n + 1)) * double(ipow(d, n)) * double(ipow(d, n)) <=
           double(kMaxOperatorEntries);
}

}  // namespace detail

inline AnalysisReport analyze(const RMatrix& r, const AnalysisCaps& caps = {}) {
    AnalysisReport rep;
    rep.label = r.label;
    rep.d = r.d;
    rep.ybeResidual = r.ybe_residual;
    rep.unitarityResidual = r.unitarity_residual;
    rep.involutive = is_involutive(r);
    rep.trivial = is_trivial(r);
    detail::run_section(rep, "spectrum", [&] { rep.spectrum = eig_normal(r.matrix); });
    detail::run_section(rep, "partialTrace", [&] { rep.partialTrace = partial_trace_invariant(r); });
    detail::run_section(rep, "ergodicity", [&] {
        rep.ergodicity = is_ergodic(r);
        rep.ergodic = rep.ergodicity->ergodic;
        rep.ergodicityNecessary = ergodicity_necessary_check(r);
        if (rep.ergodic && rep.ergodicityNecessary > 1e-10)
            rep.consistencyNotes.push_back("ergodic verdict but tau(R* phi(R)) differs from 1/d^2");
    });
    for (int n = 1; n <= caps.commutantLevels; ++n) {
        if (!detail::level_fits(r.d, n)) {
            rep.sectionErrors["commutants n=" + std::to_string(n)] = "skipped: level exceeds dense operator budget";
            continue;
        }
        auto add = [&](const std::string& kind, const SubalgebraBasis& s) {
            rep.commutants.push_back({kind, n, s.dimension(), s.profile(), s.converged, s.note});
        };
        detail::run_section(rep, "M n=" + std::to_string(n), [&] {
            const SubalgebraBasis m = relative_commutant_M(r, n);
            add("M", m);
            if (n == 1) rep.irreducible = m.dimension() == 1;
        });
        detail::run_section(rep, "N n=" + std::to_string(n), [&] { add("N", relative_commutant_N(r, n)); });
        if (caps.includeL) detail::run_section(rep, "L n=" + std::to_string(n), [&] { add("L", relative_commutant_L(r, n)); });
    }
    for (int n = 1; n <= caps.fixedPointLevels; ++n) {
        if (!detail::level_fits(r.d, n)) break;
        detail::run_section(rep, "fixed n=" + std::to_string(n),
                            [&] { rep.fixedPointDims.push_back({n, fixed_subalgebra(r, n).dimension()}); });
    }
    if (rep.ergodic)
        for (const auto& [n, dim] : rep.fixedPointDims)
            if (dim != 1) rep.consistencyNotes.push_back("ergodic verdict but fixed points at level " + std::to_string(n));
    detail::run_section(rep, "indexBounds", [&] { rep.indexBounds = index_bounds(r); });
    detail::run_section(rep, "concentration", [&] { rep.concentration = triviality_by_concentration(r); });
    if (rep.involutive) detail::run_section(rep, "normalForm", [&] { rep.normalForm = normal_form_of_involutive(r); });
    if (r.d == 2)
        detail::run_section(rep, "dim2", [&] {
            rep.dim2 = classify_dim2(r, kClassifyTol, caps.seed);
            if (rep.indexBounds && rep.dim2->classified()) {
                rep.indexBounds->knownIndex = known_index_of_family(rep.dim2->family);
                rep.indexBounds->knownIndexSource = "d = 2 family " + std::to_string(rep.dim2->family);
            }
        });
    if (rep.trivial && rep.indexBounds && !rep.indexBounds->knownIndex) {
        rep.indexBounds->knownIndex = 1.0;
        rep.indexBounds->knownIndexSource = "automorphism";
    }
    return rep;
}

}  // namespace rmlab
