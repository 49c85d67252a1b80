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
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmlab/analysis.hpp"
#include "rmlab/braid.hpp"
#include "rmlab/random.hpp"
#include "rmlab/rmatrix.hpp"

namespace rmlab {

// ---------------------------------------------------------------------------------------------------------------
// Objective

struct ObjectiveValue {
    double value = 0;
    ComplexMatrix gradient;  // df = 2 Re tr(gradient^* dU)
};

namespace detail {

struct YbeTerms {
    ComplexMatrix a, b, e;  // a = U (x) 1, b = 1 (x) U, e = aba - bab
};

inline YbeTerms ybe_terms(const ComplexMatrix& u, int d) {
    YbeTerms t;
    t.a = kron(u, identity(d));
    t.b = kron(identity(d), u);
    const ComplexMatrix ab = t.a * t.b, ba = t.b * t.a;
    t.e = ab * t.a - ba * t.b;
    return t;
}

// Unnormalized traces over a right or left tensor factor of dimension d.
inline ComplexMatrix trace_out_right(const ComplexMatrix& x, int d) { return double(d) * partial_trace_right(x, d); }
inline ComplexMatrix trace_out_left(const ComplexMatrix& x, int d) { return double(d) * partial_trace_left(x, d); }

inline int dim_from_operator(const ComplexMatrix& u) {
    const int d = int(std::lround(std::sqrt(double(u.rows()))));
    if (d < 1 || long(d) * d != u.rows() || u.rows() != u.cols()) throw ShapeError("operator is not d^2 x d^2");
    return d;
}

}  // namespace detail

inline double ybe_value(const ComplexMatrix& u) {
    const int d = detail::dim_from_operator(u);
    return detail::ybe_terms(u, d).e.squaredNorm();
}

// f(U) = |U12 U23 U12 - U23 U12 U23|_F^2 with its Euclidean gradient.
inline ObjectiveValue ybe_objective(const ComplexMatrix& u) {
    const int d = detail::dim_from_operator(u);
    const detail::YbeTerms t = detail::ybe_terms(u, d);
    const ComplexMatrix& a = t.a;
    const ComplexMatrix& b = t.b;
    const ComplexMatrix& e = t.e;
    const ComplexMatrix ab = a * b, ba = b * a;
    const ComplexMatrix abH = ab.adjoint(), baH = ba.adjoint();
    const ComplexMatrix aH = a.adjoint(), bH = b.adjoint();
    const ComplexMatrix ga = e * baH + abH * e - bH * e * bH;
    const ComplexMatrix gb = aH * e * aH - e * abH - baH * e;
    return {e.squaredNorm(), detail::trace_out_right(ga, d) + detail::trace_out_left(gb, d)};
}

// ---------------------------------------------------------------------------------------------------------------
// Manifold helpers

// exp of a skew-Hermitian matrix, unitary to rounding.
inline ComplexMatrix expm_skew(const ComplexMatrix& s) {
    const ComplexMatrix h = I_UNIT * s;  // Hermitian
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(0.5 * (h + h.adjoint())));
    const Eigen::VectorXcd ph = (-I_UNIT * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Nearest unitary (polar factor).
inline ComplexMatrix unitary_projection(const ComplexMatrix& x) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

inline ComplexMatrix skew_part(const ComplexMatrix& x) { return 0.5 * (x - x.adjoint()); }

// ---------------------------------------------------------------------------------------------------------------
// Search

struct SearchConfig {
    int d = 2;
    std::optional<ComplexMatrix> seedMatrix;
    std::uint64_t seed = 1;
    int maxIterations = 4000;
    double initialStep = 1.0;
    double stepShrink = 0.5;
    double armijo = 1e-4;
    int maxBacktracks = 60;
    double targetResidual = 1e-8;
    double polishTol = 1e-10;
    double polishSwitch = 1e-3;  // residual at which the least-squares polish is first tried
    int polishIterations = 60;

    void validate() const {
        if (d < 1 || d > 3) throw DomainError("search: d must be in 1..3");
        if (!(targetResidual > 0)) throw DomainError("search: target residual must be positive");
        if (maxIterations < 1) throw DomainError("search: maxIterations must be >= 1");
        if (!(polishTol > 0)) throw DomainError("search: polish tolerance must be positive");
        if (!(stepShrink > 0 && stepShrink < 1) || !(initialStep > 0) || !(armijo > 0 && armijo < 1))
            throw DomainError("search: invalid line-search parameters");
        if (seedMatrix) {
            const long n = long(d) * d;
            if (seedMatrix->rows() != n || seedMatrix->cols() != n) throw ShapeError("search: seed is not d^2 x d^2");
            if (!is_unitary(*seedMatrix, 1e-8)) throw DomainError("search: seed is not unitary");
        }
    }
};

struct SearchResult {
    bool success = false;
    std::optional<RMatrix> solution;
    ComplexMatrix best;     // final iterate
    double objective = 0;   // f at the final iterate
    double residual = 0;    // sqrt(f)
    int iterations = 0;     // accepted descent steps
    int polishSteps = 0;    // accepted polish steps
    std::vector<double> trace;  // objective after every accepted step, starting with the seed
    double maxUnitarityDrift = 0;
    std::uint64_t seed = 0;
    std::string message;
};

namespace detail {

// Real basis of the skew-Hermitian n x n matrices.
inline std::vector<ComplexMatrix> skew_basis(long n) {
    std::vector<ComplexMatrix> out;
    for (long i = 0; i < n; ++i) {
        ComplexMatrix x = ComplexMatrix::Zero(n, n);
        x(i, i) = I_UNIT;
        out.push_back(x);
        for (long j = i + 1; j < n; ++j) {
            ComplexMatrix re = ComplexMatrix::Zero(n, n), im = ComplexMatrix::Zero(n, n);
            re(i, j) = 1.0;
            re(j, i) = -1.0;
            im(i, j) = I_UNIT;
            im(j, i) = I_UNIT;
            out.push_back(re);
            out.push_back(im);
        }
    }
    return out;
}

inline Eigen::VectorXd realify(const ComplexMatrix& x) {
    Eigen::VectorXd v(2 * x.size());
    for (long k = 0; k < x.size(); ++k) {
        v(2 * k) = x.data()[k].real();
        v(2 * k + 1) = x.data()[k].imag();
    }
    return v;
}

// Levenberg-Marquardt on the residual map Omega -> E(U exp(Omega)).
inline int lm_polish(ComplexMatrix& u, int d, double goal, int maxIter) {
    const std::vector<ComplexMatrix> basis = skew_basis(u.rows());
    const ComplexMatrix id = identity(d);
    YbeTerms t = ybe_terms(u, d);
    double cur = t.e.norm();
    double mu = 1e-3;
    int accepted = 0;
    for (int it = 0; it < maxIter && cur > goal; ++it) {
        const ComplexMatrix ab = t.a * t.b, ba = t.b * t.a;
        Eigen::MatrixXd jac(2 * t.e.size(), basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const ComplexMatrix du = u * basis[k];
            const ComplexMatrix da = kron(du, id), db = kron(id, du);
            const ComplexMatrix de = da * ba + t.a * db * t.a + ab * da - db * ab - t.b * da * t.b - ba * db;
            jac.col(long(k)) = realify(de);
        }
        const Eigen::VectorXd res = realify(t.e);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * res;
        bool moved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
            ComplexMatrix omega = ComplexMatrix::Zero(u.rows(), u.cols());
            for (std::size_t k = 0; k < basis.size(); ++k) omega += step(long(k)) * basis[k];
            ComplexMatrix cand = u * expm_skew(omega);
            if (unitarity_residual(cand) > 1e-13) cand = unitary_projection(cand);
            YbeTerms ct = ybe_terms(cand, d);
            const double val = ct.e.norm();
            if (val < cur) {
                u = cand;
                t = std::move(ct);
                cur = val;
                mu = std::max(mu / 3.0, 1e-12);
                moved = true;
                ++accepted;
                break;
            }
            mu *= 4.0;
        }
        if (!moved) break;
    }
    return accepted;
}

inline bool passes_verify(const ComplexMatrix& u, int d, double tol) {
    try {
        verify(u, d, tol);
        return true;
    } catch (const NotAnRMatrixError&) {
        return false;
    }
}

}  // namespace detail

// Riemannian gradient descent on U(d^2) with Armijo backtracking and a least-squares polish.
inline SearchResult search(const SearchConfig& cfg) {
    cfg.validate();
    const int d = cfg.d;
    const long n = long(d) * d;
    SearchResult out;
    out.seed = cfg.seed;
    Rng rng(cfg.seed);
    ComplexMatrix u = cfg.seedMatrix ? *cfg.seedMatrix : haar_unitary(n, rng);
    if (unitarity_residual(u) > 1e-13) u = unitary_projection(u);

    double f = ybe_value(u);
    out.trace.push_back(f);
    double polishAt = cfg.polishSwitch;
    auto gate = [&] { return std::sqrt(f) < cfg.targetResidual && detail::passes_verify(u, d, cfg.polishTol); };
    auto polish = [&] {
        const int k = detail::lm_polish(u, d, 0.01 * cfg.polishTol, cfg.polishIterations);
        if (k > 0) {
            out.polishSteps += k;
            f = ybe_value(u);
            out.trace.push_back(f);
            out.maxUnitarityDrift = std::max(out.maxUnitarityDrift, unitarity_residual(u));
        }
    };

    bool done = gate();
    std::string reason;
    while (!done && out.iterations < cfg.maxIterations) {
        const ObjectiveValue ov = ybe_objective(u);
        const ComplexMatrix s = skew_part(u.adjoint() * ov.gradient);
        const double slope = 2.0 * s.squaredNorm();  // -df/dt along U exp(-t s)
        if (slope < 1e-300) {
            reason = "stationary point";
            break;
        }
        double t = cfg.initialStep;
        bool accepted = false;
        for (int k = 0; k < cfg.maxBacktracks; ++k, t *= cfg.stepShrink) {
            ComplexMatrix cand = u * expm_skew(-t * s);
            if (unitarity_residual(cand) > 1e-13) cand = unitary_projection(cand);
            const double fc = ybe_value(cand);
            if (fc <= f - cfg.armijo * t * slope) {
                u = std::move(cand);
                f = fc;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            reason = "line search failed";
            break;
        }
        ++out.iterations;
        out.trace.push_back(f);
        out.maxUnitarityDrift = std::max(out.maxUnitarityDrift, unitarity_residual(u));
        if (std::sqrt(f) < polishAt) {
            polish();
            polishAt = std::sqrt(f) * 0.1;
            done = gate();
        }
    }
    if (!done) {
        polish();
        done = gate();
    }
    if (!done && reason.empty()) reason = "iteration budget exhausted";

    out.best = u;
    out.objective = f;
    out.residual = std::sqrt(f);
    out.success = done;
    if (done) {
        out.solution = verify(u, d, cfg.polishTol, "search");
        out.message = "verified solution";
    } else {
        out.message = reason + "; best residual " + std::to_string(out.residual);
    }
    return out;
}

inline std::uint64_t restart_seed(std::uint64_t base, int k) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * std::uint64_t(k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent restarts; results are returned in restart order whatever the thread count.
inline std::vector<SearchResult> search_restarts(const SearchConfig& cfg, int restarts, int jobs = 1) {
    cfg.validate();
    if (restarts < 0) throw DomainError("search: negative restart count");
    std::vector<SearchResult> out(static_cast<std::size_t>(restarts));
    auto run = [&](int k) {
        SearchConfig c = cfg;
        c.seed = restart_seed(cfg.seed, k);
        if (k > 0) c.seedMatrix.reset();
        out[std::size_t(k)] = search(c);
    };
    jobs = std::max(1, std::min(jobs, restarts));
    if (jobs == 1) {
        for (int k = 0; k < restarts; ++k) run(k);
        return out;
    }
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&, j] {
            for (int k = j; k < restarts; k += jobs) run(k);
        });
    for (auto& th : pool) th.join();
    return out;
}

// Index of the lowest residual, ties to the lowest restart index; -1 when empty.
inline int best_result(const std::vector<SearchResult>& rs) {
    int best = -1;
    for (int k = 0; k < int(rs.size()); ++k)
        if (best < 0 || rs[std::size_t(k)].residual < rs[std::size_t(best)].residual) best = k;
    return best;
}

// ---------------------------------------------------------------------------------------------------------------
// Fingerprints

struct Fingerprint {
    std::vector<cplx> spectrumR;
    std::vector<cplx> spectrumPhi;
    std::vector<cplx> cycles;  // tau of the n-cycle word, n = 1..5
    std::vector<cplx> words;   // fixed non-cycle words
};

inline const std::vector<BraidWord>& fingerprint_words() {
    static const std::vector<BraidWord> w = {
        BraidWord::from_signed({1, -2}),
        BraidWord::from_signed({1, 1, 2}),
        BraidWord::from_signed({1, 2, -1, 3}),
    };
    return w;
}

namespace detail {

inline std::vector<cplx> sorted_values(const Eigen::VectorXcd& v) {
    std::vector<cplx> out(v.data(), v.data() + v.size());
    auto key = [](cplx c) { return std::make_pair(std::round(c.real() * 1e6), std::round(c.imag() * 1e6)); };
    std::sort(out.begin(), out.end(), [&](cplx a, cplx b) { return key(a) < key(b); });
    return out;
}

// Max distance under a greedy nearest matching.
inline double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0;
    for (cplx x : a) {
        std::size_t pick = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!used[j] && std::abs(x - b[j]) < bestd) {
                bestd = std::abs(x - b[j]);
                pick = j;
            }
        used[pick] = true;
        worst = std::max(worst, bestd);
    }
    return worst;
}

inline double list_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

}  // namespace detail

inline Fingerprint fingerprint(const RMatrix& r) {
    Fingerprint fp;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(r.matrix), false);
    fp.spectrumR = detail::sorted_values(es.eigenvalues());
    const ComplexMatrix phi = partial_trace_left(r.matrix, r.d);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ep(Eigen::MatrixXcd(phi), false);
    fp.spectrumPhi = detail::sorted_values(ep.eigenvalues());
    for (int n = 1; n <= 5; ++n) fp.cycles.push_back(cycle_character_contracted(r, n));
    for (const BraidWord& w : fingerprint_words()) fp.words.push_back(character(r, w));
    return fp;
}

inline double fingerprint_distance(const Fingerprint& a, const Fingerprint& b) {
    return std::max({detail::multiset_distance(a.spectrumR, b.spectrumR),
                     detail::multiset_distance(a.spectrumPhi, b.spectrumPhi), detail::list_distance(a.cycles, b.cycles),
                     detail::list_distance(a.words, b.words)});
}

}  // namespace rmlab
