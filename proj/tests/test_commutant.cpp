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

#include <catch_amalgamated.hpp>

#include <array>

#include "rmlab/builtins.hpp"
#include "rmlab/commutant.hpp"

using namespace rmlab;

namespace {

std::vector<NamedRMatrix> corpus_up_to(int dmax) {
    std::vector<NamedRMatrix> out;
    for (auto& b : builtin_corpus())
        if (b.r.d <= dmax) out.push_back(b);
    return out;
}

void check_subalgebra_invariants(const SubalgebraBasis& s) {
    const long k = s.dimension();
    for (long i = 0; i < k; ++i)
        for (long j = 0; j < k; ++j) {
            const cplx ip = hs_inner(s.basis[std::size_t(i)], s.basis[std::size_t(j)]);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    CHECK(s.closureResidual <= 1e-9);
    CHECK(membership_residual(identity(ipow(s.d, s.level)), s) <= 1e-9);
    REQUIRE(s.blockProfile);
    long sq = 0;
    for (int b : *s.blockProfile) sq += long(b) * b;
    CHECK(sq == k);
}

const std::array<ComplexMatrix, 4>& pauli() {
    static const std::array<ComplexMatrix, 4> p = [] {
        std::array<ComplexMatrix, 4> s;
        for (auto& m : s) m = ComplexMatrix::Zero(2, 2);
        s[0] << 1, 0, 0, 1;
        s[1] << 0, 1, 1, 0;
        s[2] << 0, cplx(0, -1), cplx(0, 1), 0;
        s[3] << 1, 0, 0, -1;
        return s;
    }();
    return p;
}

bool anticommute(int a, int b) { return a != 0 && b != 0 && a != b; }

// Pauli strings sigma_{i_1} (x) ... (x) sigma_{i_n} commuting with every sigma_3 (x) sigma_2 on adjacent slots,
// where the slot after the last one carries sigma_0.
std::vector<std::vector<int>> fixed_pauli_strings(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(std::size_t(n), 0);
    for (long code = 0; code < ipow(4, n); ++code) {
        long t = code;
        for (int k = 0; k < n; ++k) idx[std::size_t(k)] = int(t % 4), t /= 4;
        bool ok = true;
        for (int k = 0; k < n && ok; ++k) {
            const int next = k + 1 < n ? idx[std::size_t(k + 1)] : 0;
            ok = (int(anticommute(3, idx[std::size_t(k)])) + int(anticommute(2, next))) % 2 == 0;
        }
        if (ok) out.push_back(idx);
    }
    return out;
}

ComplexMatrix pauli_string(const std::vector<int>& idx) {
    ComplexMatrix x = identity(1);
    for (int i : idx) x = kron(x, pauli()[std::size_t(i)]);
    return x;
}

// Commutant of the given matrices by the Kronecker form of x -> [x, g] on row-major vectors.
long commutant_dimension_oracle(const std::vector<ComplexMatrix>& gens) {
    const long dim = gens.front().rows();
    Eigen::MatrixXcd a(long(gens.size()) * dim * dim, dim * dim);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const Eigen::MatrixXcd g = gens[k];
        Eigen::MatrixXcd op(dim * dim, dim * dim);
        // vec_r(x g) = (1 (x) g^T) vec_r(x), vec_r(g x) = (g (x) 1) vec_r(x)
        for (long i = 0; i < dim; ++i)
            for (long j = 0; j < dim; ++j)
                for (long p = 0; p < dim; ++p)
                    for (long q = 0; q < dim; ++q) op(i * dim + j, p * dim + q) = id(i, p) * g(q, j) - g(i, p) * id(j, q);
        a.block(long(k) * dim * dim, 0, dim * dim, dim * dim) = op;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
    qr.setThreshold(1e-9);
    return dim * dim - qr.rank();
}

// Stabilization for N at level 1 done on explicit basis matrices: keep x in V whose image 1 (x) x under ad R lies
// in (V) (x) 1, using the right partial trace as the compression.
long n_dimension_oracle(const RMatrix& r) {
    const int d = r.d;
    std::vector<ComplexMatrix> v;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(d, d);
            e(i, j) = 1.0;
            v.push_back(e);
        }
    while (!v.empty()) {
        Eigen::MatrixXcd vcols(d * d, long(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) vcols(a * d + b, long(i)) = v[i](a, b);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(vcols);
        const Eigen::MatrixXcd qv = qr.householderQ() * Eigen::MatrixXcd::Identity(d * d, long(v.size()));
        Eigen::MatrixXcd cons(long(d) * d * d * d + long(d) * d, long(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            const ComplexMatrix t = r.matrix * kron(identity(d), v[i]) * r.matrix.adjoint();
            const ComplexMatrix y = partial_trace_right(t, d);
            const ComplexMatrix off = t - kron(y, identity(d));
            Eigen::VectorXcd yv(d * d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) yv(a * d + b) = y(a, b);
            const Eigen::VectorXcd out = yv - qv * (qv.adjoint() * yv);
            for (long a = 0; a < off.rows(); ++a)
                for (long b = 0; b < off.cols(); ++b) cons(a * off.cols() + b, long(i)) = off(a, b);
            cons.block(long(d) * d * d * d, long(i), d * d, 1) = out;
        }
        if (cons.norm() <= 1e-9) break;
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(cons);
        lu.setThreshold(1e-9);
        const Eigen::MatrixXcd ker = lu.dimensionOfKernel() > 0 ? Eigen::MatrixXcd(lu.kernel()) : Eigen::MatrixXcd(long(v.size()), 0);
        if (ker.cols() == long(v.size())) break;
        std::vector<ComplexMatrix> next;
        for (long c = 0; c < ker.cols(); ++c) {
            ComplexMatrix x = ComplexMatrix::Zero(d, d);
            for (std::size_t i = 0; i < v.size(); ++i) x += ker(long(i), c) * v[i];
            next.push_back(x);
        }
        v = std::move(next);
    }
    return long(v.size());
}

}  // namespace

TEST_CASE("apply_endo") {
    Rng rng(31);
    const AlgebraElement x(2, 1, random_gaussian(2, 2, rng));
    const RMatrix q = make_trivial(2, std::polar(1.0, 0.5));
    CHECK((apply_endo(q, x).matrix - embed(x.matrix, 2, 1, 2)).norm() < 1e-13);
    CHECK((apply_endo(make_flip(2), x).matrix - shift(x.matrix, 2, 1)).norm() < 1e-13);
    for (const auto& b : corpus_up_to(3)) {
        INFO(b.name);
        CHECK((apply_endo(b.r, b.r.element()).matrix - shift(b.r.matrix, b.r.d, 1)).norm() <= 1e-11);
    }
}

TEST_CASE("wedderburn examples") {
    CHECK(wedderburn_decompose({AlgebraElement::identity(2, 1)}) == BlockProfile{1});
    std::vector<AlgebraElement> full, diag;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(2, 2);
            e(i, j) = 1.0;
            full.emplace_back(2, 1, e);
            if (i == j) diag.emplace_back(2, 1, e);
        }
    CHECK(wedderburn_decompose(full) == BlockProfile{2});
    CHECK(wedderburn_decompose(diag) == BlockProfile{1, 1});
    ComplexMatrix nil = ComplexMatrix::Zero(2, 2);
    nil(0, 1) = 1.0;
    CHECK_THROWS_AS(wedderburn_decompose({AlgebraElement::identity(2, 1), AlgebraElement(2, 1, nil)}), DomainError);

    // C (+) M_2 inside M_3, conjugated by a random unitary
    Rng rng(32);
    const ComplexMatrix u = haar_unitary(3, rng);
    std::vector<AlgebraElement> span;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if ((i == 0) != (j == 0)) continue;
            ComplexMatrix e = ComplexMatrix::Zero(3, 3);
            e(i, j) = 1.0;
            span.emplace_back(3, 1, ComplexMatrix(u * e * u.adjoint()));
        }
    CHECK(wedderburn_decompose(span) == BlockProfile{1, 2});
    CHECK(profile_string({1, 2}) == "C (+) M_2");
    CHECK(profile_string({1, 1, 2, 2}) == "C^2 (+) M_2 (+) M_2");
}

TEST_CASE("M at level 1 for flip and trivial") {
    for (int d = 2; d <= 3; ++d) {
        const SubalgebraBasis m = relative_commutant_M(make_flip(d), 1);
        CHECK(m.dimension() == d * d);
        CHECK(m.blockProfile == BlockProfile{d});
        CHECK(wedderburn_decompose(m.basis) == BlockProfile{d});
        const SubalgebraBasis t = relative_commutant_M(make_trivial(d, std::polar(1.0, 1.1)), 1);
        CHECK(t.dimension() == 1);
        CHECK(t.blockProfile == BlockProfile{1});
    }
}

TEST_CASE("M at level 1 for simple R-matrices") {
    // off-diagonal coefficients 1: the rank-one blocks with diagonal coefficient 1 assemble into one matrix block
    struct Case {
        std::vector<int> dims;
        std::vector<cplx> diag;
        BlockProfile want;
    };
    const cplx w = std::polar(1.0, 0.9);
    const std::vector<Case> cases = {
        {{1, 1, 1}, {1.0, 1.0, w}, {1, 2}},
        {{1, 1, 1, 1}, {1.0, 1.0, 1.0, 1.0}, {4}},
        {{1, 1, 1}, {w, -1.0, cplx(0, 1)}, {1, 1, 1}},
        {{2, 1}, {1.0, 1.0}, {1, 1}},
        {{1, 2}, {1.0, w}, {1, 1}},
        {{1, 1, 2}, {1.0, 1.0, w}, {1, 2}},
    };
    for (const auto& c : cases) {
        const long n = long(c.dims.size());
        ComplexMatrix phases = ComplexMatrix::Ones(n, n);
        for (long i = 0; i < n; ++i) phases(i, i) = c.diag[std::size_t(i)];
        const SubalgebraBasis m = relative_commutant_M(make_block_simple(c.dims, phases), 1);
        check_subalgebra_invariants(m);
        CHECK(m.blockProfile == c.want);
    }
}

TEST_CASE("subalgebra invariants and membership facts") {
    for (const auto& b : corpus_up_to(3)) {
        INFO(b.name);
        const RMatrix& r = b.r;
        const SubalgebraBasis m1 = relative_commutant_M(r, 1);
        check_subalgebra_invariants(m1);
        CHECK(membership_residual(partial_trace_left(r.matrix, r.d), m1) <= 1e-9);
        if (r.d == 2) {
            const SubalgebraBasis m2 = relative_commutant_M(r, 2);
            check_subalgebra_invariants(m2);
            CHECK(membership_residual(r.matrix, m2) <= 1e-9);
        }
        const SubalgebraBasis fx = fixed_subalgebra(r, 1);
        check_subalgebra_invariants(fx);
        for (const auto& x : fx.basis) CHECK((r.matrix * kron(x.matrix, identity(r.d)) - kron(x.matrix, identity(r.d)) * r.matrix).norm() <= 1e-10);
        // d = 2, 3 are prime: M_{R,1} and level-1 fixed points cannot both be nontrivial
        CHECK((m1.dimension() == 1 || fx.dimension() == 1));

        const SubalgebraBasis n1 = relative_commutant_N(r, 1);
        check_subalgebra_invariants(n1);
        CHECK(subspace_residual(m1.basis, n1.basis) <= 1e-9);
        CHECK(n1.iterations <= r.d * r.d + 1);
        CHECK(n1.dimension() == n_dimension_oracle(r));
    }
}

TEST_CASE("N at level 1") {
    for (int d = 2; d <= 3; ++d) {
        CHECK(relative_commutant_N(make_flip(d), 1).dimension() == d * d);
        // ad(q 1) maps x to 1 (x) x, which lies in the embedded level only for scalars
        const RMatrix q = make_trivial(d, std::polar(1.0, 0.2));
        CHECK(relative_commutant_N(q, 1).dimension() == 1);
        CHECK(n_dimension_oracle(q) == 1);
    }
    Rng rng(33);
    for (int d = 2; d <= 3; ++d) {
        const RMatrix uf = make_uf(haar_unitary(d, rng));
        CHECK(relative_commutant_M(uf, 1).dimension() == d);
        CHECK(relative_commutant_N(uf, 1).dimension() == d * d);
    }
    const RMatrix r4 = make_r4(std::polar(1.0, 0.3));
    const SubalgebraBasis n2 = relative_commutant_N(r4, 2);
    CHECK(subspace_residual(relative_commutant_M(r4, 2).basis, n2.basis) <= 1e-9);
    CHECK(n2.iterations <= 4 * 2 + 1);
}

TEST_CASE("fixed points") {
    for (int d = 2; d <= 3; ++d) CHECK(fixed_subalgebra(make_flip(d), 1).dimension() == 1);
    CHECK(fixed_subalgebra(make_normal_form({{{2, 1}, {1, 1}}}), 1).dimension() == 1);

    const RMatrix r4 = make_r4(std::polar(1.0, -0.6));
    for (int n = 1; n <= 4; ++n) {
        INFO("n = " << n);
        const SubalgebraBasis fx = fixed_subalgebra(r4, n);
        const auto strings = fixed_pauli_strings(n);
        CHECK(long(strings.size()) == ipow(2, n));
        CHECK(fx.dimension() == ipow(2, n));
        for (const auto& s : strings) CHECK(membership_residual(pauli_string(s), fx) <= 1e-9);
    }
}

TEST_CASE("braid image commutant") {
    CHECK(braid_image_commutant(make_trivial(2, cplx(0, 1)), 2).dimension() == 16);
    CHECK(braid_image_commutant(make_trivial(2, cplx(0, 1)), 3).dimension() == 64);

    Rng rng(34);
    const RMatrix r2 = make_r2(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng));
    for (int n = 2; n <= 4; ++n) {
        std::vector<ComplexMatrix> gens;
        for (int k = 0; k <= n - 2; ++k) gens.push_back(local_operator(r2.matrix, 2, k, n));
        INFO("n = " << n);
        CHECK(braid_image_commutant(r2, n).dimension() == commutant_dimension_oracle(gens));
    }
    CHECK(braid_image_commutant(r2, 2).dimension() == 4);

    const RMatrix r4 = make_r4(std::polar(1.0, 0.3));
    for (int n = 2; n <= 4; ++n) {
        const SubalgebraBasis c = braid_image_commutant(r4, n);
        for (const auto& s : fixed_pauli_strings(n)) CHECK(membership_residual(pauli_string(s), c) <= 1e-9);
    }
}

TEST_CASE("braid-generated commutant L") {
    CHECK(relative_commutant_L(make_trivial(2, std::polar(1.0, 0.4)), 1).dimension() == 1);
    CHECK(relative_commutant_L(make_trivial(2, std::polar(1.0, 0.4)), 2).dimension() == 1);
    for (const auto& b : corpus_up_to(3)) {
        INFO(b.name);
        const RMatrix& r = b.r;
        const SubalgebraBasis l1 = relative_commutant_L(r, 1);
        check_subalgebra_invariants(l1);
        CHECK(membership_residual(partial_trace_left(r.matrix, r.d), l1) <= 1e-9);
        const SubalgebraBasis m1 = relative_commutant_M(r, 1);
        CHECK(subspace_residual(l1.basis, m1.basis) <= 1e-9);
        CHECK(subspace_residual(m1.basis, relative_commutant_N(r, 1).basis) <= 1e-9);
        if (r.d == 2) {
            const SubalgebraBasis l2 = relative_commutant_L(r, 2);
            CHECK(membership_residual(r.matrix, l2) <= 1e-9);
            CHECK(subspace_residual(l2.basis, relative_commutant_M(r, 2).basis) <= 1e-9);
        }
    }
}

TEST_CASE("minimal projections") {
    const SubalgebraBasis m = relative_commutant_M(make_normal_form({{{2, 1}, {1, 1}}}), 1);
    const auto ps = minimal_projections(m);
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    for (const auto& p : ps) {
        CHECK((p * p - p).norm() < 1e-10);
        CHECK(membership_residual(p, m) <= 1e-9);
        sum += p;
    }
    CHECK((sum - identity(3)).norm() < 1e-10);
}
