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

#include "rmlab/analysis.hpp"
#include "rmlab/builtins.hpp"

using namespace rmlab;

namespace {

std::vector<NamedRMatrix> corpus_up_to(int dmax) {
    std::vector<NamedRMatrix> out;
    for (auto& b : builtin_corpus())
        if (b.r.d <= dmax) out.push_back(b);
    return out;
}

// E_1(R (x (x) 1) R^*) = tau(x) 1 tested on random x.
bool ergodic_by_expectation(const RMatrix& r, Rng& rng) {
    const int d = r.d;
    for (int t = 0; t < 4; ++t) {
        const ComplexMatrix x = random_gaussian(d, d, rng);
        const ComplexMatrix y = partial_trace_right(ComplexMatrix(r.matrix * kron(x, identity(d)) * r.matrix.adjoint()), d);
        if ((y - normalized_trace(x) * identity(d)).norm() > 1e-9 * x.norm()) return false;
    }
    return true;
}

std::vector<double> sorted_real_parts(const std::vector<cplx>& v) {
    std::vector<double> out;
    for (const cplx& c : v) out.push_back(c.real());
    std::sort(out.begin(), out.end());
    return out;
}

RMatrix random_normal_form(Rng& rng, int dmax, NormalFormSpec& spec) {
    spec.blocks.clear();
    int d = 0;
    while (d < 2 || (d < dmax && uniform01(rng) < 0.6)) {
        const int k = uniform_int(rng, 1, dmax - d);
        spec.blocks.push_back({k, uniform01(rng) < 0.5 ? 1 : -1});
        d += k;
    }
    spec = spec.canonical();
    return make_normal_form(spec);
}

}  // namespace

TEST_CASE("partial trace invariant") {
    for (int d = 2; d <= 4; ++d)
        CHECK((partial_trace_invariant(make_flip(d)).value - identity(d) / double(d)).norm() < 1e-15);

    // R3(p, q, r): only the middle block survives the trace over one slot
    const cplx p = std::polar(1.0, 0.4), q = std::polar(1.0, -1.0), r = std::polar(1.0, 2.2);
    const RMatrix r3 = make_r3(p, q, r);
    ComplexMatrix oracle = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) oracle(i, k) += r3.matrix(j * 2 + i, j * 2 + k) / 2.0;
    CHECK((partial_trace_invariant(r3).value - oracle).norm() < 1e-15);
    CHECK((oracle - q / 2.0 * identity(2)).norm() < 1e-15);

    // box sum: block diagonal with weights d / (d + d') and d' / (d + d')
    const RMatrix a = make_r4(std::polar(1.0, 0.7));
    const RMatrix b = make_diagonal(ComplexMatrix::Constant(3, 3, std::polar(1.0, 0.3)), identity(3));
    const ComplexMatrix box = partial_trace_invariant(box_sum(a, b)).value;
    ComplexMatrix want = ComplexMatrix::Zero(5, 5);
    want.topLeftCorner(2, 2) = 2.0 / 5.0 * partial_trace_left(a.matrix, 2);
    want.bottomRightCorner(3, 3) = 3.0 / 5.0 * partial_trace_left(b.matrix, 3);
    CHECK((box - want).norm() < 1e-14);

    for (const auto& nb : builtin_corpus()) {
        INFO(nb.name);
        const auto inv = partial_trace_invariant(nb.r);
        CHECK(inv.leftRightDiscrepancy <= 1e-11);
        CHECK(inv.normalityResidual <= 1e-11);
        CHECK(inv.operatorNorm <= 1 + 1e-12);
    }
}

TEST_CASE("ergodicity") {
    for (int d = 2; d <= 4; ++d) {
        CHECK(is_ergodic(make_flip(d)).ergodic);
        const auto v = is_ergodic(make_trivial(d, 1.0));
        CHECK_FALSE(v.ergodic);
        // the (i, j, i, j) entry with i != j sums to d where 0 is required
        CHECK(v.maxDeviation == Catch::Approx(double(d)));
    }
    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        const int d = uniform_int(rng, 2, 4);
        CHECK(is_ergodic(make_diagonal(random_phase_matrix(d, rng), haar_unitary(d, rng))).ergodic);
    }
    for (const auto& b : builtin_corpus()) {
        INFO(b.name);
        CHECK(is_ergodic(b.r).ergodic == ergodic_by_expectation(b.r, rng));
    }
}

TEST_CASE("ergodicity necessary condition") {
    // direct level-3 trace tau((R^* (x) 1)(1 (x) R))
    auto dense = [](const RMatrix& r) {
        const int d = r.d;
        const ComplexMatrix a = kron(ComplexMatrix(r.matrix.adjoint()), identity(d));
        const ComplexMatrix b = kron(identity(d), r.matrix);
        return std::abs(normalized_trace(ComplexMatrix(a * b)) - 1.0 / double(d * d));
    };
    CHECK(dense(make_flip(2)) < 1e-15);
    CHECK(ergodicity_necessary_check(make_flip(2)) < 1e-15);
    for (int d = 2; d <= 3; ++d)
        CHECK(ergodicity_necessary_check(make_trivial(d, cplx(0, 1))) == Catch::Approx(1.0 - 1.0 / (d * d)));
    Rng rng(42);
    for (int t = 0; t < 5; ++t) CHECK(ergodicity_necessary_check(make_diagonal(random_phase_matrix(2, rng), haar_unitary(2, rng))) <= 1e-12);
    for (const auto& b : corpus_up_to(4)) {
        INFO(b.name);
        CHECK(std::abs(ergodicity_necessary_check(b.r) - dense(b.r)) <= 1e-12);
        if (is_ergodic(b.r).ergodic) CHECK(ergodicity_necessary_check(b.r) <= 1e-10);
    }
}

TEST_CASE("ergodicity under box sums and cabling") {
    const auto c = corpus_up_to(2);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i; j < c.size(); j += 3) {
            INFO(c[i].name << " [+] " << c[j].name);
            const bool both = is_ergodic(c[i].r).ergodic && is_ergodic(c[j].r).ergodic;
            CHECK(is_ergodic(box_sum(c[i].r, c[j].r)).ergodic == both);
        }
    for (const auto& b : c) {
        INFO(b.name);
        if (is_ergodic(b.r).ergodic) CHECK(is_ergodic(cabling_power(b.r, 2)).ergodic);
    }
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(make_trivial(2, cplx(0, 1))));
    CHECK(is_irreducible(make_r4(std::polar(1.0, 0.1))));
    CHECK_FALSE(is_irreducible(make_flip(3)));
    Rng rng(43);
    CHECK_FALSE(is_irreducible(make_diagonal(random_phase_matrix(3, rng), haar_unitary(3, rng))));
    CHECK_FALSE(is_irreducible(make_block_simple({2, 1}, random_phase_matrix(2, rng))));
}

TEST_CASE("index bounds") {
    for (int d = 2; d <= 4; ++d) {
        const IndexBounds b = index_bounds(make_flip(d));
        CHECK(b.lowerMinimal >= 2);
        CHECK(b.upperJones == Catch::Approx(d * d));
    }
    Rng rng(44);
    for (int t = 0; t < 10; ++t) {
        const IndexBounds b = index_bounds(make_diagonal(random_phase_matrix(2, rng), haar_unitary(2, rng)));
        CHECK(b.lowerMinimal <= 4);
        CHECK(b.upperJones >= 4);
    }
    const IndexBounds r4 = index_bounds(make_r4(std::polar(1.0, 0.9)));
    CHECK(r4.lowerMinimal <= 2);
    CHECK(r4.upperJones >= 2);
    const IndexBounds triv = index_bounds(make_trivial(3, std::polar(1.0, 0.9)));
    CHECK(triv.lowerMinimal == 1);
    CHECK(triv.upperJones == Catch::Approx(1.0));
    for (const auto& b : builtin_corpus()) {
        INFO(b.name);
        const IndexBounds ib = index_bounds(b.r);
        CHECK(1 <= ib.lowerMinimal);
        CHECK(ib.lowerMinimal <= ib.upperJones);
        CHECK(ib.upperJones <= b.r.d * b.r.d + 1e-12);
    }
}

TEST_CASE("triviality by spectral concentration") {
    const auto q = triviality_by_concentration(make_trivial(2, std::polar(1.0, 2.0)));
    CHECK(q.minDistance < 1e-9);
    CHECK(q.concludesTrivial);
    // two antipodal eigenvalues: the best mu sits at +-i, distance sqrt 2
    const auto f = triviality_by_concentration(make_flip(2));
    CHECK(f.minDistance == Catch::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK_FALSE(f.concludesTrivial);
    CHECK(f.threshold == Catch::Approx(1 - std::pow(2.0, -0.25)));
    for (const auto& b : builtin_corpus()) {
        INFO(b.name);
        if (is_trivial(b.r)) continue;
        CHECK(triviality_by_concentration(b.r).minDistance >= kConcentrationThreshold);
    }
}

TEST_CASE("normal forms of involutive R-matrices") {
    for (int d = 2; d <= 4; ++d) {
        NormalFormSpec want;
        for (int i = 0; i < d; ++i) want.blocks.push_back({1, 1});
        CHECK(normal_form_of_involutive(make_flip(d)) == want);
    }
    CHECK(normal_form_of_involutive(scalar_multiple(make_flip(2), -1.0)) == NormalFormSpec{{{1, -1}, {1, -1}}});
    CHECK_THROWS_AS(normal_form_of_involutive(make_r4(1.0)), DomainError);

    Rng rng(45);
    for (int t = 0; t < 30; ++t) {
        NormalFormSpec spec;
        const RMatrix n = random_normal_form(rng, 6, spec);
        const RMatrix r = quasifree_conjugate(n, haar_unitary(n.d, rng));
        INFO(spec.to_string());
        CHECK(normal_form_of_involutive(r) == spec);
        CHECK(leaf_spec(reduce_involutive(r)) == spec);
    }
}

TEST_CASE("reduction trees") {
    const ReductionNode f = reduce_involutive(make_flip(2));
    REQUIRE(f.children.size() == 2);
    CHECK(f.children[0].leafBlocks == std::vector<NormalBlock>{{1, 1}});
    CHECK(f.children[1].leafBlocks == std::vector<NormalBlock>{{1, 1}});

    const ReductionNode s = reduce_involutive(make_normal_form({{{2, 1}, {1, 1}}}));
    REQUIRE(s.children.size() == 2);
    std::vector<NormalBlock> leaves;
    for (const auto& c : s.children) leaves.insert(leaves.end(), c.leafBlocks.begin(), c.leafBlocks.end());
    std::sort(leaves.begin(), leaves.end(), [](const NormalBlock& a, const NormalBlock& b) { return a.dim > b.dim; });
    CHECK(leaves == std::vector<NormalBlock>{{2, 1}, {1, 1}});
    CHECK(s.splitResidual < 1e-12);
}

TEST_CASE("d = 2 classification") {
    Rng rng(46);
    const cplx q = std::polar(1.0, 1.3);
    const auto c1 = classify_dim2(make_trivial(2, q));
    CHECK(c1.family == 1);
    CHECK(std::abs(c1.parameters[0] - q) < 1e-12);

    for (int t = 0; t < 10; ++t) {
        const cplx p = random_phase(rng), qq = random_phase(rng), r = random_phase(rng), s = random_phase(rng);
        const RMatrix base = make_r2(p, qq, r, s);
        const RMatrix conj = quasifree_conjugate(base, haar_unitary(2, rng));
        const auto c = classify_dim2(conj);
        REQUIRE(c.family == 2);
        CHECK(c.residual <= 1e-8);
        // parameters up to exchanging the two basis vectors: (p, q, r, s) -> (s, r, q, p)
        const auto& x = c.parameters;
        const double direct = std::abs(x[0] - p) + std::abs(x[1] - qq) + std::abs(x[2] - r) + std::abs(x[3] - s);
        const double swapped = std::abs(x[0] - s) + std::abs(x[1] - r) + std::abs(x[2] - qq) + std::abs(x[3] - p);
        CHECK(std::min(direct, swapped) <= 1e-7);
        const ComplexMatrix uu = kron(*c.conjugator, *c.conjugator);
        CHECK((uu * family_matrix(2, x) * uu.adjoint() - conj.matrix).norm() <= 1e-8);
    }
    for (int t = 0; t < 10; ++t) {
        const cplx p = random_phase(rng), qq = random_phase(rng), r = random_phase(rng);
        const RMatrix conj = quasifree_conjugate(make_r3(p, qq, r), haar_unitary(2, rng));
        const auto c = classify_dim2(conj);
        REQUIRE(c.family == 3);
        CHECK(c.residual <= 1e-8);
        // q and the product p r are invariant under the family's diagonal and swap symmetries
        CHECK(std::abs(c.parameters[1] - qq) <= 1e-7);
        CHECK(std::abs(c.parameters[0] * c.parameters[2] - p * r) <= 1e-7);
    }
    for (int t = 0; t < 10; ++t) {
        const cplx qq = random_phase(rng);
        const RMatrix conj = quasifree_conjugate(make_r4(qq), haar_unitary(2, rng));
        const auto c = classify_dim2(conj);
        REQUIRE(c.family == 4);
        CHECK(c.residual <= 1e-8);
        CHECK(std::abs(c.parameters[0] - qq) <= 1e-8);
    }
    // re-conjugation keeps the family
    for (const auto& b : corpus_up_to(2)) {
        INFO(b.name);
        if (b.r.d != 2) continue;
        const auto c = classify_dim2(b.r);
        CHECK(c.classified());
        CHECK(classify_dim2(quasifree_conjugate(b.r, haar_unitary(2, rng))).family == c.family);
    }
    CHECK_THROWS_AS(classify_dim2(make_flip(3)), DomainError);
}

TEST_CASE("partial trace spectra agree for character-equivalent pairs") {
    Rng rng(47);
    for (const auto& b : corpus_up_to(3)) {
        INFO(b.name);
        for (const RMatrix& s : {flip_conjugate(b.r), quasifree_conjugate(b.r, haar_unitary(b.r.d, rng))}) {
            if (!characters_equal(b.r, s, 3, 4).equal) continue;
            const auto a = distinct_eigenvalues(partial_trace_left(b.r.matrix, b.r.d));
            const auto c = distinct_eigenvalues(partial_trace_left(s.matrix, s.d));
            REQUIRE(a.size() == c.size());
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - c[i]) <= 1e-9);
        }
    }
    CHECK(sorted_real_parts({1.0, -1.0}) == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("analysis reports") {
    AnalysisCaps caps;
    caps.commutantLevels = 1;
    const AnalysisReport f = analyze(make_flip(2), caps);
    CHECK(f.sectionErrors.empty());
    CHECK(f.ergodic);
    REQUIRE(f.irreducible);
    CHECK_FALSE(*f.irreducible);
    REQUIRE(!f.commutants.empty());
    CHECK(f.commutants.front().kind == "M");
    CHECK(f.commutants.front().profile == "M_2");
    REQUIRE(f.indexBounds);
    CHECK(f.indexBounds->lowerMinimal == 2);
    CHECK(f.indexBounds->upperJones == Catch::Approx(4));
    CHECK(f.consistencyNotes.empty());

    const AnalysisReport r4 = analyze(make_r4(std::polar(1.0, 0.25)), caps);
    CHECK(r4.sectionErrors.empty());
    CHECK_FALSE(r4.ergodic);
    CHECK(*r4.irreducible);
    REQUIRE(r4.fixedPointDims.size() == 4);
    for (int n = 1; n <= 4; ++n) CHECK(r4.fixedPointDims[std::size_t(n - 1)].second == ipow(2, n));
    REQUIRE(r4.dim2);
    CHECK(r4.dim2->family == 4);
    CHECK(r4.indexBounds->knownIndex == 2.0);

    const AnalysisReport s = analyze(make_normal_form({{{2, 1}, {1, 1}}}), caps);
    CHECK_FALSE(s.ergodic);
    CHECK(s.ergodicityNecessary > 1e-3);
    REQUIRE(!s.fixedPointDims.empty());
    CHECK(s.fixedPointDims.front().second == 1);
    REQUIRE(s.normalForm);
    CHECK(s.normalForm->to_string() == "2:+,1:+");

    const AnalysisReport t = analyze(make_trivial(2, cplx(0, 1)), caps);
    CHECK(t.trivial);
    CHECK(t.indexBounds->lowerMinimal == 1);
    CHECK(t.indexBounds->upperJones == Catch::Approx(1));
}
