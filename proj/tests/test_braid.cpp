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

#include <numeric>

#include "rmlab/braid.hpp"
#include "rmlab/builtins.hpp"

using namespace rmlab;

namespace {

// Permutation matrix of the slot permutation of a word, built by moving basis indices letter by letter.
ComplexMatrix permutation_oracle(int d, const BraidWord& w) {
    const int n = w.strands;
    const long dim = ipow(d, n);
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (long src = 0; src < dim; ++src) {
        std::vector<int> digits(n);
        long t = src;
        for (int k = n - 1; k >= 0; --k) digits[k] = int(t % d), t /= d;
        for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) std::swap(digits[it->gen - 1], digits[it->gen]);
        long dst = 0;
        for (int k = 0; k < n; ++k) dst = dst * d + digits[k];
        p(dst, src) = 1.0;
    }
    return p;
}

std::vector<NamedRMatrix> small_corpus() {
    std::vector<NamedRMatrix> out;
    for (auto& b : builtin_corpus())
        if (b.r.d <= 3) out.push_back(b);
    return out;
}

}  // namespace

TEST_CASE("braid words") {
    const BraidWord w = BraidWord::from_signed({1, 2, -2, -1, 3});
    CHECK(w.to_signed() == std::vector<int>{3});
    CHECK(w.strands == 4);
    CHECK_THROWS_AS(BraidWord::from_signed({0}), DomainError);
    CHECK_THROWS_AS(BraidWord::from_signed({3}, 3), DomainError);
    CHECK((w * w.inverse()).length() == 0);
}

TEST_CASE("represent") {
    const RMatrix r4 = make_r4(std::polar(1.0, 0.3));
    CHECK((represent(r4, BraidWord::from_signed({1})).matrix - r4.matrix).norm() == 0);
    CHECK((represent(r4, BraidWord::from_signed({}, 3)).matrix - identity(8)).norm() == 0);

    const RMatrix f = make_flip(3);
    for (const auto& s : std::vector<std::vector<int>>{{1}, {1, 2}, {2, 1, -2}, {1, 2, 3, 1, 2}, {3, -1, 2}}) {
        const BraidWord w = BraidWord::from_signed(s, 4);
        CHECK((represent(f, w).matrix - permutation_oracle(3, w)).norm() < 1e-14);
    }

    for (const auto& b : small_corpus()) {
        INFO(b.name);
        for (int k = 1; k <= 3; ++k) {
            const auto lhs = represent(b.r, BraidWord::from_signed({k, k + 1, k}, 5));
            const auto rhs = represent(b.r, BraidWord::from_signed({k + 1, k, k + 1}, 5));
            CHECK((lhs.matrix - rhs.matrix).norm() <= 1e-11);
        }
        const auto b1 = represent(b.r, BraidWord::from_signed({1}, 4)).matrix;
        const auto b3 = represent(b.r, BraidWord::from_signed({3}, 4)).matrix;
        CHECK((b1 * b3 - b3 * b1).norm() <= 1e-12);
    }
}

TEST_CASE("characters") {
    const RMatrix f2 = make_flip(2);
    CHECK(std::abs(character(f2, BraidWord::from_signed({}, 3)) - 1.0) < 1e-15);
    // direct trace of the 4 x 4 flip
    CHECK(std::abs(character(f2, BraidWord::from_signed({1})) - f2.matrix.trace() / 4.0) < 1e-15);
    CHECK(std::abs(character(f2, BraidWord::from_signed({1})) - 0.5) < 1e-15);

    Rng rng(21);
    for (const auto& b : small_corpus()) {
        INFO(b.name);
        // strand stability
        const BraidWord w = BraidWord::from_signed({1, -2, 1, 2});
        CHECK(std::abs(character_at_level(b.r, w, 3) - character_at_level(b.r, w, 4)) <= 1e-12);
        // dense trace agrees with the chunked evaluation
        CHECK(std::abs(normalized_trace(represent(b.r, w)) - character(b.r, w)) <= 1e-12);
        // class function
        if (b.r.d > 2) continue;
        for (int t = 0; t < 100; ++t) {
            std::vector<int> vs, ws;
            for (int i = 0; i < 3; ++i) vs.push_back(uniform_int(rng, 1, 3) * (uniform01(rng) < 0.5 ? 1 : -1));
            for (int i = 0; i < 3; ++i) ws.push_back(uniform_int(rng, 1, 3) * (uniform01(rng) < 0.5 ? 1 : -1));
            const BraidWord v = BraidWord::from_signed(vs, 4), ww = BraidWord::from_signed(ws, 4);
            CHECK(std::abs(character(b.r, v * ww * v.inverse()) - character(b.r, ww)) <= 1e-10);
        }
    }
}

TEST_CASE("cycle identity and contracted evaluation") {
    for (const auto& b : builtin_corpus()) {
        INFO(b.name);
        const ComplexMatrix phi = partial_trace_left(b.r.matrix, b.r.d);
        ComplexMatrix power = identity(b.r.d);
        for (int n = 1; n <= 6; ++n) {
            power = power * phi;
            const cplx contracted = cycle_character_contracted(b.r, n);
            CHECK(std::abs(contracted - normalized_trace(power)) <= 1e-10);
            if (std::pow(double(b.r.d), n + 1) <= 729) CHECK(std::abs(character(b.r, cycle_word(n)) - contracted) <= 1e-12);
        }
    }
}

TEST_CASE("fundamental braids") {
    CHECK(fundamental_braid(1).length() == 0);
    CHECK(fundamental_braid(2).to_signed() == std::vector<int>{1});
    CHECK(fundamental_braid(3).to_signed() == std::vector<int>{1, 2, 1});
    const RMatrix f = make_flip(2);
    for (int n = 1; n <= 5; ++n) {
        const long dim = ipow(2, n);
        ComplexMatrix rev = ComplexMatrix::Zero(dim, dim);
        for (long src = 0; src < dim; ++src) {
            long dst = 0;
            for (int k = 0; k < n; ++k) dst = dst * 2 + ((src >> k) & 1);
            rev(dst, src) = 1.0;
        }
        CHECK((represent(f, fundamental_braid(n)).matrix - rev).norm() == 0);
    }
    const RMatrix r4 = make_r4(std::polar(1.0, 0.8));
    for (int n = 2; n <= 4; ++n) {
        const ComplexMatrix delta = represent(r4, fundamental_braid(n)).matrix;
        for (int k = 1; k < n; ++k) {
            const ComplexMatrix bk = represent(r4, BraidWord::from_signed({k}, n)).matrix;
            const ComplexMatrix bnk = represent(r4, BraidWord::from_signed({n - k}, n)).matrix;
            CHECK((delta * bk * delta.adjoint() - bnk).norm() < 1e-12);
        }
    }
}

TEST_CASE("intertwiners for R and FRF") {
    CHECK((intertwiner_Y(make_r4(1.0), 1).matrix - identity(2)).norm() == 0);
    for (const auto& b : small_corpus()) {
        INFO(b.name);
        const RMatrix frf = flip_conjugate(b.r);
        const ComplexMatrix y2 = intertwiner_Y(b.r, 2).matrix;
        CHECK((y2 - frf.matrix * flip_matrix(b.r.d)).norm() < 1e-13);
        const AlgebraElement y = intertwiner_Y(b.r, b.r.d == 2 ? 5 : 4);
        CHECK(is_unitary(y.matrix, 1e-10));
    }
    const RMatrix f = make_flip(2);
    for (int n = 1; n <= 4; ++n) CHECK(is_unitary(intertwiner_Y(f, n).matrix));
}

TEST_CASE("Thoma character") {
    NormalFormSpec spec{{{2, 1}, {1, 1}}};
    CHECK(thoma_character(spec, CycleType{{{1, 3}}}) == Catch::Approx(1.0));
    const double two_cycle = thoma_character(spec, CycleType{{{2, 1}, {1, 1}}});
    CHECK(two_cycle == Catch::Approx(5.0 / 9.0));
    // direct 9 x 9 trace of the normal form
    CHECK(std::abs(make_normal_form(spec).matrix.trace() / 9.0 - two_cycle) < 1e-14);

    for (int d = 2; d <= 4; ++d) {
        NormalFormSpec ones;
        for (int i = 0; i < d; ++i) ones.blocks.push_back({1, 1});
        for (int n = 1; n <= 4; ++n) {
            const double want = std::pow(double(d), 1 - n);
            CHECK(thoma_character(ones, CycleType{{{n, 1}}}) == Catch::Approx(want));
            CHECK(std::abs(character(make_flip(d), cycle_word(n - 1).with_strands(std::max(n, 1))) - want) < 1e-12);
        }
    }

    // every permutation of S_4 against direct traces
    for (const NormalFormSpec& s : {NormalFormSpec{{{2, 1}, {1, -1}}}, NormalFormSpec{{{1, 1}, {1, 1}, {1, -1}}},
                                    NormalFormSpec{{{1, -1}, {1, -1}}}}) {
        const RMatrix r = make_normal_form(s);
        std::vector<int> perm{0, 1, 2, 3};
        do {
            const BraidWord w = permutation_word(perm).with_strands(4);
            CHECK(std::abs(character(r, w) - thoma_character(s, cycle_type(perm))) < 1e-9);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("characters_equal") {
    Rng rng(22);
    const RMatrix r = make_r2(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng));
    CHECK(characters_equal(r, flip_conjugate(r)).equal);
    const RMatrix r4 = make_r4(std::polar(1.0, 0.4));
    CHECK(characters_equal(r4, flip_conjugate(r4)).equal);
    CHECK(characters_equal(r4, quasifree_conjugate(r4, haar_unitary(2, rng))).equal);

    const auto v = characters_equal(make_trivial(2, 1.0), make_flip(2));
    REQUIRE_FALSE(v.equal);
    REQUIRE(v.witness);
    CHECK(v.witness->to_signed() == std::vector<int>{1});
    CHECK(std::abs(v.value_r - 1.0) < 1e-15);
    CHECK(std::abs(v.value_s - 0.5) < 1e-15);

    CHECK_FALSE(characters_equal(make_flip(2), make_flip(3)).equal);
}
