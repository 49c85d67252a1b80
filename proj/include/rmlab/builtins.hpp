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

#include <cstdint>
#include <string>
#include <vector>

#include "rmlab/random.hpp"
#include "rmlab/rmatrix.hpp"

namespace rmlab {

struct NamedRMatrix {
    std::string name;
    RMatrix r;
};

// Simple R-matrix on consecutive coordinate blocks of the given sizes.
inline RMatrix make_block_simple(const std::vector<int>& dims, const ComplexMatrix& phases) {
    int d = 0;
    for (int k : dims) d += k;
    SimpleRSpec spec;
    int pos = 0;
    for (int k : dims) {
        ComplexMatrix p = ComplexMatrix::Zero(d, d);
        for (int i = 0; i < k; ++i) p(pos + i, pos + i) = 1.0;
        spec.projections.push_back(p);
        pos += k;
    }
    spec.phases = phases;
    return make_simple(spec);
}

inline ComplexMatrix random_phase_matrix(long n, Rng& rng) {
    ComplexMatrix c(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) c(i, j) = random_phase(rng);
    return c;
}

// (u (x) 1) F, diagonal with respect to the eigenbasis of u.
inline RMatrix make_uf(const ComplexMatrix& u) {
    const int d = int(u.rows());
    RMatrix r = verify(kron(u, identity(d)) * flip_matrix(d), d, kVerifyTol, "uF");
    return r;
}

inline NormalFormSpec parse_blocks_spec(const std::vector<std::pair<int, int>>& blocks) {
    NormalFormSpec s;
    for (auto [dim, sign] : blocks) s.blocks.push_back({dim, sign});
    return s;
}

// Fixed corpus used by the test suites; deterministic for a given seed.
inline std::vector<NamedRMatrix> builtin_corpus(std::uint64_t seed = 20240601) {
    Rng rng(seed);
    std::vector<NamedRMatrix> out;
    auto add = [&](std::string name, RMatrix r) {
        r.label = name;
        out.push_back({std::move(name), std::move(r)});
    };
    add("trivial-d2", make_trivial(2, cplx(0, 1)));
    add("trivial-d3", make_trivial(3, std::polar(1.0, 0.7)));
    add("flip-d2", make_flip(2));
    add("flip-d3", make_flip(3));
    add("flip-d4", make_flip(4));
    add("neg-flip-d2", scalar_multiple(make_flip(2), -1.0));
    add("normal-2+1+", make_normal_form(parse_blocks_spec({{2, 1}, {1, 1}})));
    add("normal-1+1-", make_normal_form(parse_blocks_spec({{1, 1}, {1, -1}})));
    add("normal-2+1-", make_normal_form(parse_blocks_spec({{2, 1}, {1, -1}})));
    add("normal-1+1+1-", make_normal_form(parse_blocks_spec({{1, 1}, {1, 1}, {1, -1}})));
    add("r2", make_r2(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng)));
    {
        const cplx p = random_phase(rng), q = random_phase(rng);
        add("r2-symmetric", make_r2(p, q, p, q));
    }
    add("r3", make_r3(random_phase(rng), random_phase(rng), random_phase(rng)));
    {
        const cplx p = random_phase(rng), q = random_phase(rng);
        add("r3-balanced", make_r3(p, q, q * q / p));
    }
    add("r4", make_r4(std::polar(1.0, 0.3)));
    add("r2-conj", quasifree_conjugate(make_r2(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng)),
                                       haar_unitary(2, rng)));
    add("r3-conj", quasifree_conjugate(make_r3(random_phase(rng), random_phase(rng), random_phase(rng)), haar_unitary(2, rng)));
    add("r4-conj", quasifree_conjugate(make_r4(random_phase(rng)), haar_unitary(2, rng)));
    add("diagonal-d2", make_diagonal(random_phase_matrix(2, rng), haar_unitary(2, rng)));
    add("diagonal-d3", make_diagonal(random_phase_matrix(3, rng), haar_unitary(3, rng)));
    add("simple-21", make_block_simple({2, 1}, random_phase_matrix(2, rng)));
    add("uF-d2", make_uf(haar_unitary(2, rng)));
    add("uF-d3", make_uf(haar_unitary(3, rng)));
    add("r2[+]1", box_sum(make_r2(random_phase(rng), random_phase(rng), random_phase(rng), random_phase(rng)),
                          make_trivial(1, 1.0)));
    add("r4-star", adjoint(make_r4(std::polar(1.0, -1.2))));
    add("flip[x]r4", tensor_product(make_flip(2), make_r4(1.0)));
    add("r4^(2)", cabling_power(make_r4(std::polar(1.0, 0.5)), 2));
    return out;
}

}  // namespace rmlab
