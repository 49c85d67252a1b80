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

// Builds a few R-matrices, evaluates invariants and runs a short search.

#include <cstdio>

#include "rmlab/rmlab.hpp"

using namespace rmlab;

int main() {
    // A d = 2 solution moved by a random local unitary u (x) u.
    Rng rng(2026);
    const RMatrix r = quasifree_conjugate(make_r4(std::polar(1.0, 0.7)), haar_unitary(2, rng));
    std::printf("YBE residual %.2e, unitarity residual %.2e\n", r.ybe_residual, r.unitarity_residual);

    // Character on a braid word, and the dimension of the level-1 relative commutant.
    const BraidWord w = parse_word("1,2,-1");
    const cplx t = character(r, w);
    std::printf("tau(%s) = %.6f %+.6fi\n", to_string(w).c_str(), t.real(), t.imag());
    std::printf("M_{R,1} profile: %s\n", relative_commutant_M(r, 1).profile().c_str());

    // Full report for the same matrix.
    AnalysisCaps caps;
    caps.fixedPointLevels = 3;
    const AnalysisReport rep = analyze(r, caps);
    std::printf("ergodic: %s, index in [%g, %g]\n", rep.ergodic ? "yes" : "no", rep.indexBounds->lowerMinimal,
                rep.indexBounds->upperJones);

    // Recover the family of the conjugated matrix.
    const Dim2Classification c = classify_dim2(r);
    std::printf("classified as family %d (residual %.1e)\n", c.family, c.residual);

    // Look for a new d = 2 solution from a random unitary.
    SearchConfig cfg;
    cfg.seed = 3;
    const SearchResult s = search(cfg);
    std::printf("search: %s after %d iterations, residual %.1e\n", s.success ? "converged" : "failed", s.iterations,
                s.residual);
    return 0;
}
