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
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rmlab/analysis.hpp"
#include "rmlab/random.hpp"

namespace rmlab {

// One sampled d = 2 R-matrix u(R_i)u^* with the expected and the computed table columns.
struct FamilyTableRow {
    int family = 0;
    std::vector<cplx> parameters;
    bool special = false;  // p = r, q = s for family 2; q^2 = pr for family 3
    ComplexMatrix conjugator;
    ComplexMatrix matrix;

    std::string expectedProfile;
    bool expectedErgodic = false;
    bool expectedAutomorphism = false;
    double expectedIndex = 0;
    std::vector<long> expectedFixedDims;

    std::string profile;
    bool ergodic = false;
    bool automorphism = false;
    double indexLower = 0, indexUpper = 0;
    std::vector<long> fixedDims;
    int classifiedFamily = 0;
    std::vector<int> alsoFits;
    double classifyResidual = 0;
    std::string error;

    bool columnsMatch() const {
        return error.empty() && profile == expectedProfile && ergodic == expectedErgodic &&
               automorphism == expectedAutomorphism && fixedDims == expectedFixedDims &&
               indexLower <= expectedIndex + 1e-9 && expectedIndex <= indexUpper + 1e-9;
    }
    bool classifiedCorrectly() const {
        return classifiedFamily == family || std::find(alsoFits.begin(), alsoFits.end(), family) != alsoFits.end();
    }
};

struct FamilyTableOptions {
    int samples = 20;  // per family
    std::uint64_t seed = 7;
    int fixedLevels = 4;
    int jobs = 1;
};

namespace detail {

inline FamilyTableRow draw_row(int family, bool special, Rng& rng, int fixedLevels) {
    FamilyTableRow row;
    row.family = family;
    row.special = special;
    const cplx p = random_phase(rng), q = random_phase(rng), r = random_phase(rng), s = random_phase(rng);
    switch (family) {
        case 1:
            row.parameters = {q};
            row.expectedProfile = "C";
            row.expectedAutomorphism = true;
            break;
        case 2:
            row.parameters = special ? std::vector<cplx>{p, q, p, q} : std::vector<cplx>{p, q, r, s};
            row.expectedProfile = special ? "M_2" : "C^2";
            row.expectedErgodic = true;
            break;
        case 3:
            row.parameters = special ? std::vector<cplx>{p, q, q * q / p} : std::vector<cplx>{p, q, r};
            row.expectedProfile = special ? "C^2" : "C";
            row.expectedErgodic = true;
            break;
        default:
            row.parameters = {q};
            row.expectedProfile = "C";
            break;
    }
    row.expectedIndex = *known_index_of_family(family);
    for (int n = 1; n <= fixedLevels; ++n) {
        if (family == 1) row.expectedFixedDims.push_back(ipow(4, n));
        else if (family == 4) row.expectedFixedDims.push_back(ipow(2, n));
        else row.expectedFixedDims.push_back(1);
    }
    row.conjugator = haar_unitary(2, rng);
    const ComplexMatrix uu = kron(row.conjugator, row.conjugator);
    row.matrix = uu * family_matrix(family, row.parameters) * uu.adjoint();
    return row;
}

inline void evaluate_row(FamilyTableRow& row, std::uint64_t seed) {
    try {
        const RMatrix r = verify(row.matrix, 2, kVerifyTol, "family " + std::to_string(row.family));
        row.profile = relative_commutant_M(r, 1).profile();
        row.ergodic = is_ergodic(r).ergodic;
        row.automorphism = is_trivial(r);
        const IndexBounds b = index_bounds(r);
        row.indexLower = b.lowerMinimal;
        row.indexUpper = b.upperJones;
        for (std::size_t n = 1; n <= row.expectedFixedDims.size(); ++n)
            row.fixedDims.push_back(fixed_subalgebra(r, int(n)).dimension());
        const Dim2Classification c = classify_dim2(r, kClassifyTol, seed);
        row.classifiedFamily = c.family;
        row.alsoFits = c.alsoFits;
        row.classifyResidual = c.residual;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
}

}  // namespace detail

// Samples per family are drawn sequentially from one generator, so the rows do not depend on jobs.
inline std::vector<FamilyTableRow> family_table(const FamilyTableOptions& opt) {
    if (opt.samples < 0 || opt.fixedLevels < 0) throw DomainError("family_table: negative sample or level count");
    Rng rng(opt.seed);
    std::vector<FamilyTableRow> rows;
    for (int family = 1; family <= 4; ++family)
        for (int k = 0; k < opt.samples; ++k)
            rows.push_back(detail::draw_row(family, (family == 2 || family == 3) && k % 2 == 1, rng, opt.fixedLevels));
    const int jobs = std::max(1, std::min<int>(opt.jobs, int(rows.size())));
    auto work = [&](int j) {
        for (std::size_t k = std::size_t(j); k < rows.size(); k += std::size_t(jobs))
            detail::evaluate_row(rows[k], opt.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(work, j);
        for (auto& t : pool) t.join();
    }
    return rows;
}

namespace detail {

inline std::string join_dims(const std::vector<long>& v) {
    std::string s;
    for (long x : v) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return s;
}

inline std::string row_representative(const FamilyTableRow& r) {
    static const char* names[] = {"", "q 1", "R_2(p, q, r, s)", "R_3(p, q, r)", "R_4(q)"};
    std::string s = names[r.family];
    if (r.family == 2) s += r.special ? ", p = r, q = s" : ", generic";
    if (r.family == 3) s += r.special ? ", q^2 = pr" : ", generic";
    return s;
}

}  // namespace detail

inline std::string family_table_markdown(const std::vector<FamilyTableRow>& rows) {
    std::ostringstream os;
    os << "| # | representative | M_{R,1} profile | ergodic | index info | fixed-point info | classified | match |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        char idx[96];
        std::snprintf(idx, sizeof idx, "%g in [%.6g, %.6g]", r.expectedIndex, r.indexLower, r.indexUpper);
        os << "| " << r.family << " | " << detail::row_representative(r) << " | " << r.profile
           << (r.automorphism ? " (automorphism)" : "") << " | " << (r.ergodic ? "yes" : "no") << " | " << idx
           << " | dims " << detail::join_dims(r.fixedDims) << " | "
           << (r.classifiedFamily ? std::to_string(r.classifiedFamily) : std::string("unclassified"))
           << (r.alsoFits.empty() ? "" : " (also " + detail::join_dims({r.alsoFits.begin(), r.alsoFits.end()}) + ")") << " | "
           << (r.columnsMatch() ? "yes" : "NO") << " |\n";
    }
    return os.str();
}

}  // namespace rmlab
