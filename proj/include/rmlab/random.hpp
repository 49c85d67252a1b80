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
#include <numbers>
#include <random>

#include "rmlab/tensor.hpp"

namespace rmlab {

using Rng = std::mt19937_64;

inline ComplexMatrix random_gaussian(long rows, long cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

inline ComplexMatrix random_hermitian(long n, Rng& rng) {
    ComplexMatrix g = random_gaussian(n, n, rng);
    return (g + g.adjoint()) / 2.0;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's diagonal divided out.
inline ComplexMatrix haar_unitary(long n, Rng& rng) {
    Eigen::MatrixXcd g = random_gaussian(n, n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long j = 0; j < n; ++j) {
        const cplx dj = r(j, j);
        const double a = std::abs(dj);
        q.col(j) *= (a > 0 ? dj / a : cplx(1.0));
    }
    return q;
}

inline cplx random_phase(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    return std::polar(1.0, u(rng));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace rmlab
