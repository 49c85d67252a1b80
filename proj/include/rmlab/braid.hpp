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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmlab/rmatrix.hpp"

namespace rmlab {

struct BraidLetter {
    int gen = 1;
    int exp = 1;
    bool operator==(const BraidLetter&) const = default;
};

struct BraidWord {
    int strands = 1;
    std::vector<BraidLetter> letters;

    BraidWord() = default;
    BraidWord(int n, std::vector<BraidLetter> ls) : strands(n), letters(std::move(ls)) {
        if (strands < 1) throw DomainError("braid word: strands < 1");
        for (const auto& l : letters)
            if (l.gen < 1 || l.gen >= strands || (l.exp != 1 && l.exp != -1))
                throw DomainError("braid word: generator out of range");
        reduce();
    }

    // [1, 2, -1] = b1 b2 b1^{-1}; strands default to max|k| + 1.
    static BraidWord from_signed(const std::vector<int>& s, int strands = 0) {
        int need = 1;
        std::vector<BraidLetter> ls;
        for (int v : s) {
            if (v == 0) throw DomainError("braid word: zero generator");
            need = std::max(need, std::abs(v) + 1);
            ls.push_back({std::abs(v), v > 0 ? 1 : -1});
        }
        return BraidWord(strands > 0 ? strands : need, std::move(ls));
    }

    std::vector<int> to_signed() const {
        std::vector<int> out;
        for (const auto& l : letters) out.push_back(l.gen * l.exp);
        return out;
    }

    int length() const { return int(letters.size()); }

    BraidWord inverse() const {
        std::vector<BraidLetter> ls(letters.rbegin(), letters.rend());
        for (auto& l : ls) l.exp = -l.exp;
        return BraidWord(strands, std::move(ls));
    }

    BraidWord operator*(const BraidWord& o) const {
        std::vector<BraidLetter> ls = letters;
        ls.insert(ls.end(), o.letters.begin(), o.letters.end());
        return BraidWord(std::max(strands, o.strands), std::move(ls));
    }

    BraidWord with_strands(int n) const {
        if (n < strands) throw DomainError("braid word: cannot drop strands");
        return BraidWord(n, letters);
    }

  private:
    void reduce() {
        std::vector<BraidLetter> out;
        for (const auto& l : letters) {
            if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp) out.pop_back();
            else out.push_back(l);
        }
        letters = std::move(out);
    }
};

inline std::string to_string(const BraidWord& w) {
    std::string s = "[";
    const auto v = w.to_signed();
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
}

// rho_R(w) at level n >= w.strands
inline AlgebraElement represent_at_level(const RMatrix& r, const BraidWord& w, int n) {
    if (n < w.strands) throw LevelError("represent: level below strand count");
    const int d = r.d;
    ComplexMatrix x = identity(ipow(d, n));
    const ComplexMatrix radj = r.matrix.adjoint();
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        apply_local_left(it->exp > 0 ? r.matrix : radj, d, it->gen - 1, n, x);
    return {d, n, x};
}

inline AlgebraElement represent(const RMatrix& r, const BraidWord& w) { return represent_at_level(r, w, w.strands); }

// tau(rho_R(w)) at level n, evaluated on column blocks to bound memory.
inline cplx character_at_level(const RMatrix& r, const BraidWord& w, int n) {
    if (n < w.strands) throw LevelError("character: level below strand count");
    const int d = r.d;
    const long dim = ipow(d, n);
    if (w.letters.empty()) return 1.0;
    const ComplexMatrix radj = r.matrix.adjoint();
    const long chunk = std::max<long>(1, std::min<long>(dim, (1L << 21) / dim));
    cplx acc = 0;
    for (long c0 = 0; c0 < dim; c0 += chunk) {
        const long m = std::min(chunk, dim - c0);
        ComplexMatrix x = ComplexMatrix::Zero(dim, m);
        for (long j = 0; j < m; ++j) x(c0 + j, j) = 1.0;
        for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
            apply_local_left(it->exp > 0 ? r.matrix : radj, d, it->gen - 1, n, x);
        for (long j = 0; j < m; ++j) acc += x(c0 + j, j);
    }
    return acc / double(dim);
}

inline cplx character(const RMatrix& r, const BraidWord& w) {
    return character_at_level(r, w, std::max(w.strands, 1));
}

// b_1 b_2 ... b_n in B_{n+1}
inline BraidWord cycle_word(int n) {
    std::vector<BraidLetter> ls;
    for (int k = 1; k <= n; ++k) ls.push_back({k, 1});
    return BraidWord(n + 1, ls);
}

// tau(R phi(R) ... phi^{n-1}(R)) by contracting the staircase of gates one slot at a time;
// memory stays at d x d, so large levels remain cheap.
inline cplx cycle_character_contracted(const RMatrix& r, int n) {
    const int d = r.d;
    if (n < 1) return 1.0;
    auto R = [&](int o1, int o2, int i1, int i2) { return r.matrix(o1 * d + o2, i1 * d + i2); };
    ComplexMatrix v = ComplexMatrix::Zero(d, d);
    for (int x2 = 0; x2 < d; ++x2)
        for (int y2 = 0; y2 < d; ++y2)
            for (int x1 = 0; x1 < d; ++x1) v(x2, y2) += R(x1, x2, x1, y2);
    for (int k = 2; k <= n; ++k) {
        ComplexMatrix next = ComplexMatrix::Zero(d, d);
        for (int xk = 0; xk < d; ++xk)
            for (int yk = 0; yk < d; ++yk) {
                const cplx c = v(xk, yk);
                if (c == cplx(0)) continue;
                for (int x1 = 0; x1 < d; ++x1)
                    for (int y1 = 0; y1 < d; ++y1) next(x1, y1) += c * R(yk, x1, xk, y1);
            }
        v = next;
    }
    return v.trace() / std::pow(double(d), n + 1);
}

// Delta_1 = e, Delta_2 = b1, Delta_{n+1} = b1...bn Delta_n
inline BraidWord fundamental_braid(int n) {
    if (n < 1) throw DomainError("fundamental_braid: n < 1");
    std::vector<BraidLetter> ls;
    for (int m = 1; m < n; ++m) {
        std::vector<BraidLetter> head;
        for (int k = 1; k <= m; ++k) head.push_back({k, 1});
        head.insert(head.end(), ls.begin(), ls.end());
        ls = std::move(head);
    }
    return BraidWord(n, ls);
}

// Y_n = rho_FRF(Delta_n) rho_F(Delta_n)
inline AlgebraElement intertwiner_Y(const RMatrix& r, int n, double tol = 1e-10) {
    if (n < 1) throw DomainError("intertwiner_Y: n < 1");
    const RMatrix frf = flip_conjugate(r);
    const RMatrix f = make_flip(r.d);
    const BraidWord delta = fundamental_braid(n);
    const ComplexMatrix y = represent(frf, delta).matrix * represent(f, delta).matrix;
    for (int k = 1; k < n; ++k) {
        const BraidWord b = BraidWord::from_signed({k}, n);
        const double res = (y * represent(r, b).matrix * y.adjoint() - represent(frf, b).matrix).norm();
        if (res > tol) throw InternalConsistencyError("intertwiner_Y: intertwining residual exceeded");
    }
    return {r.d, n, y};
}

struct CycleType {
    std::map<int, int> counts;  // cycle length -> multiplicity
};

inline CycleType cycle_type(const std::vector<int>& perm) {
    CycleType ct;
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (std::size_t j = i; !seen[j]; j = std::size_t(perm[j])) {
            seen[j] = true;
            ++len;
        }
        ct.counts[len] += 1;
    }
    return ct;
}

// Adjacent-transposition word for a permutation of {0..n-1} (bubble sort swaps).
inline BraidWord permutation_word(const std::vector<int>& perm) {
    std::vector<int> a = perm;
    std::vector<BraidLetter> ls;
    const int n = int(a.size());
    for (int pass = 0; pass < n; ++pass)
        for (int k = 0; k + 1 < n; ++k)
            if (a[std::size_t(k)] > a[std::size_t(k + 1)]) {
                std::swap(a[std::size_t(k)], a[std::size_t(k + 1)]);
                ls.push_back({k + 1, 1});
            }
    return BraidWord(std::max(n, 1), ls);
}

inline double thoma_character(const NormalFormSpec& spec, const CycleType& ct) {
    spec.validate();
    const double d = spec.d();
    double out = 1.0;
    for (const auto& [len, mult] : ct.counts) {
        double s = 0;
        for (const auto& b : spec.blocks) {
            const double a = std::pow(b.dim / d, len);
            s += (b.sign > 0) ? a : ((len % 2 == 1) ? a : -a);
        }
        out *= std::pow(s, mult);
    }
    return out;
}

struct CharacterVerdict {
    bool equal = true;
    std::optional<BraidWord> witness;
    cplx value_r = 0, value_s = 0;
    long words_checked = 0;
    int max_strands = 0, max_len = 0;
};

namespace detail {

// Letter order used for witnesses: b1, b1^-1, b2, b2^-1, ...
inline std::vector<BraidLetter> ordered_letters(int strands) {
    std::vector<BraidLetter> out;
    for (int k = 1; k < strands; ++k) {
        out.push_back({k, 1});
        out.push_back({k, -1});
    }
    return out;
}

inline bool letter_less(const BraidLetter& a, const BraidLetter& b) {
    if (a.gen != b.gen) return a.gen < b.gen;
    return a.exp > b.exp;
}

}  // namespace detail

// Compares tau_R and tau_S on all freely reduced words of length <= maxLen in B_maxStrands.
inline CharacterVerdict characters_equal(const RMatrix& r, const RMatrix& s, int maxStrands = 4, int maxLen = 6,
                                         double tol = 1e-9) {
    CharacterVerdict v;
    v.max_strands = maxStrands;
    v.max_len = maxLen;
    const int n = std::max(maxStrands, 2);
    const auto letters = detail::ordered_letters(n);
    const ComplexMatrix radj = r.matrix.adjoint(), sadj = s.matrix.adjoint();
    const ComplexMatrix ir = identity(ipow(r.d, n)), is = identity(ipow(s.d, n));

    for (int len = 1; len <= maxLen; ++len) {
        std::vector<std::vector<BraidLetter>> hits;
        std::vector<cplx> hr, hs;
        // Words are grown leftwards so each step is a single left multiplication.
        std::vector<BraidLetter> suffix(static_cast<std::size_t>(len));
        std::vector<ComplexMatrix> xr(static_cast<std::size_t>(len + 1)), xs(static_cast<std::size_t>(len + 1));
        xr[std::size_t(len)] = ir;
        xs[std::size_t(len)] = is;
        auto rec = [&](auto&& self, int pos) -> void {
            if (pos < 0) {
                ++v.words_checked;
                const cplx a = xr[0].trace() / double(ir.rows());
                const cplx b = xs[0].trace() / double(is.rows());
                if (std::abs(a - b) > tol) {
                    hits.push_back(suffix);
                    hr.push_back(a);
                    hs.push_back(b);
                }
                return;
            }
            for (const auto& l : letters) {
                if (pos + 1 < len) {
                    const auto& nxt = suffix[std::size_t(pos + 1)];
                    if (nxt.gen == l.gen && nxt.exp == -l.exp) continue;
                }
                suffix[std::size_t(pos)] = l;
                xr[std::size_t(pos)] = xr[std::size_t(pos + 1)];
                apply_local_left(l.exp > 0 ? r.matrix : radj, r.d, l.gen - 1, n, xr[std::size_t(pos)]);
                xs[std::size_t(pos)] = xs[std::size_t(pos + 1)];
                apply_local_left(l.exp > 0 ? s.matrix : sadj, s.d, l.gen - 1, n, xs[std::size_t(pos)]);
                self(self, pos - 1);
            }
        };
        rec(rec, len - 1);
        if (!hits.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < hits.size(); ++i)
                if (std::lexicographical_compare(hits[i].begin(), hits[i].end(), hits[best].begin(), hits[best].end(),
                                                 detail::letter_less))
                    best = i;
            v.equal = false;
            v.witness = BraidWord(n, hits[best]);
            v.value_r = hr[best];
            v.value_s = hs[best];
            return v;
        }
    }
    return v;
}

}  // namespace rmlab
