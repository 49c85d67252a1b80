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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmlab/analysis.hpp"
#include "rmlab/builtins.hpp"
#include "rmlab/search.hpp"

namespace rmlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------------------------------------------
// Canonical JSON: sorted keys, doubles with 17 significant digits.

inline std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0) x = 0;  // drop the sign of negative zero
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_canonical(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? "\n" + std::string(std::size_t(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(std::size_t(indent * depth), ' ') : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: keys sorted
                if (!first) os << ',';
                first = false;
                os << pad << json(it.key()).dump() << sep;
                write_canonical(os, it.value(), indent, depth + 1);
            }
            os << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // arrays of scalars stay on one line
            bool flat = true;
            for (const auto& v : j) flat = flat && !v.is_structured();
            os << '[';
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) os << (flat && indent > 0 ? ", " : ",");
                if (!flat) os << pad;
                write_canonical(os, j[k], indent, depth + 1);
            }
            if (!flat) os << close;
            os << ']';
            return;
        }
        case json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
    }
}

}  // namespace detail

inline std::string canonical_dump(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::write_canonical(os, j, indent, 0);
    return os.str();
}

inline json complex_to_json(cplx c) { return {{"re", c.real()}, {"im", c.imag()}}; }

// 64-bit FNV-1a as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------------------------------------------
// Matrix files

struct ParsedMatrix {
    int d = 0;
    ComplexMatrix matrix;
    std::string label;
};

inline json matrix_to_json(const ComplexMatrix& m, int d, const json& meta = json::object()) {
    json entries = json::array();
    for (long i = 0; i < m.rows(); ++i)
        for (long k = 0; k < m.cols(); ++k) entries.push_back({m(i, k).real(), m(i, k).imag()});
    json out = {{"d", d}, {"entries", entries}};
    if (!meta.empty()) out["meta"] = meta;
    return out;
}

inline json matrix_to_json(const RMatrix& r) {
    return matrix_to_json(r.matrix, r.d,
                          {{"label", r.label}, {"ybeResidual", r.ybe_residual}, {"unitarityResidual", r.unitarity_residual}});
}

// Hash of d and entries only; meta is ignored.
inline std::string matrix_hash(const json& j) {
    return fnv1a_hex(canonical_dump(json{{"d", j.at("d")}, {"entries", j.at("entries")}}, 0));
}

inline ParsedMatrix matrix_from_json(const json& j) {
    ParsedMatrix out;
    try {
        if (!j.is_object()) throw ParseError("matrix JSON: expected an object");
        if (!j.contains("d") || !j.at("d").is_number_integer()) throw ParseError("matrix JSON: missing integer \"d\"");
        out.d = j.at("d").get<int>();
        if (out.d < 1 || out.d > 64) throw ParseError("matrix JSON: d out of range");
        const json& e = j.at("entries");
        const long n = long(out.d) * out.d;
        if (!e.is_array() || long(e.size()) != n * n) throw ParseError("matrix JSON: expected d^4 entries");
        out.matrix.resize(n, n);
        for (long k = 0; k < n * n; ++k) {
            const json& c = e[std::size_t(k)];
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
                throw ParseError("matrix JSON: entries must be [re, im] pairs");
            out.matrix(k / n, k % n) = cplx(c[0].get<double>(), c[1].get<double>());
        }
        if (j.contains("meta") && j["meta"].contains("label") && j["meta"]["label"].is_string())
            out.label = j["meta"]["label"].get<std::string>();
    } catch (const json::exception& ex) {
        throw ParseError(std::string("matrix JSON: ") + ex.what());
    }
    return out;
}

inline ParsedMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    ParsedMatrix m = matrix_from_json(j);
    if (m.label.empty()) m.label = path;
    return m;
}

// ---------------------------------------------------------------------------------------------------------------
// Parameter syntax

inline double parse_double(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(std::string(what) + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw ParseError(std::string(what) + ": trailing characters in '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, const char* what) {
    const double v = parse_double(s, what);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParseError(std::string(what) + ": not an integer: '" + s + "'");
    return int(v);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "re,im", "arg:theta", "i", "-i" or a real number.
inline cplx parse_complex(const std::string& s) {
    if (s == "i" || s == "+i") return {0, 1};
    if (s == "-i") return {0, -1};
    if (s.rfind("arg:", 0) == 0) return std::polar(1.0, parse_double(s.substr(4), "complex"));
    const auto parts = split(s, ',');
    if (parts.size() == 1) return parse_double(parts[0], "complex");
    if (parts.size() == 2) return {parse_double(parts[0], "complex"), parse_double(parts[1], "complex")};
    throw ParseError("complex: expected 're,im', 'arg:theta', 'i' or a real: '" + s + "'");
}

// "1,2,-1" -> b1 b2 b1^{-1}
inline BraidWord parse_word(const std::string& s) {
    if (s.empty() || s == "e") return BraidWord(1, {});
    std::vector<int> gens;
    for (const auto& p : split(s, ',')) {
        const int g = parse_int(p, "word");
        if (g == 0) throw ParseError("word: generator 0");
        gens.push_back(g);
    }
    return BraidWord::from_signed(gens);
}

// "2:+,1:-"
inline NormalFormSpec parse_blocks(const std::string& s) {
    NormalFormSpec spec;
    for (const auto& p : split(s, ',')) {
        const auto kv = split(p, ':');
        if (kv.size() != 2 || (kv[1] != "+" && kv[1] != "-"))
            throw ParseError("blocks: expected 'dim:sign' items, got '" + p + "'");
        const int dim = parse_int(kv[0], "blocks");
        if (dim < 1) throw ParseError("blocks: dimension must be positive");
        spec.blocks.push_back({dim, kv[1] == "+" ? 1 : -1});
    }
    return spec;
}

// ---------------------------------------------------------------------------------------------------------------
// Builtins by name

struct BuiltinSpec {
    std::string name;
    std::map<std::string, std::string> params;  // d, q, p, r, s, blocks, dims
};

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"trivial", "flip", "r1", "r2", "r3", "r4", "normal",
                                                   "diagonal", "simple", "uf", "box"};
    return names;
}

inline RMatrix make_builtin(const BuiltinSpec& b, std::uint64_t seed = 1) {
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = b.params.find(k);
        return it == b.params.end() || it->second.empty() ? dflt : it->second;
    };
    auto unit = [&](const std::string& k) {
        const cplx c = parse_complex(get(k, "1"));
        if (std::abs(std::abs(c) - 1.0) > 1e-12) throw ParseError("parameter " + k + " must have modulus 1");
        return c;
    };
    auto dim = [&](int dflt) {
        const int d = parse_int(get("d", std::to_string(dflt)), "d");
        if (d < 1 || d > 16) throw ParseError("d must be in 1..16");
        return d;
    };
    Rng rng(seed);
    RMatrix r;
    const std::string& n = b.name;
    if (n == "trivial") r = make_trivial(dim(2), unit("q"));
    else if (n == "flip") r = make_flip(dim(2));
    else if (n == "r1") r = make_r1(unit("q"));
    else if (n == "r2") r = make_r2(unit("p"), unit("q"), unit("r"), unit("s"));
    else if (n == "r3") r = make_r3(unit("p"), unit("q"), unit("r"));
    else if (n == "r4") r = make_r4(unit("q"));
    else if (n == "normal" || n == "box") r = make_normal_form(parse_blocks(get("blocks", n == "box" ? "2:+,1:+" : "1:+,1:+")));
    else if (n == "diagonal") {
        const int d = dim(2);
        r = make_diagonal(random_phase_matrix(d, rng), haar_unitary(d, rng));
    } else if (n == "simple") {
        std::vector<int> dims;
        for (const auto& p : split(get("dims", "2,1"), ',')) {
            dims.push_back(parse_int(p, "dims"));
            if (dims.back() < 1) throw ParseError("dims must be positive");
        }
        r = make_block_simple(dims, random_phase_matrix(long(dims.size()), rng));
    } else if (n == "uf") {
        r = make_uf(haar_unitary(dim(2), rng));
    } else {
        throw ParseError("unknown builtin '" + n + "'");
    }
    r.label = n;
    for (const auto& [k, v] : b.params)
        if (!v.empty()) r.label += " " + k + "=" + v;
    return r;
}

// ---------------------------------------------------------------------------------------------------------------
// Reports

inline json spectrum_to_json(const std::vector<EigenComponent>& s) {
    json out = json::array();
    for (const auto& c : s) out.push_back({{"value", complex_to_json(c.value)}, {"multiplicity", c.multiplicity}});
    return out;
}

inline json classification_to_json(const Dim2Classification& c) {
    json params = json::array();
    for (cplx p : c.parameters) params.push_back(complex_to_json(p));
    json out = {{"family", c.family}, {"classified", c.classified()}, {"parameters", params}, {"residual", c.residual}};
    if (!c.note.empty()) out["note"] = c.note;
    if (!c.alsoFits.empty()) out["alsoFits"] = c.alsoFits;
    if (c.conjugator) {
        json u = json::array();
        for (long i = 0; i < c.conjugator->rows(); ++i)
            for (long k = 0; k < c.conjugator->cols(); ++k)
                u.push_back({(*c.conjugator)(i, k).real(), (*c.conjugator)(i, k).imag()});
        out["conjugator"] = u;
    }
    if (auto idx = known_index_of_family(c.family)) out["knownIndex"] = *idx;
    return out;
}

inline json report_to_json(const AnalysisReport& r) {
    json out;
    out["label"] = r.label;
    out["d"] = r.d;
    out["residuals"] = {{"ybe", r.ybeResidual}, {"unitarity", r.unitarityResidual}};
    out["spectrum"] = spectrum_to_json(r.spectrum);
    out["involutive"] = r.involutive;
    out["automorphism"] = r.trivial;
    if (r.partialTrace)
        out["partialTrace"] = {{"spectrum", spectrum_to_json(r.partialTrace->spectrum)},
                               {"leftRightDiscrepancy", r.partialTrace->leftRightDiscrepancy},
                               {"normalityResidual", r.partialTrace->normalityResidual},
                               {"operatorNorm", r.partialTrace->operatorNorm}};
    json comm = json::array();
    for (const auto& c : r.commutants) {
        json e = {{"kind", c.kind}, {"level", c.level}, {"dimension", c.dimension}, {"profile", c.profile},
                  {"converged", c.converged}};
        if (!c.note.empty()) e["note"] = c.note;
        comm.push_back(e);
    }
    out["commutants"] = comm;
    json fixed = json::array();
    for (const auto& [n, dim] : r.fixedPointDims) fixed.push_back({{"level", n}, {"dimension", dim}});
    out["fixedPoints"] = fixed;
    if (r.ergodicity) {
        const auto& w = r.ergodicity->witness;
        out["ergodicity"] = {{"ergodic", r.ergodic},
                             {"maxDeviation", r.ergodicity->maxDeviation},
                             {"witness", {w[0], w[1], w[2], w[3]}},
                             {"traceTest", r.ergodicityNecessary}};
    }
    out["ergodic"] = r.ergodic;
    if (r.irreducible) out["irreducible"] = *r.irreducible;
    if (r.indexBounds) {
        const auto& b = *r.indexBounds;
        json ib = {{"lower", b.lowerMinimal},        {"upper", b.upperJones},
                   {"sources", b.sources},           {"spectrumSize", b.spectrumSize},
                   {"partialTraceSpectrumSize", b.partialTraceSpectrumSize}};
        if (b.knownIndex) {
            ib["knownIndex"] = *b.knownIndex;
            ib["knownIndexSource"] = b.knownIndexSource;
        }
        out["indexBounds"] = ib;
    }
    if (r.concentration)
        out["concentration"] = {{"minDistance", r.concentration->minDistance},
                                {"mu", complex_to_json(r.concentration->mu)},
                                {"threshold", r.concentration->threshold},
                                {"concludesTrivial", r.concentration->concludesTrivial}};
    if (r.normalForm) out["normalForm"] = r.normalForm->to_string();
    if (r.dim2) out["classification"] = classification_to_json(*r.dim2);
    out["sectionErrors"] = r.sectionErrors;
    out["consistencyNotes"] = r.consistencyNotes;
    return out;
}

namespace detail {

inline std::string fmt(double x, int prec = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    return buf;
}

inline std::string fmt(cplx c) {
    if (std::abs(c.imag()) < 1e-12) return fmt(c.real());
    return fmt(c.real()) + (c.imag() < 0 ? " - " : " + ") + fmt(std::abs(c.imag())) + "i";
}

}  // namespace detail

inline std::string fixed_point_list(const AnalysisReport& r) {
    std::string s;
    for (const auto& [n, dim] : r.fixedPointDims) s += (s.empty() ? "" : ", ") + std::to_string(dim);
    return s;
}

inline std::string report_to_markdown(const AnalysisReport& r) {
    std::ostringstream os;
    os << "# " << (r.label.empty() ? "R-matrix" : r.label) << "\n\n";
    os << "| quantity | value |\n|---|---|\n";
    os << "| d | " << r.d << " |\n";
    os << "| YBE residual | " << detail::fmt(r.ybeResidual, 3) << " |\n";
    os << "| unitarity residual | " << detail::fmt(r.unitarityResidual, 3) << " |\n";
    os << "| automorphism | " << (r.trivial ? "yes" : "no") << " |\n";
    os << "| involutive | " << (r.involutive ? "yes" : "no") << " |\n";
    os << "| ergodic | " << (r.ergodic ? "yes" : "no") << " |\n";
    if (r.irreducible) os << "| irreducible | " << (*r.irreducible ? "yes" : "no") << " |\n";
    for (const auto& c : r.commutants)
        os << "| " << c.kind << "_{R," << c.level << "} | dim " << c.dimension << ", " << c.profile << " |\n";
    os << "| fixed-point dims (n = 1.." << r.fixedPointDims.size() << ") | " << fixed_point_list(r) << " |\n";
    if (r.partialTrace) {
        std::string s;
        for (const auto& c : r.partialTrace->spectrum)
            s += (s.empty() ? "" : ", ") + detail::fmt(c.value) + (c.multiplicity > 1 ? " (x" + std::to_string(c.multiplicity) + ")" : "");
        os << "| spectrum of partial trace | " << s << " |\n";
    }
    if (r.indexBounds) {
        os << "| index interval | [" << detail::fmt(r.indexBounds->lowerMinimal) << ", "
           << detail::fmt(r.indexBounds->upperJones) << "] |\n";
        if (r.indexBounds->knownIndex)
            os << "| known index | " << detail::fmt(*r.indexBounds->knownIndex) << " (" << r.indexBounds->knownIndexSource
               << ") |\n";
    }
    if (r.concentration)
        os << "| spectral concentration distance | " << detail::fmt(r.concentration->minDistance) << " (threshold "
           << detail::fmt(r.concentration->threshold) << ") |\n";
    if (r.normalForm) os << "| normal form | " << r.normalForm->to_string() << " |\n";
    if (r.dim2)
        os << "| d = 2 family | " << (r.dim2->classified() ? std::to_string(r.dim2->family) : "unclassified")
           << " (residual " << detail::fmt(r.dim2->residual, 3) << ") |\n";
    for (const auto& [k, v] : r.sectionErrors) os << "\n- " << k << ": " << v;
    for (const auto& n : r.consistencyNotes) os << "\n- note: " << n;
    if (!r.sectionErrors.empty() || !r.consistencyNotes.empty()) os << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------------------------------------------
// Search output

inline json fingerprint_to_json(const Fingerprint& f) {
    auto list = [](const std::vector<cplx>& v) {
        json a = json::array();
        for (cplx c : v) a.push_back(complex_to_json(c));
        return a;
    };
    return {{"spectrumR", list(f.spectrumR)}, {"spectrumPhi", list(f.spectrumPhi)}, {"cycles", list(f.cycles)},
            {"words", list(f.words)}};
}

inline std::string search_config_hash(const SearchConfig& c, int restarts) {
    const json j = {{"d", c.d},
                    {"seed", c.seed},
                    {"restarts", restarts},
                    {"maxIterations", c.maxIterations},
                    {"initialStep", c.initialStep},
                    {"stepShrink", c.stepShrink},
                    {"armijo", c.armijo},
                    {"targetResidual", c.targetResidual},
                    {"polishTol", c.polishTol},
                    {"polishSwitch", c.polishSwitch},
                    {"polishIterations", c.polishIterations}};
    return fnv1a_hex(canonical_dump(j, 0));
}

// One JSON-lines record for a verified solution.
inline json solution_record(const SearchResult& s, int restart, const std::string& configHash) {
    if (!s.solution) throw DomainError("solution_record: result is not a verified solution");
    const RMatrix& r = *s.solution;
    json rec = {{"restart", restart},
                {"seed", s.seed},
                {"matrix", matrix_to_json(r)},
                {"residuals", {{"ybe", r.ybe_residual}, {"unitarity", r.unitarity_residual}}},
                {"iterations", s.iterations},
                {"polishSteps", s.polishSteps},
                {"fingerprint", fingerprint_to_json(fingerprint(r))},
                {"configHash", configHash}};
    if (r.d == 2) rec["classification"] = classification_to_json(classify_dim2(r));
    return rec;
}

}  // namespace rmlab
