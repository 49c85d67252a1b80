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

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "rmlab/rmlab.hpp"

using namespace rmlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitInput = 2;

struct InputOptions {
    std::string path;
    std::string builtin;
    std::map<std::string, std::string> params;
};

void add_input(CLI::App* cmd, InputOptions& in, bool positional = true) {
    if (positional) cmd->add_option("input", in.path, "Matrix JSON file");
    cmd->add_option("--builtin", in.builtin, "Builtin R-matrix name");
    for (const char* k : {"d", "q", "p", "r", "s", "blocks", "dims"})
        cmd->add_option(std::string("--") + k, in.params[k], std::string("Builtin parameter ") + k);
}

struct Loaded {
    int d = 0;
    ComplexMatrix matrix;
    std::string label;
};

Loaded load_input(const InputOptions& in, std::uint64_t seed) {
    if (!in.path.empty() && !in.builtin.empty()) throw ParseError("give either a file or --builtin, not both");
    if (!in.path.empty()) {
        ParsedMatrix p = load_matrix_file(in.path);
        return {p.d, std::move(p.matrix), std::move(p.label)};
    }
    if (in.builtin.empty()) throw ParseError("no input: give a matrix file or --builtin");
    BuiltinSpec spec{in.builtin, {}};
    for (const auto& [k, v] : in.params)
        if (!v.empty()) spec.params[k] = v;
    RMatrix r = make_builtin(spec, seed);
    return {r.d, std::move(r.matrix), std::move(r.label)};
}

RMatrix load_verified(const InputOptions& in, std::uint64_t seed, double tol) {
    Loaded m = load_input(in, seed);
    return verify(m.matrix, m.d, tol, m.label);
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw ParseError("cannot write " + out);
    f << text << "\n";
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RMLAB_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ParseError("RMLAB_SEED is not an unsigned integer");
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmlab: unitary Yang-Baxter R-matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    std::uint64_t seed = 0;
    bool seedGiven = false;
    int jobs = 1;
    app.add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s, seedGiven = true; }, "RNG seed (default: RMLAB_SEED or 1)");
    app.add_option("--jobs", jobs, "Worker threads for sweeps and restarts")->check(CLI::PositiveNumber);

    InputOptions in;
    double tol = kVerifyTol;

    auto* verifyCmd = app.add_subcommand("verify", "Check the YBE and unitarity residuals");
    add_input(verifyCmd, in);
    verifyCmd->add_option("--tol", tol, "Residual tolerance");

    auto* analyzeCmd = app.add_subcommand("analyze", "Full invariant report");
    add_input(analyzeCmd, in);
    int nCap = 4;
    std::string format = "json", outPath;
    analyzeCmd->add_option("--n-cap", nCap, "Highest level for commutants and fixed points")->check(CLI::Range(1, 8));
    analyzeCmd->add_option("--format", format, "json or md")->check(CLI::IsMember({"json", "md"}));
    analyzeCmd->add_option("--out", outPath, "Output file");

    auto* classifyCmd = app.add_subcommand("classify2", "Family of a d = 2 R-matrix");
    add_input(classifyCmd, in);

    auto* charCmd = app.add_subcommand("character", "Character value on a braid word");
    add_input(charCmd, in);
    std::string word;
    charCmd->add_option("--word", word, "Braid word, e.g. 1,2,-1")->required();

    auto* eqCmd = app.add_subcommand("equivalent", "Compare characters of two R-matrices");
    std::string pathA, pathB;
    int maxStrands = 4, maxLen = 6;
    eqCmd->add_option("a", pathA, "First matrix file")->required();
    eqCmd->add_option("b", pathB, "Second matrix file")->required();
    eqCmd->add_option("--strands", maxStrands, "Largest braid group")->check(CLI::Range(2, 6));
    eqCmd->add_option("--length", maxLen, "Longest word")->check(CLI::Range(1, 8));

    auto* exportCmd = app.add_subcommand("export", "Write a builtin as matrix JSON");
    add_input(exportCmd, in, false);
    std::string transform = "none";
    exportCmd->add_option("--transform", transform, "none, flip, adjoint or conjugate")
        ->check(CLI::IsMember({"none", "flip", "adjoint", "conjugate"}));
    exportCmd->add_option("--out", outPath, "Output file");

    auto* searchCmd = app.add_subcommand("search", "Numerical search for R-matrices");
    SearchConfig cfg;
    int restarts = 8;
    std::string solutionsPath;
    searchCmd->add_option("--d", cfg.d, "Dimension")->check(CLI::Range(1, 3));
    searchCmd->add_option("--restarts", restarts, "Random restarts")->check(CLI::NonNegativeNumber);
    searchCmd->add_option("--max-iterations", cfg.maxIterations, "Descent steps per restart");
    searchCmd->add_option("--out", solutionsPath, "JSON-lines file receiving verified solutions");

    auto* tableCmd = app.add_subcommand("family-table", "Sampled d = 2 summary table");
    FamilyTableOptions topt;
    tableCmd->add_option("--samples", topt.samples, "Samples per family")->check(CLI::NonNegativeNumber);
    tableCmd->add_option("--fixed-levels", topt.fixedLevels, "Fixed-point levels")->check(CLI::Range(1, 4));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (!seedGiven) seed = default_seed();

        if (verifyCmd->parsed()) {
            const Loaded m = load_input(in, seed);
            const long n = long(m.d) * m.d;
            if (m.matrix.rows() != n || m.matrix.cols() != n) throw ParseError("matrix is not d^2 x d^2");
            const double ybe = ybe_residual(m.matrix, m.d), uni = unitarity_residual(m.matrix);
            const bool ok = ybe <= tol && uni <= tol;
            emit(canonical_dump({{"label", m.label},
                                 {"d", m.d},
                                 {"ybeResidual", ybe},
                                 {"unitarityResidual", uni},
                                 {"tol", tol},
                                 {"verified", ok}}),
                 "");
            return ok ? kExitOk : kExitVerdict;
        }
        if (analyzeCmd->parsed()) {
            const RMatrix r = load_verified(in, seed, tol);
            AnalysisCaps caps;
            caps.seed = seed;
            caps.fixedPointLevels = nCap;
            caps.commutantLevels = std::min(nCap, 2);
            const AnalysisReport rep = analyze(r, caps);
            emit(format == "md" ? report_to_markdown(rep) : canonical_dump(report_to_json(rep)), outPath);
            return kExitOk;
        }
        if (classifyCmd->parsed()) {
            const RMatrix r = load_verified(in, seed, tol);
            const Dim2Classification c = classify_dim2(r, kClassifyTol, seed);
            emit(canonical_dump(classification_to_json(c)), "");
            return c.classified() ? kExitOk : kExitVerdict;
        }
        if (charCmd->parsed()) {
            const RMatrix r = load_verified(in, seed, tol);
            const BraidWord w = parse_word(word);
            json out = complex_to_json(character(r, w));
            out["word"] = to_string(w);
            out["strands"] = w.strands;
            emit(canonical_dump(out), "");
            return kExitOk;
        }
        if (eqCmd->parsed()) {
            InputOptions a, b;
            a.path = pathA;
            b.path = pathB;
            const RMatrix ra = load_verified(a, seed, tol), rb = load_verified(b, seed, tol);
            const CharacterVerdict v = characters_equal(ra, rb, maxStrands, maxLen);
            json out = {{"equal", v.equal},
                        {"verdict", v.equal ? "equal-up-to-truncation" : "different"},
                        {"wordsChecked", v.words_checked},
                        {"maxStrands", v.max_strands},
                        {"maxLength", v.max_len}};
            if (v.witness) {
                out["witness"] = to_string(*v.witness);
                out["valueA"] = complex_to_json(v.value_r);
                out["valueB"] = complex_to_json(v.value_s);
            }
            emit(canonical_dump(out), "");
            return v.equal ? kExitOk : kExitVerdict;
        }
        if (exportCmd->parsed()) {
            RMatrix r = load_verified(in, seed, tol);
            if (transform == "flip") r = flip_conjugate(r);
            else if (transform == "adjoint") r = adjoint(r);
            else if (transform == "conjugate") {
                Rng rng(seed);
                r = quasifree_conjugate(r, haar_unitary(r.d, rng));
            }
            emit(canonical_dump(matrix_to_json(r)), outPath);
            return kExitOk;
        }
        if (searchCmd->parsed()) {
            cfg.seed = seed;
            const std::vector<SearchResult> rs = search_restarts(cfg, restarts, jobs);
            const std::string hash = search_config_hash(cfg, restarts);
            int successes = 0;
            std::ofstream sol;
            if (!solutionsPath.empty()) {
                sol.open(solutionsPath, std::ios::app);
                if (!sol) throw ParseError("cannot write " + solutionsPath);
            }
            for (std::size_t k = 0; k < rs.size(); ++k) {
                if (!rs[k].success) continue;
                ++successes;
                if (sol) sol << canonical_dump(solution_record(rs[k], int(k), hash), 0) << "\n";
            }
            json out = {{"restarts", restarts}, {"successes", successes}, {"configHash", hash}};
            const int best = best_result(rs);
            if (best >= 0)
                out["best"] = {{"restart", best},
                               {"residual", rs[std::size_t(best)].residual},
                               {"success", rs[std::size_t(best)].success},
                               {"message", rs[std::size_t(best)].message}};
            else
                out["message"] = "no restarts run";
            emit(canonical_dump(out), "");
            return successes > 0 ? kExitOk : kExitVerdict;
        }
        if (tableCmd->parsed()) {
            topt.seed = seed;
            topt.jobs = jobs;
            const auto rows = family_table(topt);
            std::cout << family_table_markdown(rows);
            int bad = 0;
            for (const auto& r : rows) bad += !(r.columnsMatch() && r.classifiedCorrectly());
            std::cout << "\n" << rows.size() - std::size_t(bad) << " / " << rows.size() << " rows match\n";
            return bad == 0 ? kExitOk : kExitVerdict;
        }
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ShapeError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NotAnRMatrixError& e) {
        std::cerr << e.what() << "\n";
        return kExitVerdict;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerdict;
    }
    return kExitOk;
}
