// ============================================================================
// moritakit command-line front end: scene-driven constructions and verdicts
// for strong Morita equivalence of representations and CP maps.
// ============================================================================

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "morita/core.hpp"
#include "morita/scene.hpp"

namespace {

using morita::Error;
using morita::ErrorCode;
using morita::Index;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFailure = 1;
constexpr int kExitInputError = 2;

std::vector<std::array<Index, 3>> parse_blocks(const std::string& text) {
    std::vector<std::array<Index, 3>> blocks;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(pos, end - pos);
        std::array<Index, 3> b{0, 0, 1};
        int field = 0;
        std::size_t s = 0;
        while (s < part.size() && field < 3) {
            std::size_t x = part.find('x', s);
            if (x == std::string::npos) x = part.size();
            try {
                b[static_cast<std::size_t>(field)] = std::stol(part.substr(s, x - s));
            } catch (const std::exception&) {
                throw Error(ErrorCode::ParamOutOfRange,
                            "blocks must look like 2x1 or 2x1x2, got '" + part + "'");
            }
            ++field;
            s = x + 1;
        }
        if (field < 2) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "blocks must provide at least rows and cols, got '" + part + "'");
        }
        blocks.push_back(b);
        pos = end + 1;
    }
    return blocks;
}

struct Options {
    std::uint64_t seed = 1;
    double tol_rel = 1e-9;
    double tol_abs = 1e-12;
    std::string report_path;
    bool as_json = false;

    [[nodiscard]] morita::Tolerance tolerance() const { return {tol_rel, tol_abs}; }
};

int emit_report(const morita::Report& report, const Options& opt) {
    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::ParseError,
                        "cannot write report file '" + opt.report_path + "'");
        }
        out << report.json(opt.report_path);
    }
    if (opt.as_json) {
        std::cout << report.json(opt.report_path);
    } else {
        std::cout << report.text();
    }
    return report.pass ? kExitPass : kExitVerdictFailure;
}

int run_with_tasks(const std::string& scene_path, std::vector<morita::Task> tasks,
                   const Options& opt) {
    morita::Scene scene = morita::load_scene(scene_path, opt.tolerance());
    if (!tasks.empty()) {
        scene.tasks = std::move(tasks);
    } else if (scene.tasks.empty()) {
        morita::Task t;
        t.op = "check";
        scene.tasks.push_back(std::move(t));
    }
    const morita::Report report = morita::run_scene(scene, opt.seed, opt.tolerance());
    return emit_report(report, opt);
}

morita::Task flag_task(std::string op,
                       std::vector<std::pair<std::string, std::string>> refs) {
    morita::Task t;
    t.op = std::move(op);
    for (auto& [k, v] : refs) {
        if (!v.empty()) t.refs.emplace_back(k, v);
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "moritakit: strong Morita equivalence of representations and CP maps "
        "on matrix C*-algebras"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--seed", opt.seed, "random seed")->envname("MORITAKIT_SEED");
    app.add_option("--tol-rel", opt.tol_rel, "relative tolerance");
    app.add_option("--tol-abs", opt.tol_abs, "absolute tolerance");
    app.add_option("--report", opt.report_path, "write a JSON report to this path");
    app.add_flag("--json", opt.as_json, "print the report as JSON");

    std::string scene_path;
    std::string map_name, bimodule_name, rep_name, left_name, right_name;
    std::string pair_name, frame_name;

    auto* c_check = app.add_subcommand("check", "validate a scene and run its tasks");
    c_check->add_option("scene", scene_path, "scene file")->required();
    c_check->fallthrough();

    auto* c_dilate = app.add_subcommand("dilate", "minimal dilation of a CP map");
    c_dilate->add_option("scene", scene_path)->required();
    c_dilate->add_option("--map", map_name, "cpmap name")->required();
    c_dilate->fallthrough();

    auto* c_induce = app.add_subcommand("induce", "induce a representation through a bimodule");
    c_induce->add_option("scene", scene_path)->required();
    c_induce->add_option("--bimodule", bimodule_name)->required();
    c_induce->add_option("--rep", rep_name)->required();
    c_induce->fallthrough();

    auto* c_sme = app.add_subcommand("sme", "equivalence verdict for two maps or representations");
    c_sme->add_option("scene", scene_path)->required();
    c_sme->add_option("--left", left_name)->required();
    c_sme->add_option("--right", right_name)->required();
    c_sme->add_option("--bimodule", bimodule_name)->required();
    c_sme->fallthrough();

    auto* c_linking = app.add_subcommand("linking", "linking-algebra compression of an equivalent pair");
    c_linking->add_option("scene", scene_path)->required();
    c_linking->add_option("--left", left_name)->required();
    c_linking->add_option("--right", right_name)->required();
    c_linking->add_option("--bimodule", bimodule_name)->required();
    c_linking->fallthrough();

    auto* c_transfer = app.add_subcommand("transfer", "transfer a CP map across a bimodule");
    c_transfer->add_option("scene", scene_path)->required();
    c_transfer->add_option("--map", map_name)->required();
    c_transfer->add_option("--bimodule", bimodule_name)->required();
    c_transfer->add_option("--frame", frame_name, "frame name (default: canonical left basis)");
    c_transfer->fallthrough();

    auto* c_roundtrip = app.add_subcommand("roundtrip", "transfer forward and back, then compare classes");
    c_roundtrip->add_option("scene", scene_path)->required();
    c_roundtrip->add_option("--map", map_name)->required();
    c_roundtrip->add_option("--bimodule", bimodule_name)->required();
    c_roundtrip->fallthrough();

    auto* c_rel7 = app.add_subcommand("rel7", "expectation-pair pipeline verdict");
    c_rel7->add_option("scene", scene_path)->required();
    c_rel7->add_option("--pair", pair_name)->required();
    c_rel7->add_option("--rep", rep_name)->required();
    c_rel7->fallthrough();

    auto* c_rel10 = app.add_subcommand("rel10", "expectation-pair converse verdict");
    c_rel10->add_option("scene", scene_path)->required();
    c_rel10->add_option("--pair", pair_name)->required();
    c_rel10->add_option("--rep", rep_name)->required();
    c_rel10->fallthrough();

    std::string gen_kind;
    std::string gen_out;
    std::string gen_blocks;
    morita::GenParams params;
    bool incompatible = false;
    bool plain = false;
    auto* c_gen = app.add_subcommand("gen", "generate a random scene");
    c_gen->add_option("--kind", gen_kind,
                      "algebra | bimodule | cpmap | expectation-pair | "
                      "co5-instance | rel7-instance")
        ->required();
    c_gen->add_option("--ambient", params.ambient, "ambient bound (base bound for pairs)");
    c_gen->add_option("--target", params.target, "CP map target dimension");
    c_gen->add_option("--kraus", params.kraus, "Kraus rank");
    c_gen->add_option("--fiber", params.fiber, "fiber size for expectation pairs");
    c_gen->add_option("--blocks", gen_blocks, "explicit bimodule blocks, e.g. 2x1,1x3x2");
    c_gen->add_flag("--incompatible", incompatible,
                    "skew the left expectation of a generated pair");
    c_gen->add_flag("--plain", plain, "skip the random unitary conjugation");
    c_gen->add_option("--out", gen_out, "output scene file (default: stdout)");
    c_gen->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_gen->parsed()) {
            if (!gen_blocks.empty()) params.blocks = parse_blocks(gen_blocks);
            params.compatible = !incompatible;
            params.conjugate = !plain;
            const morita::Scene scene =
                morita::generate_scene(gen_kind, params, opt.seed, opt.tolerance());
            if (gen_out.empty()) {
                std::cout << morita::scene_to_json(scene);
            } else {
                morita::save_scene(scene, gen_out);
            }
            return kExitPass;
        }
        if (c_check->parsed()) {
            return run_with_tasks(scene_path, {}, opt);
        }
        if (c_dilate->parsed()) {
            return run_with_tasks(scene_path, {flag_task("dilate", {{"map", map_name}})},
                                  opt);
        }
        if (c_induce->parsed()) {
            return run_with_tasks(
                scene_path,
                {flag_task("induce", {{"bimodule", bimodule_name}, {"rep", rep_name}})},
                opt);
        }
        if (c_sme->parsed()) {
            return run_with_tasks(scene_path,
                                  {flag_task("sme", {{"left", left_name},
                                                     {"right", right_name},
                                                     {"bimodule", bimodule_name}})},
                                  opt);
        }
        if (c_linking->parsed()) {
            return run_with_tasks(scene_path,
                                  {flag_task("linking", {{"left", left_name},
                                                         {"right", right_name},
                                                         {"bimodule", bimodule_name}})},
                                  opt);
        }
        if (c_transfer->parsed()) {
            return run_with_tasks(scene_path,
                                  {flag_task("transfer", {{"map", map_name},
                                                          {"bimodule", bimodule_name},
                                                          {"frame", frame_name}})},
                                  opt);
        }
        if (c_roundtrip->parsed()) {
            return run_with_tasks(scene_path,
                                  {flag_task("roundtrip", {{"map", map_name},
                                                           {"bimodule", bimodule_name}})},
                                  opt);
        }
        if (c_rel7->parsed()) {
            return run_with_tasks(
                scene_path,
                {flag_task("rel7", {{"pair", pair_name}, {"rep", rep_name}})}, opt);
        }
        if (c_rel10->parsed()) {
            return run_with_tasks(
                scene_path,
                {flag_task("rel10", {{"pair", pair_name}, {"rep", rep_name}})}, opt);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
