#pragma once

// ============================================================================
// Scene files: named collections of algebras, bimodules, representations,
// maps, expectations and frames, plus a task list, serialized as JSON.
// Reports collect per-task verdicts and residuals deterministically.
// ============================================================================

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "morita/algebra.hpp"
#include "morita/bimodule.hpp"
#include "morita/core.hpp"
#include "morita/cpmap.hpp"
#include "morita/expectation.hpp"
#include "morita/representation.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Scene contents
// ----------------------------------------------------------------------------

struct AlgebraEntry {
    std::string name;
    Algebra value;
};

struct BimoduleEntry {
    std::string name, left, right;
    Bimodule value;
};

struct RepresentationEntry {
    std::string name, algebra;
    Representation value;
};

struct CpMapEntry {
    std::string name, source;
    CPMap value;
};

struct ExpectationEntry {
    std::string name, big, small;
    ConditionalExpectation value;
};

struct PairEntry {
    std::string name, e_left, e_right, bimodule;
    ExpectationPair value;
};

struct FrameEntry {
    std::string name, bimodule;
    Frame value;
};

/// One executable step; refs map field names ("map", "bimodule", "rep",
/// "left", "right", "pair", "frame", "object") to object names.
struct Task {
    std::string op;
    std::vector<std::pair<std::string, std::string>> refs;

    [[nodiscard]] std::string ref(const std::string& field) const;
    [[nodiscard]] bool has_ref(const std::string& field) const;
};

struct Scene {
    std::vector<AlgebraEntry> algebras;
    std::vector<BimoduleEntry> bimodules;
    std::vector<RepresentationEntry> representations;
    std::vector<CpMapEntry> cpmaps;
    std::vector<ExpectationEntry> expectations;
    std::vector<PairEntry> pairs;
    std::vector<FrameEntry> frames;
    std::vector<Task> tasks;

    [[nodiscard]] const Algebra* find_algebra(const std::string& name) const;
    [[nodiscard]] const Bimodule* find_bimodule(const std::string& name) const;
    [[nodiscard]] const Representation* find_representation(const std::string& name) const;
    [[nodiscard]] const CPMap* find_cpmap(const std::string& name) const;
    [[nodiscard]] const ConditionalExpectation* find_expectation(
        const std::string& name) const;
    [[nodiscard]] const ExpectationPair* find_pair(const std::string& name) const;
    [[nodiscard]] const Frame* find_frame(const std::string& name) const;
};

// ----------------------------------------------------------------------------
// Serialization
// ----------------------------------------------------------------------------

/// Parses and validates a scene (every object runs through its module
/// validator; images are rebased onto the validated bases).  ParseError for
/// malformed JSON, ValidationError with the object name otherwise.
Scene parse_scene(const std::string& text, const Tolerance& tol = {});

/// parse_scene over the contents of a file; ParseError if unreadable.
Scene load_scene(const std::string& path, const Tolerance& tol = {});

[[nodiscard]] std::string scene_to_json(const Scene& scene);

void save_scene(const Scene& scene, const std::string& path);

// ----------------------------------------------------------------------------
// Reports
// ----------------------------------------------------------------------------

struct TaskResult {
    Index index = 0;
    std::string op;
    std::string target;
    bool pass = false;
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::pair<std::string, Index>> counts;
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::pair<std::string, CMat>> artifacts;
    double seconds = 0.0;
};

struct Report {
    std::string tool_version;
    std::uint64_t seed = 0;
    bool pass = false;
    std::vector<TaskResult> tasks;

    /// Aligned human-readable listing, one line per task.
    [[nodiscard]] std::string text() const;

    /// JSON rendering.  Artifact matrices larger than 64x64 are written to
    /// sidecar files derived from report_path (ignored when it is empty, in
    /// which case oversized artifacts are referenced as omitted).  Timings
    /// are skipped when with_timings is false so reports can be compared
    /// byte-for-byte.
    [[nodiscard]] std::string json(const std::string& report_path,
                                   bool with_timings = true) const;
};

/// Executes every task in order; failures inside a task are recorded on its
/// result and execution continues.
Report run_scene(const Scene& scene, std::uint64_t seed, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Generation
// ----------------------------------------------------------------------------

struct GenParams {
    Index ambient = 4;     // ambient bound for generated algebras / base
    Index target = 2;      // CP map target dimension
    Index kraus = 2;       // Kraus rank
    Index fiber = 2;       // fiber size of tensor-type expectation pairs
    bool compatible = true;
    bool conjugate = true;
    std::vector<std::array<Index, 3>> blocks;  // explicit bimodule blocks
};

/// kind is one of: algebra, bimodule, cpmap, expectation-pair, co5-instance,
/// rel7-instance.  The returned scene carries the generated objects plus the
/// canonical task list for that kind.  ParamOutOfRange for unknown kinds or
/// bad parameters.
Scene generate_scene(const std::string& kind, const GenParams& params,
                     std::uint64_t seed, const Tolerance& tol = {});

}  // namespace morita
