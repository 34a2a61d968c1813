#include "morita/scene.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "morita/generators.hpp"
#include "morita/numerics.hpp"
#include "morita/transfer.hpp"

namespace morita {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kToolVersion = "moritakit 0.1.0";
constexpr Index kInlineMatrixLimit = 64;

// ----------------------------------------------------------------------------
// JSON <-> matrix
// ----------------------------------------------------------------------------

Cplx json_to_complex(const Json& e) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        return {e[0].get<double>(), e[1].get<double>()};
    }
    throw Error(ErrorCode::ParseError, "complex entries must be numbers or [re, im]");
}

CMat json_to_mat(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
        throw Error(ErrorCode::ParseError,
                    "matrices must be non-empty row-major nested arrays");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    CMat m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw Error(ErrorCode::ParseError, "matrix rows have unequal lengths");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = json_to_complex(row[static_cast<std::size_t>(c)]);
        }
    }
    if (!all_finite(m)) {
        throw Error(ErrorCode::ParseError, "matrix has non-finite entries");
    }
    return m;
}

Json mat_to_json(const CMat& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CMat> json_to_mats(const Json& j, const char* field) {
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::ParseError,
                    std::string(field) + " must be a non-empty array of matrices");
    }
    std::vector<CMat> out;
    out.reserve(j.size());
    for (const Json& e : j) out.push_back(json_to_mat(e));
    return out;
}

Json mats_to_json(const std::vector<CMat>& ms) {
    Json out = Json::array();
    for (const CMat& m : ms) out.push_back(mat_to_json(m));
    return out;
}

std::string json_string(const Json& obj, const char* field) {
    if (!obj.contains(field) || !obj[field].is_string()) {
        throw Error(ErrorCode::ParseError,
                    std::string("missing string field '") + field + "'");
    }
    return obj[field].get<std::string>();
}

Index json_index(const Json& obj, const char* field) {
    if (!obj.contains(field) || !obj[field].is_number_integer()) {
        throw Error(ErrorCode::ParseError,
                    std::string("missing integer field '") + field + "'");
    }
    return obj[field].get<Index>();
}

// Images given over a listed basis are rewritten over the validated basis.
std::vector<CMat> rebase_images(const Algebra& alg, const std::vector<CMat>& given,
                                const std::vector<CMat>& images) {
    const Index n = alg.dim();
    CMat c(n, n);
    for (Index i = 0; i < n; ++i) c.col(i) = alg.coords(given[static_cast<std::size_t>(i)]);
    const CMat y = c.fullPivLu().solve(CMat::Identity(n, n));
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        CMat img = CMat::Zero(images[0].rows(), images[0].cols());
        for (Index i = 0; i < n; ++i) img += y(i, k) * images[static_cast<std::size_t>(i)];
        out.push_back(std::move(img));
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

// ----------------------------------------------------------------------------
// Scene lookup
// ----------------------------------------------------------------------------

std::string Task::ref(const std::string& field) const {
    for (const auto& [k, v] : refs) {
        if (k == field) return v;
    }
    throw Error(ErrorCode::ValidationError,
                "task '" + op + "' is missing the '" + field + "' reference");
}

bool Task::has_ref(const std::string& field) const {
    return std::any_of(refs.begin(), refs.end(),
                       [&field](const auto& kv) { return kv.first == field; });
}

namespace {
template <typename Entries>
auto* find_entry(Entries& entries, const std::string& name) {
    for (auto& e : entries) {
        if (e.name == name) return &e.value;
    }
    return static_cast<decltype(&entries.front().value)>(nullptr);
}
}  // namespace

const Algebra* Scene::find_algebra(const std::string& name) const {
    return find_entry(algebras, name);
}
const Bimodule* Scene::find_bimodule(const std::string& name) const {
    return find_entry(bimodules, name);
}
const Representation* Scene::find_representation(const std::string& name) const {
    return find_entry(representations, name);
}
const CPMap* Scene::find_cpmap(const std::string& name) const {
    return find_entry(cpmaps, name);
}
const ConditionalExpectation* Scene::find_expectation(const std::string& name) const {
    return find_entry(expectations, name);
}
const ExpectationPair* Scene::find_pair(const std::string& name) const {
    return find_entry(pairs, name);
}
const Frame* Scene::find_frame(const std::string& name) const {
    return find_entry(frames, name);
}

// ----------------------------------------------------------------------------
// Parsing
// ----------------------------------------------------------------------------

Scene parse_scene(const std::string& text, const Tolerance& tol) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!root.is_object() || !root.contains("objects") || !root["objects"].is_array()) {
        throw Error(ErrorCode::ParseError, "scene must contain an 'objects' array");
    }

    Scene scene;
    std::set<std::string> names;
    std::vector<std::pair<std::string, std::vector<CMat>>> given_bases;
    const auto given_basis_of = [&given_bases](const std::string& name)
        -> const std::vector<CMat>& {
        for (const auto& [n, b] : given_bases) {
            if (n == name) return b;
        }
        throw Error(ErrorCode::ValidationError, "unknown algebra '" + name + "'");
    };

    for (const Json& obj : root["objects"]) {
        if (!obj.is_object()) {
            throw Error(ErrorCode::ParseError, "objects must be JSON objects");
        }
        const std::string kind = json_string(obj, "kind");
        const std::string name = json_string(obj, "name");
        if (!names.insert(name).second) {
            throw Error(ErrorCode::ValidationError,
                        "object '" + name + "': duplicate name");
        }
        try {
            if (kind == "algebra") {
                const Index ambient = json_index(obj, "ambient_dim");
                std::vector<CMat> given = json_to_mats(obj.at("basis"), "basis");
                for (const CMat& b : given) {
                    if (b.rows() != ambient || b.cols() != ambient) {
                        throw Error(ErrorCode::ValidationError,
                                    "basis matrix does not match ambient_dim");
                    }
                }
                Algebra a = Algebra::validate(given, tol);
                if (a.dim() != static_cast<Index>(given.size())) {
                    throw Error(ErrorCode::ValidationError,
                                "basis must be linearly independent, closed under "
                                "products and adjoints, and span the unit");
                }
                scene.algebras.push_back({name, std::move(a)});
                given_bases.emplace_back(name, std::move(given));
            } else if (kind == "bimodule") {
                const std::string left = json_string(obj, "left");
                const std::string right = json_string(obj, "right");
                const Algebra* la = scene.find_algebra(left);
                const Algebra* ra = scene.find_algebra(right);
                if (la == nullptr || ra == nullptr) {
                    throw Error(ErrorCode::ValidationError,
                                "unknown coefficient algebra reference");
                }
                const Index rows = json_index(obj, "rows");
                const Index cols = json_index(obj, "cols");
                std::vector<CMat> given = json_to_mats(obj.at("basis"), "basis");
                for (const CMat& b : given) {
                    if (b.rows() != rows || b.cols() != cols) {
                        throw Error(ErrorCode::ValidationError,
                                    "basis matrix does not match rows/cols");
                    }
                }
                Bimodule x = Bimodule::verify(*la, *ra, given, tol);
                if (x.dim() != static_cast<Index>(given.size())) {
                    throw Error(ErrorCode::ValidationError,
                                "basis must be linearly independent and closed "
                                "under the algebra actions");
                }
                scene.bimodules.push_back({name, left, right, std::move(x)});
            } else if (kind == "representation") {
                const std::string alg_name = json_string(obj, "algebra");
                const Algebra* a = scene.find_algebra(alg_name);
                if (a == nullptr) {
                    throw Error(ErrorCode::ValidationError,
                                "unknown algebra reference");
                }
                const Index space = json_index(obj, "space_dim");
                std::vector<CMat> images = json_to_mats(obj.at("images"), "images");
                if (static_cast<Index>(images.size()) != a->dim()) {
                    throw Error(ErrorCode::ValidationError,
                                "one image per basis element is required");
                }
                for (const CMat& m : images) {
                    if (m.rows() != space || m.cols() != space) {
                        throw Error(ErrorCode::ValidationError,
                                    "image does not match space_dim");
                    }
                }
                Representation r = Representation::validate(
                    *a, rebase_images(*a, given_basis_of(alg_name), images), tol);
                scene.representations.push_back({name, alg_name, std::move(r)});
            } else if (kind == "cpmap") {
                const std::string src_name = json_string(obj, "source");
                const Algebra* a = scene.find_algebra(src_name);
                if (a == nullptr) {
                    throw Error(ErrorCode::ValidationError, "unknown source algebra");
                }
                const Index target = json_index(obj, "target_dim");
                std::vector<CMat> images = json_to_mats(obj.at("images"), "images");
                if (static_cast<Index>(images.size()) != a->dim()) {
                    throw Error(ErrorCode::ValidationError,
                                "one image per basis element is required");
                }
                CPMap phi = CPMap::make(
                    *a, target, rebase_images(*a, given_basis_of(src_name), images),
                    tol);
                scene.cpmaps.push_back({name, src_name, std::move(phi)});
            } else if (kind == "expectation") {
                const std::string big_name = json_string(obj, "big");
                const std::string small_name = json_string(obj, "small");
                const Algebra* big = scene.find_algebra(big_name);
                const Algebra* small = scene.find_algebra(small_name);
                if (big == nullptr || small == nullptr) {
                    throw Error(ErrorCode::ValidationError,
                                "unknown algebra reference");
                }
                std::vector<CMat> images = json_to_mats(obj.at("images"), "images");
                if (static_cast<Index>(images.size()) != big->dim()) {
                    throw Error(ErrorCode::ValidationError,
                                "one image per basis element is required");
                }
                ConditionalExpectation e = ConditionalExpectation::validate(
                    Inclusion::make(*big, *small, tol),
                    rebase_images(*big, given_basis_of(big_name), images), tol);
                scene.expectations.push_back({name, big_name, small_name, std::move(e)});
            } else if (kind == "expectation-pair") {
                const std::string eln = json_string(obj, "e_left");
                const std::string ern = json_string(obj, "e_right");
                const std::string yn = json_string(obj, "bimodule");
                const ConditionalExpectation* el = scene.find_expectation(eln);
                const ConditionalExpectation* er = scene.find_expectation(ern);
                const Bimodule* y = scene.find_bimodule(yn);
                if (el == nullptr || er == nullptr || y == nullptr) {
                    throw Error(ErrorCode::ValidationError,
                                "unknown expectation or bimodule reference");
                }
                const std::vector<CMat> sub = json_to_mats(obj.at("subspace"), "subspace");
                ExpectationPair p = ExpectationPair::make(*el, *er, *y, sub, tol);
                scene.pairs.push_back({name, eln, ern, yn, std::move(p)});
            } else if (kind == "frame") {
                const std::string xn = json_string(obj, "bimodule");
                const Bimodule* x = scene.find_bimodule(xn);
                if (x == nullptr) {
                    throw Error(ErrorCode::ValidationError,
                                "unknown bimodule reference");
                }
                Frame f{json_to_mats(obj.at("vectors"), "vectors")};
                for (const CMat& v : f.vectors) {
                    if (v.rows() != x->rows() || v.cols() != x->cols()) {
                        throw Error(ErrorCode::ValidationError,
                                    "frame vector does not match the bimodule shape");
                    }
                }
                scene.frames.push_back({name, xn, std::move(f)});
            } else {
                throw Error(ErrorCode::ValidationError, "unknown kind '" + kind + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ValidationError) {
                throw Error(ErrorCode::ValidationError,
                            "object '" + name + "': " + e.what());
            }
            throw Error(ErrorCode::ValidationError,
                        "object '" + name + "' failed validation: " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ValidationError,
                        "object '" + name + "': " + e.what());
        }
    }

    if (root.contains("tasks")) {
        if (!root["tasks"].is_array()) {
            throw Error(ErrorCode::ParseError, "'tasks' must be an array");
        }
        for (const Json& t : root["tasks"]) {
            if (!t.is_object()) {
                throw Error(ErrorCode::ParseError, "tasks must be JSON objects");
            }
            Task task;
            if (t.contains("action")) {
                task.op = t["action"].get<std::string>();
            } else if (t.contains("op")) {
                task.op = t["op"].get<std::string>();
            } else {
                throw Error(ErrorCode::ParseError, "task is missing its 'action'");
            }
            for (const auto& [key, val] : t.items()) {
                if (key == "action" || key == "op") continue;
                if (!val.is_string()) {
                    throw Error(ErrorCode::ParseError,
                                "task fields must be object names");
                }
                task.refs.emplace_back(key, val.get<std::string>());
                if (names.find(val.get<std::string>()) == names.end()) {
                    throw Error(ErrorCode::ValidationError,
                                "task '" + task.op + "': unresolved reference '" +
                                    val.get<std::string>() + "'");
                }
            }
            scene.tasks.push_back(std::move(task));
        }
    }
    return scene;
}

Scene load_scene(const std::string& path, const Tolerance& tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open scene file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene(ss.str(), tol);
}

// ----------------------------------------------------------------------------
// Saving
// ----------------------------------------------------------------------------

std::string scene_to_json(const Scene& scene) {
    Json objects = Json::array();
    for (const AlgebraEntry& e : scene.algebras) {
        Json o;
        o["kind"] = "algebra";
        o["name"] = e.name;
        o["ambient_dim"] = e.value.ambient_dim();
        o["basis"] = mats_to_json(e.value.basis());
        objects.push_back(std::move(o));
    }
    for (const BimoduleEntry& e : scene.bimodules) {
        Json o;
        o["kind"] = "bimodule";
        o["name"] = e.name;
        o["left"] = e.left;
        o["right"] = e.right;
        o["rows"] = e.value.rows();
        o["cols"] = e.value.cols();
        o["basis"] = mats_to_json(e.value.basis());
        objects.push_back(std::move(o));
    }
    for (const RepresentationEntry& e : scene.representations) {
        Json o;
        o["kind"] = "representation";
        o["name"] = e.name;
        o["algebra"] = e.algebra;
        o["space_dim"] = e.value.space_dim();
        o["images"] = mats_to_json(e.value.images());
        objects.push_back(std::move(o));
    }
    for (const CpMapEntry& e : scene.cpmaps) {
        Json o;
        o["kind"] = "cpmap";
        o["name"] = e.name;
        o["source"] = e.source;
        o["target_dim"] = e.value.target_dim();
        o["images"] = mats_to_json(e.value.images());
        objects.push_back(std::move(o));
    }
    for (const ExpectationEntry& e : scene.expectations) {
        Json o;
        o["kind"] = "expectation";
        o["name"] = e.name;
        o["big"] = e.big;
        o["small"] = e.small;
        o["images"] = mats_to_json(e.value.images());
        objects.push_back(std::move(o));
    }
    for (const PairEntry& e : scene.pairs) {
        Json o;
        o["kind"] = "expectation-pair";
        o["name"] = e.name;
        o["e_left"] = e.e_left;
        o["e_right"] = e.e_right;
        o["bimodule"] = e.bimodule;
        o["subspace"] = mats_to_json(e.value.x_sub.basis());
        objects.push_back(std::move(o));
    }
    for (const FrameEntry& e : scene.frames) {
        Json o;
        o["kind"] = "frame";
        o["name"] = e.name;
        o["bimodule"] = e.bimodule;
        o["vectors"] = mats_to_json(e.value.vectors);
        objects.push_back(std::move(o));
    }

    Json tasks = Json::array();
    for (const Task& t : scene.tasks) {
        Json o;
        o["action"] = t.op;
        for (const auto& [k, v] : t.refs) o[k] = v;
        tasks.push_back(std::move(o));
    }

    Json root;
    root["objects"] = std::move(objects);
    root["tasks"] = std::move(tasks);
    return root.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::ParseError, "cannot write scene file '" + path + "'");
    }
    out << scene_to_json(scene);
}

// ----------------------------------------------------------------------------
// Reports
// ----------------------------------------------------------------------------

std::string Report::text() const {
    std::ostringstream os;
    os << tool_version << "  seed=" << seed << "  overall="
       << (pass ? "PASS" : "FAIL") << "\n";
    for (const TaskResult& t : tasks) {
        os << "[" << t.index << "] " << t.op;
        for (std::size_t i = t.op.size(); i < 10; ++i) os << ' ';
        os << ' ' << t.target;
        for (std::size_t i = t.target.size(); i < 20; ++i) os << ' ';
        os << (t.pass ? "PASS" : "FAIL");
        for (const auto& [k, v] : t.counts) os << "  " << k << '=' << v;
        for (const auto& [k, v] : t.residuals) os << "  " << k << '=' << format_double(v);
        for (const auto& [k, v] : t.notes) os << "  " << k << '=' << v;
        os << "\n";
    }
    return os.str();
}

std::string Report::json(const std::string& report_path, bool with_timings) const {
    Json root;
    root["tool"] = tool_version;
    root["seed"] = seed;
    root["pass"] = pass;
    Json jt = Json::array();
    for (const TaskResult& t : tasks) {
        Json o;
        o["index"] = t.index;
        o["op"] = t.op;
        o["target"] = t.target;
        o["pass"] = t.pass;
        if (!t.counts.empty()) {
            Json c;
            for (const auto& [k, v] : t.counts) c[k] = v;
            o["counts"] = std::move(c);
        }
        if (!t.residuals.empty()) {
            Json r;
            for (const auto& [k, v] : t.residuals) r[k] = v;
            o["residuals"] = std::move(r);
        }
        if (!t.notes.empty()) {
            Json n;
            for (const auto& [k, v] : t.notes) n[k] = v;
            o["notes"] = std::move(n);
        }
        if (!t.artifacts.empty()) {
            Json a;
            for (const auto& [k, m] : t.artifacts) {
                if (m.rows() <= kInlineMatrixLimit && m.cols() <= kInlineMatrixLimit) {
                    Json entry;
                    entry["rows"] = m.rows();
                    entry["cols"] = m.cols();
                    entry["data"] = mat_to_json(m);
                    a[k] = std::move(entry);
                } else if (!report_path.empty()) {
                    const std::string sidecar = report_path + ".task" +
                                                std::to_string(t.index) + "." + k +
                                                ".json";
                    Json entry;
                    entry["rows"] = m.rows();
                    entry["cols"] = m.cols();
                    entry["data"] = mat_to_json(m);
                    std::ofstream out(sidecar, std::ios::binary);
                    if (out) out << entry.dump(2) << "\n";
                    a[k] = Json{{"sidecar", sidecar}};
                } else {
                    a[k] = Json{{"omitted", std::to_string(m.rows()) + "x" +
                                                std::to_string(m.cols())}};
                }
            }
            o["artifacts"] = std::move(a);
        }
        if (with_timings) o["seconds"] = t.seconds;
        jt.push_back(std::move(o));
    }
    root["tasks"] = std::move(jt);
    return root.dump(2) + "\n";
}

// ----------------------------------------------------------------------------
// Task execution
// ----------------------------------------------------------------------------

namespace {

const Bimodule& need_bimodule(const Scene& s, const std::string& name) {
    const Bimodule* x = s.find_bimodule(name);
    if (x == nullptr) {
        throw Error(ErrorCode::ValidationError, "unknown bimodule '" + name + "'");
    }
    return *x;
}

const Representation& need_representation(const Scene& s, const std::string& name) {
    const Representation* r = s.find_representation(name);
    if (r == nullptr) {
        throw Error(ErrorCode::ValidationError, "unknown representation '" + name + "'");
    }
    return *r;
}

const CPMap& need_cpmap(const Scene& s, const std::string& name) {
    const CPMap* m = s.find_cpmap(name);
    if (m == nullptr) {
        throw Error(ErrorCode::ValidationError, "unknown cpmap '" + name + "'");
    }
    return *m;
}

const ExpectationPair& need_pair(const Scene& s, const std::string& name) {
    const ExpectationPair* p = s.find_pair(name);
    if (p == nullptr) {
        throw Error(ErrorCode::ValidationError, "unknown expectation pair '" + name + "'");
    }
    return *p;
}

// Named single-object health checks used by the `check` op.
void check_object_into(const Scene& scene, const std::string& name, TaskResult& res,
                       const Tolerance& tol) {
    if (const Algebra* a = scene.find_algebra(name)) {
        const BlockStructure bs = decompose(*a, tol);
        std::string shape;
        for (const Block& b : bs.blocks) {
            if (!shape.empty()) shape += "+";
            shape += std::to_string(b.size);
            if (b.multiplicity > 1) shape += "x" + std::to_string(b.multiplicity);
        }
        res.notes.emplace_back(name, "blocks " + shape);
        return;
    }
    if (const Bimodule* x = scene.find_bimodule(name)) {
        res.counts.emplace_back(name + "_dim", x->dim());
        return;
    }
    if (const Representation* r = scene.find_representation(name)) {
        const MultiplicityVector mv = multiplicities(*r, tol);
        std::string s;
        for (Index c : mv.counts) {
            if (!s.empty()) s += ",";
            s += std::to_string(c);
        }
        res.notes.emplace_back(name, "multiplicities " + s);
        return;
    }
    if (const CPMap* m = scene.find_cpmap(name)) {
        const ChoiCertificate cert = verify_cp(*m, tol);
        res.residuals.emplace_back(name + "_min_choi_eig", cert.min_eigenvalue);
        if (!cert.cp) {
            res.pass = false;
            res.notes.emplace_back(name, "not completely positive");
        }
        return;
    }
    if (scene.find_expectation(name) != nullptr) {
        res.notes.emplace_back(name, "expectation ok");
        return;
    }
    if (const ExpectationPair* p = scene.find_pair(name)) {
        const SmeExpectationVerdict v = verify_sme_expectations(*p, tol);
        res.residuals.emplace_back(name + "_compatibility", v.max_residual);
        if (!v.pass) {
            res.pass = false;
            res.notes.emplace_back(name, "incompatible expectations");
        }
        return;
    }
    for (const FrameEntry& f : scene.frames) {
        if (f.name == name) {
            const double defect = frame_defect(need_bimodule(scene, f.bimodule), f.value);
            res.residuals.emplace_back(name + "_frame_defect", defect);
            if (defect > tol.bound(1.0) * 100.0) {
                res.pass = false;
                res.notes.emplace_back(name, "frame does not reconstruct");
            }
            return;
        }
    }
    throw Error(ErrorCode::ValidationError, "unknown object '" + name + "'");
}

void run_task(const Scene& scene, const Task& task, TaskResult& res,
              const Tolerance& tol) {
    if (task.op == "check") {
        res.pass = true;
        if (task.has_ref("object")) {
            check_object_into(scene, task.ref("object"), res, tol);
        } else {
            for (const auto& e : scene.algebras) check_object_into(scene, e.name, res, tol);
            for (const auto& e : scene.bimodules) check_object_into(scene, e.name, res, tol);
            for (const auto& e : scene.representations) {
                check_object_into(scene, e.name, res, tol);
            }
            for (const auto& e : scene.cpmaps) check_object_into(scene, e.name, res, tol);
            for (const auto& e : scene.expectations) {
                check_object_into(scene, e.name, res, tol);
            }
            for (const auto& e : scene.pairs) check_object_into(scene, e.name, res, tol);
            for (const auto& e : scene.frames) check_object_into(scene, e.name, res, tol);
        }
    } else if (task.op == "dilate") {
        const CPMap& phi = need_cpmap(scene, task.ref("map"));
        const StinespringTriple t = minimal_stinespring(phi, tol);
        const DilationVerdict v = verify_stinespring(t, phi, tol);
        res.counts.emplace_back("dilation_dim", t.dilation_dim);
        res.counts.emplace_back("minimality_rank", v.minimality_rank);
        res.residuals.emplace_back("dilation_residual", v.dilation_residual);
        res.residuals.emplace_back("norm_residual", v.norm_residual);
        res.artifacts.emplace_back("v", t.v);
        res.pass = v.pass;
    } else if (task.op == "induce") {
        const Bimodule& x = need_bimodule(scene, task.ref("bimodule"));
        const Representation& r = need_representation(scene, task.ref("rep"));
        const Induced ind = induce(x, r, tol);
        const BimoduleRepVerdict v = verify_bimodule_rep(ind.rep, x, tol);
        res.counts.emplace_back("induced_dim", ind.gram.quotient_dim);
        res.residuals.emplace_back("left_inner_residual", v.left_inner_residual);
        res.residuals.emplace_back("right_inner_residual", v.right_inner_residual);
        res.residuals.emplace_back("action_residual", v.action_residual);
        res.pass = v.pass;
    } else if (task.op == "sme") {
        const Bimodule& x = need_bimodule(scene, task.ref("bimodule"));
        const std::string ln = task.ref("left");
        const std::string rn = task.ref("right");
        if (scene.find_cpmap(ln) != nullptr) {
            const CPMap& lphi = need_cpmap(scene, ln);
            const CPMap& rphi = need_cpmap(scene, rn);
            const auto w = sme_cpmaps(lphi, rphi, x, tol);
            res.pass = w.has_value();
            if (w) {
                const BimoduleRepVerdict v = verify_bimodule_rep(w->rep, x, tol);
                res.residuals.emplace_back("witness_residual", v.max_residual());
                res.pass = v.pass;
                res.notes.emplace_back("witness", "found");
            } else {
                res.notes.emplace_back("witness", "none");
            }
        } else {
            const Representation& l = need_representation(scene, ln);
            const Representation& r = need_representation(scene, rn);
            const auto w = sme_representations(l, r, x, tol);
            res.pass = w.has_value();
            if (w) {
                const BimoduleRepVerdict v = verify_bimodule_rep(*w, x, tol);
                res.residuals.emplace_back("witness_residual", v.max_residual());
                res.pass = v.pass;
                res.notes.emplace_back("witness", "found");
            } else {
                res.notes.emplace_back("witness", "none");
            }
        }
    } else if (task.op == "linking") {
        const Bimodule& x = need_bimodule(scene, task.ref("bimodule"));
        const CPMap& lphi = need_cpmap(scene, task.ref("left"));
        const CPMap& rphi = need_cpmap(scene, task.ref("right"));
        const auto w = sme_cpmaps(lphi, rphi, x, tol);
        if (!w) {
            res.pass = false;
            res.notes.emplace_back("witness", "none");
            return;
        }
        const LinkingCpResult lr = linking_cp(lphi, rphi, *w, x, tol);
        res.counts.emplace_back("link_dim", lr.link.algebra.dim());
        res.counts.emplace_back("p_dim", lr.link.p_dim);
        res.counts.emplace_back("q_dim", lr.link.q_dim);
        res.residuals.emplace_back("compression_residual", lr.compression_residual);
        res.artifacts.emplace_back("tau_v", lr.triple.v);
        res.pass = true;
    } else if (task.op == "transfer") {
        const Bimodule& x = need_bimodule(scene, task.ref("bimodule"));
        const CPMap& psi = need_cpmap(scene, task.ref("map"));
        Frame frame;
        if (task.has_ref("frame")) {
            const Frame* f = scene.find_frame(task.ref("frame"));
            if (f == nullptr) {
                throw Error(ErrorCode::ValidationError,
                            "unknown frame '" + task.ref("frame") + "'");
            }
            frame = *f;
        } else {
            frame = left_basis(x, tol);
        }
        const TransferResult tr = transfer_cp(psi, x, frame, tol);
        const ChoiCertificate cert = verify_cp(tr.phi, tol);
        res.counts.emplace_back("target_dim", tr.phi.target_dim());
        res.counts.emplace_back("frame_size", tr.frame.size());
        res.residuals.emplace_back("isometry_residual", tr.isometry_residual);
        res.residuals.emplace_back("intertwining_residual", tr.intertwining_residual);
        res.residuals.emplace_back("min_choi_eig", cert.min_eigenvalue);
        res.artifacts.emplace_back("u_iso", tr.u_iso);
        res.pass = cert.cp;
    } else if (task.op == "roundtrip") {
        const Bimodule& x = need_bimodule(scene, task.ref("bimodule"));
        const CPMap& psi = need_cpmap(scene, task.ref("map"));
        const RoundtripVerdict rt = roundtrip(psi, x, tol);
        res.counts.emplace_back("back_target_dim", rt.back.target_dim());
        res.notes.emplace_back("witness", rt.witness.has_value() ? "found" : "none");
        res.pass = rt.pass;
    } else if (task.op == "rel7") {
        const ExpectationPair& pair = need_pair(scene, task.ref("pair"));
        const Representation& r = need_representation(scene, task.ref("rep"));
        const PipelineResult pr = expectation_pipeline(pair, r, tol);
        for (const PipelineStage& s : pr.stages) {
            res.residuals.emplace_back(s.name, s.residual);
            if (!s.pass) res.notes.emplace_back(s.name, "failed");
        }
        res.artifacts.emplace_back("u", pr.u);
        res.pass = pr.pass;
    } else if (task.op == "rel10") {
        const ExpectationPair& pair = need_pair(scene, task.ref("pair"));
        const Representation& r = need_representation(scene, task.ref("rep"));
        const ConverseVerdict cv = expectation_converse(pair, r, tol);
        res.residuals.emplace_back("isometry_residual", cv.isometry_residual);
        res.residuals.emplace_back("compression_residual", cv.compression_residual);
        res.residuals.emplace_back("bimodule_residual", cv.bimodule_residual);
        res.pass = cv.pass;
    } else {
        throw Error(ErrorCode::ValidationError, "unknown task op '" + task.op + "'");
    }
}

}  // namespace

Report run_scene(const Scene& scene, std::uint64_t seed, const Tolerance& tol) {
    Report report;
    report.tool_version = kToolVersion;
    report.seed = seed;
    report.pass = true;

    Index index = 0;
    for (const Task& task : scene.tasks) {
        TaskResult res;
        res.index = index++;
        res.op = task.op;
        for (const auto& [k, v] : task.refs) {
            if (!res.target.empty()) res.target += ",";
            res.target += v;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            run_task(scene, task, res, tol);
        } catch (const Error& e) {
            res.pass = false;
            res.notes.emplace_back("error", e.what());
        }
        const auto stop = std::chrono::steady_clock::now();
        res.seconds = std::chrono::duration<double>(stop - start).count();
        report.pass = report.pass && res.pass;
        report.tasks.push_back(std::move(res));
    }
    return report;
}

// ----------------------------------------------------------------------------
// Generation
// ----------------------------------------------------------------------------

namespace {

Task make_task(std::string op,
               std::vector<std::pair<std::string, std::string>> refs) {
    Task t;
    t.op = std::move(op);
    t.refs = std::move(refs);
    return t;
}

}  // namespace

Scene generate_scene(const std::string& kind, const GenParams& params,
                     std::uint64_t seed, const Tolerance& tol) {
    Rng rng(seed);
    Scene scene;

    if (kind == "algebra") {
        scene.algebras.push_back({"a", gen_algebra(rng, params.ambient, tol)});
        scene.tasks.push_back(make_task("check", {{"object", "a"}}));
    } else if (kind == "bimodule") {
        GeneratedBimodule g =
            params.blocks.empty()
                ? gen_bimodule(rng, params.ambient, params.ambient, tol)
                : gen_bimodule_blocks(rng, params.blocks, params.conjugate, tol);
        scene.algebras.push_back({"a", std::move(g.left)});
        scene.algebras.push_back({"b", std::move(g.right)});
        scene.bimodules.push_back({"x", "a", "b", std::move(g.x)});
        scene.tasks.push_back(make_task("check", {{"object", "x"}}));
    } else if (kind == "cpmap") {
        Algebra b = gen_algebra(rng, params.ambient, tol);
        CPMap psi = gen_cpmap(rng, b, params.target, params.kraus, tol);
        scene.algebras.push_back({"b", std::move(b)});
        scene.cpmaps.push_back({"psi", "b", std::move(psi)});
        scene.tasks.push_back(make_task("check", {{"object", "psi"}}));
        scene.tasks.push_back(make_task("dilate", {{"map", "psi"}}));
    } else if (kind == "co5-instance") {
        // The double dilation in roundtrip grows quartically with the module
        // dimension, so the instance keeps the bimodule small.
        const Index cap = std::min<Index>(params.ambient, 3);
        GeneratedBimodule g = gen_bimodule(rng, cap, cap, tol);
        CPMap psi = gen_cpmap(rng, g.right, std::min<Index>(params.target, 2),
                              params.kraus, tol);
        scene.algebras.push_back({"a", std::move(g.left)});
        scene.algebras.push_back({"b", std::move(g.right)});
        scene.bimodules.push_back({"x", "a", "b", std::move(g.x)});
        scene.cpmaps.push_back({"psi", "b", std::move(psi)});
        scene.tasks.push_back(
            make_task("transfer", {{"map", "psi"}, {"bimodule", "x"}}));
        scene.tasks.push_back(
            make_task("roundtrip", {{"map", "psi"}, {"bimodule", "x"}}));
    } else if (kind == "expectation-pair" || kind == "rel7-instance") {
        const Index base = std::min<Index>(params.ambient, 3);
        GeneratedExpectationPair g =
            gen_expectation_pair(rng, base, params.fiber, params.compatible, tol);
        scene.algebras.push_back({"c", g.pair.e_left.big()});
        scene.algebras.push_back({"a", g.pair.e_left.small()});
        scene.algebras.push_back({"d", g.pair.e_right.big()});
        scene.algebras.push_back({"b", g.pair.e_right.small()});
        scene.bimodules.push_back({"y", "c", "d", g.pair.y});
        scene.expectations.push_back(
            {"e_left", "c", "a",
             ConditionalExpectation(g.pair.e_left)});
        scene.expectations.push_back(
            {"e_right", "d", "b",
             ConditionalExpectation(g.pair.e_right)});
        scene.pairs.push_back({"pair", "e_left", "e_right", "y", g.pair});
        scene.representations.push_back({"pi_b", "b", std::move(g.pi_b)});
        if (kind == "rel7-instance") {
            scene.tasks.push_back(
                make_task("rel7", {{"pair", "pair"}, {"rep", "pi_b"}}));
            scene.tasks.push_back(
                make_task("rel10", {{"pair", "pair"}, {"rep", "pi_b"}}));
        } else {
            scene.tasks.push_back(make_task("check", {{"object", "pair"}}));
        }
    } else {
        throw Error(ErrorCode::ParamOutOfRange, "unknown kind '" + kind + "'");
    }
    return scene;
}

}  // namespace morita
