// ============================================================================
// Acceptance suite: eleven end-to-end criteria covering dilation, dilation
// uniqueness, the bimodule-representation verifier, equivalence witnesses,
// frame transfer with roundtrip, the expectation pipeline and its converse,
// non-CP detection, stabilisation scaling, and corner transport.  Prints one
// pass/fail line per criterion; the exit status is the number of failures.
// ============================================================================

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include "morita/expectation.hpp"
#include "morita/generators.hpp"
#include "morita/parallel.hpp"
#include "morita/random.hpp"
#include "morita/scene.hpp"
#include "morita/transfer.hpp"

using namespace morita;

namespace {

constexpr std::uint64_t kSeed = 20260814;

CMat unit_matrix(Index n, Index i, Index j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = Cplx(1, 0);
    return e;
}

Algebra full_matrix_algebra(Index n) {
    std::vector<CMat> gens;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) gens.push_back(unit_matrix(n, i, j));
    return Algebra::validate(gens);
}

Bimodule column_module(Index n) {
    std::vector<CMat> cols;
    for (Index i = 0; i < n; ++i) {
        CMat c = CMat::Zero(n, 1);
        c(i, 0) = Cplx(1, 0);
        cols.push_back(c);
    }
    return Bimodule::verify(full_matrix_algebra(n),
                            Algebra::validate({CMat::Identity(1, 1)}), cols);
}

/// Shared tally across a parallel suite: per-instance pass plus the first
/// failure message.
class Tally {
public:
    explicit Tally(Index n) : pass_(static_cast<size_t>(n), 0) {}

    void ok(Index i) { pass_[static_cast<size_t>(i)] = 1; }

    void fail(Index i, const std::string& why) {
        std::lock_guard<std::mutex> lock(mu_);
        if (first_failure_.empty())
            first_failure_ = "instance " + std::to_string(i) + ": " + why;
    }

    [[nodiscard]] Index passed() const {
        return static_cast<Index>(
            std::count(pass_.begin(), pass_.end(), std::uint8_t{1}));
    }
    [[nodiscard]] Index total() const { return static_cast<Index>(pass_.size()); }
    [[nodiscard]] bool all() const { return passed() == total(); }
    [[nodiscard]] std::string detail() const {
        std::string d = std::to_string(passed()) + "/" + std::to_string(total());
        if (!first_failure_.empty()) d += "; first failure: " + first_failure_;
        return d;
    }

private:
    std::vector<std::uint8_t> pass_;
    std::mutex mu_;
    std::string first_failure_;
};

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

template <typename Fn>
CriterionResult run_suite(Index n, Fn&& body) {
    Tally tally(n);
    parallel_for(n, [&](Index i) {
        try {
            if (body(Rng(mix_seed(kSeed, static_cast<std::uint64_t>(i))), i)) {
                tally.ok(i);
            } else {
                tally.fail(i, "criterion predicate returned false");
            }
        } catch (const Error& e) {
            tally.fail(i, e.what());
        }
    });
    return {tally.all(), tally.detail()};
}

// ----------------------------------------------------------------------------
// 1. Dilation suite: 200 generated CP maps, residual and exact minimality.
// ----------------------------------------------------------------------------

CriterionResult criterion_dilation() {
    return run_suite(200, [](Rng rng, Index) {
        const Algebra a = gen_algebra(rng, 6);
        const Index h = 1 + static_cast<Index>(rng() % 5);
        const Index kraus = 1 + static_cast<Index>(rng() % 3);
        const CPMap phi = gen_cpmap(rng, a, h, kraus);
        const StinespringTriple t = minimal_stinespring(phi);
        const DilationVerdict v = verify_stinespring(t, phi);
        const double bound = 1e-9 * spectral_norm(phi.unit_image());
        return v.pass && v.dilation_residual <= bound &&
               v.minimality_rank == t.dilation_dim;
    });
}

// ----------------------------------------------------------------------------
// 2. Uniqueness: permuted constructions and the intertwining unitary.
// ----------------------------------------------------------------------------

CriterionResult criterion_uniqueness() {
    return run_suite(50, [](Rng rng, Index) {
        const Algebra a = gen_algebra(rng, 5);
        const Index h = 1 + static_cast<Index>(rng() % 3);
        const CPMap phi = gen_cpmap(rng, a, h, 2);
        const StinespringTriple t1 = minimal_stinespring(phi);
        std::vector<Index> order(static_cast<size_t>(a.dim()));
        std::iota(order.begin(), order.end(), Index{0});
        std::shuffle(order.begin(), order.end(), rng);
        const StinespringTriple t2 = minimal_stinespring(phi, order);
        const CMat u = stinespring_uniqueness(t1, t2);
        if (spectral_norm(u * t1.v - t2.v) > 1e-9) return false;
        for (size_t k = 0; k < t1.pi.images().size(); ++k) {
            if (spectral_norm(u * t1.pi.images()[k] * u.adjoint() -
                              t2.pi.images()[k]) > 1e-9)
                return false;
        }
        return true;
    });
}

// ----------------------------------------------------------------------------
// 3. Verifier: induced representations pass; perturbed ones fail honestly.
// ----------------------------------------------------------------------------

CriterionResult criterion_verifier() {
    return run_suite(100, [](Rng rng, Index) {
        const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
        const Representation pi_b = gen_representation(rng, g.right, 1, 2);
        const Induced ind = induce(g.x, pi_b);
        if (!verify_bimodule_rep(ind.rep, g.x).pass) return false;

        BimoduleRep noisy = ind.rep;
        for (CMat& m : noisy.x_images) {
            const CMat dir = random_gaussian(rng, m.rows(), m.cols());
            m += (1e-3 / spectral_norm(dir)) * dir;
        }
        const BimoduleRepVerdict v = verify_bimodule_rep(noisy, g.x);
        return !v.pass && v.max_residual() >= 1e-4 && v.max_residual() <= 1e-2;
    });
}

// ----------------------------------------------------------------------------
// 4. Witnesses: reflexivity, symmetry, transitivity on generated chains.
// ----------------------------------------------------------------------------

CriterionResult criterion_witnesses() {
    return run_suite(50, [](Rng rng, Index) {
        // A - B via x, then B - C via the dual of a generated equivalence
        // with right algebra B.
        const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
        const GeneratedBimodule h = gen_bimodule_right(rng, g.right, 3);
        const Bimodule y = dual(h.x);

        const Representation pi_c = gen_representation(rng, y.right(), 1, 1);
        const BimoduleRep wy = induce(y, pi_c).rep;
        const BimoduleRep wx = induce(g.x, wy.pi_left).rep;

        const Bimodule ta = trivial_bimodule(g.left);
        const BimoduleRep refl = reflexivity_witness(wx.pi_left, ta);
        if (!verify_bimodule_rep(refl, ta).pass) return false;

        const Bimodule xd = dual(g.x);
        const BimoduleRep dw = dual_witness(wx, g.x, xd);
        if (!verify_bimodule_rep(dw, xd).pass) return false;

        const Bimodule xy = interior_tensor(g.x, y);
        const BimoduleRep tw = tensor_witness(wx, g.x, wy, y, xy);
        return verify_bimodule_rep(tw, xy).pass;
    });
}

// ----------------------------------------------------------------------------
// 5 & 6. Transfer suite and roundtrip on the same 100 instances.
// ----------------------------------------------------------------------------

struct TransferOutcome {
    std::vector<std::uint8_t> transfer_ok;
    std::vector<std::uint8_t> roundtrip_ok;
    std::string first_failure;
    std::mutex mu;
};

TransferOutcome& transfer_outcome() {
    static TransferOutcome out;
    return out;
}

void run_transfer_suites() {
    constexpr Index n = 100;
    TransferOutcome& out = transfer_outcome();
    out.transfer_ok.assign(n, 0);
    out.roundtrip_ok.assign(n, 0);
    parallel_for(n, [&](Index i) {
        try {
            Rng rng(mix_seed(kSeed + 500, static_cast<std::uint64_t>(i)));
            const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
            const Index h = 1 + static_cast<Index>(rng() % 2);
            const Index kraus = 1 + static_cast<Index>(rng() % 3);
            const CPMap psi = gen_cpmap(rng, g.right, h, kraus);

            const TransferResult res = transfer_cp(psi, g.x, left_basis(g.x));
            const ChoiCertificate cert = verify_cp(res.phi);
            const bool transfer_ok = cert.min_eigenvalue >= -1e-9 &&
                                     res.isometry_residual <= 1e-9 &&
                                     res.intertwining_residual <= 1e-8 &&
                                     sme_cpmaps(res.phi, psi, g.x).has_value();
            out.transfer_ok[static_cast<size_t>(i)] = transfer_ok ? 1 : 0;

            const RoundtripVerdict rt = roundtrip(psi, g.x);
            out.roundtrip_ok[static_cast<size_t>(i)] =
                (rt.pass && rt.witness.has_value()) ? 1 : 0;
            if (!transfer_ok || !rt.pass) {
                std::lock_guard<std::mutex> lock(out.mu);
                if (out.first_failure.empty())
                    out.first_failure =
                        "instance " + std::to_string(i) + ": verdict false";
            }
        } catch (const Error& e) {
            std::lock_guard<std::mutex> lock(out.mu);
            if (out.first_failure.empty())
                out.first_failure =
                    "instance " + std::to_string(i) + ": " + e.what();
        }
    });
}

CriterionResult criterion_transfer() {
    const TransferOutcome& out = transfer_outcome();
    const auto passed = static_cast<Index>(std::count(
        out.transfer_ok.begin(), out.transfer_ok.end(), std::uint8_t{1}));
    std::string d = std::to_string(passed) + "/100";
    if (passed != 100 && !out.first_failure.empty())
        d += "; first failure: " + out.first_failure;
    return {passed == 100, d};
}

CriterionResult criterion_roundtrip() {
    const TransferOutcome& out = transfer_outcome();
    const auto passed = static_cast<Index>(std::count(
        out.roundtrip_ok.begin(), out.roundtrip_ok.end(), std::uint8_t{1}));
    std::string d = std::to_string(passed) + "/100";
    if (passed != 100 && !out.first_failure.empty())
        d += "; first failure: " + out.first_failure;
    return {passed == 100, d};
}

// ----------------------------------------------------------------------------
// 7. Expectation pipeline on 20 tensor-type pairs.
// ----------------------------------------------------------------------------

CriterionResult criterion_pipeline() {
    return run_suite(20, [](Rng rng, Index) {
        const GeneratedExpectationPair g = gen_expectation_pair(rng, 3, 2, true);
        const PipelineResult res = expectation_pipeline(g.pair, g.pi_b);
        if (!res.pass || !res.witness.has_value()) return false;
        bool unitaries = false, intertwiner = false, minimality = false;
        for (const PipelineStage& s : res.stages) {
            if (s.name == "first_unitary" || s.name == "second_unitary") {
                if (!s.pass || s.residual > 1e-8) return false;
                unitaries = true;
            }
            if (s.name == "intertwiner") {
                if (!s.pass || s.residual > 1e-8) return false;
                intertwiner = true;
            }
            if (s.name == "transported_triple") {
                if (!s.pass) return false;
                minimality = true;
            }
        }
        return unitaries && intertwiner && minimality;
    });
}

// ----------------------------------------------------------------------------
// 8. Converse: compression on compatible pairs; honest refusal on skewed
//    expectations, with the detection rate reported.
// ----------------------------------------------------------------------------

CriterionResult criterion_converse() {
    constexpr Index n = 20;
    std::atomic<Index> compatible_ok{0};
    std::atomic<Index> skew_detected{0};
    std::mutex mu;
    std::string first_failure;
    parallel_for(n, [&](Index i) {
        try {
            // Compatible pair: identity holds within 1e-8.
            Rng rng_good(mix_seed(kSeed + 700, static_cast<std::uint64_t>(i)));
            const GeneratedExpectationPair good =
                gen_expectation_pair(rng_good, 3, 2, true);
            const ConverseVerdict v = expectation_converse(good.pair, good.pi_b);
            if (v.pass && v.compression_residual <= 1e-8 &&
                v.bimodule_residual <= 1e-8) {
                compatible_ok.fetch_add(1);
            }
            // Same construction with the left expectation skewed: the verdict
            // must come back false with a visible residual.
            Rng rng_bad(mix_seed(kSeed + 700, static_cast<std::uint64_t>(i)));
            const GeneratedExpectationPair bad =
                gen_expectation_pair(rng_bad, 3, 2, false);
            const ConverseVerdict w = expectation_converse(bad.pair, bad.pi_b);
            if (!w.pass && w.compression_residual >= 1e-3) {
                skew_detected.fetch_add(1);
            }
        } catch (const Error& e) {
            std::lock_guard<std::mutex> lock(mu);
            if (first_failure.empty())
                first_failure = "instance " + std::to_string(i) + ": " + e.what();
        }
    });
    const double rate =
        static_cast<double>(skew_detected.load()) / static_cast<double>(n);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "compatible %td/%td, skew detected %td/%td (rate %.2f)",
                  static_cast<std::ptrdiff_t>(compatible_ok.load()),
                  static_cast<std::ptrdiff_t>(n),
                  static_cast<std::ptrdiff_t>(skew_detected.load()),
                  static_cast<std::ptrdiff_t>(n), rate);
    std::string d = buf;
    if (!first_failure.empty()) d += "; first failure: " + first_failure;
    return {compatible_ok.load() == n && rate >= 0.95, d};
}

// ----------------------------------------------------------------------------
// 9. Non-CP detection: the transpose on M_2.
// ----------------------------------------------------------------------------

CriterionResult criterion_transpose() {
    const Algebra a = full_matrix_algebra(2);
    std::vector<CMat> images;
    for (const CMat& b : a.basis()) images.push_back(b.transpose());
    const CPMap t = CPMap::make(a, 2, images);
    const ChoiCertificate cert = verify_cp(t);
    bool rejected = false;
    try {
        minimal_stinespring(t);
    } catch (const Error& e) {
        rejected = e.code() == ErrorCode::NotCp;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min Choi eigenvalue %.12f",
                  cert.min_eigenvalue);
    return {!cert.cp && rejected && std::abs(cert.min_eigenvalue + 1.0) <= 1e-9,
            buf};
}

// ----------------------------------------------------------------------------
// 10. Stabilisation: witnesses pass and dilation dimensions scale by m.
// ----------------------------------------------------------------------------

CriterionResult criterion_stabilisation() {
    return run_suite(20, [](Rng rng, Index) {
        const Algebra a = gen_algebra(rng, 2);
        const Representation pi = gen_representation(rng, a, 1, 2);
        const Index h = 1 + static_cast<Index>(rng() % 2);
        const CPMap phi = gen_cpmap(rng, a, h, 1 + static_cast<Index>(rng() % 2));
        const StinespringTriple base = minimal_stinespring(phi);
        for (Index m : {Index{2}, Index{3}, Index{4}}) {
            const Stabilized s = stabilize_rep(pi, m);
            if (!verify_bimodule_rep(s.witness, s.bimodule).pass) return false;
            if (s.pi_s.space_dim() != m * pi.space_dim()) return false;

            const StabilizedCp sc = stabilize_cp(phi, m);
            if (sc.triple.dilation_dim != m * base.dilation_dim) return false;
            if (!verify_stinespring(sc.triple, sc.phi_s).pass) return false;
            if (!verify_bimodule_rep(sc.stab.witness, sc.stab.bimodule).pass)
                return false;
        }
        return true;
    });
}

// ----------------------------------------------------------------------------
// 11. Corner transport: matched ranks produce an intertwining isometry; the
//     column module reports infeasibility with ranks 2 vs 1.
// ----------------------------------------------------------------------------

CriterionResult criterion_corner_transport() {
    const CriterionResult matched = run_suite(10, [](Rng rng, Index i) {
        const GeneratedBimodule g = gen_bimodule_square(rng, 3);
        const Representation pi_b = gen_representation(rng, g.right, 1, 1);
        const Induced ind = induce(g.x, pi_b);
        const LinkingAlgebra l = linking(g.x);
        const Representation rho = linking_rep(ind.rep, g.x, l);
        const BgrResult res =
            bgr_transport(l, rho, mix_seed(kSeed + 1100, static_cast<std::uint64_t>(i)));
        if (!res.ranks.feasible() || !res.transport.has_value()) return false;
        const CornerTransport& tr = *res.transport;
        for (const CMat& a : g.left.basis()) {
            const CMat lhs = pi_b.apply(tr.theta_apply(g.left, a));
            const CMat rhs =
                tr.w_tilde * ind.rep.pi_left.apply(a) * tr.w_tilde.adjoint();
            if (spectral_norm(lhs - rhs) > 1e-9) return false;
        }
        return true;
    });
    if (!matched.pass) return {false, "matched ranks: " + matched.detail};

    // Infeasible side: the column module over (M_2, C).
    const Bimodule x = column_module(2);
    const Representation triv =
        Representation::validate(x.right(), {CMat::Identity(1, 1)});
    const Induced ind = induce(x, triv);
    const LinkingAlgebra l = linking(x);
    const Representation rho = linking_rep(ind.rep, x, l);
    const BgrResult res = bgr_transport(l, rho, kSeed);
    const bool infeasible_ok =
        !res.ranks.feasible() && !res.transport.has_value() &&
        res.ranks.p_ranks == std::vector<Index>{2} &&
        res.ranks.q_ranks == std::vector<Index>{1};
    std::string d = "matched ranks " + matched.detail +
                    "; column module ranks 2 vs 1 infeasible: " +
                    (infeasible_ok ? "yes" : "NO");
    return {infeasible_ok, d};
}

}  // namespace

int main() {
    struct Row {
        const char* label;
        CriterionResult (*fn)();
    };
    const Row rows[] = {
        {"dilation residuals and exact minimality (200 maps)", criterion_dilation},
        {"dilation uniqueness under permuted bases (50 maps)", criterion_uniqueness},
        {"bimodule-representation verifier, pass and honest fail (100)", criterion_verifier},
        {"reflexivity/symmetry/transitivity witnesses (50 chains)", criterion_witnesses},
        {"frame transfer: Choi, isometry, intertwining, witness (100)", criterion_transfer},
        {"roundtrip equivalence psi'' ~ psi (same 100)", criterion_roundtrip},
        {"expectation pipeline: unitaries, intertwiner, minimality (20)", criterion_pipeline},
        {"expectation converse and skew detection rate (20)", criterion_converse},
        {"non-CP detection: transpose on M_2", criterion_transpose},
        {"stabilisation witnesses and exact dimension scaling (20)", criterion_stabilisation},
        {"corner transport: matched ranks and column-module infeasibility", criterion_corner_transport},
    };

    const auto suite_start = std::chrono::steady_clock::now();
    run_transfer_suites();  // shared instances for criteria 5 and 6

    int failures = 0;
    int id = 0;
    for (const Row& row : rows) {
        ++id;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = row.fn();
        } catch (const std::exception& e) {
            res = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (!res.pass) ++failures;
        std::printf("criterion %2d: %s - %s [%s] (%.1fs)\n", id,
                    res.pass ? "PASS" : "FAIL", row.label, res.detail.c_str(),
                    secs);
    }
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start)
            .count();
    std::printf("acceptance: %d/11 criteria passed (%.1fs)\n", 11 - failures, total);
    return failures;
}
