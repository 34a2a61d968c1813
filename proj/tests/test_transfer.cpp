// ============================================================================
// Transfer tests: CP-map transfer across an equivalence bimodule via a frame,
// roundtrip equivalence, frame validation, and invariance of the
// equivalence-class map.
// ============================================================================

#include <doctest.h>

#include <vector>

#include "morita/generators.hpp"
#include "morita/random.hpp"
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

Algebra scalars(Index n) {
    return Algebra::validate({CMat::Identity(n, n)});
}

Bimodule column_module(Index n) {
    std::vector<CMat> cols;
    for (Index i = 0; i < n; ++i) {
        CMat c = CMat::Zero(n, 1);
        c(i, 0) = Cplx(1, 0);
        cols.push_back(c);
    }
    return Bimodule::verify(full_matrix_algebra(n), scalars(1), cols);
}

}  // namespace

// ----------------------------------------------------------------------------
// transfer_cp
// ----------------------------------------------------------------------------

TEST_CASE("transfer_cp: the identity of C transfers to a state on M_2") {
    // X = C^2 over (M_2, C) with the standard basis frame; psi = id_C gives
    // phi(a) = [a_lk] = a itself as a 2x2 matrix (target dim = frame size).
    const Bimodule x = column_module(2);
    const CPMap psi =
        CPMap::make(x.right(), 1, {CMat::Identity(1, 1)});
    const Frame f = left_basis(x);
    const TransferResult res = transfer_cp(psi, x, f);
    CHECK(res.phi.source().ambient_dim() == 2);
    CHECK(res.phi.target_dim() == 2);
    CHECK(res.isometry_residual < 1e-9);
    CHECK(res.intertwining_residual < 1e-9);
    // The normalised frame is u_j = e_j / sqrt(2), so
    // phi(a)_{lk} = psi(u_l^* a u_k) = a_{lk} / 2.
    Rng rng(kSeed);
    const CMat a = random_hermitian(rng, 2);
    CHECK(spectral_norm(res.phi.apply(a) - 0.5 * a) < 1e-9);
    CHECK(verify_cp(res.phi).cp);
}

TEST_CASE("transfer_cp: transferred maps verify on random instances") {
    for (int k = 0; k < 6; ++k) {
        Rng rng(mix_seed(kSeed + 1, static_cast<std::uint64_t>(k)));
        const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
        const CPMap psi = gen_cpmap(rng, g.right, 2, 2);
        const Frame f = left_basis(g.x);
        const TransferResult res = transfer_cp(psi, g.x, f);
        CHECK(res.isometry_residual <= 1e-9);
        CHECK(res.intertwining_residual <= 1e-8);
        CHECK(verify_cp(res.phi).cp);
        // The dilation of phi is the induced dilation of psi: dimensions and
        // unitary u_iso agree.
        const StinespringTriple t_phi = minimal_stinespring(res.phi);
        const StinespringTriple t_psi = minimal_stinespring(psi);
        const Induced ind = induce(g.x, t_psi.pi);
        CHECK(t_phi.dilation_dim == ind.gram.quotient_dim);
        CHECK(res.u_iso.rows() == t_phi.dilation_dim);
    }
}

TEST_CASE("transfer_cp: frame validation") {
    Rng rng(kSeed + 2);
    const Bimodule x = column_module(2);
    const CPMap psi = CPMap::make(x.right(), 1, {CMat::Identity(1, 1)});

    // Empty frame.
    CHECK_THROWS_AS(transfer_cp(psi, x, Frame{}), Error);
    // Wrong shape.
    {
        Frame f;
        f.vectors.push_back(CMat::Zero(3, 1));
        try {
            transfer_cp(psi, x, f);
            FAIL("expected FrameInvalid");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::FrameInvalid);
        }
    }
    // Vectors outside the bimodule: not applicable for the full column
    // module; scale breaks reconstruction instead.
    {
        Frame f = left_basis(x);
        for (CMat& v : f.vectors) v *= 2.0;
        try {
            transfer_cp(psi, x, f);
            FAIL("expected FrameInvalid");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::FrameInvalid);
        }
    }
    // Algebra mismatch: psi must live on x.right().
    {
        const Algebra m2 = full_matrix_algebra(2);
        std::vector<CMat> im;
        for (const CMat& b : m2.basis()) {
            CMat m(1, 1);
            m(0, 0) = b.trace() / 2.0;
            im.push_back(m);
        }
        const CPMap wrong = CPMap::make(m2, 1, im);
        try {
            transfer_cp(wrong, x, left_basis(x));
            FAIL("expected AlgebraMismatch");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::AlgebraMismatch);
        }
    }
}

TEST_CASE("transfer_cp: zero maps cannot be transferred") {
    const Bimodule x = column_module(2);
    const CPMap zero = CPMap::make(x.right(), 1, {CMat::Zero(1, 1)});
    try {
        transfer_cp(zero, x, left_basis(x));
        FAIL("expected ZeroMap");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ZeroMap);
    }
}

// ----------------------------------------------------------------------------
// roundtrip
// ----------------------------------------------------------------------------

TEST_CASE("roundtrip: forward-and-back lands in the same equivalence class") {
    for (int k = 0; k < 4; ++k) {
        Rng rng(mix_seed(kSeed + 3, static_cast<std::uint64_t>(k)));
        const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
        const CPMap psi = gen_cpmap(rng, g.right, 2, 1);
        const RoundtripVerdict v = roundtrip(psi, g.x);
        CHECK(v.pass);
        REQUIRE(v.witness.has_value());
        // The witness certifies psi ~ psi'' over the trivial B-B bimodule.
        const Bimodule tb = trivial_bimodule(psi.source());
        CHECK(verify_bimodule_rep(v.witness->rep, tb).pass);
    }
}

TEST_CASE("roundtrip: the column module sends states around exactly") {
    const Bimodule x = column_module(2);
    const CPMap psi = CPMap::make(x.right(), 1, {CMat::Identity(1, 1)});
    const RoundtripVerdict v = roundtrip(psi, x);
    CHECK(v.pass);
    CHECK(v.forward.phi.source().ambient_dim() == 2);
    CHECK(v.back.source().ambient_dim() == 1);
}

// ----------------------------------------------------------------------------
// transfer_class_map
// ----------------------------------------------------------------------------

TEST_CASE("transfer_class_map: the verdict matrix is preserved") {
    Rng rng(kSeed + 4);
    const GeneratedBimodule g = gen_bimodule(rng, 3, 3);
    // Three maps: psi, a conjugated copy (equivalent), and a doubled version
    // (inequivalent: different dilation multiplicities).
    const CPMap psi = gen_cpmap(rng, g.right, 2, 1);
    const Index h = psi.target_dim();
    const CMat u = random_unitary(rng, h);
    std::vector<CMat> conj;
    for (const CMat& m : psi.images()) conj.push_back(u * m * u.adjoint());
    const CPMap psi2 = CPMap::make(g.right, h, conj);
    std::vector<CMat> doubled;
    for (const CMat& m : psi.images())
        doubled.push_back(kron(CMat::Identity(2, 2), m));
    const CPMap psi3 = CPMap::make(g.right, 2 * h, doubled);

    const ClassMapReport rep = transfer_class_map({psi, psi2, psi3}, g.x);
    CHECK(rep.preserved);
    REQUIRE(rep.before.size() == 3);
    CHECK(rep.before[0][1]);        // psi ~ psi2
    CHECK_FALSE(rep.before[0][2]);  // psi !~ psi3
    CHECK(rep.before == rep.after);
    for (size_t i = 0; i < 3; ++i) CHECK(rep.before[i][i]);  // reflexive

    CHECK_THROWS_AS(transfer_class_map({}, g.x), Error);
}
