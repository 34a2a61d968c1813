// ============================================================================
// Conditional expectation tests: inclusion/expectation validation, pairs over
// a bimodule with a distinguished subspace, the compatibility identity, the
// dilation/induction pipeline and the converse compression criterion.
// ============================================================================

#include <doctest.h>

#include <vector>

#include "morita/expectation.hpp"
#include "morita/generators.hpp"
#include "morita/random.hpp"

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

Algebra diagonal_algebra(Index n) {
    std::vector<CMat> gens;
    for (Index i = 0; i < n; ++i) gens.push_back(unit_matrix(n, i, i));
    return Algebra::validate(gens);
}

/// The diagonal-compression expectation M_n -> diagonal, images on the
/// canonical basis of M_n.
ConditionalExpectation diagonal_expectation(Index n) {
    const Algebra big = full_matrix_algebra(n);
    const Algebra small = diagonal_algebra(n);
    const Inclusion inc = Inclusion::make(big, small);
    std::vector<CMat> images;
    for (const CMat& b : big.basis())
        images.push_back(b.diagonal().asDiagonal().toDenseMatrix());
    return ConditionalExpectation::validate(inc, images);
}

}  // namespace

// ----------------------------------------------------------------------------
// Inclusion
// ----------------------------------------------------------------------------

TEST_CASE("Inclusion::make: containment and shared unit are enforced") {
    const Algebra big = full_matrix_algebra(2);
    const Algebra small = diagonal_algebra(2);
    CHECK_NOTHROW(Inclusion::make(big, small));

    // Reversed containment fails: M_2 is not inside the diagonal.
    try {
        Inclusion::make(small, big);
        FAIL("expected NotInAlgebra");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotInAlgebra);
    }
    // Different ambient spaces.
    CHECK_THROWS_AS(Inclusion::make(big, diagonal_algebra(3)), Error);
}

// ----------------------------------------------------------------------------
// ConditionalExpectation
// ----------------------------------------------------------------------------

TEST_CASE("validate: the diagonal compression on M_2") {
    const ConditionalExpectation e = diagonal_expectation(2);
    Rng rng(kSeed);
    const CMat c = random_gaussian(rng, 2, 2);
    const CMat ec = e.apply(c);
    CHECK(spectral_norm(ec - c.diagonal().asDiagonal().toDenseMatrix()) <
          1e-12);
    // Idempotent, unital, bimodular over the diagonal.
    CHECK(spectral_norm(e.apply(ec) - ec) < 1e-12);
    CHECK(spectral_norm(e.apply(e.big().unit()) - e.big().unit()) < 1e-12);
    const CMat d = unit_matrix(2, 0, 0);
    CHECK(spectral_norm(e.apply(d * c) - d * e.apply(c)) < 1e-12);
    CHECK(verify_cp(e.as_cpmap()).cp);
}

TEST_CASE("validate: each defining property is checked") {
    const Algebra big = full_matrix_algebra(2);
    const Algebra small = diagonal_algebra(2);
    const Inclusion inc = Inclusion::make(big, small);

    // Range escaping the subalgebra.
    {
        std::vector<CMat> images;
        for (const CMat& b : big.basis()) images.push_back(b);  // identity map
        try {
            ConditionalExpectation::validate(inc, images);
            FAIL("expected RangeEscapesSubalgebra");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::RangeEscapesSubalgebra);
        }
    }
    // Not idempotent: halve the diagonal part.
    {
        std::vector<CMat> images;
        for (const CMat& b : big.basis())
            images.push_back(
                (0.5 * b.diagonal().asDiagonal().toDenseMatrix()).eval());
        try {
            ConditionalExpectation::validate(inc, images);
            FAIL("expected NotIdempotent");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::NotIdempotent);
        }
    }
    // Not bimodular: E(c) = c(0,0) I is idempotent, unital and CP but does
    // not commute with multiplication by non-scalar diagonals.
    {
        std::vector<CMat> images;
        for (const CMat& b : big.basis())
            images.push_back((b(0, 0) * CMat::Identity(2, 2)).eval());
        try {
            ConditionalExpectation::validate(inc, images);
            FAIL("expected NotBimodular");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::NotBimodular);
        }
    }
}

TEST_CASE("validate: a bimodular idempotent that is not positive is rejected") {
    // On M_2 with small = scalars: E(c) = (2 tr(c) - c(0,0) - c(1,1)) ... use
    // the weighted form E(c) = (w0 c00 + w1 c11) I with w0 + w1 = 1 but
    // w0 < 0, which is unital, idempotent, scalar-bimodular, yet not CP.
    const Algebra big = full_matrix_algebra(2);
    const Algebra small = Algebra::validate({CMat::Identity(2, 2)});
    const Inclusion inc = Inclusion::make(big, small);
    std::vector<CMat> images;
    for (const CMat& b : big.basis()) {
        const Cplx val = 2.0 * b(0, 0) - 1.0 * b(1, 1);
        images.push_back((val * CMat::Identity(2, 2)).eval());
    }
    try {
        ConditionalExpectation::validate(inc, images);
        FAIL("expected NotCp");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotCp);
    }
}

TEST_CASE("compose_cp: pi after an expectation is a CP map") {
    const ConditionalExpectation e = diagonal_expectation(2);
    const Representation pi = Representation::validate(
        e.small(), {CMat(e.small().basis()[0]), CMat(e.small().basis()[1])});
    const CPMap phi = compose_cp(pi, e);
    CHECK(phi.target_dim() == pi.space_dim());
    CHECK(verify_cp(phi).cp);
    Rng rng(kSeed + 1);
    const CMat c = random_gaussian(rng, 2, 2);
    CHECK(spectral_norm(phi.apply(c) - pi.apply(e.apply(c))) < 1e-10);
}

// ----------------------------------------------------------------------------
// ExpectationPair and the compatibility identity
// ----------------------------------------------------------------------------

TEST_CASE("gen_expectation_pair: compatible pairs satisfy the identity") {
    for (int k = 0; k < 4; ++k) {
        Rng rng(mix_seed(kSeed + 2, static_cast<std::uint64_t>(k)));
        const GeneratedExpectationPair g =
            gen_expectation_pair(rng, 3, 2, true);
        REQUIRE(g.compatible);
        const SmeExpectationVerdict v = verify_sme_expectations(g.pair);
        CHECK(v.pass);
        CHECK(v.max_residual < 1e-9);
    }
}

TEST_CASE("gen_expectation_pair: skewed pairs fail with honest residual") {
    for (int k = 0; k < 4; ++k) {
        Rng rng(mix_seed(kSeed + 3, static_cast<std::uint64_t>(k)));
        const GeneratedExpectationPair g =
            gen_expectation_pair(rng, 3, 2, false);
        REQUIRE_FALSE(g.compatible);
        const SmeExpectationVerdict v = verify_sme_expectations(g.pair);
        CHECK_FALSE(v.pass);
        CHECK(v.max_residual > 1e-3);
    }
}

TEST_CASE("ExpectationPair::make: structural requirements") {
    Rng rng(kSeed + 4);
    const GeneratedExpectationPair g = gen_expectation_pair(rng, 3, 2, true);
    // Rebuilding from its own parts succeeds.
    CHECK_NOTHROW(ExpectationPair::make(g.pair.e_left, g.pair.e_right,
                                        g.pair.y, g.pair.x_sub.basis()));
    // Generators outside y are rejected.
    std::vector<CMat> bad = {CMat::Ones(g.pair.y.rows(), g.pair.y.cols())};
    CHECK_THROWS_AS(ExpectationPair::make(g.pair.e_left, g.pair.e_right,
                                          g.pair.y, bad),
                    Error);
}

// ----------------------------------------------------------------------------
// expectation_pipeline
// ----------------------------------------------------------------------------

TEST_CASE("expectation_pipeline: all stages pass on compatible pairs") {
    for (int k = 0; k < 3; ++k) {
        Rng rng(mix_seed(kSeed + 5, static_cast<std::uint64_t>(k)));
        const GeneratedExpectationPair g =
            gen_expectation_pair(rng, 3, 2, true);
        const PipelineResult res = expectation_pipeline(g.pair, g.pi_b);
        CHECK(res.pass);
        REQUIRE(res.witness.has_value());
        CHECK(verify_bimodule_rep(res.witness->rep, g.pair.y).pass);
        // Stage names in execution order.
        REQUIRE(res.stages.size() == 7);
        CHECK(res.stages[0].name == "dilate_compression");
        CHECK(res.stages[1].name == "induce");
        CHECK(res.stages[2].name == "first_unitary");
        CHECK(res.stages[3].name == "second_unitary");
        CHECK(res.stages[4].name == "intertwiner");
        CHECK(res.stages[5].name == "transported_triple");
        CHECK(res.stages[6].name == "equivalence_witness");
        for (const PipelineStage& s : res.stages) {
            CHECK(s.pass);
            CHECK(s.residual < 1e-8);
        }
        // The intertwiner is unitary.
        const Index d = res.u.rows();
        CHECK(spectral_norm(res.u.adjoint() * res.u -
                            CMat::Identity(d, d)) < 1e-8);
    }
}

TEST_CASE("expectation_pipeline: incompatible pairs are refused upfront") {
    Rng rng(kSeed + 6);
    const GeneratedExpectationPair g = gen_expectation_pair(rng, 3, 2, false);
    try {
        expectation_pipeline(g.pair, g.pi_b);
        FAIL("expected StructureInvalid");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::StructureInvalid);
    }
}

// ----------------------------------------------------------------------------
// expectation_converse
// ----------------------------------------------------------------------------

TEST_CASE("expectation_converse: passes exactly on compatible pairs") {
    for (int k = 0; k < 3; ++k) {
        Rng rng(mix_seed(kSeed + 7, static_cast<std::uint64_t>(k)));
        const GeneratedExpectationPair good =
            gen_expectation_pair(rng, 3, 2, true);
        const ConverseVerdict v = expectation_converse(good.pair, good.pi_b);
        CHECK(v.pass);
        CHECK(v.isometry_pass);
        CHECK(v.compression_pass);
        CHECK(v.bimodule_pass);
    }
    for (int k = 0; k < 3; ++k) {
        Rng rng(mix_seed(kSeed + 8, static_cast<std::uint64_t>(k)));
        const GeneratedExpectationPair bad =
            gen_expectation_pair(rng, 3, 2, false);
        const ConverseVerdict v = expectation_converse(bad.pair, bad.pi_b);
        CHECK_FALSE(v.pass);
        // The isometric embedding exists regardless; compatibility failure
        // surfaces in the compression identity.
        CHECK(v.isometry_pass);
        CHECK_FALSE(v.compression_pass);
        CHECK(v.compression_residual > 1e-3);
    }
}

TEST_CASE("expectation_converse: unfaithful representations are rejected") {
    Rng rng(kSeed + 9);
    const GeneratedExpectationPair g = gen_expectation_pair(rng, 3, 2, true);
    const Algebra& b = g.pair.x_sub.right();
    // The zero-block representation kills part of B whenever B has more than
    // one block; build pi(b) = (value at a single diagonal coordinate) to be
    // unfaithful, or skip if B is simple and small.
    const BlockStructure bs = decompose(b);
    if (bs.blocks.size() < 2) return;  // need a kernel to test faithfulness
    // Project onto the first block only.
    std::vector<CMat> images;
    const Block& blk = bs.blocks[0];
    const Index n = blk.size;
    bool ok = true;
    for (const CMat& bb : b.basis()) {
        CMat img = CMat::Zero(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                img(i, j) = hs_inner(blk.unit(i, j), bb) /
                            static_cast<double>(blk.multiplicity);
        images.push_back(img);
    }
    if (!ok) return;
    const Representation pi_first = Representation::validate(b, images);
    try {
        expectation_converse(g.pair, pi_first);
        FAIL("expected NotFaithful");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotFaithful);
    }
}
