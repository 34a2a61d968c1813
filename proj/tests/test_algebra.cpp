// ============================================================================
// Algebra tests: validation/closure, canonical bases, Wedderburn block
// decomposition and element positivity.
// ============================================================================

#include <doctest.h>

#include <algorithm>
#include <vector>

#include "morita/algebra.hpp"
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

}  // namespace

// ----------------------------------------------------------------------------
// validate
// ----------------------------------------------------------------------------

TEST_CASE("validate: {e11, e12} closes to the full 2x2 algebra") {
    // e12^* = e21 and e21 e12 = e22, so the *-algebra generated is all of M_2.
    const Algebra a =
        Algebra::validate({unit_matrix(2, 0, 0), unit_matrix(2, 0, 1)});
    CHECK(a.ambient_dim() == 2);
    CHECK(a.dim() == 4);
}

TEST_CASE("validate: basis is Hilbert-Schmidt orthonormal and unital") {
    const Algebra a = Algebra::validate({unit_matrix(3, 0, 1)});
    for (Index i = 0; i < a.dim(); ++i) {
        for (Index j = 0; j < a.dim(); ++j) {
            const Cplx g = hs_inner(a.basis()[static_cast<size_t>(i)],
                                    a.basis()[static_cast<size_t>(j)]);
            CHECK(std::abs(g - (i == j ? Cplx(1, 0) : Cplx(0, 0))) < 1e-12);
        }
    }
    CHECK(a.contains(a.unit()));
}

TEST_CASE("validate: span without the unit is rejected when not extending") {
    // span{e11} inside 2x2 does not contain the ambient identity.
    CHECK_NOTHROW(Algebra::validate({unit_matrix(2, 0, 0)}));  // unit adjoined
    try {
        Algebra::validate({unit_matrix(2, 0, 0)}, Tolerance{}, false);
        FAIL("expected NoUnit");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NoUnit);
    }
}

TEST_CASE("validate: rejects non-finite and shape-mismatched input") {
    CMat bad = unit_matrix(2, 0, 0);
    bad(1, 1) = Cplx(std::nan(""), 0);
    CHECK_THROWS_AS(Algebra::validate({bad}), Error);

    CHECK_THROWS_AS(Algebra::validate({unit_matrix(2, 0, 0), CMat::Zero(3, 3)}),
                    Error);
    CHECK_THROWS_AS(Algebra::validate({}), Error);
    CHECK_THROWS_AS(Algebra::validate({CMat::Zero(2, 3)}), Error);
}

TEST_CASE("coords/combine: inverse pair on the span") {
    Rng rng(kSeed);
    const Algebra a = full_matrix_algebra(3);
    const CMat x = random_gaussian(rng, 3, 3);
    const CVec c = a.coords(x);
    CHECK(spectral_norm(a.combine(c) - x) < 1e-12);

    // A matrix outside the span of the diagonal algebra is rejected.
    const Algebra d = diagonal_algebra(2);
    try {
        [[maybe_unused]] const CVec cc = d.coords(unit_matrix(2, 0, 1));
        FAIL("expected NotInAlgebra");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotInAlgebra);
    }
    CHECK(d.membership_residual(unit_matrix(2, 0, 1)) >
          d.membership_residual(unit_matrix(2, 0, 0)));
}

TEST_CASE("same_span: detects equality regardless of generating family") {
    const Algebra a = full_matrix_algebra(2);
    const Algebra b =
        Algebra::validate({unit_matrix(2, 0, 0), unit_matrix(2, 0, 1)});
    CHECK(same_span(a, b));
    CHECK_FALSE(same_span(a, diagonal_algebra(2)));
}

// ----------------------------------------------------------------------------
// decompose
// ----------------------------------------------------------------------------

TEST_CASE("decompose: full matrix algebra is one block") {
    const Algebra a = full_matrix_algebra(3);
    const BlockStructure bs = decompose(a);
    REQUIRE(bs.blocks.size() == 1);
    CHECK(bs.blocks[0].size == 3);
    CHECK(bs.blocks[0].multiplicity == 1);
    CHECK(bs.total_dim() == a.dim());
}

TEST_CASE("decompose: diagonal algebra splits into scalar blocks") {
    const BlockStructure bs = decompose(diagonal_algebra(3));
    REQUIRE(bs.blocks.size() == 3);
    for (const Block& b : bs.blocks) {
        CHECK(b.size == 1);
        CHECK(b.multiplicity == 1);
    }
}

TEST_CASE("decompose: a (+) a embedding has multiplicity two") {
    // pi(a) = diag(a, a) in M_4: one 2x2 block seen twice.
    std::vector<CMat> gens;
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            CMat g = CMat::Zero(4, 4);
            g.block(0, 0, 2, 2) = unit_matrix(2, i, j);
            g.block(2, 2, 2, 2) = unit_matrix(2, i, j);
            gens.push_back(g);
        }
    const Algebra a = Algebra::validate(gens);
    CHECK(a.dim() == 4);
    const BlockStructure bs = decompose(a);
    REQUIRE(bs.blocks.size() == 1);
    CHECK(bs.blocks[0].size == 2);
    CHECK(bs.blocks[0].multiplicity == 2);
}

TEST_CASE("decompose: matrix unit relations hold in every block") {
    Rng rng(kSeed + 1);
    // M_2 (+) M_1 conjugated by a random unitary.
    std::vector<CMat> gens;
    const CMat u = random_unitary(rng, 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            CMat g = CMat::Zero(3, 3);
            g.block(0, 0, 2, 2) = unit_matrix(2, i, j);
            gens.push_back(u * g * u.adjoint());
        }
    {
        CMat g = CMat::Zero(3, 3);
        g(2, 2) = Cplx(1, 0);
        gens.push_back(u * g * u.adjoint());
    }
    const Algebra a = Algebra::validate(gens);
    const BlockStructure bs = decompose(a);
    REQUIRE(bs.blocks.size() == 2);
    // Sorted by size descending.
    CHECK(bs.blocks[0].size == 2);
    CHECK(bs.blocks[1].size == 1);

    for (const Block& blk : bs.blocks) {
        const Index n = blk.size;
        // e_ij e_kl = delta_jk e_il
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                for (Index k = 0; k < n; ++k)
                    for (Index l = 0; l < n; ++l) {
                        const CMat prod = blk.unit(i, j) * blk.unit(k, l);
                        const CMat expect =
                            (j == k) ? blk.unit(i, l)
                                     : CMat::Zero(3, 3).eval();
                        CHECK(spectral_norm(prod - expect) < 1e-9);
                    }
        // e_ij^* = e_ji
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                CHECK(spectral_norm(blk.unit(i, j).adjoint() - blk.unit(j, i)) <
                      1e-9);
        // diagonal units sum to the central projection
        CMat diag_sum = CMat::Zero(3, 3);
        for (Index i = 0; i < n; ++i) diag_sum += blk.unit(i, i);
        CHECK(spectral_norm(diag_sum - blk.central_projection) < 1e-9);
        // units live in the algebra
        for (const CMat& e : blk.matrix_units)
            CHECK(a.membership_residual(e) < 1e-9);
    }
    // Central projections are orthogonal and sum to the identity.
    CMat central_sum = CMat::Zero(3, 3);
    for (const Block& blk : bs.blocks) central_sum += blk.central_projection;
    CHECK(spectral_norm(central_sum - a.unit()) < 1e-9);
}

TEST_CASE("decompose: seeded random conjugated sums reproduce their shape") {
    Rng rng(kSeed + 2);
    for (int trial = 0; trial < 8; ++trial) {
        // Random shape: sizes n_k with multiplicities m_k.
        std::vector<std::pair<Index, Index>> shape;
        Index ambient = 0;
        const int nblocks = 1 + static_cast<int>(rng() % 3);
        for (int b = 0; b < nblocks && ambient < 6; ++b) {
            const Index n = 1 + static_cast<Index>(rng() % 2);
            const Index m = 1 + static_cast<Index>(rng() % 2);
            shape.emplace_back(n, m);
            ambient += n * m;
        }
        const CMat u = random_unitary(rng, ambient);
        std::vector<CMat> gens;
        Index off = 0;
        for (auto [n, m] : shape) {
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j) {
                    CMat g = CMat::Zero(ambient, ambient);
                    g.block(off, off, n * m, n * m) =
                        kron(unit_matrix(n, i, j), CMat::Identity(m, m));
                    gens.push_back(u * g * u.adjoint());
                }
            off += n * m;
        }
        const Algebra a = Algebra::validate(gens);
        const BlockStructure bs = decompose(a);
        REQUIRE(bs.blocks.size() == shape.size());
        std::vector<std::pair<Index, Index>> found;
        for (const Block& blk : bs.blocks)
            found.emplace_back(blk.size, blk.multiplicity);
        std::sort(shape.begin(), shape.end());
        std::sort(found.begin(), found.end());
        CHECK(shape == found);
    }
}

// ----------------------------------------------------------------------------
// is_positive_element
// ----------------------------------------------------------------------------

TEST_CASE("is_positive_element: membership first, then PSD") {
    const Algebra d = diagonal_algebra(2);
    CMat pos = CMat::Zero(2, 2);
    pos(0, 0) = Cplx(2, 0);
    pos(1, 1) = Cplx(3, 0);
    CHECK(is_positive_element(d, pos).psd);

    CMat neg = pos;
    neg(1, 1) = Cplx(-1, 0);
    const PsdVerdict v = is_positive_element(d, neg);
    CHECK_FALSE(v.psd);
    CHECK(v.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-9));

    try {
        is_positive_element(d, unit_matrix(2, 0, 1));
        FAIL("expected NotInAlgebra");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotInAlgebra);
    }
}

TEST_CASE("is_positive_element: x^* x is positive for random x in M_n") {
    Rng rng(kSeed + 3);
    const Algebra a = full_matrix_algebra(3);
    for (int k = 0; k < 8; ++k) {
        const CMat x = random_gaussian(rng, 3, 3);
        CHECK(is_positive_element(a, x.adjoint() * x).psd);
    }
}
