// ============================================================================
// Numerical kernel tests: hand-computed fixtures first, then seeded property
// checks for the eigensolver, polar factor and Gram quotient.
// ============================================================================

#include <doctest.h>

#include <cmath>

#include "morita/numerics.hpp"
#include "morita/random.hpp"

using namespace morita;

namespace {

constexpr std::uint64_t kSeed = 20260814;

CMat pauli_x() {
    CMat m(2, 2);
    m << Cplx(0, 0), Cplx(1, 0), Cplx(1, 0), Cplx(0, 0);
    return m;
}

}  // namespace

// ----------------------------------------------------------------------------
// hermitian_eig
// ----------------------------------------------------------------------------

TEST_CASE("hermitian_eig: pauli-x has eigenvalues 1 and -1, descending") {
    const EigResult e = hermitian_eig(pauli_x());
    REQUIRE(e.eigenvalues.size() == 2);
    CHECK(e.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.eigenvalues(1) == doctest::Approx(-1.0).epsilon(1e-12));
    const CMat rebuilt =
        e.u * e.eigenvalues.asDiagonal().toDenseMatrix().cast<Cplx>() *
        e.u.adjoint();
    CHECK(spectral_norm(rebuilt - pauli_x()) < 1e-12);
}

TEST_CASE("hermitian_eig: reconstruction and unitarity on random hermitians") {
    Rng rng(kSeed);
    for (int k = 0; k < 20; ++k) {
        const Index n = 1 + static_cast<Index>(k % 6);
        const CMat m = random_hermitian(rng, n);
        const EigResult e = hermitian_eig(m);
        const CMat d = e.eigenvalues.asDiagonal().toDenseMatrix().cast<Cplx>();
        CHECK(spectral_norm(e.u * d * e.u.adjoint() - m) < 1e-10);
        CHECK(spectral_norm(e.u.adjoint() * e.u - CMat::Identity(n, n)) < 1e-12);
        for (Index i = 0; i + 1 < n; ++i)
            CHECK(e.eigenvalues(i) >= e.eigenvalues(i + 1));
    }
}

TEST_CASE("hermitian_eig: rejects non-hermitian and non-finite input") {
    CMat m(2, 2);
    m << Cplx(0, 0), Cplx(1, 0), Cplx(0, 0), Cplx(0, 0);
    CHECK_THROWS_WITH_AS(hermitian_eig(m), doctest::Contains("NonHermitian"),
                         Error);

    CMat bad = pauli_x();
    bad(0, 0) = Cplx(std::nan(""), 0);
    try {
        hermitian_eig(bad);
        FAIL("expected NonFinite");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NonFinite);
    }
}

// ----------------------------------------------------------------------------
// is_psd
// ----------------------------------------------------------------------------

TEST_CASE("is_psd: verdicts and witness eigenvalue") {
    CMat g(2, 2);
    g << Cplx(2, 0), Cplx(1, 0), Cplx(1, 0), Cplx(1, 0);
    const PsdVerdict yes = is_psd(g);
    CHECK(yes.psd);

    CMat m = pauli_x();  // eigenvalues 1, -1
    const PsdVerdict no = is_psd(m);
    CHECK_FALSE(no.psd);
    CHECK(no.min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));

    // A tiny negative dip within tolerance still counts as PSD.
    CMat dip = CMat::Identity(3, 3);
    dip(2, 2) = Cplx(-1e-13, 0);
    CHECK(is_psd(dip).psd);
}

TEST_CASE("is_psd: gram matrices of random frames are PSD") {
    Rng rng(kSeed + 1);
    for (int k = 0; k < 10; ++k) {
        const CMat f = random_gaussian(rng, 4, 6);
        CHECK(is_psd(f.adjoint() * f).psd);
    }
}

// ----------------------------------------------------------------------------
// polar_partial_isometry / numeric_rank
// ----------------------------------------------------------------------------

TEST_CASE("polar: the column (3,4)^T maps to (0.6,0.8)^T") {
    CMat m(2, 1);
    m << Cplx(3, 0), Cplx(4, 0);
    const CMat w = polar_partial_isometry(m);
    REQUIRE(w.rows() == 2);
    REQUIRE(w.cols() == 1);
    CHECK(w(0, 0).real() == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(w(1, 0).real() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(w(0, 0).imag()) < 1e-14);
}

TEST_CASE("polar: w^*w is the projection onto the row space") {
    Rng rng(kSeed + 2);
    for (int k = 0; k < 12; ++k) {
        const Index rows = 2 + (k % 3);
        const Index cols = 2 + ((k + 1) % 3);
        // Force rank deficiency half the time via an outer product.
        CMat m;
        if (k % 2 == 0) {
            m = random_gaussian(rng, rows, 1) * random_gaussian(rng, 1, cols);
        } else {
            m = random_gaussian(rng, rows, cols);
        }
        const CMat w = polar_partial_isometry(m);
        const CMat p = w.adjoint() * w;
        // Projection: idempotent, hermitian, same rank as m.
        CHECK(spectral_norm(p * p - p) < 1e-10);
        CHECK(spectral_norm(p - p.adjoint()) < 1e-12);
        CHECK(numeric_rank(w) == numeric_rank(m));
        // m = w (m^* m)^{1/2}
        const EigResult e = hermitian_eig((m.adjoint() * m));
        const CMat sqrt_abs =
            e.u *
            e.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal().toDenseMatrix()
                .cast<Cplx>() *
            e.u.adjoint();
        CHECK(spectral_norm(w * sqrt_abs - m) < 1e-9);
    }
}

TEST_CASE("numeric_rank: exact small cases") {
    CHECK(numeric_rank(CMat::Identity(3, 3)) == 3);
    CHECK(numeric_rank(CMat::Zero(3, 3)) == 0);
    CMat m(2, 2);
    m << Cplx(1, 0), Cplx(2, 0), Cplx(2, 0), Cplx(4, 0);
    CHECK(numeric_rank(m) == 1);
    CHECK(numeric_rank(CMat(0, 0)) == 0);
}

// ----------------------------------------------------------------------------
// gram_quotient
// ----------------------------------------------------------------------------

TEST_CASE("gram_quotient: full-rank 2x2 gram keeps both classes") {
    CMat g(2, 2);
    g << Cplx(2, 0), Cplx(1, 0), Cplx(1, 0), Cplx(1, 0);
    const GramQuotient q = gram_quotient(g);
    CHECK(q.input_dim == 2);
    CHECK(q.quotient_dim == 2);
    // project * g * project^* = I
    CHECK(spectral_norm(q.project * g * q.project.adjoint() -
                        CMat::Identity(2, 2)) < 1e-12);
    // coords is isometric for the form g: (coords u)^*(coords v) = u^* g v.
    CHECK(spectral_norm(q.coords.adjoint() * q.coords - g) < 1e-12);
    // lift is a right inverse of coords.
    CHECK(spectral_norm(q.coords * q.lift() - CMat::Identity(2, 2)) < 1e-12);
}

TEST_CASE("gram_quotient: null directions are quotiented away") {
    // Formal vectors e1, e2 with e2 = e1 in the completion: g = all-ones.
    CMat g = CMat::Ones(2, 2);
    const GramQuotient q = gram_quotient(g);
    CHECK(q.quotient_dim == 1);
    // Both formal generators map to the same unit-norm class.
    const CVec c1 = q.coords.col(0);
    const CVec c2 = q.coords.col(1);
    CHECK((c1 - c2).norm() < 1e-12);
    CHECK(c1.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gram_quotient: seeded frames, isometry and compression") {
    Rng rng(kSeed + 3);
    for (int k = 0; k < 12; ++k) {
        const Index dim = 3 + (k % 3);
        const Index count = dim + 2;  // redundant spanning family
        const CMat frame = random_gaussian(rng, dim, count);
        const CMat g = frame.adjoint() * frame;
        const GramQuotient q = gram_quotient(g);
        CHECK(q.input_dim == count);
        CHECK(q.quotient_dim == numeric_rank(frame));
        CHECK(spectral_norm(q.coords.adjoint() * q.coords - g) < 1e-8);
        CHECK(spectral_norm(q.project * g * q.project.adjoint() -
                            CMat::Identity(q.quotient_dim, q.quotient_dim)) <
              1e-10);

        // An operator acting on the completion: multiplication by a unitary
        // of the concrete span commutes with taking classes.
        const CMat u = random_unitary(rng, dim);
        // Formal operator on coefficients: frame * formal = u * frame.
        const CMat formal =
            frame.completeOrthogonalDecomposition().solve(u * frame);
        const CMat compressed = q.compress(formal);
        CHECK(spectral_norm(compressed.adjoint() * compressed -
                            CMat::Identity(q.quotient_dim, q.quotient_dim)) <
              1e-8);
        // compress respects composition against coords: coords(Lv) = L~ coords(v).
        CHECK(spectral_norm(q.coords * formal - compressed * q.coords) < 1e-8);
    }
}

TEST_CASE("gram_quotient: rejects indefinite gram matrices") {
    try {
        gram_quotient(pauli_x());
        FAIL("expected NotPsd");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NotPsd);
    }
}

// ----------------------------------------------------------------------------
// Small helpers from core
// ----------------------------------------------------------------------------

TEST_CASE("kron: indexing convention and mixed product") {
    CMat a(2, 2), b(2, 2);
    a << Cplx(1, 0), Cplx(2, 0), Cplx(3, 0), Cplx(4, 0);
    b << Cplx(0, 1), Cplx(0, 0), Cplx(0, 0), Cplx(0, 1);
    const CMat k = kron(a, b);
    REQUIRE(k.rows() == 4);
    // (a ox b)[(i,k),(j,l)] = a_ij b_kl with the left factor major.
    CHECK(k(0, 0) == a(0, 0) * b(0, 0));
    CHECK(k(1, 3) == a(0, 1) * b(1, 1));
    CHECK(k(2, 0) == a(1, 0) * b(0, 0));

    Rng rng(kSeed + 4);
    const CMat x = random_gaussian(rng, 2, 3);
    const CMat y = random_gaussian(rng, 3, 2);
    const CMat z = random_gaussian(rng, 2, 2);
    const CMat w = random_gaussian(rng, 2, 2);
    CHECK(spectral_norm(kron(x * y, z * w) - kron(x, z) * kron(y, w)) < 1e-12);
}

TEST_CASE("vec/unvec: inverse pair, column-major") {
    CMat m(2, 3);
    m << Cplx(1, 0), Cplx(3, 0), Cplx(5, 0), Cplx(2, 0), Cplx(4, 0),
        Cplx(6, 0);
    const CVec v = vec(m);
    CHECK(v(0) == Cplx(1, 0));
    CHECK(v(1) == Cplx(2, 0));  // column-major: next row first
    CHECK(v(2) == Cplx(3, 0));
    CHECK(spectral_norm(unvec(v, 2, 3) - m) == 0.0);
}

TEST_CASE("map_through: recovers a linear map from spanning data") {
    Rng rng(kSeed + 5);
    const CMat t = random_gaussian(rng, 3, 3);
    const CMat from = random_gaussian(rng, 3, 7);
    const CMat recovered = map_through(from, t * from);
    CHECK(spectral_norm(recovered - t) < 1e-10);
}

TEST_CASE("hs_inner: conjugate-linear in the first slot") {
    CMat a = CMat::Identity(2, 2) * Cplx(0, 1);
    CMat b = CMat::Identity(2, 2);
    // tr(a^* b) = tr(-i I) = -2i.
    const Cplx v = hs_inner(a, b);
    CHECK(std::abs(v - Cplx(0, -2)) < 1e-14);
}

TEST_CASE("spectral_norm: known values") {
    CHECK(spectral_norm(CMat::Identity(3, 3)) == doctest::Approx(1.0));
    CMat m(2, 1);
    m << Cplx(3, 0), Cplx(4, 0);
    CHECK(spectral_norm(m) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(spectral_norm(CMat(0, 0)) == 0.0);
}

TEST_CASE("mix_seed: distinct instances get distinct streams") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(7, 3) == mix_seed(7, 3));
}
