#pragma once

// ============================================================================
// Numerical kernel: Hermitian eigendecomposition, PSD certification, polar
// partial isometries and Gram-matrix quotients.  Everything downstream (GNS
// spaces, Stinespring dilations, induced representations) is built on the
// four operations in this header.
// ============================================================================

#include "morita/core.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Spectral decomposition
// ----------------------------------------------------------------------------

/// Eigenvalues sorted descending with a matching unitary: m = u diag(l) u^*.
struct EigResult {
    RVec eigenvalues;
    CMat u;
};

/// Requires ||m - m^*|| <= tol at scale ||m||, otherwise throws NonHermitian.
/// Non-finite entries throw NonFinite.
EigResult hermitian_eig(const CMat& m, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Positivity
// ----------------------------------------------------------------------------

/// Verdict plus the witness eigenvalue that decided it.
struct PsdVerdict {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

/// True iff the minimal eigenvalue is >= -(tol.rel * max(1, ||m||) + tol.abs).
PsdVerdict is_psd(const CMat& m, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Polar partial isometry
// ----------------------------------------------------------------------------

/// The unique partial isometry w with m = w (m^* m)^{1/2}.  Singular values
/// below tol.rel * sigma_max + tol.abs count as zero, so w^* w is the
/// projection onto the numerical row space of m.
CMat polar_partial_isometry(const CMat& m, const Tolerance& tol = {});

/// Rank by singular-value cutoff at max(tol.rel * sigma_max, tol.abs).
[[nodiscard]] Index numeric_rank(const CMat& m, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Gram quotient
// ----------------------------------------------------------------------------

/// Completion of a formal span with Gram matrix g: the quotient by null
/// vectors equipped with an orthonormal basis.
///
///   project : quotient_dim x input_dim with project * g * project^* = I.
///   coords  : project * g; maps a formal coefficient vector to the
///             coordinates of its class, isometrically:
///             (coords u)^* (coords v) = u^* g v  up to the rank cutoff.
///   lift    : project^*; right inverse of coords (coords * lift = I).
///
/// An operator L on formal coefficients that descends to the quotient has
/// matrix compress(L) = coords * L * lift there.
struct GramQuotient {
    Index input_dim = 0;
    Index quotient_dim = 0;
    CMat project;
    CMat coords;

    [[nodiscard]] CMat lift() const { return project.adjoint(); }
    [[nodiscard]] CMat compress(const CMat& formal_op) const {
        return coords * formal_op * lift();
    }
};

/// g must be Hermitian PSD within tolerance (NotPsd otherwise).  The rank
/// cutoff keeps eigenvalues above max(tol.rel * lambda_max, tol.abs).
GramQuotient gram_quotient(const CMat& g, const Tolerance& tol = {});

}  // namespace morita
