#pragma once

// ============================================================================
// Finite-dimensional concrete C*-algebras: unital *-closed subspaces of the
// N x N complex matrices, canonicalised to a Hilbert-Schmidt-orthonormal
// basis, together with their block (Wedderburn) decomposition.
// ============================================================================

#include <vector>

#include "morita/numerics.hpp"

namespace morita {

class Algebra {
public:
    /// Canonicalises a candidate generating family: spans are closed under
    /// products and adjoints (the closure is taken, Gram-Schmidt in input
    /// order), and the ambient identity is adjoined when missing.  With
    /// extend_to_ambient_unit = false a span not containing the ambient
    /// identity is rejected with NoUnit instead.
    static Algebra validate(const std::vector<CMat>& candidate,
                            const Tolerance& tol = {},
                            bool extend_to_ambient_unit = true);

    [[nodiscard]] Index ambient_dim() const { return ambient_; }
    [[nodiscard]] Index dim() const { return static_cast<Index>(basis_.size()); }

    /// Orthonormal (Hilbert-Schmidt) basis of the span.
    [[nodiscard]] const std::vector<CMat>& basis() const { return basis_; }

    [[nodiscard]] CMat unit() const { return CMat::Identity(ambient_, ambient_); }

    /// Coefficients of x in the canonical basis; throws NotInAlgebra when the
    /// least-squares residual exceeds tolerance.
    [[nodiscard]] CVec coords(const CMat& x) const;

    /// Residual of the orthogonal projection of x onto the span.
    [[nodiscard]] double membership_residual(const CMat& x) const;
    [[nodiscard]] bool contains(const CMat& x) const;

    /// Linear combination sum_i c_i basis_i.
    [[nodiscard]] CMat combine(const CVec& c) const;

    [[nodiscard]] const Tolerance& tolerance() const { return tol_; }

    /// Empty placeholder; the factory functions produce validated instances.
    Algebra() = default;

private:

    Index ambient_ = 0;
    Tolerance tol_;
    std::vector<CMat> basis_;
    CMat flat_;  // ambient^2 x dim, orthonormal columns vec(basis_i)
};

/// True when the two algebras act on the same ambient space and have equal
/// spans within tolerance.
bool same_span(const Algebra& a, const Algebra& b, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Block decomposition
// ----------------------------------------------------------------------------

/// One simple summand: an n x n matrix factor appearing with some ambient
/// multiplicity.  matrix_units holds the n^2 ambient images e_ij in row-major
/// (i, j) order; they satisfy e_ij e_kl = delta_jk e_il, e_ij^* = e_ji and
/// sum_i e_ii = central_projection.
struct Block {
    CMat central_projection;
    Index size = 0;          // n
    Index multiplicity = 0;  // ambient rank of each diagonal unit
    std::vector<CMat> matrix_units;

    [[nodiscard]] const CMat& unit(Index i, Index j) const {
        return matrix_units[static_cast<size_t>(i * size + j)];
    }
};

struct BlockStructure {
    std::vector<Block> blocks;

    [[nodiscard]] Index total_dim() const {
        Index d = 0;
        for (const Block& b : blocks) d += b.size * b.size;
        return d;
    }
};

/// Wedderburn decomposition of a validated algebra.  Deterministic given the
/// canonical basis; throws NumericalDegeneracy when eigenvalue clustering
/// cannot separate the blocks cleanly.
BlockStructure decompose(const Algebra& a, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Element positivity
// ----------------------------------------------------------------------------

/// Positivity of x as an element of a: membership is checked first
/// (NotInAlgebra), then ambient positive semidefiniteness, which coincides
/// with positivity in any concrete C*-algebra.
PsdVerdict is_positive_element(const Algebra& a, const CMat& x,
                               const Tolerance& tol = {});

}  // namespace morita
