#pragma once

// ============================================================================
// Concrete equivalence bimodules.  An A-B bimodule lives inside the p x q
// complex matrices (p, q the ambient dimensions of A and B); the actions are
// matrix products a x b and the two inner products are
//
//     A<x, y> = x y^*          (lands in A, linear in x)
//     <x, y>_B = x^* y         (lands in B, conjugate-linear in x)
//
// so compatibility A<x,y> z = x <y,z>_B is matrix associativity.  Equivalence
// means both inner products span their full algebra.
// ============================================================================

#include <vector>

#include "morita/algebra.hpp"

namespace morita {

class Bimodule {
public:
    /// Canonicalises a candidate spanning family: closed under both actions
    /// (the closure is taken), inner products land in and span both algebras
    /// (NotFull otherwise), basis Gram-Schmidt orthonormalised in input order.
    static Bimodule verify(Algebra left, Algebra right, const std::vector<CMat>& basis,
                           const Tolerance& tol = {});

    [[nodiscard]] const Algebra& left() const { return left_; }
    [[nodiscard]] const Algebra& right() const { return right_; }
    [[nodiscard]] Index rows() const { return left_.ambient_dim(); }
    [[nodiscard]] Index cols() const { return right_.ambient_dim(); }
    [[nodiscard]] Index dim() const { return static_cast<Index>(basis_.size()); }
    [[nodiscard]] const std::vector<CMat>& basis() const { return basis_; }

    [[nodiscard]] CVec coords(const CMat& x) const;
    [[nodiscard]] double membership_residual(const CMat& x) const;
    [[nodiscard]] bool contains(const CMat& x) const;
    [[nodiscard]] CMat combine(const CVec& c) const;

    [[nodiscard]] const Tolerance& tolerance() const { return tol_; }

    /// Empty placeholder; the factory functions produce validated instances.
    Bimodule() = default;

private:

    Algebra left_, right_;
    Tolerance tol_;
    std::vector<CMat> basis_;
    CMat flat_;
};

/// The trivial self-equivalence A as an A-A bimodule.
Bimodule trivial_bimodule(const Algebra& a, const Tolerance& tol = {});

/// Dual bimodule: adjoints with the two algebras swapped.  The element map
/// x -> x^* is conjugate-linear and satisfies B<x~, y~> = <x, y>_B and
/// <x~, y~>_A = A<x, y>.
Bimodule dual(const Bimodule& x, const Tolerance& tol = {});

/// Interior tensor product over the shared middle algebra: the span of the
/// matrix products { x y }.  Requires x.right and y.left to agree as spans
/// (AlgebraMismatch).
Bimodule interior_tensor(const Bimodule& x, const Bimodule& y,
                         const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Linking algebra
// ----------------------------------------------------------------------------

/// The block algebra [[A, X], [X^*, B]] inside the (p+q) x (p+q) matrices,
/// together with the corner projections.  p_proj + q_proj equals the unit,
/// the corners recover the two algebras, and both corner ideals are full.
struct LinkingAlgebra {
    Algebra algebra;
    CMat p_proj, q_proj;
    Index p_dim = 0, q_dim = 0;
    Algebra left, right;  // copies of the corner algebras

    [[nodiscard]] CMat embed_left(const CMat& a) const;
    [[nodiscard]] CMat embed_right(const CMat& b) const;
    [[nodiscard]] CMat embed_module(const CMat& x) const;
};

LinkingAlgebra linking(const Bimodule& x, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Frames
// ----------------------------------------------------------------------------

/// Finite Parseval-type module frame: x = sum_i A<x, u_i> u_i for every
/// x in the bimodule.
struct Frame {
    std::vector<CMat> vectors;

    [[nodiscard]] Index size() const { return static_cast<Index>(vectors.size()); }
};

/// Maximum reconstruction defect of the frame over the bimodule basis.
double frame_defect(const Bimodule& x, const Frame& frame);

/// Normalises the bimodule basis into a frame: with T = sum_j v_j^* v_j
/// (positive and invertible by fullness), u_j = v_j T^{-1/2} reconstructs
/// exactly.  Throws FrameFailure when T is numerically singular.
Frame left_basis(const Bimodule& x, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Amplifications
// ----------------------------------------------------------------------------

/// Row amplification X^n: 1 x n rows over X as an A - M_n(B) bimodule,
/// concretely p x (n q) matrices with block-column entries from X.
Bimodule amplify_rows(const Bimodule& x, Index n, const Tolerance& tol = {});

/// Square amplification M_m(X): m x m matrices over X as an
/// M_m(A) - M_m(B) bimodule, concretely (m p) x (m q) block matrices.
Bimodule amplify_square(const Bimodule& x, Index m, const Tolerance& tol = {});

}  // namespace morita
