#pragma once

// ============================================================================
// Representations of concrete algebras, bimodule representations, induced
// representations via Gram quotients, the strong-Morita-equivalence decision
// for representations, linking-algebra representations, the finite
// partial-isometry transport between the two corners, and stabilisation.
// ============================================================================

#include <cstdint>
#include <optional>
#include <vector>

#include "morita/bimodule.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Representation
// ----------------------------------------------------------------------------

/// Unital *-homomorphism into B(C^d), stored by its images on the canonical
/// basis of the algebra.
class Representation {
public:
    /// Checks multiplicativity, *-preservation and unitality on the basis.
    static Representation validate(Algebra algebra, std::vector<CMat> images,
                                   const Tolerance& tol = {});

    /// Internal constructor that skips checks; used for zero-dimensional
    /// dilation spaces which validate() rejects by design.
    static Representation unchecked(Algebra algebra, std::vector<CMat> images,
                                    Index space_dim);

    [[nodiscard]] const Algebra& algebra() const { return algebra_; }
    [[nodiscard]] Index space_dim() const { return space_dim_; }
    [[nodiscard]] const std::vector<CMat>& images() const { return images_; }

    /// Image of an arbitrary algebra element (NotInAlgebra if outside).
    [[nodiscard]] CMat apply(const CMat& a) const;

    /// Empty placeholder; the factory functions produce validated instances.
    Representation() = default;

private:

    Algebra algebra_;
    Index space_dim_ = 0;
    std::vector<CMat> images_;
};

struct MultiplicityVector {
    std::vector<Index> counts;
    bool operator==(const MultiplicityVector&) const = default;
};

/// Block multiplicities rank(pi(z_k)) / n_k with respect to decompose(algebra).
MultiplicityVector multiplicities(const Representation& r, const Tolerance& tol = {});

/// A unitary u with r2 = u r1(.) u^*, which exists iff the space dimensions
/// and multiplicity vectors agree; nullopt otherwise.  The two representations
/// must share their algebra span (AlgebraMismatch).
std::optional<CMat> unitary_equivalence(const Representation& r1,
                                        const Representation& r2,
                                        const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Bimodule representations
// ----------------------------------------------------------------------------

/// Triple (pi_left, pi_x, pi_right) representing an equivalence bimodule:
/// pi_x maps module elements to operators K -> H, stored on the bimodule
/// basis.
struct BimoduleRep {
    Representation pi_left;
    Representation pi_right;
    std::vector<CMat> x_images;

    [[nodiscard]] CMat apply_x(const Bimodule& x, const CMat& v) const;
};

/// Residuals of the three defining identities over basis elements:
///   (1) pi_x(v) pi_x(w)^* = pi_left(A<v, w>)
///   (2) pi_x(v)^* pi_x(w) = pi_right(<v, w>_B)
///   (3) pi_x(a v b)       = pi_left(a) pi_x(v) pi_right(b)
struct BimoduleRepVerdict {
    bool pass = false;
    double left_inner_residual = 0.0;
    double right_inner_residual = 0.0;
    double action_residual = 0.0;

    [[nodiscard]] double max_residual() const {
        return std::max({left_inner_residual, right_inner_residual, action_residual});
    }
};

BimoduleRepVerdict verify_bimodule_rep(const BimoduleRep& rep, const Bimodule& x,
                                       const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Witness constructors
// ----------------------------------------------------------------------------

/// Reflexivity: the trivial bimodule represented by pi itself.
BimoduleRep reflexivity_witness(const Representation& pi, const Bimodule& trivial,
                                const Tolerance& tol = {});

/// Symmetry: the dual witness pi_x~(z) = pi_x(z^*)^* over dual(x).
BimoduleRep dual_witness(const BimoduleRep& w, const Bimodule& x,
                         const Bimodule& x_dual, const Tolerance& tol = {});

/// Transitivity: product witness pi_{xy}(v w) = pi_x(v) pi_y(w) over
/// interior_tensor(x, y).
BimoduleRep tensor_witness(const BimoduleRep& wx, const Bimodule& x,
                           const BimoduleRep& wy, const Bimodule& y,
                           const Bimodule& xy, const Tolerance& tol = {});

/// Unitary equivalence as a special case of bimodule representation: the
/// witness for (pi1, pi2) over the trivial bimodule is pi_x(v) = pi1(v) u^*,
/// where pi2 = u pi1 u^*.
BimoduleRep unitary_witness(const Representation& pi1, const Representation& pi2,
                            const CMat& u, const Bimodule& trivial,
                            const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Induced representations
// ----------------------------------------------------------------------------

/// Rigged-space induction: the completion of X (x) K under
/// <v (x) xi, w (x) eta> = <xi, pi_right(<v, w>_B) eta> carries the induced
/// left representation; rep bundles (pi_induced, pi_x, pi_right) and always
/// passes verify_bimodule_rep.
struct Induced {
    BimoduleRep rep;
    GramQuotient gram;
};

Induced induce(const Bimodule& x, const Representation& pi_right,
               const Tolerance& tol = {});

/// Strong Morita equivalence of representations relative to x: induces
/// pi_right through x and searches for a unitary onto pi_left; on success the
/// transported triple is a verified witness.
std::optional<BimoduleRep> sme_representations(const Representation& pi_left,
                                               const Representation& pi_right,
                                               const Bimodule& x,
                                               const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Linking representations and corner transport
// ----------------------------------------------------------------------------

/// Assembles the block representation of the linking algebra on H (+) K from
/// a bimodule representation of x.
Representation linking_rep(const BimoduleRep& b, const Bimodule& x,
                           const LinkingAlgebra& l, const Tolerance& tol = {});

/// The corner row-space p L as an A - L equivalence bimodule, with the
/// associated witness built from a bimodule representation and its linking
/// representation.
Bimodule corner_bimodule(const LinkingAlgebra& l, const Tolerance& tol = {});
BimoduleRep corner_witness(const LinkingAlgebra& l, const Bimodule& x,
                           const BimoduleRep& b, const Representation& rho,
                           const Tolerance& tol = {});

/// Per-block ambient ranks of the two corner projections in the linking
/// algebra; transport is feasible iff they agree blockwise.
struct BlockRankReport {
    std::vector<Index> p_ranks, q_ranks;

    [[nodiscard]] bool feasible() const { return p_ranks == q_ranks; }
};

/// Transport data: w is a partial isometry in the linking algebra with
/// w^* w = p and w w^* = q, theta(a) = w a w^* is the induced isomorphism
/// A -> B, and w_tilde = rho(w)|_H : H -> K intertwines pi_A with pi_B o
/// theta^{-1}.
struct CornerTransport {
    CMat w;
    std::vector<CMat> theta_images;  // aligned with l.left basis
    CMat w_tilde;

    [[nodiscard]] CMat theta_apply(const Algebra& from, const CMat& a) const;
};

struct BgrResult {
    BlockRankReport ranks;
    std::optional<CornerTransport> transport;
};

/// rho must come from linking_rep so the corner projections act as the exact
/// block splitting of H (+) K.
BgrResult bgr_transport(const LinkingAlgebra& l, const Representation& rho,
                        std::uint64_t seed, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Stabilisation
// ----------------------------------------------------------------------------

/// pi (x) id_m on C^m (x) H together with the standard equivalence bimodule
/// X = M_m(A) (e_11 (x) 1) between M_m(A) and A and its witness; the witness
/// always passes verify_bimodule_rep, and embed_isometry (H into the first
/// block) satisfies embed^* embed = id_H.
struct Stabilized {
    Bimodule bimodule;
    Representation pi_s;
    BimoduleRep witness;
    CMat embed_isometry;
};

Stabilized stabilize_rep(const Representation& pi, Index m, const Tolerance& tol = {});

}  // namespace morita
