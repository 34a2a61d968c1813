#pragma once

// ============================================================================
// Completely positive maps into concrete operator spaces: Choi certification,
// minimal Stinespring dilation through a Gram quotient, uniqueness of the
// dilation, strong Morita equivalence of CP maps, the associated CP map on
// the linking algebra, transport along a corner isomorphism, and
// stabilisation by a matrix factor.
// ============================================================================

#include <optional>
#include <vector>

#include "morita/representation.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// CP maps
// ----------------------------------------------------------------------------

/// Linear Hermitian map phi : source -> M_h, stored by its images on the
/// canonical basis of the source.  Complete positivity is certified
/// separately by verify_cp.
class CPMap {
public:
    static CPMap make(Algebra source, Index target_dim, std::vector<CMat> images,
                      const Tolerance& tol = {});

    [[nodiscard]] const Algebra& source() const { return source_; }
    [[nodiscard]] Index target_dim() const { return target_dim_; }
    [[nodiscard]] const std::vector<CMat>& images() const { return images_; }

    [[nodiscard]] CMat apply(const CMat& a) const;
    [[nodiscard]] CMat unit_image() const;
    /// Map norm; for CP maps this is attained at the unit.
    [[nodiscard]] double norm() const;

    /// Empty placeholder; the factory functions produce validated instances.
    CPMap() = default;

private:

    Algebra source_;
    Index target_dim_ = 0;
    std::vector<CMat> images_;
};

/// Per-factor Choi matrices [phi(e^k_ij)]_{ij}; the map is completely
/// positive iff each of them is PSD.
struct ChoiCertificate {
    bool cp = false;
    double min_eigenvalue = 0.0;
    std::vector<CMat> choi_blocks;
};

ChoiCertificate verify_cp(const CPMap& phi, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Minimal Stinespring dilation
// ----------------------------------------------------------------------------

/// phi(a) = v^* pi(a) v with pi(source) v C^h spanning the whole dilation
/// space.  gram and basis_order are populated only by minimal_stinespring
/// (assembled triples leave them empty); gram.coords gives the dilation-space
/// coordinates of the formal generators a_i (x) xi_k in basis-order-major,
/// target-index-minor layout.
struct StinespringTriple {
    Representation pi;
    CMat v;
    Index dilation_dim = 0;
    GramQuotient gram;
    std::vector<Index> basis_order;
};

/// Residuals of the triple invariants for a given map.
struct DilationVerdict {
    bool pass = false;
    double dilation_residual = 0.0;  // max over basis of ||phi(a) - v* pi(a) v||
    double norm_residual = 0.0;      // | ||v||^2 - ||phi(1)|| |
    Index minimality_rank = 0;       // rank of [pi(a_1)v ... pi(a_n)v]
    bool minimal = false;
};

DilationVerdict verify_stinespring(const StinespringTriple& t, const CPMap& phi,
                                   const Tolerance& tol = {});

/// GNS-style dilation: quotient of the formal span {a_i (x) xi_k} under the
/// Gram form phi(a_i^* a_j)_{kl}.  The zero map yields dilation_dim 0.
/// Throws NotCp when the Gram form is not PSD.
StinespringTriple minimal_stinespring(const CPMap& phi, const Tolerance& tol = {});

/// Same construction with the formal generators taken in the given order of
/// source basis indices; the resulting triple dilates the same map through a
/// different orthonormal basis.
StinespringTriple minimal_stinespring(const CPMap& phi,
                                      const std::vector<Index>& basis_order,
                                      const Tolerance& tol = {});

/// The unitary U with U v1 = v2 and U pi1(a) U^* = pi2(a), built by matching
/// the spanning vectors pi(a)v xi.  Throws NotSameMap when the triples do not
/// dilate one common map.
CMat stinespring_uniqueness(const StinespringTriple& t1, const StinespringTriple& t2,
                            const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Strong Morita equivalence of CP maps
// ----------------------------------------------------------------------------

struct CpSmeWitness {
    StinespringTriple phi_triple;
    StinespringTriple psi_triple;
    BimoduleRep rep;
};

/// Dilates both maps minimally and decides equivalence of the dilation
/// representations relative to x.  Throws ZeroMap for a zero map (the
/// relation is defined only between nonzero maps).
std::optional<CpSmeWitness> sme_cpmaps(const CPMap& phi, const CPMap& psi,
                                       const Bimodule& x, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Linking CP map
// ----------------------------------------------------------------------------

/// tau on the linking algebra compresses the linking representation of the
/// witness by v_phi (+) v_psi; its minimal triple and the corner-compression
/// identities tau(embed_left(a)) = phi(a) (+) 0 etc. are verified.
struct LinkingCpResult {
    LinkingAlgebra link;
    CPMap tau;
    StinespringTriple triple;
    double compression_residual = 0.0;
};

LinkingCpResult linking_cp(const CPMap& phi, const CPMap& psi, const CpSmeWitness& w,
                           const Bimodule& x, const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Transport along a corner isomorphism
// ----------------------------------------------------------------------------

/// Given transport data (theta, w_tilde) with pi_psi(theta(a)) =
/// w_tilde pi_phi(a) w_tilde^* (IntertwinerMismatch otherwise), the composed
/// map psi o theta has verified minimal triple (pi_phi, w_tilde^* v_psi).
struct TransportedCp {
    CPMap phi;
    StinespringTriple triple;
};

TransportedCp transport_cp(const CornerTransport& tr, const Representation& pi_phi,
                           const CPMap& psi, const StinespringTriple& psi_triple,
                           const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Stabilisation
// ----------------------------------------------------------------------------

/// phi (x) id_m on the m x m block algebra over the source, with verified
/// minimal triple (pi_phi blocked, kron(id_m, v)) and the stabilisation
/// witness of the dilation representation.  The dilation dimension scales by
/// exactly m.
struct StabilizedCp {
    CPMap phi_s;
    StinespringTriple triple;
    Stabilized stab;
    StinespringTriple base_triple;
};

StabilizedCp stabilize_cp(const CPMap& phi, Index m, const Tolerance& tol = {});

}  // namespace morita
