#pragma once

// ============================================================================
// Transfer of completely positive maps across an equivalence bimodule: a map
// on the right algebra is rebuilt blockwise over a reconstructing frame as a
// map on the left algebra of the same equivalence class.
// ============================================================================

#include <optional>
#include <vector>

#include "morita/bimodule.hpp"
#include "morita/core.hpp"
#include "morita/cpmap.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Frame transfer
// ----------------------------------------------------------------------------

/// Transfer of psi along a frame u_1..u_n: the image of a is the n x n block
/// matrix with entries psi(u_i^* a u_j).  u_iso identifies the dilation space
/// of the transferred map with the space induced from the bimodule and the
/// minimal dilation of psi, and intertwines the two representations there.
struct TransferResult {
    CPMap phi;
    CMat u_iso;
    Frame frame;
    double isometry_residual = 0.0;
    double intertwining_residual = 0.0;
};

/// Builds the transferred map and certifies it: complete positivity of the
/// block assembly (NotCp when the frame fails to reconstruct), equality of
/// the dilation and induced dimensions (DimensionMismatch), and the isometric
/// intertwining of u_iso (NumericalDegeneracy).  FrameInvalid when the frame
/// does not reconstruct the bimodule; ZeroMap for the zero map.
TransferResult transfer_cp(const CPMap& psi, const Bimodule& x, const Frame& frame,
                           const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Roundtrip and class bookkeeping
// ----------------------------------------------------------------------------

/// psi transferred to the left algebra and back along the dual bimodule; the
/// witness certifies equivalence of psi with the roundtripped map over the
/// trivial self-equivalence of its source.
struct RoundtripVerdict {
    bool pass = false;
    TransferResult forward;
    CPMap back;
    std::optional<CpSmeWitness> witness;
};

RoundtripVerdict roundtrip(const CPMap& psi, const Bimodule& x,
                           const Tolerance& tol = {});

/// Pairwise equivalence verdicts over the trivial self-equivalences, before
/// and after transferring every map along x; `preserved` records that the two
/// verdict matrices agree entrywise.
struct ClassMapReport {
    std::vector<std::vector<bool>> before;
    std::vector<std::vector<bool>> after;
    bool preserved = false;
};

ClassMapReport transfer_class_map(const std::vector<CPMap>& psi_list, const Bimodule& x,
                                  const Tolerance& tol = {});

}  // namespace morita
