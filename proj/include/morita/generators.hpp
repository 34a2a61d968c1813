#pragma once

// ============================================================================
// Seeded instance generators for the property suites: multi-block algebras,
// equivalence bimodules, Kraus maps, representations with prescribed
// multiplicities, and tensor-type expectation pairs.
// ============================================================================

#include <array>
#include <vector>

#include "morita/algebra.hpp"
#include "morita/bimodule.hpp"
#include "morita/core.hpp"
#include "morita/cpmap.hpp"
#include "morita/expectation.hpp"
#include "morita/random.hpp"
#include "morita/representation.hpp"

namespace morita {

/// Sum of full matrix blocks with small multiplicities, conjugated by a
/// random unitary; the ambient dimension never exceeds max_ambient.
Algebra gen_algebra(Rng& rng, Index max_ambient, const Tolerance& tol = {});

/// An equivalence bimodule between two freshly generated block algebras.
/// `blocks` lists (left size, right size, multiplicity) per block.
struct GeneratedBimodule {
    Algebra left;
    Algebra right;
    Bimodule x;
    std::vector<std::array<Index, 3>> blocks;
};

GeneratedBimodule gen_bimodule(Rng& rng, Index max_left, Index max_right,
                               const Tolerance& tol = {});

/// Same construction with an explicit block list (left size, right size,
/// multiplicity); conjugation by random unitaries is optional.
GeneratedBimodule gen_bimodule_blocks(Rng& rng,
                                      const std::vector<std::array<Index, 3>>& blocks,
                                      bool conjugate, const Tolerance& tol = {});

/// Like gen_bimodule but with equal left and right block sizes, so the two
/// corners of the linking algebra carry matching per-block ranks in every
/// representation.
GeneratedBimodule gen_bimodule_square(Rng& rng, Index max_side,
                                      const Tolerance& tol = {});

/// Equivalence bimodule whose right algebra is the given one; a fresh left
/// algebra is generated against its block structure.  ParamOutOfRange when
/// max_left cannot accommodate one left row per block.
GeneratedBimodule gen_bimodule_right(Rng& rng, const Algebra& right, Index max_left,
                                     const Tolerance& tol = {});

/// Kraus map a |-> sum_{i<=r} K_i^* a K_i scaled so the unit image has norm
/// one.  ParamOutOfRange for empty rank or target.
CPMap gen_cpmap(Rng& rng, const Algebra& source, Index target_dim, Index kraus_rank,
                const Tolerance& tol = {});

/// Representation with a uniformly chosen multiplicity in [min_mult, max_mult]
/// for every block, conjugated by a random unitary of its space.  At least
/// one block keeps a positive multiplicity.
Representation gen_representation(Rng& rng, const Algebra& a, Index min_mult,
                                  Index max_mult, const Tolerance& tol = {});

/// Tensor-type expectation pair: a base equivalence bimodule is tensored with
/// a full matrix fiber of the given size, and both expectations average the
/// fiber with weighted block traces.  Equal weights on the two sides make the
/// pair compatible; `compatible = false` skews the left weights instead.
struct GeneratedExpectationPair {
    ExpectationPair pair;
    Representation pi_b;  // faithful representation of the right subalgebra
    bool compatible = true;
};

GeneratedExpectationPair gen_expectation_pair(Rng& rng, Index max_base, Index fiber,
                                              bool compatible,
                                              const Tolerance& tol = {});

}  // namespace morita
