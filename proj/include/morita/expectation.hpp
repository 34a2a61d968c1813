#pragma once

// ============================================================================
// Conditional expectations on unital inclusions, paired expectations over an
// equivalence bimodule with a distinguished subspace, the compatibility
// identity relating them, the dilation/induction pipeline that turns a
// compatible pair into a strong Morita equivalence of compressed maps, and
// the converse compression criterion.
// ============================================================================

#include <optional>
#include <string>
#include <vector>

#include "morita/cpmap.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Inclusions and conditional expectations
// ----------------------------------------------------------------------------

/// Unital inclusion small <= big inside one ambient matrix space.
class Inclusion {
public:
    static Inclusion make(Algebra big, Algebra small, const Tolerance& tol = {});

    [[nodiscard]] const Algebra& big() const { return big_; }
    [[nodiscard]] const Algebra& small() const { return small_; }

    /// Empty placeholder; the factory functions produce validated instances.
    Inclusion() = default;

private:

    Algebra big_;
    Algebra small_;
};

/// Idempotent unital small-bimodular CP projection big -> small, stored by
/// its images on the canonical basis of big.
class ConditionalExpectation {
public:
    static ConditionalExpectation validate(Inclusion inclusion, std::vector<CMat> images,
                                           const Tolerance& tol = {});

    [[nodiscard]] const Inclusion& inclusion() const { return inclusion_; }
    [[nodiscard]] const Algebra& big() const { return inclusion_.big(); }
    [[nodiscard]] const Algebra& small() const { return inclusion_.small(); }
    [[nodiscard]] const std::vector<CMat>& images() const { return images_; }

    [[nodiscard]] CMat apply(const CMat& c) const;

    /// The expectation as a CP map into the ambient matrix space.
    [[nodiscard]] CPMap as_cpmap(const Tolerance& tol = {}) const;

    /// Empty placeholder; the factory functions produce validated instances.
    ConditionalExpectation() = default;

private:

    Inclusion inclusion_;
    std::vector<CMat> images_;
};

/// pi composed with an expectation onto its algebra: the CP map
/// c |-> pi(e(c)) from e.big() into the representation space.
CPMap compose_cp(const Representation& pi, const ConditionalExpectation& e,
                 const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Expectation pairs
// ----------------------------------------------------------------------------

/// Expectations e_left : C -> A and e_right : D -> B together with a C-D
/// equivalence bimodule y and a distinguished subspace x_sub that is itself
/// an A-B equivalence bimodule, generates y over C, and on which e_right
/// restricts to the identity of the B-valued inner product.
struct ExpectationPair {
    ConditionalExpectation e_left;
    ConditionalExpectation e_right;
    Bimodule y;
    Bimodule x_sub;

    /// Structural checks only; the compatibility identity is decided
    /// separately by verify_sme_expectations, so incompatible-but-valid
    /// pairs can be represented.
    static ExpectationPair make(ConditionalExpectation e_left,
                                ConditionalExpectation e_right, Bimodule y,
                                const std::vector<CMat>& x_generators,
                                const Tolerance& tol = {});
};

/// The compatibility identity z^* e_left(a) z1 = e_right(z^* a z1) over all
/// basis z, z1 of x_sub and basis a of C.
struct SmeExpectationVerdict {
    bool pass = false;
    double max_residual = 0.0;
};

SmeExpectationVerdict verify_sme_expectations(const ExpectationPair& pair,
                                              const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Pipeline
// ----------------------------------------------------------------------------

struct PipelineStage {
    std::string name;
    double residual = 0.0;
    bool pass = false;
};

struct PipelineResult {
    std::vector<PipelineStage> stages;
    bool pass = false;
    CMat u;  // intertwiner between the two dilations of pi_a o e_left
    std::optional<CpSmeWitness> witness;
};

/// Full equivalence chain for a compatible pair: dilates pi_b o e_right,
/// induces through x_sub and y, identifies both dilation spaces of
/// pi_a o e_left through the twisted tensor space, and produces the final
/// equivalence witness of the two compressed maps relative to y.  Throws
/// StructureInvalid when the pair fails verify_sme_expectations.
PipelineResult expectation_pipeline(const ExpectationPair& pair,
                                    const Representation& pi_b,
                                    const Tolerance& tol = {});

// ----------------------------------------------------------------------------
// Converse criterion
// ----------------------------------------------------------------------------

struct ConverseVerdict {
    bool pass = false;
    bool isometry_pass = false;
    double isometry_residual = 0.0;
    bool compression_pass = false;
    double compression_residual = 0.0;
    bool bimodule_pass = false;
    double bimodule_residual = 0.0;
};

/// For a faithful pi_b (NotFaithful otherwise): embeds the induced space of
/// x_sub isometrically into that of y via 1-insertion, tests the compression
/// identity (pi_a o e_left)(c) = v_c^* pi_c(c) v_c, and independently
/// re-verifies the bimodule identity e_right(x^* c^* x1) = x^* e_left(c)^* x1.
/// Works on pairs that were never checked for compatibility: an incompatible
/// e_left shows up as a failed compression verdict with honest residual.
ConverseVerdict expectation_converse(const ExpectationPair& pair,
                                     const Representation& pi_b,
                                     const Tolerance& tol = {});

}  // namespace morita
