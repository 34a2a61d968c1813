#pragma once

// ============================================================================
// Shared scalar/matrix aliases, tolerance policy and error taxonomy used by
// every module in the library.  All matrices are dense complex double
// precision; all norms are spectral unless a function says otherwise.
// ============================================================================

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace morita {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// ----------------------------------------------------------------------------
// Tolerance
// ----------------------------------------------------------------------------

/// Two-knob tolerance: a residual passes at a given scale when it is at most
/// rel * max(1, scale) + abs.  The max(1, .) keeps tiny-norm inputs from
/// demanding absurd absolute precision.
struct Tolerance {
    double rel = 1e-9;
    double abs = 1e-12;

    [[nodiscard]] double bound(double scale) const {
        return rel * std::max(1.0, scale) + abs;
    }
    [[nodiscard]] bool ok(double residual, double scale) const {
        return residual <= bound(scale);
    }
};

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

enum class ErrorCode {
    NonFinite,
    NonHermitian,
    NotPsd,
    NotStarClosed,
    NoUnit,
    NumericalDegeneracy,
    NotInAlgebra,
    NotInvariant,
    NotFull,
    AlgebraMismatch,
    FrameFailure,
    FrameInvalid,
    NotMultiplicative,
    NotStar,
    NotUnital,
    DegenerateSpace,
    ShapeMismatch,
    DimensionMismatch,
    NotCp,
    NotSameMap,
    IntertwinerMismatch,
    ZeroMap,
    NotIdempotent,
    NotBimodular,
    RangeEscapesSubalgebra,
    StructureInvalid,
    NotFaithful,
    ParseError,
    ValidationError,
    ParamOutOfRange,
};

const char* to_string(ErrorCode code);

/// Library-wide exception: carries a machine-checkable code plus a human
/// readable description of what failed and by how much.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code) {}

    [[nodiscard]] ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// ----------------------------------------------------------------------------
// Small matrix helpers
// ----------------------------------------------------------------------------

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const CMat& m);

[[nodiscard]] bool all_finite(const CMat& m);

/// Hilbert-Schmidt inner product tr(a^* b), conjugate-linear in a.
Cplx hs_inner(const CMat& a, const CMat& b);

/// Kronecker product, row-of-a-major: (a ox b)[(i,k),(j,l)] = a_ij * b_kl.
CMat kron(const CMat& a, const CMat& b);

/// Column-major flattening and its inverse.
CVec vec(const CMat& m);
CMat unvec(const CVec& v, Index rows, Index cols);

/// Least-squares map factorisation: the matrix u minimising ||u * from - to||.
/// Used to define linear maps by their action on a spanning family.
CMat map_through(const CMat& from, const CMat& to);

}  // namespace morita
