#pragma once

// Incremental orthonormal span of vectors (or flattened matrices) under the
// standard inner product.  Gram-Schmidt in append order with two-pass
// re-orthogonalisation; the canonical bases of algebras and bimodules are
// produced by this builder, so their ordering is reproducible.

#include <vector>

#include "morita/core.hpp"

namespace morita {

class SpanBuilder {
public:
    explicit SpanBuilder(Index vec_dim, Tolerance tol = {})
        : vec_dim_(vec_dim), tol_(tol) {}

    /// Returns true when v contributed a new direction.
    bool append(const CVec& v);

    /// Convenience for matrix families: appends vec(m).
    bool append_matrix(const CMat& m) { return append(vec(m)); }

    [[nodiscard]] Index dim() const { return static_cast<Index>(basis_.size()); }
    [[nodiscard]] Index vec_dim() const { return vec_dim_; }

    /// Coordinates of v with respect to the orthonormal basis.
    [[nodiscard]] CVec coords(const CVec& v) const;

    /// Norm of the component of v orthogonal to the span.
    [[nodiscard]] double residual(const CVec& v) const;
    [[nodiscard]] double residual_matrix(const CMat& m) const {
        return residual(vec(m));
    }

    [[nodiscard]] bool contains(const CVec& v) const {
        return residual(v) <= tol_.bound(v.norm());
    }

    /// Orthonormal basis as columns of a vec_dim x dim matrix.
    [[nodiscard]] CMat flat() const;

    [[nodiscard]] const std::vector<CVec>& vectors() const { return basis_; }

private:
    Index vec_dim_;
    Tolerance tol_;
    std::vector<CVec> basis_;
};

}  // namespace morita
