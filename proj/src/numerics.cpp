#include "morita/numerics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

#include "morita/span.hpp"

namespace morita {

// ============================================================================
// core.hpp helpers
// ============================================================================

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NonHermitian: return "NonHermitian";
        case ErrorCode::NotPsd: return "NotPsd";
        case ErrorCode::NotStarClosed: return "NotStarClosed";
        case ErrorCode::NoUnit: return "NoUnit";
        case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
        case ErrorCode::NotInAlgebra: return "NotInAlgebra";
        case ErrorCode::NotInvariant: return "NotInvariant";
        case ErrorCode::NotFull: return "NotFull";
        case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
        case ErrorCode::FrameFailure: return "FrameFailure";
        case ErrorCode::FrameInvalid: return "FrameInvalid";
        case ErrorCode::NotMultiplicative: return "NotMultiplicative";
        case ErrorCode::NotStar: return "NotStar";
        case ErrorCode::NotUnital: return "NotUnital";
        case ErrorCode::DegenerateSpace: return "DegenerateSpace";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotCp: return "NotCp";
        case ErrorCode::NotSameMap: return "NotSameMap";
        case ErrorCode::IntertwinerMismatch: return "IntertwinerMismatch";
        case ErrorCode::ZeroMap: return "ZeroMap";
        case ErrorCode::NotIdempotent: return "NotIdempotent";
        case ErrorCode::NotBimodular: return "NotBimodular";
        case ErrorCode::RangeEscapesSubalgebra: return "RangeEscapesSubalgebra";
        case ErrorCode::StructureInvalid: return "StructureInvalid";
        case ErrorCode::NotFaithful: return "NotFaithful";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    }
    return "UnknownError";
}

double spectral_norm(const CMat& m) {
    if (m.size() == 0) return 0.0;
    // Two-sided Jacobi is the most accurate option but scales poorly; divide
    // and conquer is ample for tolerance checks on anything sizeable.
    if (std::min(m.rows(), m.cols()) > 32) {
        Eigen::BDCSVD<CMat> svd(m);
        return svd.singularValues()(0);
    }
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

bool all_finite(const CMat& m) { return m.allFinite(); }

Cplx hs_inner(const CMat& a, const CMat& b) {
    return a.conjugate().cwiseProduct(b).sum();
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVec vec(const CMat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw Error(ErrorCode::ShapeMismatch, "unvec: size mismatch");
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat map_through(const CMat& from, const CMat& to) {
    if (from.cols() != to.cols())
        throw Error(ErrorCode::ShapeMismatch, "map_through: column counts differ");
    // u * from = to  <=>  from^T u^T = to^T; solve in the least-squares sense.
    CMat ut = from.transpose().completeOrthogonalDecomposition().solve(to.transpose());
    return ut.transpose();
}

// ============================================================================
// SpanBuilder
// ============================================================================

bool SpanBuilder::append(const CVec& v) {
    if (v.size() != vec_dim_)
        throw Error(ErrorCode::ShapeMismatch, "SpanBuilder: vector dimension mismatch");
    const double original = v.norm();
    CVec w = v;
    for (int pass = 0; pass < 2; ++pass)
        for (const CVec& b : basis_) w -= b.dot(w) * b;
    const double left = w.norm();
    if (left <= std::max(tol_.abs, tol_.rel * original)) return false;
    basis_.push_back(w / left);
    return true;
}

CVec SpanBuilder::coords(const CVec& v) const {
    CVec c(dim());
    for (Index i = 0; i < dim(); ++i) c(i) = basis_[static_cast<size_t>(i)].dot(v);
    return c;
}

double SpanBuilder::residual(const CVec& v) const {
    CVec w = v;
    for (const CVec& b : basis_) w -= b.dot(w) * b;
    return w.norm();
}

CMat SpanBuilder::flat() const {
    CMat f(vec_dim_, dim());
    for (Index i = 0; i < dim(); ++i) f.col(i) = basis_[static_cast<size_t>(i)];
    return f;
}

// ============================================================================
// Numerical kernel
// ============================================================================

EigResult hermitian_eig(const CMat& m, const Tolerance& tol) {
    if (m.rows() != m.cols())
        throw Error(ErrorCode::ShapeMismatch, "hermitian_eig: matrix not square");
    if (!all_finite(m))
        throw Error(ErrorCode::NonFinite, "hermitian_eig: non-finite entries");
    // Frobenius norms suffice for the symmetry-defect gate and avoid an SVD.
    const double scale = m.norm();
    const double herm_res = (m - m.adjoint()).norm();
    if (herm_res > tol.bound(scale))
        throw Error(ErrorCode::NonHermitian,
                    "hermitian_eig: ||m - m^*|| = " + std::to_string(herm_res));

    CMat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NumericalDegeneracy, "hermitian_eig: solver failed");

    const Index n = m.rows();
    EigResult out;
    out.eigenvalues = RVec(n);
    out.u = CMat(n, n);
    for (Index i = 0; i < n; ++i) {  // ascending -> descending
        out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        out.u.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

PsdVerdict is_psd(const CMat& m, const Tolerance& tol) {
    EigResult eig = hermitian_eig(m, tol);
    if (eig.eigenvalues.size() == 0) return {true, 0.0};
    const double lo = eig.eigenvalues(eig.eigenvalues.size() - 1);
    const double hi = std::max(std::abs(eig.eigenvalues(0)), std::abs(lo));
    return {lo >= -tol.bound(hi), lo};
}

CMat polar_partial_isometry(const CMat& m, const Tolerance& tol) {
    if (!all_finite(m))
        throw Error(ErrorCode::NonFinite, "polar_partial_isometry: non-finite entries");
    if (m.size() == 0) return m;
    if (std::min(m.rows(), m.cols()) > 32) {
        Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec& s = svd.singularValues();
        const double cutoff = s.size() ? tol.rel * s(0) + tol.abs : 0.0;
        Index rank = 0;
        while (rank < s.size() && s(rank) > cutoff) ++rank;
        if (rank == 0) return CMat::Zero(m.rows(), m.cols());
        return svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();
    }
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& s = svd.singularValues();
    const double cutoff = s.size() ? tol.rel * s(0) + tol.abs : 0.0;
    Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    if (rank == 0) return CMat::Zero(m.rows(), m.cols());
    return svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();
}

Index numeric_rank(const CMat& m, const Tolerance& tol) {
    if (!all_finite(m))
        throw Error(ErrorCode::NonFinite, "numeric_rank: non-finite entries");
    if (m.size() == 0) return 0;
    if (std::min(m.rows(), m.cols()) > 32) {
        Eigen::BDCSVD<CMat> svd(m);
        const RVec& s = svd.singularValues();
        const double cutoff = s.size() ? std::max(tol.rel * s(0), tol.abs) : 0.0;
        Index rank = 0;
        while (rank < s.size() && s(rank) > cutoff) ++rank;
        return rank;
    }
    Eigen::JacobiSVD<CMat> svd(m);
    const RVec& s = svd.singularValues();
    const double cutoff = s.size() ? std::max(tol.rel * s(0), tol.abs) : 0.0;
    Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;
    return rank;
}

namespace {

// Diagonally pivoted Cholesky quotient for large Gram matrices.  Formal
// generator Grams routinely have dimension in the thousands with numerical
// rank below a few dozen; the greedy factorisation costs O(n^2 r) instead of
// the O(n^3) eigendecomposition.  A final residual sweep guards against
// indefiniteness hiding outside the pivoted diagonal.
GramQuotient gram_quotient_lowrank(const CMat& g, const Tolerance& tol) {
    const Index n = g.rows();
    RVec d = g.diagonal().real();
    const double scale = std::max(d.maxCoeff(), 0.0);
    const double neg_bound = tol.bound(scale);
    if (d.minCoeff() < -neg_bound)
        throw Error(ErrorCode::NotPsd, "gram_quotient: negative diagonal " +
                                           std::to_string(d.minCoeff()));
    const double cutoff = std::max(tol.rel * scale, tol.abs);

    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::vector<CVec> cols;
    while (static_cast<Index>(cols.size()) < n) {
        Index j = -1;
        double best = cutoff;
        for (Index i = 0; i < n; ++i) {
            if (!used[static_cast<std::size_t>(i)] && d(i) > best) {
                best = d(i);
                j = i;
            }
        }
        if (j < 0) break;
        CVec c = g.col(j);
        for (const CVec& prev : cols) c -= prev * std::conj(prev(j));
        c /= std::sqrt(d(j));
        used[static_cast<std::size_t>(j)] = 1;
        d(j) = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            d(i) -= std::norm(c(i));
            if (d(i) < -neg_bound)
                throw Error(ErrorCode::NotPsd,
                            "gram_quotient: negative pivot residual " +
                                std::to_string(d(i)));
        }
        cols.push_back(std::move(c));
    }

    const Index rank = static_cast<Index>(cols.size());
    CMat l(n, rank);
    for (Index i = 0; i < rank; ++i) l.col(i) = cols[static_cast<std::size_t>(i)];

    // For a positive semidefinite input every entry of the residual obeys
    // |e_ij| <= sqrt(e_ii e_jj) <= cutoff; a materially larger entry means the
    // matrix was not a Gram matrix at all.
    const double worst =
        rank ? (g - l * l.adjoint()).cwiseAbs().maxCoeff() : g.cwiseAbs().maxCoeff();
    if (worst > 16.0 * cutoff + tol.abs)
        throw Error(ErrorCode::NotPsd, "gram_quotient: factorisation residual " +
                                           std::to_string(worst));

    GramQuotient out;
    out.input_dim = n;
    out.quotient_dim = rank;
    if (rank == 0) {
        out.project = CMat(0, n);
        out.coords = CMat(0, n);
        return out;
    }
    out.project = l.completeOrthogonalDecomposition().pseudoInverse();
    out.coords = out.project * g;
    return out;
}

}  // namespace

GramQuotient gram_quotient(const CMat& g, const Tolerance& tol) {
    if (g.rows() != g.cols())
        throw Error(ErrorCode::ShapeMismatch, "gram_quotient: matrix not square");
    const Index n = g.rows();
    if (n > 192) {
        if (!all_finite(g))
            throw Error(ErrorCode::NonFinite, "gram_quotient: non-finite entries");
        const double herm_res = (g - g.adjoint()).norm();
        if (herm_res > tol.bound(g.norm()))
            throw Error(ErrorCode::NonHermitian,
                        "gram_quotient: ||g - g^*|| = " + std::to_string(herm_res));
        return gram_quotient_lowrank(0.5 * (g + g.adjoint()), tol);
    }
    EigResult eig = hermitian_eig(g, tol);
    const double lmax = eig.eigenvalues.size() ? eig.eigenvalues(0) : 0.0;
    const double lmin = eig.eigenvalues.size() ? eig.eigenvalues(n - 1) : 0.0;
    if (lmin < -tol.bound(std::abs(lmax)))
        throw Error(ErrorCode::NotPsd,
                    "gram_quotient: negative eigenvalue " + std::to_string(lmin));

    const double cutoff = std::max(tol.rel * std::max(lmax, 0.0), tol.abs);
    Index rank = 0;
    while (rank < n && eig.eigenvalues(rank) > cutoff) ++rank;

    GramQuotient out;
    out.input_dim = n;
    out.quotient_dim = rank;
    out.project = CMat(rank, n);
    for (Index i = 0; i < rank; ++i)
        out.project.row(i) = eig.u.col(i).adjoint() / std::sqrt(eig.eigenvalues(i));
    out.coords = out.project * g;
    return out;
}

}  // namespace morita
