#include "morita/algebra.hpp"

#include <algorithm>

#include "morita/span.hpp"

namespace morita {

namespace {

// Lexicographic matrix comparison with a fuzz window, used only to make
// orderings reproducible; entries closer than eps are treated as ties.
bool lex_less(const CMat& a, const CMat& b, double eps = 1e-9) {
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            const Cplx x = a(i, j), y = b(i, j);
            if (std::abs(x.real() - y.real()) > eps) return x.real() < y.real();
            if (std::abs(x.imag() - y.imag()) > eps) return x.imag() < y.imag();
        }
    return false;
}

// Orthonormal basis of the range of an (approximate) orthogonal projection.
CMat projection_range(const CMat& p, const Tolerance& tol) {
    EigResult eig = hermitian_eig(p, Tolerance{1e-7, 1e-9});
    Index r = 0;
    while (r < eig.eigenvalues.size() && eig.eigenvalues(r) > 0.5) ++r;
    (void)tol;
    return eig.u.leftCols(r);
}

// Splits each projection in `parts` along the spectral clusters of h
// compressed to its range.  h must commute with every projection in `parts`
// up to numerical noise; the output refines the input.
std::vector<CMat> refine_by(const std::vector<CMat>& parts, const CMat& h,
                            const Tolerance& tol) {
    const double gap = 1e-6 * std::max(1.0, spectral_norm(h));
    std::vector<CMat> out;
    for (const CMat& p : parts) {
        CMat u = projection_range(p, tol);
        if (u.cols() == 0) continue;
        CMat local = u.adjoint() * h * u;
        EigResult eig = hermitian_eig(local, Tolerance{1e-7, 1e-9});
        Index start = 0;
        for (Index i = 1; i <= eig.eigenvalues.size(); ++i) {
            const bool boundary = (i == eig.eigenvalues.size()) ||
                                  (eig.eigenvalues(i - 1) - eig.eigenvalues(i) > gap);
            if (!boundary) continue;
            CMat v = eig.u.middleCols(start, i - start);
            CMat q = u * (v * v.adjoint()) * u.adjoint();
            out.push_back(0.5 * (q + q.adjoint()));
            start = i;
        }
    }
    return out;
}

// Hermitian generators of the span of `mats`, for refinement sweeps.
std::vector<CMat> hermitian_parts(const std::vector<CMat>& mats, double floor_norm) {
    std::vector<CMat> out;
    for (const CMat& m : mats) {
        CMat re = 0.5 * (m + m.adjoint());
        CMat im = (m - m.adjoint()) / Cplx(0, 2);
        if (spectral_norm(re) > floor_norm) out.push_back(re);
        if (spectral_norm(im) > floor_norm) out.push_back(im);
    }
    return out;
}

}  // namespace

// ============================================================================
// Algebra
// ============================================================================

Algebra Algebra::validate(const std::vector<CMat>& candidate, const Tolerance& tol,
                          bool extend_to_ambient_unit) {
    if (candidate.empty())
        throw Error(ErrorCode::ValidationError, "algebra: empty candidate basis");
    const Index n = candidate.front().rows();
    if (n < 1) throw Error(ErrorCode::ValidationError, "algebra: empty ambient space");
    for (const CMat& c : candidate) {
        if (c.rows() != n || c.cols() != n)
            throw Error(ErrorCode::ShapeMismatch, "algebra: basis matrices must be square of equal size");
        if (!all_finite(c))
            throw Error(ErrorCode::NonFinite, "algebra: non-finite basis entry");
    }

    SpanBuilder span(n * n, tol);
    for (const CMat& c : candidate) span.append_matrix(c);
    if (span.dim() == 0)
        throw Error(ErrorCode::ValidationError, "algebra: candidate basis spans zero");

    auto matrices = [&span, n]() {
        std::vector<CMat> out;
        out.reserve(static_cast<size_t>(span.dim()));
        for (const CVec& v : span.vectors()) out.push_back(unvec(v, n, n));
        return out;
    };

    // Closure under products and adjoints; the span dimension is bounded by
    // n^2, so the sweep stabilises.
    for (Index round = 0; round <= n * n + 1; ++round) {
        std::vector<CMat> current = matrices();
        bool grew = false;
        for (const CMat& a : current) grew |= span.append_matrix(a.adjoint());
        for (const CMat& a : current)
            for (const CMat& b : current) grew |= span.append_matrix(a * b);
        if (!grew) break;
        if (round == n * n + 1)
            throw Error(ErrorCode::NotStarClosed, "algebra: closure failed to stabilise");
    }

    const CMat id = CMat::Identity(n, n);
    if (span.residual_matrix(id) > tol.bound(std::sqrt(static_cast<double>(n)))) {
        if (!extend_to_ambient_unit)
            throw Error(ErrorCode::NoUnit, "algebra: span does not contain the ambient identity");
        span.append_matrix(id);  // products with the identity add nothing new
    }

    Algebra out;
    out.ambient_ = n;
    out.tol_ = tol;
    out.basis_ = matrices();
    out.flat_ = span.flat();

    // Sanity: the closure really is *-closed within tolerance.
    for (const CMat& b : out.basis_) {
        if (span.residual_matrix(b.adjoint()) > tol.bound(1.0) * 10)
            throw Error(ErrorCode::NotStarClosed, "algebra: adjoint escapes span");
    }
    return out;
}

CVec Algebra::coords(const CMat& x) const {
    if (x.rows() != ambient_ || x.cols() != ambient_)
        throw Error(ErrorCode::ShapeMismatch, "algebra: coords shape mismatch");
    CVec v = vec(x);
    CVec c = flat_.adjoint() * v;
    const double res = (v - flat_ * c).norm();
    if (res > tol_.bound(v.norm()) * 10)
        throw Error(ErrorCode::NotInAlgebra,
                    "algebra: element outside span, residual " + std::to_string(res));
    return c;
}

double Algebra::membership_residual(const CMat& x) const {
    CVec v = vec(x);
    return (v - flat_ * (flat_.adjoint() * v)).norm();
}

bool Algebra::contains(const CMat& x) const {
    if (x.rows() != ambient_ || x.cols() != ambient_) return false;
    return membership_residual(x) <= tol_.bound(vec(x).norm()) * 10;
}

CMat Algebra::combine(const CVec& c) const {
    if (c.size() != dim())
        throw Error(ErrorCode::ShapeMismatch, "algebra: coefficient count mismatch");
    return unvec(flat_ * c, ambient_, ambient_);
}

bool same_span(const Algebra& a, const Algebra& b, const Tolerance& tol) {
    (void)tol;
    if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return false;
    for (const CMat& m : a.basis())
        if (!b.contains(m)) return false;
    return true;
}

// ============================================================================
// Block decomposition
// ============================================================================

namespace {

// Center of the algebra: kernel of the commutator Gram form
// G_jk = sum_i <[b_j, b_i], [b_k, b_i]> on coefficient space.
std::vector<CMat> center_basis(const Algebra& a) {
    const Index d = a.dim();
    const Index n = a.ambient_dim();
    CMat stack(n * n * d, d);
    for (Index j = 0; j < d; ++j) {
        const CMat& bj = a.basis()[static_cast<size_t>(j)];
        for (Index i = 0; i < d; ++i) {
            const CMat& bi = a.basis()[static_cast<size_t>(i)];
            stack.block(i * n * n, j, n * n, 1) = vec(bj * bi - bi * bj);
        }
    }
    CMat g = stack.adjoint() * stack;
    EigResult eig = hermitian_eig(g, Tolerance{1e-7, 1e-9});
    const double lmax = eig.eigenvalues.size() ? std::max(eig.eigenvalues(0), 0.0) : 0.0;
    const double cutoff = std::max(1e-9 * lmax, 1e-13);
    std::vector<CMat> out;
    for (Index k = d; k-- > 0;) {
        if (eig.eigenvalues(k) > cutoff) break;
        out.push_back(a.combine(eig.u.col(k)));
    }
    return out;
}

Index projection_rank(const CMat& p) {
    return static_cast<Index>(std::llround(p.trace().real()));
}

}  // namespace

BlockStructure decompose(const Algebra& a, const Tolerance& tol) {
    const Index n = a.ambient_dim();

    // Minimal central projections by spectral refinement over the center.
    std::vector<CMat> centrals = {CMat::Identity(n, n)};
    for (const CMat& h : hermitian_parts(center_basis(a), 1e-9))
        centrals = refine_by(centrals, h, tol);
    std::sort(centrals.begin(), centrals.end(), [](const CMat& x, const CMat& y) {
        const Index rx = projection_rank(x), ry = projection_rank(y);
        if (rx != ry) return rx > ry;
        return lex_less(x, y);
    });

    BlockStructure out;
    Index dim_seen = 0;
    for (const CMat& z : centrals) {
        Block blk;
        blk.central_projection = z;

        // The corner z A z is a full matrix factor with some multiplicity.
        std::vector<CMat> corner;
        SpanBuilder corner_span(n * n, tol);
        for (const CMat& b : a.basis()) {
            CMat c = z * b * z;
            if (corner_span.append_matrix(c)) corner.push_back(c);
        }
        const Index corner_dim = corner_span.dim();
        blk.size = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(corner_dim))));
        if (blk.size * blk.size != corner_dim)
            throw Error(ErrorCode::NumericalDegeneracy,
                        "decompose: corner dimension " + std::to_string(corner_dim) +
                            " is not a perfect square");
        const Index z_rank = projection_rank(z);
        if (blk.size == 0 || z_rank % blk.size != 0)
            throw Error(ErrorCode::NumericalDegeneracy, "decompose: rank does not split");
        blk.multiplicity = z_rank / blk.size;

        // Diagonal matrix units: refine z by Hermitian elements of the corner.
        std::vector<CMat> diag = {z};
        for (const CMat& h : hermitian_parts(corner, 1e-9)) diag = refine_by(diag, h, tol);
        if (static_cast<Index>(diag.size()) != blk.size)
            throw Error(ErrorCode::NumericalDegeneracy,
                        "decompose: expected " + std::to_string(blk.size) +
                            " minimal projections, found " + std::to_string(diag.size()));
        for (const CMat& e : diag)
            if (projection_rank(e) != blk.multiplicity)
                throw Error(ErrorCode::NumericalDegeneracy, "decompose: uneven minimal projections");
        std::sort(diag.begin(), diag.end(),
                  [](const CMat& x, const CMat& y) { return lex_less(x, y); });

        // Off-diagonal units from polar parts of e_11 b e_jj; phases cancel in
        // the relations because rows/columns are generated from the same e_1j.
        std::vector<CMat> first_row(static_cast<size_t>(blk.size));
        first_row[0] = diag[0];
        for (Index j = 1; j < blk.size; ++j) {
            CMat best;
            double best_norm = 0.0;
            for (const CMat& b : a.basis()) {
                CMat w = diag[0] * b * diag[static_cast<size_t>(j)];
                const double nw = spectral_norm(w);
                if (nw > best_norm) {
                    best_norm = nw;
                    best = w;
                }
            }
            if (best_norm < 1e-9)
                throw Error(ErrorCode::NumericalDegeneracy, "decompose: disconnected matrix units");
            first_row[static_cast<size_t>(j)] = polar_partial_isometry(best, tol);
        }

        blk.matrix_units.resize(static_cast<size_t>(blk.size * blk.size));
        for (Index i = 0; i < blk.size; ++i)
            for (Index j = 0; j < blk.size; ++j) {
                CMat e = first_row[static_cast<size_t>(i)].adjoint() *
                         first_row[static_cast<size_t>(j)];
                blk.matrix_units[static_cast<size_t>(i * blk.size + j)] = e;
            }

        // Relations must hold tightly, otherwise the clustering mis-split.
        const CMat sum_check = [&blk] {
            CMat s = CMat::Zero(blk.central_projection.rows(), blk.central_projection.cols());
            for (Index i = 0; i < blk.size; ++i) s += blk.unit(i, i);
            return s;
        }();
        if (spectral_norm(sum_check - z) > 1e-7)
            throw Error(ErrorCode::NumericalDegeneracy, "decompose: diagonal units do not sum to the block unit");
        for (Index i = 0; i < blk.size; ++i)
            for (Index j = 0; j < blk.size; ++j) {
                if (spectral_norm(blk.unit(i, j).adjoint() - blk.unit(j, i)) > 1e-7)
                    throw Error(ErrorCode::NumericalDegeneracy, "decompose: unit adjoint relation failed");
                for (Index k = 0; k < blk.size; ++k)
                    for (Index l = 0; l < blk.size; ++l) {
                        CMat prod = blk.unit(i, j) * blk.unit(k, l);
                        CMat expect = (j == k) ? blk.unit(i, l)
                                               : CMat::Zero(n, n);
                        if (spectral_norm(prod - expect) > 1e-7)
                            throw Error(ErrorCode::NumericalDegeneracy,
                                        "decompose: unit product relation failed");
                    }
                if (!a.contains(blk.unit(i, j)))
                    throw Error(ErrorCode::NumericalDegeneracy, "decompose: unit escapes algebra");
            }

        dim_seen += blk.size * blk.size;
        out.blocks.push_back(std::move(blk));
    }

    if (dim_seen != a.dim())
        throw Error(ErrorCode::NumericalDegeneracy,
                    "decompose: block dimensions sum to " + std::to_string(dim_seen) +
                        ", algebra dimension is " + std::to_string(a.dim()));
    return out;
}

PsdVerdict is_positive_element(const Algebra& a, const CMat& x, const Tolerance& tol) {
    if (!a.contains(x))
        throw Error(ErrorCode::NotInAlgebra, "is_positive_element: x outside the algebra");
    return is_psd(x, tol);
}

}  // namespace morita
