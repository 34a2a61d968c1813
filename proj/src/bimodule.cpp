#include "morita/bimodule.hpp"

#include "morita/span.hpp"

namespace morita {

namespace {

// Block placement helpers for the amplified and linking constructions.
CMat embed_block(const CMat& m, Index row_block, Index col_block, Index rows,
                 Index cols, Index block_rows, Index block_cols) {
    CMat out = CMat::Zero(rows, cols);
    out.block(row_block * block_rows, col_block * block_cols, block_rows, block_cols) = m;
    return out;
}

}  // namespace

// ============================================================================
// Bimodule
// ============================================================================

Bimodule Bimodule::verify(Algebra left, Algebra right, const std::vector<CMat>& basis,
                          const Tolerance& tol) {
    if (basis.empty())
        throw Error(ErrorCode::ValidationError, "bimodule: empty candidate basis");
    const Index p = left.ambient_dim();
    const Index q = right.ambient_dim();
    for (const CMat& v : basis) {
        if (v.rows() != p || v.cols() != q)
            throw Error(ErrorCode::ShapeMismatch, "bimodule: basis must be rows(left) x cols(right)");
        if (!all_finite(v))
            throw Error(ErrorCode::NonFinite, "bimodule: non-finite basis entry");
    }

    SpanBuilder span(p * q, tol);
    for (const CMat& v : basis) span.append_matrix(v);
    if (span.dim() == 0)
        throw Error(ErrorCode::ValidationError, "bimodule: candidate basis spans zero");

    auto matrices = [&span, p, q]() {
        std::vector<CMat> out;
        out.reserve(static_cast<size_t>(span.dim()));
        for (const CVec& v : span.vectors()) out.push_back(unvec(v, p, q));
        return out;
    };

    // Closure under both actions; bounded by p * q directions.
    for (Index round = 0; round <= p * q + 1; ++round) {
        std::vector<CMat> current = matrices();
        bool grew = false;
        for (const CMat& v : current) {
            for (const CMat& a : left.basis()) grew |= span.append_matrix(a * v);
            for (const CMat& b : right.basis()) grew |= span.append_matrix(v * b);
        }
        if (!grew) break;
        if (round == p * q + 1)
            throw Error(ErrorCode::NotInvariant, "bimodule: action closure failed to stabilise");
    }

    std::vector<CMat> closed = matrices();

    // Inner products must land in, and span, the respective algebras.
    SpanBuilder left_vals(static_cast<Index>(left.dim()), tol);
    SpanBuilder right_vals(static_cast<Index>(right.dim()), tol);
    for (const CMat& v : closed)
        for (const CMat& w : closed) {
            CMat lv = v * w.adjoint();
            CMat rv = v.adjoint() * w;
            if (!left.contains(lv))
                throw Error(ErrorCode::NotFull,
                            "bimodule: left inner product escapes the left algebra");
            if (!right.contains(rv))
                throw Error(ErrorCode::NotFull,
                            "bimodule: right inner product escapes the right algebra");
            left_vals.append(left.coords(lv));
            right_vals.append(right.coords(rv));
        }
    if (left_vals.dim() != left.dim())
        throw Error(ErrorCode::NotFull, "bimodule: left inner products span a proper ideal");
    if (right_vals.dim() != right.dim())
        throw Error(ErrorCode::NotFull, "bimodule: right inner products span a proper ideal");

    Bimodule out;
    out.left_ = std::move(left);
    out.right_ = std::move(right);
    out.tol_ = tol;
    out.basis_ = std::move(closed);
    out.flat_ = span.flat();
    return out;
}

CVec Bimodule::coords(const CMat& x) const {
    if (x.rows() != rows() || x.cols() != cols())
        throw Error(ErrorCode::ShapeMismatch, "bimodule: coords shape mismatch");
    CVec v = vec(x);
    CVec c = flat_.adjoint() * v;
    const double res = (v - flat_ * c).norm();
    if (res > tol_.bound(v.norm()) * 10)
        throw Error(ErrorCode::NotInAlgebra,
                    "bimodule: element outside span, residual " + std::to_string(res));
    return c;
}

double Bimodule::membership_residual(const CMat& x) const {
    CVec v = vec(x);
    return (v - flat_ * (flat_.adjoint() * v)).norm();
}

bool Bimodule::contains(const CMat& x) const {
    if (x.rows() != rows() || x.cols() != cols()) return false;
    return membership_residual(x) <= tol_.bound(vec(x).norm()) * 10;
}

CMat Bimodule::combine(const CVec& c) const {
    if (c.size() != dim())
        throw Error(ErrorCode::ShapeMismatch, "bimodule: coefficient count mismatch");
    return unvec(flat_ * c, rows(), cols());
}

Bimodule trivial_bimodule(const Algebra& a, const Tolerance& tol) {
    return Bimodule::verify(a, a, a.basis(), tol);
}

Bimodule dual(const Bimodule& x, const Tolerance& tol) {
    std::vector<CMat> adj;
    adj.reserve(static_cast<size_t>(x.dim()));
    for (const CMat& v : x.basis()) adj.push_back(v.adjoint());
    return Bimodule::verify(x.right(), x.left(), adj, tol);
}

Bimodule interior_tensor(const Bimodule& x, const Bimodule& y, const Tolerance& tol) {
    if (x.cols() != y.rows() || !same_span(x.right(), y.left(), tol))
        throw Error(ErrorCode::AlgebraMismatch,
                    "interior_tensor: middle algebras do not agree");
    std::vector<CMat> products;
    products.reserve(static_cast<size_t>(x.dim() * y.dim()));
    for (const CMat& v : x.basis())
        for (const CMat& w : y.basis()) products.push_back(v * w);
    return Bimodule::verify(x.left(), y.right(), products, tol);
}

// ============================================================================
// Linking algebra
// ============================================================================

CMat LinkingAlgebra::embed_left(const CMat& a) const {
    CMat out = CMat::Zero(p_dim + q_dim, p_dim + q_dim);
    out.topLeftCorner(p_dim, p_dim) = a;
    return out;
}

CMat LinkingAlgebra::embed_right(const CMat& b) const {
    CMat out = CMat::Zero(p_dim + q_dim, p_dim + q_dim);
    out.bottomRightCorner(q_dim, q_dim) = b;
    return out;
}

CMat LinkingAlgebra::embed_module(const CMat& x) const {
    CMat out = CMat::Zero(p_dim + q_dim, p_dim + q_dim);
    out.topRightCorner(p_dim, q_dim) = x;
    return out;
}

LinkingAlgebra linking(const Bimodule& x, const Tolerance& tol) {
    const Index p = x.rows();
    const Index q = x.cols();
    const Index n = p + q;

    std::vector<CMat> gens;
    gens.reserve(static_cast<size_t>(x.left().dim() + x.right().dim() + 2 * x.dim()));
    auto top_left = [&](const CMat& a) {
        CMat m = CMat::Zero(n, n);
        m.topLeftCorner(p, p) = a;
        return m;
    };
    auto top_right = [&](const CMat& v) {
        CMat m = CMat::Zero(n, n);
        m.topRightCorner(p, q) = v;
        return m;
    };
    auto bottom_left = [&](const CMat& v) {
        CMat m = CMat::Zero(n, n);
        m.bottomLeftCorner(q, p) = v;
        return m;
    };
    auto bottom_right = [&](const CMat& b) {
        CMat m = CMat::Zero(n, n);
        m.bottomRightCorner(q, q) = b;
        return m;
    };
    for (const CMat& a : x.left().basis()) gens.push_back(top_left(a));
    for (const CMat& v : x.basis()) gens.push_back(top_right(v));
    for (const CMat& v : x.basis()) gens.push_back(bottom_left(v.adjoint()));
    for (const CMat& b : x.right().basis()) gens.push_back(bottom_right(b));

    LinkingAlgebra out;
    out.algebra = Algebra::validate(gens, tol);
    out.p_dim = p;
    out.q_dim = q;
    out.p_proj = top_left(CMat::Identity(p, p));
    out.q_proj = bottom_right(CMat::Identity(q, q));
    out.left = x.left();
    out.right = x.right();

    // The generating family is already an algebra: closure must not grow it.
    const Index expect = x.left().dim() + x.right().dim() + 2 * x.dim();
    if (out.algebra.dim() != expect)
        throw Error(ErrorCode::StructureInvalid,
                    "linking: span dimension " + std::to_string(out.algebra.dim()) +
                        ", expected " + std::to_string(expect));

    // Corner identification p L p = A and q L q = B.
    SpanBuilder corner_p(n * n, tol), corner_q(n * n, tol);
    for (const CMat& l : out.algebra.basis()) {
        CMat pc = out.p_proj * l * out.p_proj;
        CMat qc = out.q_proj * l * out.q_proj;
        if (!x.left().contains(pc.topLeftCorner(p, p)))
            throw Error(ErrorCode::StructureInvalid, "linking: p-corner escapes the left algebra");
        if (!x.right().contains(qc.bottomRightCorner(q, q)))
            throw Error(ErrorCode::StructureInvalid, "linking: q-corner escapes the right algebra");
        corner_p.append_matrix(pc);
        corner_q.append_matrix(qc);
    }
    if (corner_p.dim() != x.left().dim() || corner_q.dim() != x.right().dim())
        throw Error(ErrorCode::StructureInvalid, "linking: corners do not recover the algebras");

    // Fullness of both corner projections: L p L and L q L span L.
    SpanBuilder full_p(n * n, tol), full_q(n * n, tol);
    for (const CMat& l1 : out.algebra.basis())
        for (const CMat& l2 : out.algebra.basis()) {
            full_p.append_matrix(l1 * out.p_proj * l2);
            full_q.append_matrix(l1 * out.q_proj * l2);
        }
    if (full_p.dim() != out.algebra.dim() || full_q.dim() != out.algebra.dim())
        throw Error(ErrorCode::NotFull, "linking: a corner projection is not full");

    return out;
}

// ============================================================================
// Frames
// ============================================================================

double frame_defect(const Bimodule& x, const Frame& frame) {
    double worst = 0.0;
    for (const CMat& v : x.basis()) {
        CMat rec = CMat::Zero(v.rows(), v.cols());
        for (const CMat& u : frame.vectors) rec += (v * u.adjoint()) * u;
        worst = std::max(worst, spectral_norm(rec - v));
    }
    return worst;
}

Frame left_basis(const Bimodule& x, const Tolerance& tol) {
    const Index q = x.cols();
    CMat t = CMat::Zero(q, q);
    for (const CMat& v : x.basis()) t += v.adjoint() * v;

    EigResult eig = hermitian_eig(t, tol);
    const double lmax = eig.eigenvalues(0);
    if (eig.eigenvalues(q - 1) <= tol.bound(lmax))
        throw Error(ErrorCode::FrameFailure, "left_basis: frame operator is singular");
    CMat inv_sqrt = eig.u *
                    eig.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix().cast<Cplx>() *
                    eig.u.adjoint();

    Frame frame;
    frame.vectors.reserve(static_cast<size_t>(x.dim()));
    for (const CMat& v : x.basis()) frame.vectors.push_back(v * inv_sqrt);

    const double defect = frame_defect(x, frame);
    if (defect > tol.bound(1.0) * 100)
        throw Error(ErrorCode::FrameFailure,
                    "left_basis: reconstruction defect " + std::to_string(defect));
    return frame;
}

// ============================================================================
// Amplifications
// ============================================================================

Bimodule amplify_rows(const Bimodule& x, Index n, const Tolerance& tol) {
    if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "amplify_rows: n must be >= 1");
    const Index p = x.rows();
    const Index q = x.cols();

    // Right algebra M_n(B): n x n block matrices with entries in B.
    std::vector<CMat> right_gens;
    for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l)
            for (const CMat& b : x.right().basis())
                right_gens.push_back(embed_block(b, k, l, n * q, n * q, q, q));
    Algebra right = Algebra::validate(right_gens, tol);

    std::vector<CMat> basis;
    for (Index l = 0; l < n; ++l)
        for (const CMat& v : x.basis())
            basis.push_back(embed_block(v, 0, l, p, n * q, p, q));
    return Bimodule::verify(x.left(), right, basis, tol);
}

Bimodule amplify_square(const Bimodule& x, Index m, const Tolerance& tol) {
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "amplify_square: m must be >= 1");
    const Index p = x.rows();
    const Index q = x.cols();

    std::vector<CMat> left_gens, right_gens, basis;
    for (Index k = 0; k < m; ++k)
        for (Index l = 0; l < m; ++l) {
            for (const CMat& a : x.left().basis())
                left_gens.push_back(embed_block(a, k, l, m * p, m * p, p, p));
            for (const CMat& b : x.right().basis())
                right_gens.push_back(embed_block(b, k, l, m * q, m * q, q, q));
            for (const CMat& v : x.basis())
                basis.push_back(embed_block(v, k, l, m * p, m * q, p, q));
        }
    Algebra left = Algebra::validate(left_gens, tol);
    Algebra right = Algebra::validate(right_gens, tol);
    return Bimodule::verify(left, right, basis, tol);
}

}  // namespace morita
