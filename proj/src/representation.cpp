#include "morita/representation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "morita/numerics.hpp"
#include "morita/random.hpp"

namespace morita {

namespace {

// Orthonormal column basis of the range of a hermitian projection.
CMat projection_range(const CMat& p, const Tolerance& tol) {
    const EigResult eig = hermitian_eig(p, Tolerance{1e-7, 1e-9});
    Index rank = 0;
    for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
        const double lam = eig.eigenvalues(i);
        if (lam > 0.5) {
            ++rank;
        } else if (lam > 0.1 && lam < 0.9) {
            throw Error(ErrorCode::NumericalDegeneracy,
                        "eigenvalue of a projection is far from {0, 1}");
        }
    }
    (void)tol;
    return eig.u.leftCols(rank);
}

// Rank of a projection read off its trace, which must be near an integer.
Index projection_rank(const CMat& p) {
    const double t = p.trace().real();
    const auto r = std::llround(t);
    if (std::abs(t - static_cast<double>(r)) > 1e-6 || r < 0) {
        throw Error(ErrorCode::NumericalDegeneracy,
                    "projection trace is not close to a nonnegative integer");
    }
    return static_cast<Index>(r);
}

double max_image_norm(const std::vector<CMat>& images) {
    double s = 0.0;
    for (const CMat& m : images) s = std::max(s, spectral_norm(m));
    return s;
}

}  // namespace

// ----------------------------------------------------------------------------
// Representation
// ----------------------------------------------------------------------------

Representation Representation::validate(Algebra algebra, std::vector<CMat> images,
                                        const Tolerance& tol) {
    if (static_cast<Index>(images.size()) != algebra.dim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "number of images does not match the algebra dimension");
    }
    const Index d = images.front().rows();
    if (d < 1) {
        throw Error(ErrorCode::DegenerateSpace,
                    "representation space must have dimension at least one");
    }
    for (const CMat& m : images) {
        if (m.rows() != d || m.cols() != d) {
            throw Error(ErrorCode::ShapeMismatch, "images must be square and equally sized");
        }
        if (!all_finite(m)) throw Error(ErrorCode::NonFinite, "image has non-finite entries");
    }

    Representation r;
    r.algebra_ = std::move(algebra);
    r.space_dim_ = d;
    r.images_ = std::move(images);

    const double s = max_image_norm(r.images_);
    const double bound = tol.bound(std::max(1.0, s * s)) * 10.0;
    const Index n = r.algebra_.dim();
    for (Index i = 0; i < n; ++i) {
        const CMat& bi = r.algebra_.basis()[i];
        for (Index j = 0; j < n; ++j) {
            const CMat prod = r.apply(bi * r.algebra_.basis()[j]);
            const double res = spectral_norm(r.images_[i] * r.images_[j] - prod);
            if (res > bound) {
                throw Error(ErrorCode::NotMultiplicative,
                            "images do not respect products (residual " +
                                std::to_string(res) + ")");
            }
        }
        const double star_res = spectral_norm(r.apply(bi.adjoint()) - r.images_[i].adjoint());
        if (star_res > bound) {
            throw Error(ErrorCode::NotStar, "images do not respect the adjoint");
        }
    }
    const double unit_res =
        spectral_norm(r.apply(r.algebra_.unit()) - CMat::Identity(d, d));
    if (unit_res > bound) {
        throw Error(ErrorCode::NotUnital, "image of the unit is not the identity");
    }
    return r;
}

Representation Representation::unchecked(Algebra algebra, std::vector<CMat> images,
                                         Index space_dim) {
    Representation r;
    r.algebra_ = std::move(algebra);
    r.space_dim_ = space_dim;
    r.images_ = std::move(images);
    return r;
}

CMat Representation::apply(const CMat& a) const {
    const CVec c = algebra_.coords(a);
    CMat out = CMat::Zero(space_dim_, space_dim_);
    for (Index i = 0; i < c.size(); ++i) out += c(i) * images_[i];
    return out;
}

MultiplicityVector multiplicities(const Representation& r, const Tolerance& tol) {
    const BlockStructure bs = decompose(r.algebra(), tol);
    MultiplicityVector mv;
    for (const Block& blk : bs.blocks) {
        const Index rank = projection_rank(r.apply(blk.central_projection));
        if (rank % blk.size != 0) {
            throw Error(ErrorCode::NumericalDegeneracy,
                        "projection rank is not a multiple of the block size");
        }
        mv.counts.push_back(rank / blk.size);
    }
    return mv;
}

std::optional<CMat> unitary_equivalence(const Representation& r1,
                                        const Representation& r2,
                                        const Tolerance& tol) {
    if (!same_span(r1.algebra(), r2.algebra(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "representations are not over the same algebra");
    }
    if (r1.space_dim() != r2.space_dim()) return std::nullopt;

    const BlockStructure bs = decompose(r1.algebra(), tol);
    const Index d = r1.space_dim();
    CMat u = CMat::Zero(d, d);
    for (const Block& blk : bs.blocks) {
        const CMat p1 = r1.apply(blk.unit(0, 0));
        const CMat p2 = r2.apply(blk.unit(0, 0));
        if (projection_rank(p1) != projection_rank(p2)) return std::nullopt;
        const CMat b1 = projection_range(p1, tol);
        const CMat b2 = projection_range(p2, tol);
        for (Index i = 0; i < blk.size; ++i) {
            const CMat& ei1 = blk.unit(i, 0);
            u += (r2.apply(ei1) * b2) * (r1.apply(ei1) * b1).adjoint();
        }
    }

    const double s = std::max(1.0, max_image_norm(r1.images()));
    const double bound = tol.bound(s) * 100.0;
    if (spectral_norm(u * u.adjoint() - CMat::Identity(d, d)) > bound) {
        throw Error(ErrorCode::NumericalDegeneracy,
                    "constructed intertwiner failed to be unitary");
    }
    for (Index i = 0; i < r1.algebra().dim(); ++i) {
        const CMat lhs = u * r1.images()[i];
        const CMat rhs = r2.apply(r1.algebra().basis()[i]) * u;
        if (spectral_norm(lhs - rhs) > bound) {
            throw Error(ErrorCode::NumericalDegeneracy,
                        "constructed intertwiner failed to intertwine");
        }
    }
    return u;
}

// ----------------------------------------------------------------------------
// Bimodule representations
// ----------------------------------------------------------------------------

CMat BimoduleRep::apply_x(const Bimodule& x, const CMat& v) const {
    const CVec c = x.coords(v);
    CMat out = CMat::Zero(pi_left.space_dim(), pi_right.space_dim());
    for (Index i = 0; i < c.size(); ++i) out += c(i) * x_images[i];
    return out;
}

BimoduleRepVerdict verify_bimodule_rep(const BimoduleRep& rep, const Bimodule& x,
                                       const Tolerance& tol) {
    if (static_cast<Index>(rep.x_images.size()) != x.dim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "number of module images does not match the bimodule dimension");
    }
    if (!same_span(rep.pi_left.algebra(), x.left(), tol) ||
        !same_span(rep.pi_right.algebra(), x.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "bimodule representation algebras do not match the bimodule");
    }
    const Index dh = rep.pi_left.space_dim();
    const Index dk = rep.pi_right.space_dim();
    for (const CMat& m : rep.x_images) {
        if (m.rows() != dh || m.cols() != dk) {
            throw Error(ErrorCode::ShapeMismatch, "module image has the wrong shape");
        }
    }

    BimoduleRepVerdict v;
    const Index n = x.dim();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const CMat& vi = x.basis()[i];
            const CMat& vj = x.basis()[j];
            const double res_left = spectral_norm(
                rep.x_images[i] * rep.x_images[j].adjoint() -
                rep.pi_left.apply(vi * vj.adjoint()));
            const double res_right = spectral_norm(
                rep.x_images[i].adjoint() * rep.x_images[j] -
                rep.pi_right.apply(vi.adjoint() * vj));
            v.left_inner_residual = std::max(v.left_inner_residual, res_left);
            v.right_inner_residual = std::max(v.right_inner_residual, res_right);
        }
    }
    for (Index j = 0; j < n; ++j) {
        const CMat& vj = x.basis()[j];
        for (Index i = 0; i < x.left().dim(); ++i) {
            const CMat& a = x.left().basis()[i];
            const double res = spectral_norm(rep.apply_x(x, a * vj) -
                                             rep.pi_left.apply(a) * rep.x_images[j]);
            v.action_residual = std::max(v.action_residual, res);
        }
        for (Index i = 0; i < x.right().dim(); ++i) {
            const CMat& b = x.right().basis()[i];
            const double res = spectral_norm(rep.apply_x(x, vj * b) -
                                             rep.x_images[j] * rep.pi_right.apply(b));
            v.action_residual = std::max(v.action_residual, res);
        }
    }

    double s = max_image_norm(rep.x_images);
    s = std::max({1.0, s * s, max_image_norm(rep.pi_left.images()),
                  max_image_norm(rep.pi_right.images())});
    v.pass = v.max_residual() <= tol.bound(s) * 10.0;
    return v;
}

// ----------------------------------------------------------------------------
// Witness constructors
// ----------------------------------------------------------------------------

BimoduleRep reflexivity_witness(const Representation& pi, const Bimodule& trivial,
                                const Tolerance& tol) {
    if (!same_span(pi.algebra(), trivial.left(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "trivial bimodule does not match the representation algebra");
    }
    std::vector<CMat> images;
    images.reserve(trivial.dim());
    for (const CMat& m : trivial.basis()) images.push_back(pi.apply(m));
    return BimoduleRep{pi, pi, std::move(images)};
}

BimoduleRep dual_witness(const BimoduleRep& w, const Bimodule& x,
                         const Bimodule& x_dual, const Tolerance& tol) {
    (void)tol;
    std::vector<CMat> images;
    images.reserve(x_dual.dim());
    for (const CMat& z : x_dual.basis()) {
        images.push_back(w.apply_x(x, z.adjoint()).adjoint());
    }
    return BimoduleRep{w.pi_right, w.pi_left, std::move(images)};
}

BimoduleRep tensor_witness(const BimoduleRep& wx, const Bimodule& x,
                           const BimoduleRep& wy, const Bimodule& y,
                           const Bimodule& xy, const Tolerance& tol) {
    if (wx.pi_right.space_dim() != wy.pi_left.space_dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "witnesses do not share their middle representation space");
    }
    if (!same_span(wx.pi_right.algebra(), wy.pi_left.algebra(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "witnesses do not share their middle algebra");
    }

    // Decompose each basis element of the balanced product over the raw
    // products x_i y_j, then map through the product of the operator images.
    CMat prods(x.rows() * y.cols(), x.dim() * y.dim());
    for (Index i = 0; i < x.dim(); ++i) {
        for (Index j = 0; j < y.dim(); ++j) {
            prods.col(i * y.dim() + j) = vec(x.basis()[i] * y.basis()[j]);
        }
    }
    const auto solver = prods.completeOrthogonalDecomposition();

    std::vector<CMat> images;
    images.reserve(xy.dim());
    for (const CMat& m : xy.basis()) {
        const CVec rhs = vec(m);
        const CVec c = solver.solve(rhs);
        if ((prods * c - rhs).norm() > tol.bound(rhs.norm()) * 100.0) {
            throw Error(ErrorCode::StructureInvalid,
                        "balanced product element is not a combination of products");
        }
        CMat img = CMat::Zero(wx.pi_left.space_dim(), wy.pi_right.space_dim());
        for (Index i = 0; i < x.dim(); ++i) {
            for (Index j = 0; j < y.dim(); ++j) {
                img += c(i * y.dim() + j) * wx.x_images[i] * wy.x_images[j];
            }
        }
        images.push_back(std::move(img));
    }
    return BimoduleRep{wx.pi_left, wy.pi_right, std::move(images)};
}

BimoduleRep unitary_witness(const Representation& pi1, const Representation& pi2,
                            const CMat& u, const Bimodule& trivial,
                            const Tolerance& tol) {
    if (pi1.space_dim() != pi2.space_dim() || u.rows() != pi1.space_dim() ||
        u.cols() != pi1.space_dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "unitary does not match the representation spaces");
    }
    if (!same_span(pi1.algebra(), trivial.left(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "trivial bimodule does not match the representation algebra");
    }
    std::vector<CMat> images;
    images.reserve(trivial.dim());
    for (const CMat& m : trivial.basis()) images.push_back(pi1.apply(m) * u.adjoint());
    return BimoduleRep{pi1, pi2, std::move(images)};
}

// ----------------------------------------------------------------------------
// Induced representations
// ----------------------------------------------------------------------------

Induced induce(const Bimodule& x, const Representation& pi_right, const Tolerance& tol) {
    if (!same_span(x.right(), pi_right.algebra(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "representation algebra does not match the right coefficients");
    }
    const Index n = x.dim();
    const Index dk = pi_right.space_dim();

    // Gram matrix of the formal vectors v_i (x) xi_s in i-major order.
    CMat g(n * dk, n * dk);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            g.block(i * dk, j * dk, dk, dk) =
                pi_right.apply(x.basis()[i].adjoint() * x.basis()[j]);
        }
    }
    GramQuotient gq = gram_quotient(g, tol);
    if (gq.quotient_dim < 1) {
        throw Error(ErrorCode::DegenerateSpace, "induced space collapsed to zero");
    }

    // Left action: a (v_j (x) xi) = sum_i coords(a v_j)_i (v_i (x) xi).
    std::vector<CMat> left_images;
    left_images.reserve(x.left().dim());
    const CMat id_k = CMat::Identity(dk, dk);
    for (const CMat& a : x.left().basis()) {
        CMat formal(n, n);
        for (Index j = 0; j < n; ++j) formal.col(j) = x.coords(a * x.basis()[j]);
        left_images.push_back(gq.compress(kron(formal, id_k)));
    }
    Representation pi_induced =
        Representation::validate(x.left(), std::move(left_images), tol);

    // Module action: v_j sends xi_t to the class of v_j (x) xi_t.
    std::vector<CMat> x_images;
    x_images.reserve(n);
    for (Index j = 0; j < n; ++j) {
        x_images.push_back(gq.coords.middleCols(j * dk, dk));
    }

    Induced out;
    out.rep = BimoduleRep{std::move(pi_induced), pi_right, std::move(x_images)};
    out.gram = std::move(gq);
    return out;
}

std::optional<BimoduleRep> sme_representations(const Representation& pi_left,
                                               const Representation& pi_right,
                                               const Bimodule& x, const Tolerance& tol) {
    const Induced ind = induce(x, pi_right, tol);
    const std::optional<CMat> u = unitary_equivalence(ind.rep.pi_left, pi_left, tol);
    if (!u) return std::nullopt;
    std::vector<CMat> images;
    images.reserve(ind.rep.x_images.size());
    for (const CMat& m : ind.rep.x_images) images.push_back(*u * m);
    return BimoduleRep{pi_left, pi_right, std::move(images)};
}

// ----------------------------------------------------------------------------
// Linking representations and corner transport
// ----------------------------------------------------------------------------

Representation linking_rep(const BimoduleRep& b, const Bimodule& x,
                           const LinkingAlgebra& l, const Tolerance& tol) {
    const Index p = l.p_dim;
    const Index q = l.q_dim;
    const Index dh = b.pi_left.space_dim();
    const Index dk = b.pi_right.space_dim();

    std::vector<CMat> images;
    images.reserve(l.algebra.dim());
    for (const CMat& m : l.algebra.basis()) {
        CMat img = CMat::Zero(dh + dk, dh + dk);
        img.topLeftCorner(dh, dh) = b.pi_left.apply(m.topLeftCorner(p, p));
        img.topRightCorner(dh, dk) = b.apply_x(x, m.topRightCorner(p, q));
        img.bottomLeftCorner(dk, dh) =
            b.apply_x(x, m.bottomLeftCorner(q, p).adjoint()).adjoint();
        img.bottomRightCorner(dk, dk) = b.pi_right.apply(m.bottomRightCorner(q, q));
        images.push_back(std::move(img));
    }
    return Representation::validate(l.algebra, std::move(images), tol);
}

Bimodule corner_bimodule(const LinkingAlgebra& l, const Tolerance& tol) {
    const Index p = l.p_dim;
    std::vector<CMat> gens;
    gens.reserve(l.algebra.dim());
    for (const CMat& m : l.algebra.basis()) gens.push_back(m.topRows(p));
    return Bimodule::verify(l.left, l.algebra, std::move(gens), tol);
}

BimoduleRep corner_witness(const LinkingAlgebra& l, const Bimodule& x,
                           const BimoduleRep& b, const Representation& rho,
                           const Tolerance& tol) {
    (void)tol;
    const Index p = l.p_dim;
    const Index q = l.q_dim;
    const Index dh = b.pi_left.space_dim();
    const Index dk = b.pi_right.space_dim();
    if (rho.space_dim() != dh + dk) {
        throw Error(ErrorCode::DimensionMismatch,
                    "linking representation space does not match the witness spaces");
    }

    const Bimodule y = corner_bimodule(l, tol);
    std::vector<CMat> images;
    images.reserve(y.dim());
    for (const CMat& m : y.basis()) {
        CMat img(dh, dh + dk);
        img.leftCols(dh) = b.pi_left.apply(m.leftCols(p));
        img.rightCols(dk) = b.apply_x(x, m.rightCols(q));
        images.push_back(std::move(img));
    }
    return BimoduleRep{b.pi_left, rho, std::move(images)};
}

CMat CornerTransport::theta_apply(const Algebra& from, const CMat& a) const {
    const CVec c = from.coords(a);
    CMat out = CMat::Zero(theta_images.front().rows(), theta_images.front().cols());
    for (Index i = 0; i < c.size(); ++i) out += c(i) * theta_images[i];
    return out;
}

BgrResult bgr_transport(const LinkingAlgebra& l, const Representation& rho,
                        std::uint64_t seed, const Tolerance& tol) {
    const BlockStructure bs = decompose(l.algebra, tol);
    BgrResult out;
    for (const Block& blk : bs.blocks) {
        out.ranks.p_ranks.push_back(
            projection_rank(blk.central_projection * l.p_proj));
        out.ranks.q_ranks.push_back(
            projection_rank(blk.central_projection * l.q_proj));
    }
    if (!out.ranks.feasible()) return out;

    const Index q = l.q_dim;
    const Index rank_p = projection_rank(l.p_proj);
    const double bound = tol.bound(1.0) * 100.0;

    Rng rng(seed);
    CMat w;
    bool found = false;
    for (int attempt = 0; attempt < 16 && !found; ++attempt) {
        CVec coeff(l.algebra.dim());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Index i = 0; i < coeff.size(); ++i) coeff(i) = Cplx(gauss(rng), gauss(rng));
        const CMat m = l.algebra.combine(coeff);
        w = polar_partial_isometry(l.q_proj * m * l.p_proj, tol);
        if (std::abs(w.squaredNorm() - static_cast<double>(rank_p)) > 1e-6) continue;
        if (l.algebra.membership_residual(w) > bound) continue;
        if (spectral_norm(w.adjoint() * w - l.p_proj) > bound) continue;
        if (spectral_norm(w * w.adjoint() - l.q_proj) > bound) continue;
        found = true;
    }
    if (!found) {
        throw Error(ErrorCode::NumericalDegeneracy,
                    "failed to produce a partial isometry between the corners");
    }

    CornerTransport tr;
    tr.w = w;
    tr.theta_images.reserve(l.left.dim());
    for (const CMat& a : l.left.basis()) {
        const CMat moved = w * l.embed_left(a) * w.adjoint();
        CMat img = moved.bottomRightCorner(q, q);
        if (l.right.membership_residual(img) > bound * spectral_norm(a)) {
            throw Error(ErrorCode::StructureInvalid,
                        "transported element escapes the opposite corner");
        }
        tr.theta_images.push_back(std::move(img));
    }

    const Index dh = projection_rank(rho.apply(l.p_proj));
    const Index dk = rho.space_dim() - dh;
    const CMat rho_w = rho.apply(w);
    tr.w_tilde = rho_w.bottomLeftCorner(dk, dh);

    const double s = std::max(1.0, max_image_norm(rho.images()));
    const double rep_bound = tol.bound(s) * 100.0;
    if (spectral_norm(tr.w_tilde.adjoint() * tr.w_tilde - CMat::Identity(dh, dh)) >
            rep_bound ||
        spectral_norm(tr.w_tilde * tr.w_tilde.adjoint() - CMat::Identity(dk, dk)) >
            rep_bound) {
        throw Error(ErrorCode::StructureInvalid,
                    "image of the transport is not unitary between the corners");
    }
    for (Index i = 0; i < l.left.dim(); ++i) {
        const CMat lhs = rho.apply(l.embed_right(tr.theta_images[i]))
                             .bottomRightCorner(dk, dk);
        const CMat rhs = tr.w_tilde *
                         rho.apply(l.embed_left(l.left.basis()[i]))
                             .topLeftCorner(dh, dh) *
                         tr.w_tilde.adjoint();
        if (spectral_norm(lhs - rhs) > rep_bound) {
            throw Error(ErrorCode::StructureInvalid,
                        "transport does not intertwine the corner representations");
        }
    }

    out.transport = std::move(tr);
    return out;
}

// ----------------------------------------------------------------------------
// Stabilisation
// ----------------------------------------------------------------------------

Stabilized stabilize_rep(const Representation& pi, Index m, const Tolerance& tol) {
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "amplification order must be >= 1");
    const Algebra& a = pi.algebra();
    const Index na = a.ambient_dim();
    const Index dh = pi.space_dim();

    // Ambient algebra of m x m blocks over the base algebra.
    std::vector<CMat> sq_gens;
    sq_gens.reserve(static_cast<std::size_t>(m * m) * a.basis().size());
    for (Index k = 0; k < m; ++k) {
        for (Index lcol = 0; lcol < m; ++lcol) {
            CMat unit = CMat::Zero(m, m);
            unit(k, lcol) = Cplx(1.0, 0.0);
            for (const CMat& b : a.basis()) sq_gens.push_back(kron(unit, b));
        }
    }
    Algebra big = Algebra::validate(std::move(sq_gens), tol, false);

    // First block column as the equivalence bimodule between them.
    std::vector<CMat> col_gens;
    col_gens.reserve(static_cast<std::size_t>(m) * a.basis().size());
    for (Index k = 0; k < m; ++k) {
        CMat unit = CMat::Zero(m, 1);
        unit(k, 0) = Cplx(1.0, 0.0);
        for (const CMat& b : a.basis()) col_gens.push_back(kron(unit, b));
    }
    Bimodule x = Bimodule::verify(big, a, std::move(col_gens), tol);

    // Amplified representation: apply pi blockwise.
    std::vector<CMat> big_images;
    big_images.reserve(big.basis().size());
    for (const CMat& c : big.basis()) {
        CMat img = CMat::Zero(m * dh, m * dh);
        for (Index k = 0; k < m; ++k) {
            for (Index lcol = 0; lcol < m; ++lcol) {
                img.block(k * dh, lcol * dh, dh, dh) =
                    pi.apply(c.block(k * na, lcol * na, na, na));
            }
        }
        big_images.push_back(std::move(img));
    }
    Representation pi_s = Representation::validate(big, std::move(big_images), tol);

    // Module images stack pi over the block column.
    std::vector<CMat> x_images;
    x_images.reserve(x.basis().size());
    for (const CMat& v : x.basis()) {
        CMat img = CMat::Zero(m * dh, dh);
        for (Index k = 0; k < m; ++k) {
            img.block(k * dh, 0, dh, dh) = pi.apply(v.block(k * na, 0, na, na));
        }
        x_images.push_back(std::move(img));
    }

    Stabilized out;
    out.bimodule = std::move(x);
    out.pi_s = pi_s;
    out.witness = BimoduleRep{std::move(pi_s), pi, std::move(x_images)};
    out.embed_isometry = CMat::Zero(m * dh, dh);
    out.embed_isometry.topRows(dh) = CMat::Identity(dh, dh);
    return out;
}

}  // namespace morita
