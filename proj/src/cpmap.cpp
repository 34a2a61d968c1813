#include "morita/cpmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "morita/numerics.hpp"

namespace morita {

namespace {

double map_scale(const CPMap& phi) { return std::max(1.0, phi.norm()); }

// Horizontal stack [pi(b_1)v ... pi(b_n)v] whose rank decides minimality.
CMat minimality_stack(const StinespringTriple& t) {
    const Index n = static_cast<Index>(t.pi.images().size());
    const Index h = t.v.cols();
    CMat stack(t.dilation_dim, n * h);
    for (Index i = 0; i < n; ++i) {
        stack.middleCols(i * h, h) = t.pi.images()[i] * t.v;
    }
    return stack;
}

std::vector<Index> identity_order(Index n) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    return order;
}

}  // namespace

// ----------------------------------------------------------------------------
// CP maps
// ----------------------------------------------------------------------------

CPMap CPMap::make(Algebra source, Index target_dim, std::vector<CMat> images,
                  const Tolerance& tol) {
    if (target_dim < 1) {
        throw Error(ErrorCode::ParamOutOfRange, "target dimension must be >= 1");
    }
    if (static_cast<Index>(images.size()) != source.dim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "number of images does not match the source dimension");
    }
    for (const CMat& m : images) {
        if (m.rows() != target_dim || m.cols() != target_dim) {
            throw Error(ErrorCode::ShapeMismatch, "image has the wrong shape");
        }
        if (!all_finite(m)) throw Error(ErrorCode::NonFinite, "image has non-finite entries");
    }

    CPMap phi;
    phi.source_ = std::move(source);
    phi.target_dim_ = target_dim;
    phi.images_ = std::move(images);

    const double bound = tol.bound(map_scale(phi)) * 10.0;
    for (Index i = 0; i < phi.source_.dim(); ++i) {
        const CMat expect = phi.apply(phi.source_.basis()[i].adjoint());
        if (spectral_norm(expect - phi.images_[i].adjoint()) > bound) {
            throw Error(ErrorCode::NonHermitian, "map does not respect the adjoint");
        }
    }
    return phi;
}

CMat CPMap::apply(const CMat& a) const {
    const CVec c = source_.coords(a);
    CMat out = CMat::Zero(target_dim_, target_dim_);
    for (Index i = 0; i < c.size(); ++i) out += c(i) * images_[i];
    return out;
}

CMat CPMap::unit_image() const { return apply(source_.unit()); }

double CPMap::norm() const { return spectral_norm(unit_image()); }

ChoiCertificate verify_cp(const CPMap& phi, const Tolerance& tol) {
    const BlockStructure bs = decompose(phi.source(), tol);
    const Index h = phi.target_dim();

    ChoiCertificate cert;
    cert.cp = true;
    cert.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const Block& blk : bs.blocks) {
        CMat choi(blk.size * h, blk.size * h);
        for (Index i = 0; i < blk.size; ++i) {
            for (Index j = 0; j < blk.size; ++j) {
                choi.block(i * h, j * h, h, h) = phi.apply(blk.unit(i, j));
            }
        }
        const PsdVerdict verdict = is_psd(choi, tol);
        cert.cp = cert.cp && verdict.psd;
        cert.min_eigenvalue = std::min(cert.min_eigenvalue, verdict.min_eigenvalue);
        cert.choi_blocks.push_back(std::move(choi));
    }
    return cert;
}

// ----------------------------------------------------------------------------
// Minimal Stinespring dilation
// ----------------------------------------------------------------------------

DilationVerdict verify_stinespring(const StinespringTriple& t, const CPMap& phi,
                                   const Tolerance& tol) {
    const Algebra& a = phi.source();
    DilationVerdict out;
    for (Index i = 0; i < a.dim(); ++i) {
        const CMat reconstructed = t.v.adjoint() * t.pi.images()[i] * t.v;
        out.dilation_residual = std::max(
            out.dilation_residual, spectral_norm(phi.images()[i] - reconstructed));
    }
    const double vnorm = spectral_norm(t.v);
    out.norm_residual = std::abs(vnorm * vnorm - phi.norm());
    out.minimality_rank =
        t.dilation_dim == 0 ? 0 : numeric_rank(minimality_stack(t), tol);
    out.minimal = out.minimality_rank == t.dilation_dim;

    const double bound = tol.bound(map_scale(phi)) * 10.0;
    out.pass = out.minimal && out.dilation_residual <= bound &&
               out.norm_residual <= bound;
    return out;
}

StinespringTriple minimal_stinespring(const CPMap& phi, const Tolerance& tol) {
    return minimal_stinespring(phi, identity_order(phi.source().dim()), tol);
}

StinespringTriple minimal_stinespring(const CPMap& phi,
                                      const std::vector<Index>& basis_order,
                                      const Tolerance& tol) {
    const Algebra& a = phi.source();
    const Index n = a.dim();
    const Index h = phi.target_dim();
    {
        std::vector<Index> sorted = basis_order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != identity_order(n)) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "basis order is not a permutation of the source basis");
        }
    }

    // Gram form of the formal generators b_{order[p]} (x) xi_k.
    CMat g(n * h, n * h);
    for (Index p = 0; p < n; ++p) {
        for (Index q = 0; q < n; ++q) {
            g.block(p * h, q * h, h, h) =
                phi.apply(a.basis()[basis_order[p]].adjoint() * a.basis()[basis_order[q]]);
        }
    }
    GramQuotient gq;
    try {
        gq = gram_quotient(g, tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotPsd) {
            throw Error(ErrorCode::NotCp,
                        "map is not completely positive: dilation Gram form has a "
                        "negative eigenvalue");
        }
        throw;
    }

    StinespringTriple t;
    t.dilation_dim = gq.quotient_dim;
    t.basis_order = basis_order;
    if (t.dilation_dim == 0) {
        t.pi = Representation::unchecked(
            a, std::vector<CMat>(static_cast<std::size_t>(n), CMat::Zero(0, 0)), 0);
        t.v = CMat::Zero(0, h);
        t.gram = std::move(gq);
        return t;
    }

    const CMat id_h = CMat::Identity(h, h);
    std::vector<CMat> images;
    images.reserve(static_cast<std::size_t>(n));
    for (const CMat& b : a.basis()) {
        CMat formal(n, n);
        for (Index q = 0; q < n; ++q) {
            const CVec c = a.coords(b * a.basis()[basis_order[q]]);
            for (Index p = 0; p < n; ++p) formal(p, q) = c(basis_order[p]);
        }
        images.push_back(gq.compress(kron(formal, id_h)));
    }
    t.pi = Representation::validate(a, std::move(images), tol);

    const CVec unit_full = a.coords(a.unit());
    CMat unit_perm(n, 1);
    for (Index p = 0; p < n; ++p) unit_perm(p, 0) = unit_full(basis_order[p]);
    t.v = gq.coords * kron(unit_perm, id_h);
    t.gram = std::move(gq);

    const DilationVerdict verdict = verify_stinespring(t, phi, tol);
    if (!verdict.pass) {
        throw Error(ErrorCode::NumericalDegeneracy,
                    "dilation failed verification (residual " +
                        std::to_string(verdict.dilation_residual) + ")");
    }
    return t;
}

CMat stinespring_uniqueness(const StinespringTriple& t1, const StinespringTriple& t2,
                            const Tolerance& tol) {
    if (!same_span(t1.pi.algebra(), t2.pi.algebra(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch, "triples are not over the same algebra");
    }
    if (t1.v.cols() != t2.v.cols()) {
        throw Error(ErrorCode::NotSameMap, "triples have different target dimensions");
    }
    if (t1.dilation_dim != t2.dilation_dim) {
        throw Error(ErrorCode::NotSameMap,
                    "minimal dilations of one map must have equal dimension");
    }
    if (t1.dilation_dim == 0) return CMat::Zero(0, 0);

    const Algebra& a = t1.pi.algebra();
    const Index h = t1.v.cols();
    CMat w1(t1.dilation_dim, a.dim() * h);
    CMat w2(t2.dilation_dim, a.dim() * h);
    for (Index i = 0; i < a.dim(); ++i) {
        w1.middleCols(i * h, h) = t1.pi.images()[i] * t1.v;
        w2.middleCols(i * h, h) = t2.pi.apply(a.basis()[i]) * t2.v;
    }
    const CMat u = polar_partial_isometry(w2 * w1.adjoint(), tol);

    const double s = std::max(1.0, spectral_norm(t1.v));
    const double bound = tol.bound(s * s) * 100.0;
    const Index d = t1.dilation_dim;
    double residual =
        spectral_norm(u.adjoint() * u - CMat::Identity(d, d));
    residual = std::max(residual, spectral_norm(u * t1.v - t2.v));
    for (Index i = 0; i < a.dim(); ++i) {
        residual = std::max(
            residual, spectral_norm(u * t1.pi.images()[i] * u.adjoint() -
                                    t2.pi.apply(a.basis()[i])));
    }
    if (residual > bound) {
        throw Error(ErrorCode::NotSameMap,
                    "triples do not dilate one common map (residual " +
                        std::to_string(residual) + ")");
    }
    return u;
}

// ----------------------------------------------------------------------------
// Strong Morita equivalence of CP maps
// ----------------------------------------------------------------------------

std::optional<CpSmeWitness> sme_cpmaps(const CPMap& phi, const CPMap& psi,
                                       const Bimodule& x, const Tolerance& tol) {
    if (!same_span(phi.source(), x.left(), tol) ||
        !same_span(psi.source(), x.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "map sources do not match the bimodule coefficients");
    }
    StinespringTriple t_phi = minimal_stinespring(phi, tol);
    StinespringTriple t_psi = minimal_stinespring(psi, tol);
    if (t_phi.dilation_dim == 0 || t_psi.dilation_dim == 0) {
        throw Error(ErrorCode::ZeroMap,
                    "equivalence is defined only between nonzero maps");
    }
    std::optional<BimoduleRep> rep =
        sme_representations(t_phi.pi, t_psi.pi, x, tol);
    if (!rep) return std::nullopt;
    return CpSmeWitness{std::move(t_phi), std::move(t_psi), std::move(*rep)};
}

// ----------------------------------------------------------------------------
// Linking CP map
// ----------------------------------------------------------------------------

LinkingCpResult linking_cp(const CPMap& phi, const CPMap& psi, const CpSmeWitness& w,
                           const Bimodule& x, const Tolerance& tol) {
    LinkingCpResult out;
    out.link = linking(x, tol);
    const Representation rho = linking_rep(w.rep, x, out.link, tol);

    const Index k1 = w.phi_triple.dilation_dim;
    const Index k2 = w.psi_triple.dilation_dim;
    const Index h1 = phi.target_dim();
    const Index h2 = psi.target_dim();
    CMat v = CMat::Zero(k1 + k2, h1 + h2);
    v.topLeftCorner(k1, h1) = w.phi_triple.v;
    v.bottomRightCorner(k2, h2) = w.psi_triple.v;

    std::vector<CMat> images;
    images.reserve(static_cast<std::size_t>(out.link.algebra.dim()));
    for (const CMat& img : rho.images()) {
        images.push_back(v.adjoint() * img * v);
    }
    out.tau = CPMap::make(out.link.algebra, h1 + h2, std::move(images), tol);

    out.triple.pi = rho;
    out.triple.v = std::move(v);
    out.triple.dilation_dim = k1 + k2;
    const DilationVerdict verdict = verify_stinespring(out.triple, out.tau, tol);
    if (!verdict.pass) {
        throw Error(ErrorCode::StructureInvalid,
                    "assembled linking triple failed verification");
    }

    // The two corner compressions recover the original maps.
    const double bound =
        tol.bound(std::max(map_scale(phi), map_scale(psi))) * 10.0;
    for (Index i = 0; i < phi.source().dim(); ++i) {
        CMat expected = CMat::Zero(h1 + h2, h1 + h2);
        expected.topLeftCorner(h1, h1) = phi.images()[i];
        const CMat got = out.tau.apply(out.link.embed_left(phi.source().basis()[i]));
        out.compression_residual =
            std::max(out.compression_residual, spectral_norm(got - expected));
    }
    for (Index i = 0; i < psi.source().dim(); ++i) {
        CMat expected = CMat::Zero(h1 + h2, h1 + h2);
        expected.bottomRightCorner(h2, h2) = psi.images()[i];
        const CMat got = out.tau.apply(out.link.embed_right(psi.source().basis()[i]));
        out.compression_residual =
            std::max(out.compression_residual, spectral_norm(got - expected));
    }
    if (out.compression_residual > bound) {
        throw Error(ErrorCode::StructureInvalid,
                    "corner compressions do not recover the original maps");
    }
    return out;
}

// ----------------------------------------------------------------------------
// Transport along a corner isomorphism
// ----------------------------------------------------------------------------

TransportedCp transport_cp(const CornerTransport& tr, const Representation& pi_phi,
                           const CPMap& psi, const StinespringTriple& psi_triple,
                           const Tolerance& tol) {
    const Algebra& a = pi_phi.algebra();
    const CMat& wt = tr.w_tilde;
    if (wt.cols() != pi_phi.space_dim() ||
        wt.rows() != psi_triple.pi.space_dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "transport unitary does not match the dilation spaces");
    }

    const double bound = tol.bound(map_scale(psi)) * 100.0;
    for (Index i = 0; i < a.dim(); ++i) {
        const CMat lhs = psi_triple.pi.apply(tr.theta_apply(a, a.basis()[i]));
        const CMat rhs = wt * pi_phi.images()[i] * wt.adjoint();
        if (spectral_norm(lhs - rhs) > bound) {
            throw Error(ErrorCode::IntertwinerMismatch,
                        "transport data does not intertwine the dilation "
                        "representations");
        }
    }

    std::vector<CMat> images;
    images.reserve(static_cast<std::size_t>(a.dim()));
    for (Index i = 0; i < a.dim(); ++i) {
        images.push_back(psi.apply(tr.theta_apply(a, a.basis()[i])));
    }
    TransportedCp out;
    out.phi = CPMap::make(a, psi.target_dim(), std::move(images), tol);
    out.triple.pi = pi_phi;
    out.triple.v = wt.adjoint() * psi_triple.v;
    out.triple.dilation_dim = pi_phi.space_dim();
    const DilationVerdict verdict = verify_stinespring(out.triple, out.phi, tol);
    if (!verdict.pass) {
        throw Error(ErrorCode::StructureInvalid,
                    "transported triple failed verification");
    }
    return out;
}

// ----------------------------------------------------------------------------
// Stabilisation
// ----------------------------------------------------------------------------

StabilizedCp stabilize_cp(const CPMap& phi, Index m, const Tolerance& tol) {
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "amplification order must be >= 1");
    StabilizedCp out;
    out.base_triple = minimal_stinespring(phi, tol);
    if (out.base_triple.dilation_dim == 0) {
        throw Error(ErrorCode::ZeroMap, "cannot stabilise the zero map");
    }
    out.stab = stabilize_rep(out.base_triple.pi, m, tol);

    const Algebra& big = out.stab.witness.pi_left.algebra();
    const Index na = phi.source().ambient_dim();
    const Index h = phi.target_dim();
    std::vector<CMat> images;
    images.reserve(static_cast<std::size_t>(big.dim()));
    for (const CMat& c : big.basis()) {
        CMat img = CMat::Zero(m * h, m * h);
        for (Index k = 0; k < m; ++k) {
            for (Index lcol = 0; lcol < m; ++lcol) {
                img.block(k * h, lcol * h, h, h) =
                    phi.apply(c.block(k * na, lcol * na, na, na));
            }
        }
        images.push_back(std::move(img));
    }
    out.phi_s = CPMap::make(big, m * h, std::move(images), tol);

    out.triple.pi = out.stab.pi_s;
    out.triple.v = kron(CMat::Identity(m, m), out.base_triple.v);
    out.triple.dilation_dim = m * out.base_triple.dilation_dim;
    const DilationVerdict verdict = verify_stinespring(out.triple, out.phi_s, tol);
    if (!verdict.pass) {
        throw Error(ErrorCode::StructureInvalid,
                    "stabilised triple failed verification");
    }
    return out;
}

}  // namespace morita
