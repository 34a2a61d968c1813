#include "morita/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "morita/numerics.hpp"
#include "morita/span.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Inclusions and conditional expectations
// ----------------------------------------------------------------------------

Inclusion Inclusion::make(Algebra big, Algebra small, const Tolerance& tol) {
    if (big.ambient_dim() != small.ambient_dim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "inclusion requires one common ambient space");
    }
    for (const CMat& a : small.basis()) {
        if (!big.contains(a)) {
            throw Error(ErrorCode::NotInAlgebra,
                        "subalgebra element escapes the ambient algebra");
        }
    }
    const double unit_gap = spectral_norm(big.unit() - small.unit());
    if (unit_gap > tol.bound(1.0) * 10.0) {
        throw Error(ErrorCode::NoUnit, "inclusion does not share its unit");
    }
    Inclusion inc;
    inc.big_ = std::move(big);
    inc.small_ = std::move(small);
    return inc;
}

ConditionalExpectation ConditionalExpectation::validate(Inclusion inclusion,
                                                        std::vector<CMat> images,
                                                        const Tolerance& tol) {
    ConditionalExpectation e;
    e.inclusion_ = std::move(inclusion);
    const Algebra& big = e.inclusion_.big();
    const Algebra& small = e.inclusion_.small();
    if (static_cast<Index>(images.size()) != big.dim()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "number of images does not match the algebra dimension");
    }
    const Index n = big.ambient_dim();
    for (const CMat& m : images) {
        if (m.rows() != n || m.cols() != n) {
            throw Error(ErrorCode::ShapeMismatch, "image has the wrong shape");
        }
        if (!all_finite(m)) throw Error(ErrorCode::NonFinite, "image has non-finite entries");
    }
    e.images_ = std::move(images);

    const double bound = tol.bound(1.0) * 100.0;
    for (Index i = 0; i < big.dim(); ++i) {
        if (small.membership_residual(e.images_[i]) >
            bound * std::max(1.0, spectral_norm(e.images_[i]))) {
            throw Error(ErrorCode::RangeEscapesSubalgebra,
                        "expectation image escapes the subalgebra");
        }
    }
    for (Index i = 0; i < big.dim(); ++i) {
        if (spectral_norm(e.apply(e.images_[i]) - e.images_[i]) > bound) {
            throw Error(ErrorCode::NotIdempotent, "expectation is not idempotent");
        }
    }
    if (spectral_norm(e.apply(big.unit()) - big.unit()) > bound) {
        throw Error(ErrorCode::NotUnital, "expectation does not fix the unit");
    }
    for (const CMat& a : small.basis()) {
        for (Index i = 0; i < big.dim(); ++i) {
            const CMat& c = big.basis()[i];
            const double left = spectral_norm(e.apply(a * c) - a * e.images_[i]);
            const double right = spectral_norm(e.apply(c * a) - e.images_[i] * a);
            if (std::max(left, right) > bound) {
                throw Error(ErrorCode::NotBimodular,
                            "expectation does not commute with the subalgebra actions");
            }
        }
    }
    const ChoiCertificate cert = verify_cp(e.as_cpmap(tol), tol);
    if (!cert.cp) {
        throw Error(ErrorCode::NotCp,
                    "expectation is not completely positive (min Choi eigenvalue " +
                        std::to_string(cert.min_eigenvalue) + ")");
    }
    return e;
}

CMat ConditionalExpectation::apply(const CMat& c) const {
    const CVec coeff = big().coords(c);
    CMat out = CMat::Zero(c.rows(), c.cols());
    for (Index i = 0; i < coeff.size(); ++i) out += coeff(i) * images_[i];
    return out;
}

CPMap ConditionalExpectation::as_cpmap(const Tolerance& tol) const {
    return CPMap::make(big(), big().ambient_dim(), images_, tol);
}

CPMap compose_cp(const Representation& pi, const ConditionalExpectation& e,
                 const Tolerance& tol) {
    std::vector<CMat> images;
    images.reserve(e.images().size());
    for (const CMat& m : e.images()) images.push_back(pi.apply(m));
    return CPMap::make(e.big(), pi.space_dim(), std::move(images), tol);
}

// ----------------------------------------------------------------------------
// Expectation pairs
// ----------------------------------------------------------------------------

ExpectationPair ExpectationPair::make(ConditionalExpectation e_left,
                                      ConditionalExpectation e_right, Bimodule y,
                                      const std::vector<CMat>& x_generators,
                                      const Tolerance& tol) {
    if (!same_span(e_left.big(), y.left(), tol) ||
        !same_span(e_right.big(), y.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "expectations are not over the coefficient algebras of the bimodule");
    }

    ExpectationPair pair;
    pair.x_sub = Bimodule::verify(e_left.small(), e_right.small(), x_generators, tol);
    const double bound = tol.bound(1.0) * 100.0;
    for (const CMat& v : pair.x_sub.basis()) {
        if (!y.contains(v)) {
            throw Error(ErrorCode::StructureInvalid,
                        "distinguished subspace escapes the ambient bimodule");
        }
    }
    for (const CMat& v : pair.x_sub.basis()) {
        for (const CMat& w : pair.x_sub.basis()) {
            const CMat inner = v.adjoint() * w;
            if (spectral_norm(e_right.apply(inner) - inner) > bound) {
                throw Error(ErrorCode::StructureInvalid,
                            "expectation moves inner products of the subspace");
            }
        }
    }
    SpanBuilder generated(y.rows() * y.cols(), tol);
    for (const CMat& c : e_left.big().basis()) {
        for (const CMat& v : pair.x_sub.basis()) generated.append_matrix(c * v);
    }
    if (generated.dim() != y.dim()) {
        throw Error(ErrorCode::StructureInvalid,
                    "distinguished subspace does not generate the bimodule over "
                    "the left algebra");
    }

    pair.e_left = std::move(e_left);
    pair.e_right = std::move(e_right);
    pair.y = std::move(y);
    return pair;
}

SmeExpectationVerdict verify_sme_expectations(const ExpectationPair& pair,
                                              const Tolerance& tol) {
    SmeExpectationVerdict out;
    for (const CMat& a : pair.e_left.big().basis()) {
        const CMat ea = pair.e_left.apply(a);
        for (const CMat& z : pair.x_sub.basis()) {
            for (const CMat& z1 : pair.x_sub.basis()) {
                const double res = spectral_norm(z.adjoint() * ea * z1 -
                                                 pair.e_right.apply(z.adjoint() * a * z1));
                out.max_residual = std::max(out.max_residual, res);
            }
        }
    }
    out.pass = out.max_residual <= tol.bound(1.0) * 100.0;
    return out;
}

// ----------------------------------------------------------------------------
// Pipeline
// ----------------------------------------------------------------------------

PipelineResult expectation_pipeline(const ExpectationPair& pair,
                                    const Representation& pi_b, const Tolerance& tol) {
    if (!same_span(pi_b.algebra(), pair.x_sub.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "representation is not over the right coefficient algebra");
    }
    const SmeExpectationVerdict compat = verify_sme_expectations(pair, tol);
    if (!compat.pass) {
        throw Error(ErrorCode::StructureInvalid,
                    "pipeline requires a compatible pair (residual " +
                        std::to_string(compat.max_residual) + ")");
    }

    PipelineResult out;
    const double bound = tol.bound(1.0) * 100.0;
    const auto stage = [&out](std::string name, double residual, bool pass) {
        out.stages.push_back(PipelineStage{std::move(name), residual, pass});
    };

    const Algebra& c_alg = pair.e_left.big();
    const Algebra& d_alg = pair.e_right.big();
    const Bimodule& y = pair.y;
    const Bimodule& x = pair.x_sub;
    const Index db = pi_b.space_dim();
    const Index nc = c_alg.dim();
    const Index nd = d_alg.dim();
    const Index ny = y.dim();
    const Index nx = x.dim();
    const CMat id_b = CMat::Identity(db, db);

    // Dilate the compression of pi_b through e_right; its adjoint maps the
    // class of d (x) xi back to psi_d(d) xi.
    const CPMap psi_d = compose_cp(pi_b, pair.e_right, tol);
    const StinespringTriple t_d = minimal_stinespring(psi_d, tol);
    {
        const DilationVerdict v = verify_stinespring(t_d, psi_d, tol);
        double res = v.dilation_residual;
        const CMat back = t_d.v.adjoint() * t_d.gram.coords;
        for (Index j = 0; j < nd; ++j) {
            res = std::max(res, spectral_norm(back.middleCols(j * db, db) -
                                              psi_d.images()[j]));
        }
        stage("dilate_compression", res, v.pass && res <= bound);
    }
    const Index kd = t_d.dilation_dim;

    // Induce pi_b through the subspace and the dilation through the
    // ambient bimodule.
    const Induced ind_a = induce(x, pi_b, tol);
    const Induced ind_c = induce(y, t_d.pi, tol);
    {
        const BimoduleRepVerdict va = verify_bimodule_rep(ind_a.rep, x, tol);
        const BimoduleRepVerdict vc = verify_bimodule_rep(ind_c.rep, y, tol);
        stage("induce", std::max(va.max_residual(), vc.max_residual()),
              va.pass && vc.pass);
    }
    const Index ha = ind_a.gram.quotient_dim;
    const Index hc = ind_c.gram.quotient_dim;

    // Twisted tensor space over the expectation-valued inner product.
    CMat ge(ny * db, ny * db);
    for (Index i = 0; i < ny; ++i) {
        for (Index j = 0; j < ny; ++j) {
            ge.block(i * db, j * db, db, db) =
                psi_d.apply(y.basis()[i].adjoint() * y.basis()[j]);
        }
    }
    const GramQuotient e_gq = gram_quotient(ge, tol);

    // First identification: class of y_i (x) [d_j (x) xi_s] equals the class
    // of (y_i d_j) (x) xi_s.
    CMat phi_map;
    {
        CMat t1(hc, ny * nd * db);
        CMat t2(e_gq.quotient_dim, ny * nd * db);
        Index col = 0;
        for (Index i = 0; i < ny; ++i) {
            const CMat slab = ind_c.gram.coords.middleCols(i * kd, kd);
            for (Index j = 0; j < nd; ++j) {
                t1.middleCols(col, db) = slab * t_d.gram.coords.middleCols(j * db, db);
                const CVec cy = y.coords(y.basis()[i] * d_alg.basis()[j]);
                t2.middleCols(col, db) = e_gq.coords * kron(cy, id_b);
                col += db;
            }
        }
        phi_map = map_through(t1, t2);
        double res = spectral_norm(phi_map * t1 - t2);
        res = std::max(res, spectral_norm(phi_map.adjoint() * phi_map -
                                          CMat::Identity(hc, hc)));
        stage("first_unitary", res, e_gq.quotient_dim == hc && res <= bound);
    }

    // Dilate the compression of the induced representation through e_left;
    // second identification sends the class of c_i (x) [x_j (x) xi_s] to the
    // class of (c_i x_j) (x) xi_s.
    const CPMap phi_c = compose_cp(ind_a.rep.pi_left, pair.e_left, tol);
    const StinespringTriple t_c = minimal_stinespring(phi_c, tol);
    const Index hcp = t_c.dilation_dim;
    CMat psi_map;
    {
        const DilationVerdict v = verify_stinespring(t_c, phi_c, tol);
        CMat t1(hcp, nc * nx * db);
        CMat t2(e_gq.quotient_dim, nc * nx * db);
        Index col = 0;
        for (Index i = 0; i < nc; ++i) {
            const CMat slab = t_c.gram.coords.middleCols(i * ha, ha);
            for (Index j = 0; j < nx; ++j) {
                t1.middleCols(col, db) = slab * ind_a.gram.coords.middleCols(j * db, db);
                const CVec cy = y.coords(c_alg.basis()[i] * x.basis()[j]);
                t2.middleCols(col, db) = e_gq.coords * kron(cy, id_b);
                col += db;
            }
        }
        psi_map = map_through(t1, t2);
        double res = spectral_norm(psi_map * t1 - t2);
        res = std::max(res, spectral_norm(psi_map.adjoint() * psi_map -
                                          CMat::Identity(hcp, hcp)));
        stage("second_unitary", std::max(res, v.dilation_residual),
              v.pass && e_gq.quotient_dim == hcp && res <= bound);
    }

    // The composite intertwines the induced representation with the dilation.
    out.u = phi_map.adjoint() * psi_map;
    {
        double res = 0.0;
        for (Index i = 0; i < nc; ++i) {
            const CMat lhs = ind_c.rep.pi_left.apply(c_alg.basis()[i]) * out.u;
            res = std::max(res, spectral_norm(lhs - out.u * t_c.pi.images()[i]));
        }
        stage("intertwiner", res, res <= bound);
    }

    // Moving the dilation of the compressed map onto the induced space keeps
    // both triple invariants.
    {
        const CMat v_moved = out.u * t_c.v;
        double res = 0.0;
        CMat stack(hc, nc * ha);
        for (Index i = 0; i < nc; ++i) {
            const CMat img = ind_c.rep.pi_left.apply(c_alg.basis()[i]);
            res = std::max(res, spectral_norm(phi_c.images()[i] -
                                              v_moved.adjoint() * img * v_moved));
            stack.middleCols(i * ha, ha) = img * v_moved;
        }
        const bool minimal = numeric_rank(stack, tol) == hc;
        stage("transported_triple", res, minimal && res <= bound);
    }

    // Final equivalence witness between the two compressed maps.
    {
        out.witness = sme_cpmaps(phi_c, psi_d, y, tol);
        double res = 0.0;
        bool pass = out.witness.has_value();
        if (out.witness) {
            const BimoduleRepVerdict v = verify_bimodule_rep(out.witness->rep, y, tol);
            res = v.max_residual();
            pass = v.pass;
        }
        stage("equivalence_witness", res, pass);
    }

    out.pass = std::all_of(out.stages.begin(), out.stages.end(),
                           [](const PipelineStage& s) { return s.pass; });
    return out;
}

// ----------------------------------------------------------------------------
// Converse criterion
// ----------------------------------------------------------------------------

ConverseVerdict expectation_converse(const ExpectationPair& pair,
                                     const Representation& pi_b, const Tolerance& tol) {
    if (!same_span(pi_b.algebra(), pair.x_sub.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "representation is not over the right coefficient algebra");
    }
    {
        const Index nb = pi_b.algebra().dim();
        const Index db = pi_b.space_dim();
        CMat flat(db * db, nb);
        for (Index i = 0; i < nb; ++i) flat.col(i) = vec(pi_b.images()[i]);
        if (numeric_rank(flat, tol) != nb) {
            throw Error(ErrorCode::NotFaithful,
                        "converse criterion requires a faithful representation");
        }
    }

    const Algebra& c_alg = pair.e_left.big();
    const Bimodule& y = pair.y;
    const Bimodule& x = pair.x_sub;
    const Index db = pi_b.space_dim();
    const Index nx = x.dim();

    const CPMap psi_d = compose_cp(pi_b, pair.e_right, tol);
    const StinespringTriple t_d = minimal_stinespring(psi_d, tol);
    const Induced ind_a = induce(x, pi_b, tol);
    const Induced ind_c = induce(y, t_d.pi, tol);
    const Index ha = ind_a.gram.quotient_dim;

    ConverseVerdict out;
    const double bound = tol.bound(1.0) * 100.0;

    // Unit insertion x (x) xi |-> x (x) (1 (x) xi) between the induced spaces.
    CMat t2(ind_c.gram.quotient_dim, nx * db);
    for (Index j = 0; j < nx; ++j) {
        const CVec cy = y.coords(x.basis()[j]);
        t2.middleCols(j * db, db) = ind_c.gram.coords * kron(cy, t_d.v);
    }
    const CMat v_c = map_through(ind_a.gram.coords, t2);
    out.isometry_residual = spectral_norm(v_c * ind_a.gram.coords - t2);
    out.isometry_residual = std::max(
        out.isometry_residual,
        spectral_norm(v_c.adjoint() * v_c - CMat::Identity(ha, ha)));
    out.isometry_pass = out.isometry_residual <= bound;

    // Compression identity for the compressed map on the induced space.
    const CPMap phi_c = compose_cp(ind_a.rep.pi_left, pair.e_left, tol);
    for (Index i = 0; i < c_alg.dim(); ++i) {
        const CMat pc = ind_c.rep.pi_left.apply(c_alg.basis()[i]);
        out.compression_residual =
            std::max(out.compression_residual,
                     spectral_norm(phi_c.images()[i] - v_c.adjoint() * pc * v_c));
    }
    out.compression_pass = out.compression_residual <= bound;

    // The bimodule-map identity, re-verified directly on matrix elements.
    for (const CMat& c : c_alg.basis()) {
        const CMat ec = pair.e_left.apply(c);
        for (const CMat& v : x.basis()) {
            for (const CMat& v1 : x.basis()) {
                const double res =
                    spectral_norm(pair.e_right.apply(v.adjoint() * c * v1) -
                                  v.adjoint() * ec * v1);
                out.bimodule_residual = std::max(out.bimodule_residual, res);
            }
        }
    }
    out.bimodule_pass = out.bimodule_residual <= bound;

    out.pass = out.isometry_pass && out.compression_pass && out.bimodule_pass;
    return out;
}

}  // namespace morita
