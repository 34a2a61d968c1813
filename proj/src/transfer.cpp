#include "morita/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "morita/numerics.hpp"
#include "morita/representation.hpp"

namespace morita {

// ----------------------------------------------------------------------------
// Frame transfer
// ----------------------------------------------------------------------------

TransferResult transfer_cp(const CPMap& psi, const Bimodule& x, const Frame& frame,
                           const Tolerance& tol) {
    if (!same_span(psi.source(), x.right(), tol)) {
        throw Error(ErrorCode::AlgebraMismatch,
                    "map source does not match the right coefficient algebra");
    }
    if (frame.size() == 0) {
        throw Error(ErrorCode::FrameInvalid, "empty frame");
    }
    for (const CMat& u : frame.vectors) {
        if (u.rows() != x.rows() || u.cols() != x.cols() || !x.contains(u)) {
            throw Error(ErrorCode::FrameInvalid,
                        "frame vector does not lie in the bimodule");
        }
    }
    const double defect = frame_defect(x, frame);
    if (defect > tol.bound(1.0) * 100.0) {
        throw Error(ErrorCode::FrameInvalid,
                    "frame does not reconstruct the bimodule (defect " +
                        std::to_string(defect) + ")");
    }

    const Algebra& a_alg = x.left();
    const Index na = a_alg.dim();
    const Index n = frame.size();
    const Index h = psi.target_dim();

    std::vector<CMat> images(static_cast<std::size_t>(na));
    for (Index i = 0; i < na; ++i) {
        CMat m(n * h, n * h);
        for (Index l = 0; l < n; ++l) {
            for (Index k = 0; k < n; ++k) {
                m.block(l * h, k * h, h, h) = psi.apply(
                    frame.vectors[l].adjoint() * a_alg.basis()[i] * frame.vectors[k]);
            }
        }
        images[static_cast<std::size_t>(i)] = std::move(m);
    }

    TransferResult out;
    out.frame = frame;
    out.phi = CPMap::make(a_alg, n * h, std::move(images), tol);
    const ChoiCertificate cert = verify_cp(out.phi, tol);
    if (!cert.cp) {
        throw Error(ErrorCode::NotCp,
                    "transferred map is not completely positive (min Choi "
                    "eigenvalue " +
                        std::to_string(cert.min_eigenvalue) +
                        "); the bimodule data is broken");
    }

    const StinespringTriple t_psi = minimal_stinespring(psi, tol);
    if (t_psi.dilation_dim == 0) {
        throw Error(ErrorCode::ZeroMap, "transfer is defined for nonzero maps");
    }
    const Induced ind = induce(x, t_psi.pi, tol);
    const StinespringTriple t_phi = minimal_stinespring(out.phi, tol);
    if (t_phi.dilation_dim != ind.gram.quotient_dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dilation space of the transferred map does not match the "
                    "induced space");
    }

    // On formal generators: a_i (x) (e_l (x) e_k)  |->  (a_i u_l) (x) V e_k.
    const Index nh = n * h;
    CMat t2(ind.gram.quotient_dim, na * nh);
    for (Index i = 0; i < na; ++i) {
        for (Index l = 0; l < n; ++l) {
            const CVec cx = x.coords(a_alg.basis()[i] * frame.vectors[l]);
            t2.middleCols(i * nh + l * h, h) = ind.gram.coords * kron(cx, t_psi.v);
        }
    }
    out.u_iso = map_through(t_phi.gram.coords, t2);

    double iso = spectral_norm(out.u_iso * t_phi.gram.coords - t2);
    iso = std::max(iso, spectral_norm(out.u_iso.adjoint() * out.u_iso -
                                      CMat::Identity(t_phi.dilation_dim,
                                                     t_phi.dilation_dim)));
    out.isometry_residual = iso;

    double inter = 0.0;
    for (Index i = 0; i < na; ++i) {
        const CMat moved = out.u_iso.adjoint() *
                           ind.rep.pi_left.images()[static_cast<std::size_t>(i)] *
                           out.u_iso;
        inter = std::max(
            inter, spectral_norm(t_phi.pi.images()[static_cast<std::size_t>(i)] - moved));
    }
    out.intertwining_residual = inter;

    const double bound = tol.bound(std::max(1.0, out.phi.norm())) * 100.0;
    if (iso > bound || inter > bound) {
        throw Error(ErrorCode::NumericalDegeneracy,
                    "transfer isometry failed to verify (residuals " +
                        std::to_string(iso) + ", " + std::to_string(inter) + ")");
    }
    return out;
}

// ----------------------------------------------------------------------------
// Roundtrip and class bookkeeping
// ----------------------------------------------------------------------------

RoundtripVerdict roundtrip(const CPMap& psi, const Bimodule& x, const Tolerance& tol) {
    RoundtripVerdict out;
    out.forward = transfer_cp(psi, x, left_basis(x, tol), tol);

    const Bimodule xd = dual(x, tol);
    TransferResult backward = transfer_cp(out.forward.phi, xd, left_basis(xd, tol), tol);
    out.back = std::move(backward.phi);

    const Bimodule x0 = trivial_bimodule(psi.source(), tol);
    out.witness = sme_cpmaps(psi, out.back, x0, tol);
    out.pass = out.witness.has_value() &&
               verify_bimodule_rep(out.witness->rep, x0, tol).pass;
    return out;
}

ClassMapReport transfer_class_map(const std::vector<CPMap>& psi_list, const Bimodule& x,
                                  const Tolerance& tol) {
    if (psi_list.empty()) {
        throw Error(ErrorCode::ParamOutOfRange, "empty list of maps");
    }
    for (const CPMap& psi : psi_list) {
        if (!same_span(psi.source(), x.right(), tol)) {
            throw Error(ErrorCode::AlgebraMismatch,
                        "all maps must live on the right coefficient algebra");
        }
    }

    const Frame f = left_basis(x, tol);
    std::vector<CPMap> transferred;
    transferred.reserve(psi_list.size());
    for (const CPMap& psi : psi_list) {
        transferred.push_back(transfer_cp(psi, x, f, tol).phi);
    }

    const Bimodule x0_before = trivial_bimodule(psi_list.front().source(), tol);
    const Bimodule x0_after = trivial_bimodule(x.left(), tol);

    const std::size_t m = psi_list.size();
    ClassMapReport report;
    report.before.assign(m, std::vector<bool>(m, false));
    report.after.assign(m, std::vector<bool>(m, false));
    report.preserved = true;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            report.before[i][j] =
                sme_cpmaps(psi_list[i], psi_list[j], x0_before, tol).has_value();
            report.after[i][j] =
                sme_cpmaps(transferred[i], transferred[j], x0_after, tol).has_value();
            if (report.before[i][j] != report.after[i][j]) report.preserved = false;
        }
    }
    return report;
}

}  // namespace morita
