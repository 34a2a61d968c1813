#include "morita/generators.hpp"

#include <algorithm>
#include <utility>

#include "morita/numerics.hpp"

namespace morita {

namespace {

Index pick(Rng& rng, Index lo, Index hi) {
    std::uniform_int_distribution<Index> d(lo, hi);
    return d(rng);
}

bool coin(Rng& rng, double p) {
    std::bernoulli_distribution d(p);
    return d(rng);
}

// E_ij (x) I_m placed as a diagonal block starting at `offset`.
CMat square_unit(Index ambient, Index offset, Index m, Index i, Index j) {
    CMat out = CMat::Zero(ambient, ambient);
    for (Index t = 0; t < m; ++t) out(offset + i * m + t, offset + j * m + t) = 1.0;
    return out;
}

// Rectangular E_ij (x) I_m placed at (row_offset, col_offset).
CMat rect_unit(Index rows, Index cols, Index row_offset, Index col_offset, Index m,
               Index i, Index j) {
    CMat out = CMat::Zero(rows, cols);
    for (Index t = 0; t < m; ++t) {
        out(row_offset + i * m + t, col_offset + j * m + t) = 1.0;
    }
    return out;
}

std::vector<std::array<Index, 3>> choose_blocks(Rng& rng, Index max_left,
                                                Index max_right, bool square) {
    std::vector<std::array<Index, 3>> blocks;
    Index rem_l = max_left;
    Index rem_r = max_right;
    for (Index k = 0; k < 2 && rem_l >= 1 && rem_r >= 1; ++k) {
        Index m = 1;
        if (rem_l >= 2 && rem_r >= 2 && coin(rng, 0.2)) m = 2;
        const Index pmax = std::min<Index>(3, rem_l / m);
        const Index qmax = std::min<Index>(3, rem_r / m);
        Index p = pick(rng, 1, pmax);
        Index q = square ? std::min(p, qmax) : pick(rng, 1, qmax);
        if (square) p = q;
        blocks.push_back({p, q, m});
        rem_l -= p * m;
        rem_r -= q * m;
        if (coin(rng, 0.5)) break;
    }
    return blocks;
}

GeneratedBimodule build_block_bimodule(Rng& rng,
                                       const std::vector<std::array<Index, 3>>& blocks,
                                       bool conjugate, const Tolerance& tol) {
    Index p_total = 0;
    Index q_total = 0;
    for (const auto& b : blocks) {
        p_total += b[0] * b[2];
        q_total += b[1] * b[2];
    }

    std::vector<CMat> agens;
    std::vector<CMat> bgens;
    std::vector<CMat> xgens;
    Index ro = 0;
    Index co = 0;
    for (const auto& b : blocks) {
        const Index p = b[0];
        const Index q = b[1];
        const Index m = b[2];
        for (Index i = 0; i < p; ++i) {
            for (Index j = 0; j < p; ++j) {
                agens.push_back(square_unit(p_total, ro, m, i, j));
            }
        }
        for (Index i = 0; i < q; ++i) {
            for (Index j = 0; j < q; ++j) {
                bgens.push_back(square_unit(q_total, co, m, i, j));
            }
        }
        for (Index i = 0; i < p; ++i) {
            for (Index j = 0; j < q; ++j) {
                xgens.push_back(rect_unit(p_total, q_total, ro, co, m, i, j));
            }
        }
        ro += p * m;
        co += q * m;
    }

    if (conjugate) {
        const CMat u = random_unitary(rng, p_total);
        const CMat v = random_unitary(rng, q_total);
        for (CMat& g : agens) g = u * g * u.adjoint();
        for (CMat& g : bgens) g = v * g * v.adjoint();
        for (CMat& g : xgens) g = u * g * v.adjoint();
    }

    GeneratedBimodule out;
    out.left = Algebra::validate(agens, tol);
    out.right = Algebra::validate(bgens, tol);
    out.x = Bimodule::verify(out.left, out.right, xgens, tol);
    out.blocks = blocks;
    return out;
}

// Orthonormal column basis of the range of a Hermitian projection.
CMat projection_columns(const CMat& p, Index rank) {
    const EigResult eig = hermitian_eig(p);
    return eig.u.leftCols(rank);
}

}  // namespace

// ----------------------------------------------------------------------------
// Algebras
// ----------------------------------------------------------------------------

Algebra gen_algebra(Rng& rng, Index max_ambient, const Tolerance& tol) {
    if (max_ambient < 1) {
        throw Error(ErrorCode::ParamOutOfRange, "ambient bound must be positive");
    }
    std::vector<std::array<Index, 2>> blocks;  // (size, multiplicity)
    Index rem = max_ambient;
    for (Index k = 0; k < 3 && rem >= 1; ++k) {
        Index m = 1;
        if (rem >= 2 && coin(rng, 0.2)) m = 2;
        const Index nmax = std::min<Index>(3, rem / m);
        const Index n = pick(rng, 1, nmax);
        blocks.push_back({n, m});
        rem -= n * m;
        if (coin(rng, 0.45)) break;
    }

    Index total = 0;
    for (const auto& b : blocks) total += b[0] * b[1];
    std::vector<CMat> gens;
    Index offset = 0;
    for (const auto& b : blocks) {
        for (Index i = 0; i < b[0]; ++i) {
            for (Index j = 0; j < b[0]; ++j) {
                gens.push_back(square_unit(total, offset, b[1], i, j));
            }
        }
        offset += b[0] * b[1];
    }
    const CMat u = random_unitary(rng, total);
    for (CMat& g : gens) g = u * g * u.adjoint();
    return Algebra::validate(gens, tol);
}

// ----------------------------------------------------------------------------
// Bimodules
// ----------------------------------------------------------------------------

GeneratedBimodule gen_bimodule(Rng& rng, Index max_left, Index max_right,
                               const Tolerance& tol) {
    if (max_left < 1 || max_right < 1) {
        throw Error(ErrorCode::ParamOutOfRange, "ambient bounds must be positive");
    }
    return build_block_bimodule(rng, choose_blocks(rng, max_left, max_right, false),
                                true, tol);
}

GeneratedBimodule gen_bimodule_blocks(Rng& rng,
                                      const std::vector<std::array<Index, 3>>& blocks,
                                      bool conjugate, const Tolerance& tol) {
    if (blocks.empty()) {
        throw Error(ErrorCode::ParamOutOfRange, "at least one block is required");
    }
    for (const auto& b : blocks) {
        if (b[0] < 1 || b[1] < 1 || b[2] < 1) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "block sizes and multiplicities must be positive");
        }
    }
    return build_block_bimodule(rng, blocks, conjugate, tol);
}

GeneratedBimodule gen_bimodule_square(Rng& rng, Index max_side, const Tolerance& tol) {
    if (max_side < 1) {
        throw Error(ErrorCode::ParamOutOfRange, "ambient bound must be positive");
    }
    return build_block_bimodule(rng, choose_blocks(rng, max_side, max_side, true), true,
                                tol);
}

GeneratedBimodule gen_bimodule_right(Rng& rng, const Algebra& right, Index max_left,
                                     const Tolerance& tol) {
    const BlockStructure bs = decompose(right, tol);
    const Index kcount = static_cast<Index>(bs.blocks.size());

    Index reserve = 0;
    for (const Block& b : bs.blocks) reserve += b.multiplicity;
    if (reserve > max_left) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "left budget cannot accommodate one row per block");
    }

    std::vector<Index> ps(static_cast<std::size_t>(kcount));
    Index rem = max_left;
    for (Index k = 0; k < kcount; ++k) {
        Index reserve_rest = 0;
        for (Index l = k + 1; l < kcount; ++l) {
            reserve_rest += bs.blocks[static_cast<std::size_t>(l)].multiplicity;
        }
        const Index m = bs.blocks[static_cast<std::size_t>(k)].multiplicity;
        const Index pmax = std::min<Index>(3, (rem - reserve_rest) / m);
        ps[static_cast<std::size_t>(k)] = pick(rng, 1, pmax);
        rem -= ps[static_cast<std::size_t>(k)] * m;
    }

    Index p_total = 0;
    for (Index k = 0; k < kcount; ++k) {
        p_total += ps[static_cast<std::size_t>(k)] *
                   bs.blocks[static_cast<std::size_t>(k)].multiplicity;
    }
    const Index q_amb = right.ambient_dim();

    std::vector<CMat> agens;
    std::vector<CMat> xgens;
    std::vector<std::array<Index, 3>> blocks;
    Index ro = 0;
    for (Index k = 0; k < kcount; ++k) {
        const Block& blk = bs.blocks[static_cast<std::size_t>(k)];
        const Index p = ps[static_cast<std::size_t>(k)];
        const Index m = blk.multiplicity;
        blocks.push_back({p, blk.size, m});

        for (Index i = 0; i < p; ++i) {
            for (Index j = 0; j < p; ++j) {
                agens.push_back(square_unit(p_total, ro, m, i, j));
            }
        }
        // Columns spanning the range of the first diagonal unit give partial
        // isometries u_j with u_i^* u_j = delta_ij and u_i u_j^* = e_ij.
        const CMat u1 = projection_columns(blk.unit(0, 0), m);
        for (Index i = 0; i < p; ++i) {
            for (Index j = 0; j < blk.size; ++j) {
                const CMat uj = blk.unit(j, 0) * u1;  // q_amb x m
                CMat x = CMat::Zero(p_total, q_amb);
                x.block(ro + i * m, 0, m, q_amb) = uj.adjoint();
                xgens.push_back(std::move(x));
            }
        }
        ro += p * m;
    }

    const CMat u = random_unitary(rng, p_total);
    for (CMat& g : agens) g = u * g * u.adjoint();
    for (CMat& g : xgens) g = u * g;

    GeneratedBimodule out;
    out.left = Algebra::validate(agens, tol);
    out.right = right;
    out.x = Bimodule::verify(out.left, right, xgens, tol);
    out.blocks = std::move(blocks);
    return out;
}

// ----------------------------------------------------------------------------
// CP maps and representations
// ----------------------------------------------------------------------------

CPMap gen_cpmap(Rng& rng, const Algebra& source, Index target_dim, Index kraus_rank,
                const Tolerance& tol) {
    if (target_dim < 1 || kraus_rank < 1) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "target dimension and Kraus rank must be positive");
    }
    const Index n = source.ambient_dim();
    std::vector<CMat> kraus;
    kraus.reserve(static_cast<std::size_t>(kraus_rank));
    for (Index i = 0; i < kraus_rank; ++i) {
        kraus.push_back(random_gaussian(rng, n, target_dim));
    }
    CMat unit_image = CMat::Zero(target_dim, target_dim);
    for (const CMat& k : kraus) unit_image += k.adjoint() * k;
    const double scale = std::sqrt(spectral_norm(unit_image));
    for (CMat& k : kraus) k /= scale;

    std::vector<CMat> images;
    images.reserve(source.basis().size());
    for (const CMat& a : source.basis()) {
        CMat img = CMat::Zero(target_dim, target_dim);
        for (const CMat& k : kraus) img += k.adjoint() * a * k;
        images.push_back(std::move(img));
    }
    return CPMap::make(source, target_dim, std::move(images), tol);
}

Representation gen_representation(Rng& rng, const Algebra& a, Index min_mult,
                                  Index max_mult, const Tolerance& tol) {
    if (min_mult < 0 || max_mult < min_mult) {
        throw Error(ErrorCode::ParamOutOfRange, "invalid multiplicity range");
    }
    const BlockStructure bs = decompose(a, tol);
    const Index kcount = static_cast<Index>(bs.blocks.size());

    std::vector<Index> mult(static_cast<std::size_t>(kcount));
    Index space = 0;
    for (Index k = 0; k < kcount; ++k) {
        mult[static_cast<std::size_t>(k)] = pick(rng, min_mult, max_mult);
        space += mult[static_cast<std::size_t>(k)] *
                 bs.blocks[static_cast<std::size_t>(k)].size;
    }
    if (space == 0) {
        const Index k = pick(rng, 0, kcount - 1);
        mult[static_cast<std::size_t>(k)] = 1;
        space = bs.blocks[static_cast<std::size_t>(k)].size;
    }

    // Coefficients of each basis element over the Wedderburn matrix units.
    const Index amb = a.ambient_dim();
    CMat uflat(amb * amb, bs.total_dim());
    Index col = 0;
    for (const Block& blk : bs.blocks) {
        for (Index i = 0; i < blk.size; ++i) {
            for (Index j = 0; j < blk.size; ++j) {
                uflat.col(col++) = vec(blk.unit(i, j));
            }
        }
    }
    const auto solver = uflat.completeOrthogonalDecomposition();

    const CMat w = random_unitary(rng, space);
    std::vector<CMat> images;
    images.reserve(a.basis().size());
    for (const CMat& b : a.basis()) {
        const CVec coef = solver.solve(vec(b));
        CMat img = CMat::Zero(space, space);
        Index offset = 0;
        Index base = 0;
        for (Index k = 0; k < kcount; ++k) {
            const Index n = bs.blocks[static_cast<std::size_t>(k)].size;
            const Index mu = mult[static_cast<std::size_t>(k)];
            if (mu > 0) {
                CMat c(n, n);
                for (Index i = 0; i < n; ++i) {
                    for (Index j = 0; j < n; ++j) c(i, j) = coef(base + i * n + j);
                }
                for (Index s = 0; s < mu; ++s) {
                    img.block(offset + s * n, offset + s * n, n, n) = c;
                }
                offset += mu * n;
            }
            base += n * n;
        }
        images.push_back(w * img * w.adjoint());
    }
    return Representation::validate(a, std::move(images), tol);
}

// ----------------------------------------------------------------------------
// Expectation pairs
// ----------------------------------------------------------------------------

GeneratedExpectationPair gen_expectation_pair(Rng& rng, Index max_base, Index fiber,
                                              bool compatible, const Tolerance& tol) {
    if (max_base < 1 || fiber < 2) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "base bound must be positive and the fiber at least 2");
    }
    const GeneratedBimodule base = gen_bimodule(rng, max_base, max_base, tol);
    const Index p = base.left.ambient_dim();
    const Index q = base.right.ambient_dim();
    const Index f = fiber;

    RVec wr(f);
    for (Index s = 0; s < f; ++s) {
        std::uniform_real_distribution<double> d(0.5, 1.5);
        wr(s) = d(rng);
    }
    wr /= wr.sum();
    RVec wl = wr;
    if (!compatible) {
        wl(0) *= 3.0;
        wl /= wl.sum();
    }

    const CMat u = random_unitary(rng, p * f);
    const CMat v = random_unitary(rng, q * f);
    const CMat id_f = CMat::Identity(f, f);

    const auto fiber_unit = [f](Index s, Index t) {
        CMat e = CMat::Zero(f, f);
        e(s, t) = 1.0;
        return e;
    };

    std::vector<CMat> cgens;
    std::vector<CMat> agens;
    for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) {
            for (const CMat& a : base.left.basis()) {
                cgens.push_back(u * kron(fiber_unit(s, t), a) * u.adjoint());
            }
        }
    }
    for (const CMat& a : base.left.basis()) {
        agens.push_back(u * kron(id_f, a) * u.adjoint());
    }

    std::vector<CMat> dgens;
    std::vector<CMat> bgens;
    for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) {
            for (const CMat& b : base.right.basis()) {
                dgens.push_back(v * kron(fiber_unit(s, t), b) * v.adjoint());
            }
        }
    }
    for (const CMat& b : base.right.basis()) {
        bgens.push_back(v * kron(id_f, b) * v.adjoint());
    }

    std::vector<CMat> ygens;
    std::vector<CMat> xgens;
    for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) {
            for (const CMat& x : base.x.basis()) {
                ygens.push_back(u * kron(fiber_unit(s, t), x) * v.adjoint());
            }
        }
    }
    for (const CMat& x : base.x.basis()) {
        xgens.push_back(u * kron(id_f, x) * v.adjoint());
    }

    const Algebra c_alg = Algebra::validate(cgens, tol);
    const Algebra a_alg = Algebra::validate(agens, tol);
    const Algebra d_alg = Algebra::validate(dgens, tol);
    const Algebra b_alg = Algebra::validate(bgens, tol);
    const Bimodule y = Bimodule::verify(c_alg, d_alg, ygens, tol);

    // Weighted block trace over the fiber, conjugated back into place.
    const auto average = [&id_f](const CMat& conj, const RVec& w, Index amb, Index f_,
                                 const CMat& m) {
        CMat avg = CMat::Zero(amb, amb);
        for (Index s = 0; s < f_; ++s) {
            avg += w(s) * m.block(s * amb, s * amb, amb, amb);
        }
        return CMat(conj * kron(id_f, avg) * conj.adjoint());
    };

    std::vector<CMat> ea_images;
    ea_images.reserve(c_alg.basis().size());
    for (const CMat& c : c_alg.basis()) {
        ea_images.push_back(average(u, wl, p, f, u.adjoint() * c * u));
    }
    std::vector<CMat> eb_images;
    eb_images.reserve(d_alg.basis().size());
    for (const CMat& d : d_alg.basis()) {
        eb_images.push_back(average(v, wr, q, f, v.adjoint() * d * v));
    }

    ConditionalExpectation e_left = ConditionalExpectation::validate(
        Inclusion::make(c_alg, a_alg, tol), std::move(ea_images), tol);
    ConditionalExpectation e_right = ConditionalExpectation::validate(
        Inclusion::make(d_alg, b_alg, tol), std::move(eb_images), tol);

    GeneratedExpectationPair out;
    out.pair = ExpectationPair::make(std::move(e_left), std::move(e_right), y, xgens, tol);
    const Index max_mult = q >= 3 ? 1 : 2;
    out.pi_b = gen_representation(rng, out.pair.x_sub.right(), 1, max_mult, tol);
    out.compatible = compatible;
    return out;
}

}  // namespace morita
