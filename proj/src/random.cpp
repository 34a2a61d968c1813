#include "morita/random.hpp"

#include <Eigen/QR>

namespace morita {

CMat random_gaussian(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CMat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = dist(rng);
            const double im = dist(rng);
            m(i, j) = Cplx(re, im) / std::sqrt(2.0);
        }
    return m;
}

CMat random_unitary(Rng& rng, Index n) {
    CMat g = random_gaussian(rng, n, n);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
        Cplx d = r(i, i);
        q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Cplx(1, 0);
    }
    return q;
}

CMat random_hermitian(Rng& rng, Index n) {
    CMat g = random_gaussian(rng, n, n);
    return (g + g.adjoint()) / (2.0 * std::sqrt(static_cast<double>(n)));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
    // splitmix64 finaliser on the pair.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace morita
