#pragma once

// Seeded random matrix primitives.  All stochastic behaviour in the library
// flows through an explicit std::mt19937_64 so runs are reproducible.

#include <cstdint>
#include <random>

#include "morita/core.hpp"

namespace morita {

using Rng = std::mt19937_64;

/// Entries are independent standard complex Gaussians.
CMat random_gaussian(Rng& rng, Index rows, Index cols);

/// Haar-ish unitary via QR of a Ginibre matrix with phase-fixed diagonal.
CMat random_unitary(Rng& rng, Index n);

/// Random Hermitian matrix with O(1) spectral radius.
CMat random_hermitian(Rng& rng, Index n);

/// Derives a stream seed for instance k of a suite without correlations
/// between neighbouring instances.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k);

}  // namespace morita
