#pragma once

#include <cstdint>
#include <random>

#include "qmult/linalg.hpp"

namespace qmult {

// All randomness flows through explicit seeds. Independent streams are derived
// from (seed, index) pairs so batch items do not depend on execution order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Entries i.i.d. standard complex Gaussian (real and imaginary parts N(0, 1/2)).
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);
ComplexVector haar_vector(std::size_t d, Rng& rng);
// (G + G^dagger) / 2 for Ginibre G.
ComplexMatrix random_hermitian(std::size_t d, Rng& rng);
// G G^dagger / Tr for Ginibre G; full rank almost surely.
ComplexMatrix random_density(std::size_t d, Rng& rng);
// d_out x d_in matrix with orthonormal columns, Haar distributed (d_out >= d_in).
ComplexMatrix haar_isometry(std::size_t d_out, std::size_t d_in, Rng& rng);

}  // namespace qmult
