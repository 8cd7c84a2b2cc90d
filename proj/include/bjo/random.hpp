// random.hpp
// Seeded random matrices. Streams are split from a master seed by index so
// results never depend on evaluation order.

#pragma once

#include <cstdint>
#include <random>

#include "bjo/algebra.hpp"

namespace bjo {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream for (seed, a, b).
Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
Matrix ginibre(Rng& rng, int rows, int cols);

/// Haar-distributed unitary (QR of a Ginibre draw with the phase fix).
Matrix haar_unitary(Rng& rng, int n);

/// rows x cols with orthonormal columns when rows >= cols, orthonormal rows
/// otherwise.
Matrix random_isometry(Rng& rng, int rows, int cols);

/// Uniform unit vector in C^n.
Vector random_unit_vector(Rng& rng, int n);

}  // namespace bjo
