#pragma once

#include <cstdint>
#include <random>

#include "ctlscape/linalg.hpp"

namespace ctlscape {

using Rng = std::mt19937_64;

/// Counter-based derivation of a child seed from (master, index). Pure
/// function of its inputs, so work items can be seeded independently of
/// scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

Rng make_rng(std::uint64_t seed);

RVector gaussian_vector(Index n, Rng& rng);
RMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Gaussian Hermitian ensemble: (X + X^dagger) / 2 with X entrywise
/// standard complex normal.
CMatrix gaussian_hermitian(Index n, Rng& rng);

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phase correction on R's diagonal.
CMatrix haar_unitary(Index n, Rng& rng);

RVector uniform_box(Index n, double amplitude, Rng& rng);

/// Uniformly random unit vector.
RVector random_direction(Index n, Rng& rng);

}  // namespace ctlscape
