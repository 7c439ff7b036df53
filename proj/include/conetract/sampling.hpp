#pragma once

#include <cstdint>
#include <random>

#include "conetract/matrix_types.hpp"

namespace conetract {

/// Deterministic matrix sampling used by the sampler strategies and the
/// empirical probes. All draws are pure functions of the engine state.
Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng);
Matrix random_orthonormal(int n, std::mt19937_64& rng);

/// SPD matrix with eigenvalues log-uniform in [eigLo, eigHi].
SpdMat random_spd(int n, std::mt19937_64& rng, double eigLo = 0.1, double eigHi = 10.0);

/// Reads CONE_CONTRACTION_THREADS; 1 when unset or invalid.
int thread_cap();

}  // namespace conetract
