#pragma once

// Seeded generators for random test objects.

#include "prodtest/qma.hpp"

namespace prodtest::sample {

// Ginibre-distributed density matrix of full rank.
DensityOperator density(const Dims& dims, std::uint64_t seed);
// Haar-random projector of the given rank.
Matrix projector(int dim, int rank, std::uint64_t seed);
// U diag(u_1..u_D) U^dag with Haar U and u_i uniform in [0, 1].
Measurement measurement(const std::vector<int>& party_dims, std::uint64_t seed);
// sum_j a_j (x)_i beta_{ij} with random density matrices beta_{ij}, rescaled
// so the largest eigenvalue is uniform in [1/2, 1].
Measurement separable_measurement(const std::vector<int>& party_dims, int terms, std::uint64_t seed);
// Kraus operators cut from a Haar isometry C^{in} -> C^{out} (x) C^{kraus},
// scaled by `scale` <= 1.
KrausChannel channel(int input_dim, int output_dim, int kraus, double scale, std::uint64_t seed);

}  // namespace prodtest::sample
