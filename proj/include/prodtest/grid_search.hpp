#pragma once

// Mesh-based exhaustive search over products of unit vectors, used as an
// independent oracle for the alternating and seesaw optimizers. Nothing here
// uses eigenvector or contraction updates.

#include "prodtest/common.hpp"

#include <functional>
#include <vector>

namespace prodtest::grid {

// `count` quasi-uniform unit vectors in C^d (a Fibonacci lattice on the Bloch
// sphere for d = 2, a Kronecker sequence mapped through the Haar measure for
// d > 2). First components are real and nonnegative.
std::vector<Vector> quasi_uniform_points(int d, int count);

// Largest 1 - max_g |<p|g>|^2 over Haar probes p; an estimate of the mesh's
// covering radius in infidelity.
double covering_radius(const std::vector<Vector>& mesh, int d, int probes, std::uint64_t seed);

using Objective = std::function<double(const std::vector<Vector>&)>;

struct Result {
  double value = 0.0;        // after refinement
  double mesh_value = 0.0;   // best mesh point
  double mesh_loss = 1.0;    // |true optimum - mesh_value| <= mesh_loss * objective scale
  std::vector<Vector> locals;
  std::size_t evaluations = 0;
};

// Maximizes |<psi|g_1 ... g_n>|^2.
Result maximize_overlap(const Vector& psi, const std::vector<int>& dims, int resolution);

// Maximizes (or minimizes, with sign = -1) <g|M|g> over product vectors.
Result extremize_expectation(const Matrix& m, const std::vector<int>& dims, int resolution, double sign);

// Compass search on the real and imaginary parts of every local vector,
// normalizing each before evaluating. Returns the improved locals.
std::vector<Vector> compass_refine(const Objective& f, std::vector<Vector> locals, double initial_step,
                                   double final_step, std::size_t& evaluations);

}  // namespace prodtest::grid
