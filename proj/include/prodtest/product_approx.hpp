#pragma once

// Closest product state to a pure state: eps = 1 - max |<psi|phi_1 ... phi_n>|^2.

#include "prodtest/tensor.hpp"

namespace prodtest {

struct OptimizerOptions {
  int restarts = 20;
  int max_iters = 2000;
  double rel_tol = 1e-14;
  std::uint64_t seed = 0;
  // Keep the objective after every single-site update of the winning restart.
  bool record_trace = false;

  void validate() const;
};

struct ProductAnsatz {
  std::vector<Vector> locals;
  double overlap_sq = 0.0;
  double eps = 1.0;
  bool converged = false;
  int iterations = 0;
  int restart = 0;
  std::vector<double> trace;

  Vector product_vector() const;
};

// Best of `opts.restarts` alternating runs. Restart 0 starts from the top
// eigenvectors of the single-site marginals; restart r >= 1 from Haar
// random locals drawn from substream (seed, r). Two-site inputs are solved
// exactly from the Schmidt decomposition.
ProductAnsatz closest_product(const PureState& psi, const OptimizerOptions& opts = {});

// One alternating run from the given locals.
ProductAnsatz alternating_ascent(const PureState& psi, std::vector<Vector> locals, const OptimizerOptions& opts);

// <(x)_{j != site} phi_j | psi>, a vector on subsystem `site`.
Vector site_contraction(const PureState& psi, const std::vector<Vector>& locals, int site);

struct BruteForceEps {
  double eps = 1.0;          // after local refinement; an upper bound on the true eps
  double grid_eps = 1.0;     // best value on the mesh alone
  double error_bound = 1.0;  // true eps >= grid_eps - error_bound
  std::vector<Vector> locals;
  std::size_t evaluations = 0;
};

// Exhaustive search over a quasi-uniform mesh of `resolution` points per
// site, followed by derivative-free refinement of the best mesh points.
BruteForceEps brute_force_eps(const PureState& psi, int resolution);

struct Residual {
  double eps;
  Vector xi;      // unit vector orthogonal to the product state
  Complex phase;  // psi = phase * (sqrt(1-eps) phi + sqrt(eps) xi)
};

Residual residual_decomposition(const PureState& psi, const ProductAnsatz& ansatz);

// First-order optimality: every single-site contraction is parallel to the
// corresponding local vector within `tol`.
bool weight1_check(const PureState& psi, const ProductAnsatz& ansatz, double tol);

}  // namespace prodtest
