#include "prodtest/product_approx.hpp"

#include "prodtest/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace prodtest {

void OptimizerOptions::validate() const {
  if (restarts < 1) throw Error(Errc::invalid_argument, "optimizer needs restarts >= 1");
  if (max_iters < 1) throw Error(Errc::invalid_argument, "optimizer needs max_iters >= 1");
  if (!(rel_tol > 0)) throw Error(Errc::invalid_argument, "optimizer needs rel_tol > 0");
}

Vector ProductAnsatz::product_vector() const {
  Vector v = Vector::Ones(1);
  for (const auto& l : locals) {
    Vector next(v.size() * l.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * l.size(), l.size()) = v(a) * l;
    v = std::move(next);
  }
  return v;
}

Vector site_contraction(const PureState& psi, const std::vector<Vector>& locals, int site) {
  const Dims& dims = psi.dims();
  const int n = dims.size();
  if (static_cast<int>(locals.size()) != n) throw Error(Errc::dimension_mismatch, "one local vector per site required");
  Vector out = Vector::Zero(dims[site]);
  const Vector& amp = psi.amplitudes();
  for (std::size_t x = 0; x < dims.total(); ++x) {
    Complex c = amp(static_cast<Eigen::Index>(x));
    if (c == Complex(0.0)) continue;
    int own = 0;
    for (int j = 0; j < n; ++j) {
      const auto digit = static_cast<Eigen::Index>(x / dims.stride(j) % static_cast<std::size_t>(dims[j]));
      if (j == site)
        own = static_cast<int>(digit);
      else
        c *= std::conj(locals[static_cast<std::size_t>(j)](digit));
    }
    out(own) += c;
  }
  return out;
}

namespace {

double overlap_sq(const PureState& psi, const std::vector<Vector>& locals) {
  const Vector c = site_contraction(psi, locals, 0);
  return std::norm(locals[0].dot(c));
}

ProductAnsatz finish(ProductAnsatz a) {
  for (auto& l : a.locals) canonicalize_phase(l);
  a.overlap_sq = std::clamp(a.overlap_sq, 0.0, 1.0);
  a.eps = 1.0 - a.overlap_sq;
  return a;
}

ProductAnsatz single_site(const PureState& psi) {
  ProductAnsatz a;
  a.locals = {psi.amplitudes()};
  a.overlap_sq = 1.0;
  a.converged = true;
  return finish(std::move(a));
}

ProductAnsatz from_schmidt(const PureState& psi) {
  const SchmidtData s = schmidt(psi, SubsystemMask{0});
  ProductAnsatz a;
  a.locals = {s.left.col(0), s.right.col(0)};
  a.overlap_sq = s.coefficients(0);
  a.converged = true;
  return finish(std::move(a));
}

std::vector<Vector> marginal_eigen_start(const PureState& psi) {
  std::vector<Vector> locals;
  for (int i = 0; i < psi.sites(); ++i) {
    const Matrix m = unfold(psi.amplitudes(), psi.dims(), SubsystemMask{i});
    Eigen::SelfAdjointEigenSolver<Matrix> es(m * m.adjoint());
    locals.push_back(es.eigenvectors().col(es.eigenvectors().cols() - 1));
  }
  return locals;
}

}  // namespace

ProductAnsatz alternating_ascent(const PureState& psi, std::vector<Vector> locals, const OptimizerOptions& opts) {
  opts.validate();
  const int n = psi.sites();
  ProductAnsatz a;
  a.locals = std::move(locals);
  double current = overlap_sq(psi, a.locals);
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const double start = current;
    for (int i = 0; i < n; ++i) {
      const Vector v = site_contraction(psi, a.locals, i);
      const double nv = v.norm();
      if (nv == 0.0) continue;
      a.locals[static_cast<std::size_t>(i)] = v / nv;
      current = nv * nv;
      if (opts.record_trace) a.trace.push_back(current);
    }
    a.iterations = iter;
    if (std::abs(current - start) <= opts.rel_tol * std::max(current, 1e-300)) {
      a.converged = true;
      break;
    }
  }
  a.overlap_sq = current;
  return finish(std::move(a));
}

ProductAnsatz closest_product(const PureState& psi, const OptimizerOptions& opts) {
  opts.validate();
  if (psi.sites() == 1) return single_site(psi);
  if (psi.sites() == 2) return from_schmidt(psi);

  ProductAnsatz best;
  best.overlap_sq = -1.0;
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<Vector> init;
    if (r == 0) {
      init = marginal_eigen_start(psi);
    } else {
      auto rng = substream(opts.seed, static_cast<std::uint64_t>(r));
      for (int i = 0; i < psi.sites(); ++i) init.push_back(haar_vector(psi.dims()[i], rng));
    }
    ProductAnsatz run = alternating_ascent(psi, std::move(init), opts);
    run.restart = r;
    // Strict comparison keeps the lowest restart index on ties.
    if (run.overlap_sq > best.overlap_sq) best = std::move(run);
  }
  return best;
}

BruteForceEps brute_force_eps(const PureState& psi, int resolution) {
  if (resolution < 8) throw Error(Errc::invalid_argument, "brute_force_eps: resolution must be >= 8");
  double combos = 1.0;
  for (int i = 0; i < psi.sites(); ++i) combos *= resolution;
  if (combos * static_cast<double>(psi.dim()) > Budget::max_work() || combos > 5e7) {
    std::ostringstream os;
    os << "brute_force_eps: " << combos << " mesh combinations on D = " << psi.dim() << " exceeds the budget";
    throw Error(Errc::resource_budget, os.str());
  }
  const auto res = grid::maximize_overlap(psi.amplitudes(), psi.dims().local(), resolution);
  BruteForceEps out;
  out.eps = std::clamp(1.0 - res.value, 0.0, 1.0);
  out.grid_eps = std::clamp(1.0 - res.mesh_value, 0.0, 1.0);
  out.error_bound = res.mesh_loss;
  out.locals = res.locals;
  out.evaluations = res.evaluations;
  return out;
}

Residual residual_decomposition(const PureState& psi, const ProductAnsatz& ansatz) {
  const Vector phi = ansatz.product_vector();
  if (phi.size() != psi.amplitudes().size()) throw Error(Errc::dimension_mismatch, "ansatz does not match state");
  const Complex c = phi.dot(psi.amplitudes());
  const double eps = std::max(0.0, 1.0 - std::norm(c));
  if (eps <= 1e-14 || ansatz.overlap_sq >= 1.0)
    throw Error(Errc::degenerate_residual, "residual_decomposition: state is already product");
  const double mag = std::abs(c);
  const Complex phase = mag > 0 ? c / mag : Complex(1.0);
  Vector xi = (std::conj(phase) * psi.amplitudes() - mag * phi) / std::sqrt(eps);
  return {eps, std::move(xi), phase};
}

bool weight1_check(const PureState& psi, const ProductAnsatz& ansatz, double tol) {
  for (int i = 0; i < psi.sites(); ++i) {
    const Vector& phi = ansatz.locals[static_cast<std::size_t>(i)];
    const Vector v = site_contraction(psi, ansatz.locals, i);
    const Vector perp = v - phi.dot(v) * phi;
    if (perp.norm() > tol) return false;
  }
  return true;
}

}  // namespace prodtest
