#include "prodtest/product_test.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace prodtest {

const char* to_string(TestMethod m) {
  switch (m) {
    case TestMethod::exact_subsets: return "exact-subsets";
    case TestMethod::bipartite_schmidt: return "bipartite-schmidt";
    case TestMethod::sampled: return "sampled";
    case TestMethod::k_copy: return "k-copy";
  }
  return "unknown";
}

namespace {

void require_subset_budget(const Dims& dims, const char* what) {
  if (dims.size() > 40) {
    std::ostringstream os;
    os << what << ": n = " << dims.size() << " subsystems, D = " << dims.total() << " is beyond the subset budget";
    throw Error(Errc::resource_budget, os.str());
  }
  // sum_S D_S^2 D_{S-bar} = D prod_i (1 + d_i)
  double work = static_cast<double>(dims.total());
  for (int d : dims.local()) work *= 1.0 + d;
  if (work > Budget::max_work()) {
    std::ostringstream os;
    os << what << ": n = " << dims.size() << ", D = " << dims.total() << " exceeds the work budget";
    throw Error(Errc::resource_budget, os.str());
  }
}

std::vector<SubsystemMask> block_unions(const Partition& p, int n) {
  p.validate(n);
  const int k = p.k();
  std::vector<SubsystemMask> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
    std::vector<int> m;
    for (int b = 0; b < k; ++b)
      if (bits >> b & 1U) m.insert(m.end(), p.blocks()[static_cast<std::size_t>(b)].begin(), p.blocks()[static_cast<std::size_t>(b)].end());
    out.emplace_back(std::move(m));
  }
  return out;
}

double average_mixed(const DensityOperator& rho, const std::vector<SubsystemMask>& subsets) {
  double sum = 0.0;
  for (const auto& s : subsets) {
    if (s.empty()) {
      sum += std::norm(rho.matrix().trace());
      continue;
    }
    sum += purity(partial_trace(rho, s));
  }
  return sum / static_cast<double>(subsets.size());
}

double average_pure(const PureState& psi, const std::vector<SubsystemMask>& subsets) {
  double sum = 0.0;
  for (const auto& s : subsets) sum += marginal_purity(psi, s);
  return sum / static_cast<double>(subsets.size());
}

// Applies (I + F_i)/2 to the two-copy state stored as a D x D matrix with
// entry (x, y) = copy-1 index x, copy-2 index y.
void symmetrize_site(Matrix& a, const Dims& dims, int site) {
  const auto d = static_cast<std::size_t>(dims[site]);
  const std::size_t stride = dims.stride(site);
  const auto D = static_cast<std::size_t>(dims.total());
  Matrix out(a.rows(), a.cols());
  for (std::size_t x = 0; x < D; ++x) {
    const std::size_t xd = x / stride % d;
    for (std::size_t y = 0; y < D; ++y) {
      const std::size_t yd = y / stride % d;
      const std::size_t xs = x - xd * stride + yd * stride;
      const std::size_t ys = y - yd * stride + xd * stride;
      out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          0.5 * (a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +
                 a(static_cast<Eigen::Index>(xs), static_cast<Eigen::Index>(ys)));
    }
  }
  a = std::move(out);
}

}  // namespace

TestReport ptest_exact(const DensityOperator& rho) {
  require_subset_budget(rho.dims(), "ptest_exact");
  return {average_mixed(rho, block_unions(Partition::singletons(rho.sites()), rho.sites())),
          TestMethod::exact_subsets, std::nullopt, std::nullopt};
}

TestReport ptest_exact(const PureState& psi) {
  require_subset_budget(psi.dims(), "ptest_exact");
  return {average_pure(psi, block_unions(Partition::singletons(psi.sites()), psi.sites())),
          TestMethod::exact_subsets, std::nullopt, std::nullopt};
}

TestReport ptest_pair(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.dims() == sigma.dims())) throw Error(Errc::dimension_mismatch, "ptest_pair: profiles differ");
  require_subset_budget(rho.dims(), "ptest_pair");
  const int n = rho.sites();
  double sum = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const auto s = SubsystemMask::from_bits(bits, n);
    if (s.empty()) {
      sum += (rho.matrix().trace() * sigma.matrix().trace()).real();
      continue;
    }
    const Matrix a = partial_trace(rho, s).matrix();
    const Matrix b = partial_trace(sigma, s).matrix();
    // tr(AB) for Hermitian A, B is sum_ij conj(A_ij) B_ij.
    sum += a.cwiseProduct(b.conjugate()).sum().real();
  }
  return {sum / std::ldexp(1.0, n), TestMethod::exact_subsets, std::nullopt, std::nullopt};
}

std::vector<double> cascade_conditionals(const PureState& psi) {
  const std::size_t D = psi.dim();
  Budget::require_work(static_cast<double>(D) * static_cast<double>(D) * psi.sites(), "two-copy cascade");
  const Vector& v = psi.amplitudes();
  Matrix a = v * v.transpose();
  std::vector<double> cond;
  double prev = 1.0;
  for (int i = 0; i < psi.sites(); ++i) {
    symmetrize_site(a, psi.dims(), i);
    const double now = a.squaredNorm();
    cond.push_back(prev > 0 ? std::min(1.0, now / prev) : 0.0);
    prev = now;
  }
  return cond;
}

double cascade_acceptance(const PureState& psi) {
  double p = 1.0;
  for (double c : cascade_conditionals(psi)) p *= c;
  return p;
}

TestReport ptest_sampled(const PureState& psi, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw Error(Errc::invalid_argument, "ptest_sampled: shots must be >= 1");
  const auto cond = cascade_conditionals(psi);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uint64_t accepted = 0;
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    auto rng = substream(seed, shot);
    bool pass = true;
    for (double c : cond) {
      if (!(uni(rng) < c)) {
        pass = false;
        break;
      }
    }
    accepted += pass ? 1 : 0;
  }
  const double p = static_cast<double>(accepted) / static_cast<double>(shots);
  return {p, TestMethod::sampled, shots, std::sqrt(p * (1.0 - p) / static_cast<double>(shots))};
}

TestReport ptest_partition(const DensityOperator& rho, const Partition& p) {
  require_subset_budget(rho.dims(), "ptest_partition");
  return {average_mixed(rho, block_unions(p, rho.sites())), TestMethod::exact_subsets, std::nullopt,
          std::nullopt};
}

TestReport ptest_partition(const PureState& psi, const Partition& p) {
  require_subset_budget(psi.dims(), "ptest_partition");
  return {average_pure(psi, block_unions(p, psi.sites())), TestMethod::exact_subsets, std::nullopt,
          std::nullopt};
}

TestReport ptest_bipartite(const SchmidtData& s) {
  return {0.5 * (1.0 + s.coefficients.squaredNorm()), TestMethod::bipartite_schmidt, std::nullopt,
          std::nullopt};
}

double kcopy_test_value(const PureState& psi, int k) {
  if (k < 1) throw Error(Errc::invalid_argument, "kcopy_test_value: k must be >= 1");
  const std::size_t D = psi.dim();
  double total = 1.0;
  for (int c = 0; c < k; ++c) total *= static_cast<double>(D);
  if (total > static_cast<double>(Budget::max_dim())) {
    std::ostringstream os;
    os << "kcopy_test_value: D^k = " << total << " exceeds budget " << Budget::max_dim();
    throw Error(Errc::resource_budget, os.str());
  }
  const auto len = static_cast<std::size_t>(total);

  Vector state = Vector::Ones(1);
  for (int c = 0; c < k; ++c) {
    Vector next(state.size() * psi.amplitudes().size());
    for (Eigen::Index i = 0; i < state.size(); ++i)
      next.segment(i * psi.amplitudes().size(), psi.amplitudes().size()) = state(i) * psi.amplitudes();
    state = std::move(next);
  }

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::vector<std::size_t> copy_stride(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    std::size_t s = 1;
    for (int j = c + 1; j < k; ++j) s *= D;
    copy_stride[static_cast<std::size_t>(c)] = s;
  }
  std::vector<std::size_t> digit(static_cast<std::size_t>(k));
  for (int site = 0; site < psi.sites(); ++site) {
    const auto d = static_cast<std::size_t>(psi.dims()[site]);
    const std::size_t stride = psi.dims().stride(site);
    Vector out = Vector::Zero(state.size());
    std::iota(perm.begin(), perm.end(), 0);
    double count = 0;
    do {
      for (std::size_t x = 0; x < len; ++x) {
        std::size_t base = x;
        for (int c = 0; c < k; ++c) {
          const std::size_t st = copy_stride[static_cast<std::size_t>(c)] * stride;
          digit[static_cast<std::size_t>(c)] = x / st % d;
          base -= digit[static_cast<std::size_t>(c)] * st;
        }
        std::size_t y = base;
        for (int c = 0; c < k; ++c)
          y += digit[static_cast<std::size_t>(c)] * copy_stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] * stride;
        out(static_cast<Eigen::Index>(y)) += state(static_cast<Eigen::Index>(x));
      }
      count += 1;
    } while (std::next_permutation(perm.begin(), perm.end()));
    state = out / count;
  }
  return state.squaredNorm();
}

BoundsWindow theorem_bounds(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(Errc::invalid_argument, "theorem_bounds: eps must lie in [0, 1]");
  BoundsWindow w;
  w.eps = eps;
  w.lower = (1.0 - eps) * (1.0 - eps);
  w.upper = std::min(1.0, 1.0 - eps + eps * eps + std::pow(eps, 1.5));
  w.high_eps_cap_applies = eps >= 11.0 / 32.0;
  if (w.high_eps_cap_applies) w.upper = std::min(w.upper, 501.0 / 512.0);
  return w;
}

Estimate avg_overlap_estimate(const PureState& psi, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(Errc::invalid_argument, "avg_overlap_estimate: samples must be >= 1");
  if (!psi.dims().is_uniform())
    throw Error(Errc::unsupported_profile, "avg_overlap_estimate: local dimensions differ; pad first");
  const int d = psi.dims()[0];
  const int n = psi.sites();
  const double scale = std::pow(d * (d + 1) / 2.0, n);

  // Welford accumulation of |<psi|phi>|^4.
  double mean = 0.0, m2 = 0.0;
  Vector prod;
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto rng = substream(seed, s);
    prod = Vector::Ones(1);
    for (int i = 0; i < n; ++i) {
      const Vector l = haar_vector(d, rng);
      Vector next(prod.size() * d);
      for (Eigen::Index a = 0; a < prod.size(); ++a) next.segment(a * d, d) = prod(a) * l;
      prod = std::move(next);
    }
    const double f = std::norm(prod.dot(psi.amplitudes()));
    const double x = f * f;
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {scale * mean, scale * std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace prodtest
