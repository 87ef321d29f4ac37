#include "prodtest/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace prodtest {

// ---------------------------------------------------------------- Dims

Dims::Dims(std::vector<int> local) : local_(std::move(local)) {
  if (local_.empty()) throw Error(Errc::invalid_argument, "dimension profile needs n >= 1");
  strides_.assign(local_.size(), 1);
  total_ = 1;
  for (std::size_t i = local_.size(); i-- > 0;) {
    if (local_[i] < 1) throw Error(Errc::invalid_argument, "local dimension must be >= 1");
    strides_[i] = total_;
    if (total_ > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(local_[i]))
      throw Error(Errc::resource_budget, "total dimension overflows");
    total_ *= static_cast<std::size_t>(local_[i]);
  }
  Budget::require_dim(total_, "dimension profile");
}

Dims Dims::uniform(int d, int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "dimension profile needs n >= 1");
  return Dims(std::vector<int>(static_cast<std::size_t>(n), d));
}

std::size_t Dims::total(std::span<const int> subset) const {
  std::size_t t = 1;
  for (int i : subset) t *= static_cast<std::size_t>((*this)[i]);
  return t;
}

bool Dims::is_uniform() const {
  return std::all_of(local_.begin(), local_.end(), [&](int d) { return d == local_.front(); });
}

Dims Dims::select(std::span<const int> subset) const {
  std::vector<int> out;
  for (int i : subset) out.push_back((*this)[i]);
  return Dims(std::move(out));
}

// ---------------------------------------------------------------- masks

SubsystemMask::SubsystemMask(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

SubsystemMask SubsystemMask::from_bits(std::uint64_t bits, int n) {
  std::vector<int> m;
  for (int i = 0; i < n; ++i)
    if (bits >> i & 1U) m.push_back(i);
  return SubsystemMask(std::move(m));
}

SubsystemMask SubsystemMask::all(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return SubsystemMask(std::move(m));
}

bool SubsystemMask::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

SubsystemMask SubsystemMask::complement(int n) const {
  std::vector<int> m;
  for (int i = 0; i < n; ++i)
    if (!contains(i)) m.push_back(i);
  return SubsystemMask(std::move(m));
}

void SubsystemMask::validate(int n) const {
  for (int i : members_)
    if (i < 0 || i >= n) {
      std::ostringstream os;
      os << "subsystem index " << i << " outside [0, " << n << ")";
      throw Error(Errc::invalid_mask, os.str());
    }
}

Partition::Partition(std::vector<std::vector<int>> blocks) : blocks_(std::move(blocks)) {
  for (auto& b : blocks_) std::sort(b.begin(), b.end());
}

Partition Partition::singletons(int n) {
  std::vector<std::vector<int>> b;
  for (int i = 0; i < n; ++i) b.push_back({i});
  return Partition(std::move(b));
}

void Partition::validate(int n) const {
  if (blocks_.empty()) throw Error(Errc::invalid_partition, "partition has no blocks");
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const auto& b : blocks_) {
    if (b.empty()) throw Error(Errc::invalid_partition, "partition block is empty");
    for (int i : b) {
      if (i < 0 || i >= n) throw Error(Errc::invalid_partition, "partition references unknown subsystem");
      if (seen[static_cast<std::size_t>(i)]++)
        throw Error(Errc::invalid_partition, "partition blocks overlap");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw Error(Errc::invalid_partition, "partition does not cover every subsystem");
}

// ---------------------------------------------------------------- states

PureState::PureState(Vector amplitudes, Dims dims) : amp_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (static_cast<std::size_t>(amp_.size()) != dims_.total())
    throw Error(Errc::dimension_mismatch, "amplitude count does not match dimension profile");
  if (std::abs(amp_.norm() - 1.0) > kTolNorm)
    throw Error(Errc::invalid_argument, "state vector is not normalized");
}

PureState PureState::normalized(Vector amplitudes, Dims dims) {
  const double nrm = amplitudes.norm();
  if (nrm == 0.0) throw Error(Errc::invalid_argument, "cannot normalize the zero vector");
  amplitudes /= nrm;
  return PureState(std::move(amplitudes), std::move(dims));
}

PureState PureState::basis(const Dims& dims, std::span<const int> digits) {
  if (static_cast<int>(digits.size()) != dims.size())
    throw Error(Errc::dimension_mismatch, "basis digits do not match profile");
  std::size_t idx = 0;
  for (int i = 0; i < dims.size(); ++i) {
    if (digits[static_cast<std::size_t>(i)] < 0 || digits[static_cast<std::size_t>(i)] >= dims[i])
      throw Error(Errc::invalid_argument, "basis digit out of range");
    idx += static_cast<std::size_t>(digits[static_cast<std::size_t>(i)]) * dims.stride(i);
  }
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
  v(static_cast<Eigen::Index>(idx)) = 1.0;
  return PureState(std::move(v), dims);
}

PureState PureState::product(std::span<const Vector> locals) {
  std::vector<int> d;
  Vector v = Vector::Ones(1);
  for (const auto& l : locals) {
    d.push_back(static_cast<int>(l.size()));
    Vector next(v.size() * l.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * l.size(), l.size()) = v(a) * l;
    v = std::move(next);
  }
  return normalized(std::move(v), Dims(std::move(d)));
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<int> d = a.dims().local();
  d.insert(d.end(), b.dims().local().begin(), b.dims().local().end());
  Vector v(a.amplitudes().size() * b.amplitudes().size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  return PureState(std::move(v), Dims(std::move(d)));
}

void canonicalize_phase(Vector& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-12 * std::max(scale, 1.0)) {
      v *= std::conj(v(i)) / a;
      v(i) = a;
      return;
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityOperator::DensityOperator(Matrix matrix, Dims dims, UncheckedTag)
    : rho_(std::move(matrix)), dims_(std::move(dims)) {}

DensityOperator::DensityOperator(Matrix matrix, Dims dims) : rho_(std::move(matrix)), dims_(std::move(dims)) {
  const auto D = static_cast<Eigen::Index>(dims_.total());
  if (rho_.rows() != D || rho_.cols() != D)
    throw Error(Errc::dimension_mismatch, "density matrix shape does not match profile");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kTolHerm)
    throw Error(Errc::invalid_argument, "density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > kTolNorm)
    throw Error(Errc::invalid_argument, "density matrix does not have unit trace");
  Matrix shifted = rho_ + kTolPsd * Matrix::Identity(D, D);
  if (Eigen::LLT<Matrix>(shifted).info() != Eigen::Success)
    throw Error(Errc::invalid_argument, "density matrix is not positive semidefinite");
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  return DensityOperator(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims(), UncheckedTag{});
}

DensityOperator DensityOperator::maximally_mixed(const Dims& dims) {
  const auto D = static_cast<Eigen::Index>(dims.total());
  return DensityOperator(Matrix::Identity(D, D) / static_cast<double>(D), dims, UncheckedTag{});
}

DensityOperator DensityOperator::unchecked(Matrix matrix, Dims dims) {
  return DensityOperator(std::move(matrix), std::move(dims), UncheckedTag{});
}

// ---------------------------------------------------------------- kernels

std::vector<std::size_t> offsets(const Dims& dims, std::span<const int> subset) {
  std::vector<std::size_t> out{0};
  for (int i : subset) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * static_cast<std::size_t>(dims[i]));
    for (auto o : out)
      for (int a = 0; a < dims[i]; ++a) next.push_back(o + static_cast<std::size_t>(a) * dims.stride(i));
    out = std::move(next);
  }
  return out;
}

std::vector<std::size_t> reorder_map(const Dims& dims, std::span<const int> order) {
  if (static_cast<int>(order.size()) != dims.size())
    throw Error(Errc::invalid_argument, "reorder needs a permutation of every subsystem");
  // Enumerating offsets over `order` visits old indices in new-index order.
  return offsets(dims, order);
}

// ---------------------------------------------------------------- operations

DensityOperator partial_trace(const DensityOperator& rho, const SubsystemMask& keep) {
  keep.validate(rho.sites());
  if (keep.size() == rho.sites()) return rho;
  if (keep.empty())
    return DensityOperator::unchecked(Matrix::Constant(1, 1, rho.matrix().trace()), Dims{1});
  return DensityOperator::unchecked(partial_trace_kernel(rho.matrix(), rho.dims(), keep),
                                    rho.dims().select(keep.members()));
}

double purity(const DensityOperator& rho) { return rho.matrix().squaredNorm(); }

double marginal_purity(const PureState& psi, const SubsystemMask& keep) {
  keep.validate(psi.sites());
  if (keep.empty() || keep.size() == psi.sites()) return 1.0;
  const Matrix m = unfold(psi.amplitudes(), psi.dims(), keep);
  const Matrix g = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  return g.squaredNorm();
}

namespace {
bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == b(i)) continue;
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    return a(i).imag() < b(i).imag();
  }
  return false;
}
}  // namespace

SchmidtData schmidt(const PureState& psi, const SubsystemMask& cut) {
  cut.validate(psi.sites());
  if (cut.empty() || cut.size() == psi.sites())
    throw Error(Errc::invalid_cut, "Schmidt cut must be a proper nonempty subset");
  const Matrix m = unfold(psi.amplitudes(), psi.dims(), cut);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();

  struct Term {
    double lambda;
    Vector l, r;
  };
  std::vector<Term> terms;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double lambda = sv(i) * sv(i);
    if (lambda <= 1e-15) continue;
    terms.push_back({lambda, svd.matrixU().col(i), svd.matrixV().col(i).conjugate()});
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (std::abs(a.lambda - b.lambda) > 1e-12) return a.lambda > b.lambda;
    return lex_less(a.l, b.l);
  });

  SchmidtData out;
  const auto r = static_cast<Eigen::Index>(terms.size());
  out.coefficients.resize(r);
  out.left.resize(m.rows(), r);
  out.right.resize(m.cols(), r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& t = terms[static_cast<std::size_t>(i)];
    out.coefficients(i) = t.lambda;
    out.left.col(i) = t.l;
    out.right.col(i) = t.r;
  }
  return out;
}

FidelityDistance fidelity_trace_distance(const PureState& psi, const PureState& phi) {
  if (!(psi.dims() == phi.dims())) throw Error(Errc::dimension_mismatch, "states have different profiles");
  const double f = std::min(1.0, std::norm(psi.amplitudes().dot(phi.amplitudes())));
  return {f, std::sqrt(std::max(0.0, 1.0 - f))};
}

Vector haar_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  double nrm = 0.0;
  do {
    for (int i = 0; i < d; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      v(i) = Complex(re, im);
    }
    nrm = v.norm();
  } while (nrm == 0.0);
  return v / nrm;
}

PureState haar_state(const Dims& dims, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  return PureState::normalized(haar_vector(static_cast<int>(dims.total()), rng), dims);
}

Matrix haar_unitary(int d, std::mt19937_64& rng) {
  if (d < 1) throw Error(Errc::invalid_argument, "unitary dimension must be >= 1");
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= a > 0 ? rjj / a : Complex(1.0);
  }
  return q;
}

Matrix haar_unitary(int d, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  return haar_unitary(d, rng);
}

PermutationOperator permutation_operator(int d, std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  if (d < 1 || k < 1) throw Error(Errc::invalid_argument, "permutation operator needs d, k >= 1");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int i = 0; i < k; ++i)
    if (check[static_cast<std::size_t>(i)] != i) throw Error(Errc::invalid_argument, "not a permutation");
  const Dims dims = Dims::uniform(d, k);
  const auto D = static_cast<Eigen::Index>(dims.total());
  Matrix p = Matrix::Zero(D, D);
  std::vector<int> in(static_cast<std::size_t>(k));
  for (Eigen::Index x = 0; x < D; ++x) {
    std::size_t rem = static_cast<std::size_t>(x);
    for (int s = k; s-- > 0;) {
      in[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(d));
      rem /= static_cast<std::size_t>(d);
    }
    // Slot s content lands in slot perm[s].
    std::size_t y = 0;
    std::vector<int> out(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s) out[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])] = in[static_cast<std::size_t>(s)];
    for (int s = 0; s < k; ++s) y = y * static_cast<std::size_t>(d) + static_cast<std::size_t>(out[static_cast<std::size_t>(s)]);
    p(static_cast<Eigen::Index>(y), x) = 1.0;
  }
  return {std::move(p), d, k, std::vector<int>(perm.begin(), perm.end())};
}

PermutationOperator swap_operator(int d) {
  const int perm[] = {1, 0};
  return permutation_operator(d, perm);
}

PermutationOperator symmetric_projector(int d, int k) {
  if (d < 1 || k < 1) throw Error(Errc::invalid_argument, "symmetric projector needs d, k >= 1");
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  const Dims dims = Dims::uniform(d, k);
  const auto D = static_cast<Eigen::Index>(dims.total());
  Matrix sum = Matrix::Zero(D, D);
  double count = 0;
  do {
    sum += permutation_operator(d, perm).matrix;
    count += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {sum / count, d, k, {}};
}

PureState embed_pad(const PureState& psi, const Dims& target) {
  const Dims& src = psi.dims();
  if (target.size() != src.size()) throw Error(Errc::invalid_target, "padding target has a different site count");
  for (int i = 0; i < src.size(); ++i)
    if (target[i] < src[i]) throw Error(Errc::invalid_target, "padding target is smaller than the source");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(target.total()));
  for (std::size_t x = 0; x < src.total(); ++x) {
    std::size_t rem = x, y = 0;
    for (int i = src.size(); i-- > 0;) {
      const auto digit = rem % static_cast<std::size_t>(src[i]);
      rem /= static_cast<std::size_t>(src[i]);
      y += digit * target.stride(i);
    }
    out(static_cast<Eigen::Index>(y)) = psi.amplitudes()(static_cast<Eigen::Index>(x));
  }
  return PureState(std::move(out), target);
}

}  // namespace prodtest
