#pragma once

// Multi-qudit states and operators in the mixed-radix computational basis.
// Subsystem 0 is the most significant digit of a basis index. Subsystem
// indices are 0-based throughout the library; the CLI translates from the
// 1-based labels used in input files.

#include "prodtest/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace prodtest {

class Dims {
 public:
  Dims() = default;
  explicit Dims(std::vector<int> local);
  Dims(std::initializer_list<int> local) : Dims(std::vector<int>(local)) {}
  static Dims uniform(int d, int n);

  int size() const { return static_cast<int>(local_.size()); }
  int operator[](int i) const { return local_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& local() const { return local_; }
  std::size_t total() const { return total_; }
  // Product of the local dimensions of the listed subsystems.
  std::size_t total(std::span<const int> subset) const;
  // Stride of subsystem i in a basis index.
  std::size_t stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }
  bool is_uniform() const;
  Dims select(std::span<const int> subset) const;

  friend bool operator==(const Dims& a, const Dims& b) { return a.local_ == b.local_; }

 private:
  std::vector<int> local_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

// Subset S of {0, ..., n-1}, stored sorted and duplicate free.
class SubsystemMask {
 public:
  SubsystemMask() = default;
  explicit SubsystemMask(std::vector<int> members);
  SubsystemMask(std::initializer_list<int> members)
      : SubsystemMask(std::vector<int>(members)) {}
  static SubsystemMask from_bits(std::uint64_t bits, int n);
  static SubsystemMask all(int n);

  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int i) const;
  SubsystemMask complement(int n) const;
  // Throws invalid_mask if any member is outside [0, n).
  void validate(int n) const;

 private:
  std::vector<int> members_;
};

class Partition {
 public:
  explicit Partition(std::vector<std::vector<int>> blocks);
  static Partition singletons(int n);

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  int k() const { return static_cast<int>(blocks_.size()); }
  // Throws invalid_partition unless the blocks cover {0, ..., n-1} disjointly.
  void validate(int n) const;

 private:
  std::vector<std::vector<int>> blocks_;
};

class PureState {
 public:
  // Throws invalid_argument unless the norm is 1 within kTolNorm.
  PureState(Vector amplitudes, Dims dims);
  static PureState normalized(Vector amplitudes, Dims dims);
  static PureState basis(const Dims& dims, std::span<const int> digits);
  static PureState product(std::span<const Vector> locals);

  const Vector& amplitudes() const { return amp_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return dims_.total(); }
  int sites() const { return dims_.size(); }
  Complex operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }

 private:
  Vector amp_;
  Dims dims_;
};

class DensityOperator {
 public:
  // Validates hermiticity, positivity and unit trace.
  DensityOperator(Matrix matrix, Dims dims);
  static DensityOperator from_pure(const PureState& psi);
  static DensityOperator maximally_mixed(const Dims& dims);
  // Skips validation; used for operators produced by trusted constructions.
  static DensityOperator unchecked(Matrix matrix, Dims dims);

  const Matrix& matrix() const { return rho_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return dims_.total(); }
  int sites() const { return dims_.size(); }

 private:
  struct UncheckedTag {};
  DensityOperator(Matrix matrix, Dims dims, UncheckedTag);
  Matrix rho_;
  Dims dims_;
};

struct SchmidtData {
  RealVector coefficients;  // lambda_i, nonincreasing, summing to 1
  Matrix left;              // columns |l_i>
  Matrix right;             // columns |r_i>
  int rank() const { return static_cast<int>(coefficients.size()); }
};

struct PermutationOperator {
  Matrix matrix;
  int d = 0;
  int k = 0;
  // Image of each tensor slot; empty for the symmetric projector.
  std::vector<int> permutation;
  bool is_symmetric_projector() const { return permutation.empty(); }
};

// ---------------------------------------------------------------------------
// Index kernels. These operate on raw Eigen expressions so they compose with
// any scalar type and with unevaluated expressions.

// Offsets of every multi-index over `subset` (first member most significant).
std::vector<std::size_t> offsets(const Dims& dims, std::span<const int> subset);

// Reshapes a state vector into a (kept x rest) matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> unfold(
    const Eigen::MatrixBase<Derived>& psi, const Dims& dims,
    const SubsystemMask& rows) {
  const auto rest = rows.complement(dims.size());
  const auto ro = offsets(dims, rows.members());
  const auto co = offsets(dims, rest.members());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      static_cast<Eigen::Index>(ro.size()), static_cast<Eigen::Index>(co.size()));
  for (std::size_t a = 0; a < ro.size(); ++a)
    for (std::size_t b = 0; b < co.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          psi(static_cast<Eigen::Index>(ro[a] + co[b]));
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
partial_trace_kernel(const Eigen::MatrixBase<Derived>& rho, const Dims& dims,
                     const SubsystemMask& keep) {
  const auto traced = keep.complement(dims.size());
  const auto ko = offsets(dims, keep.members());
  const auto to = offsets(dims, traced.members());
  const auto dk = static_cast<Eigen::Index>(ko.size());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      typename Derived::Scalar acc(0);
      for (const auto t : to)
        acc += rho(static_cast<Eigen::Index>(ko[static_cast<std::size_t>(a)] + t),
                   static_cast<Eigen::Index>(ko[static_cast<std::size_t>(b)] + t));
      out(a, b) = acc;
    }
  return out;
}

// Basis-index permutation reordering subsystems: new subsystem j is old
// subsystem order[j]. Returns new index -> old index.
std::vector<std::size_t> reorder_map(const Dims& dims, std::span<const int> order);

// ---------------------------------------------------------------------------
// Operations.

DensityOperator partial_trace(const DensityOperator& rho, const SubsystemMask& keep);
double purity(const DensityOperator& rho);
// tr rho_S^2 for the marginal of a pure state on `keep`, without forming rho.
double marginal_purity(const PureState& psi, const SubsystemMask& keep);
SchmidtData schmidt(const PureState& psi, const SubsystemMask& cut);

struct FidelityDistance {
  double fidelity;
  double trace_distance;
};
FidelityDistance fidelity_trace_distance(const PureState& psi, const PureState& phi);

PureState haar_state(const Dims& dims, std::uint64_t seed);
Vector haar_vector(int d, std::mt19937_64& rng);
Matrix haar_unitary(int d, std::uint64_t seed);
Matrix haar_unitary(int d, std::mt19937_64& rng);

PermutationOperator permutation_operator(int d, std::span<const int> perm);
PermutationOperator swap_operator(int d);
PermutationOperator symmetric_projector(int d, int k);

PureState embed_pad(const PureState& psi, const Dims& target);

// Rotates `v` so its first non-negligible component is real and positive.
void canonicalize_phase(Vector& v);

// Tensor product of states / operators in the stated order.
PureState tensor(const PureState& a, const PureState& b);
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace prodtest
