#pragma once

// Finite-dimensional objects behind the QMA(k) -> QMA(2) reduction:
// optimization over product (separable) inputs, the two-prover composite
// measurement, repetition operators, and the correspondence between
// measurements and channels.

#include "prodtest/product_approx.hpp"
#include "prodtest/tensor.hpp"

#include <optional>

namespace prodtest {

class Measurement {
 public:
  // Validates hermiticity and 0 <= M <= I (eigenvalue floor -kTolPsd).
  Measurement(Matrix matrix, std::vector<int> party_dims);
  static Measurement unchecked(Matrix matrix, std::vector<int> party_dims);

  const Matrix& matrix() const { return m_; }
  const std::vector<int>& party_dims() const { return parties_; }
  int parties() const { return static_cast<int>(parties_.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

  std::optional<double> soundness;
  std::optional<double> completeness;

 private:
  struct UncheckedTag {};
  Measurement(Matrix matrix, std::vector<int> party_dims, UncheckedTag);
  Matrix m_;
  std::vector<int> parties_;
};

// Kraus operators N_i : C^{input_dim} -> C^{output_dim} with sum N_i^dag N_i <= I.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> ops);

  const std::vector<Matrix>& ops() const { return ops_; }
  int output_dim() const { return static_cast<int>(ops_.front().rows()); }
  int input_dim() const { return static_cast<int>(ops_.front().cols()); }
  int kraus_count() const { return static_cast<int>(ops_.size()); }

  Matrix apply(const Matrix& rho) const;
  // Adjoint map X -> sum N_i^dag X N_i.
  Matrix apply_adjoint(const Matrix& x) const;

 private:
  std::vector<Matrix> ops_;
};

struct SepOptResult {
  double value = 0.0;
  std::vector<Vector> witness;
  int iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after every party update (winning restart)

  // -log(value), the minimum output infinity-entropy when value is a 1->inf norm.
  double min_entropy() const;
};

struct RepetitionSpec {
  int ell = 1;
  int threshold = 1;
  void validate() const;
};

// Seesaw over product vectors: each party update is the extreme eigenvector
// of the operator contracted against the other parties. The maximum is a
// certified lower bound, the minimum a certified upper bound.
SepOptResult sep_maximize(const Measurement& m, const OptimizerOptions& opts = {});
SepOptResult sep_minimize(const Measurement& k, const OptimizerOptions& opts = {});

// d^k-dimensional product-test projector on A_1..A_k B_1..B_k (sites A_j, B_j
// paired), the tensor product of the symmetric projectors of each pair.
Matrix pair_symmetric_projector(int d, int k);

// E = Pi (M_A (x) I_B) Pi, with parties A = first k sites, B = last k sites.
Measurement protocol2_operator(const Measurement& m, int k, int d);

struct SoundnessReport {
  double s = 0.0;
  double s_prime = 0.0;
  double bound_27 = 1.0;                // 1 - (1 - s)^2 / 27
  std::optional<double> bound_k2;       // (3 + s) / 4, k = 2 only
  double slack = 0.0;
  bool holds_27 = false;
  bool holds_k2 = true;
  bool holds() const { return holds_27 && holds_k2; }
};

SoundnessReport soundness_bound_check(const Measurement& m, int k, int d, const OptimizerOptions& opts = {},
                                      double slack = 1e-5);

// M^{(x) ell} regrouped so party i holds all ell of its repetition slots.
Measurement repeat_measurement(const Measurement& m, const RepetitionSpec& spec);
// Accept iff at least `threshold` of the ell repetitions accept.
Measurement threshold_repeat(const Measurement& m, const RepetitionSpec& spec);

// M = V V^dag with V = sum_i N_i (x) |i>, on parties (output_dim, kraus_count).
Measurement channel_to_measurement(const KrausChannel& n);
// The cross-term-free form sum_i N_i N_i^dag (x) |i><i|.
Measurement channel_to_measurement_diagonal(const KrausChannel& n);

// N(X) = tr_2(M^{1/2} X M^{1/2}) on supp M; Kraus operators
// K_j = (I (x) <j|) M^{1/2} W with W an isometry onto supp M.
KrausChannel measurement_to_channel(const Measurement& m);

// max_{psi, eta} <eta| N(psi) |eta>, alternating the two top eigenvectors.
SepOptResult min_output_infinity(const KrausChannel& n, const OptimizerOptions& opts = {});

struct GentleReport {
  double delta = 0.0;     // 1 - tr(rho X)
  double distance = 0.0;  // (1/2) || rho - X rho X ||_1
  bool holds = false;     // distance <= sqrt(delta)
};

GentleReport gentle_check(const DensityOperator& rho, const Matrix& x);

double trace_norm(const Matrix& hermitian);

}  // namespace prodtest
