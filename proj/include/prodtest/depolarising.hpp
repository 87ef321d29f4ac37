#pragma once

// Qudit depolarising channel D_delta(rho) = (1 - delta) tr(rho) I/d + delta rho.
// `delta` is the retention amplitude: delta = 1 is the identity channel and
// the noise rate is 1 - delta.

#include "prodtest/tensor.hpp"

#include <optional>

namespace prodtest {

class DepolarisingParams {
 public:
  DepolarisingParams(double delta, int d, int n);

  double delta() const { return delta_; }
  int d() const { return d_; }
  int n() const { return n_; }
  // d delta^2 / (1 - delta^2); absent at delta = 1 where it diverges.
  std::optional<double> gamma() const { return gamma_; }

 private:
  double delta_;
  int d_;
  int n_;
  std::optional<double> gamma_;
};

// D_delta applied independently to every site.
DensityOperator apply_depolarising(const DensityOperator& rho, const DepolarisingParams& params);

// tr(D^{(x)n} rho)^2 = ((1-delta^2)/d)^n sum_S gamma^{|S|} tr rho_S^2.
// At delta = 1 this falls back to purity(rho).
double output_purity_closed(const DensityOperator& rho, const DepolarisingParams& params);
double output_purity_closed(const PureState& psi, const DepolarisingParams& params);

// Output purity for product inputs, ((d-1)/d delta^2 + 1/d)^n.
double pprod(const DepolarisingParams& params);

// Upper bound on tr(D^{(x)n} |psi><psi|)^2 for a state at distance eps from
// the nearest product state.
double stability_upper_bound(double eps, const DepolarisingParams& params);

}  // namespace prodtest
