#include "prodtest/depolarising.hpp"

#include <cmath>

namespace prodtest {

DepolarisingParams::DepolarisingParams(double delta, int d, int n) : delta_(delta), d_(d), n_(n) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(Errc::invalid_argument, "delta must lie in [0, 1]");
  if (d < 1 || n < 1) throw Error(Errc::invalid_argument, "depolarising channel needs d, n >= 1");
  if (delta < 1.0) gamma_ = d * delta * delta / (1.0 - delta * delta);
}

namespace {
void require_profile(const Dims& dims, const DepolarisingParams& p) {
  if (dims.size() != p.n()) throw Error(Errc::dimension_mismatch, "site count differs from channel parameters");
  for (int d : dims.local())
    if (d != p.d()) throw Error(Errc::dimension_mismatch, "local dimension differs from channel parameters");
}

template <typename MarginalPurity>
double closed_form(const DepolarisingParams& p, MarginalPurity&& tr_sq) {
  const double g = *p.gamma();
  const int n = p.n();
  double sum = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const auto s = SubsystemMask::from_bits(bits, n);
    sum += std::pow(g, s.size()) * tr_sq(s);
  }
  const double delta2 = p.delta() * p.delta();
  return std::pow((1.0 - delta2) / p.d(), n) * sum;
}
}  // namespace

DensityOperator apply_depolarising(const DensityOperator& rho, const DepolarisingParams& params) {
  require_profile(rho.dims(), params);
  const auto D = rho.dim();
  const auto d = static_cast<std::size_t>(params.d());
  const double keep = params.delta();
  const double mix = (1.0 - params.delta()) / static_cast<double>(d);
  Matrix cur = rho.matrix();
  for (int site = 0; site < rho.sites(); ++site) {
    const std::size_t stride = rho.dims().stride(site);
    Matrix next = keep * cur;
    for (std::size_t x = 0; x < D; ++x) {
      const std::size_t xd = x / stride % d;
      const std::size_t xb = x - xd * stride;
      for (std::size_t y = 0; y < D; ++y) {
        const std::size_t yd = y / stride % d;
        if (xd != yd) continue;
        const std::size_t yb = y - yd * stride;
        Complex acc(0.0);
        for (std::size_t a = 0; a < d; ++a)
          acc += cur(static_cast<Eigen::Index>(xb + a * stride), static_cast<Eigen::Index>(yb + a * stride));
        next(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += mix * acc;
      }
    }
    cur = std::move(next);
  }
  return DensityOperator::unchecked(std::move(cur), rho.dims());
}

double output_purity_closed(const DensityOperator& rho, const DepolarisingParams& params) {
  require_profile(rho.dims(), params);
  if (!params.gamma()) return purity(rho);
  return closed_form(params, [&](const SubsystemMask& s) {
    if (s.empty()) return std::norm(rho.matrix().trace());
    return purity(partial_trace(rho, s));
  });
}

double output_purity_closed(const PureState& psi, const DepolarisingParams& params) {
  require_profile(psi.dims(), params);
  if (!params.gamma()) return 1.0;
  return closed_form(params, [&](const SubsystemMask& s) { return marginal_purity(psi, s); });
}

double pprod(const DepolarisingParams& params) {
  const double d = params.d();
  const double delta2 = params.delta() * params.delta();
  return std::pow((d - 1.0) / d * delta2 + 1.0 / d, params.n());
}

double stability_upper_bound(double eps, const DepolarisingParams& params) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(Errc::invalid_argument, "stability_upper_bound: eps must lie in [0, 1]");
  const double d = params.d();
  const double delta2 = params.delta() * params.delta();
  const double denom = 1.0 + (d - 1.0) * delta2;
  const double first = 4.0 * eps * (1.0 - eps) * d * delta2 * (1.0 - delta2) / (denom * denom);
  const double ratio = ((1.0 - delta2) * (1.0 - delta2) + d * d * delta2 * delta2) / (denom * denom);
  const double second = 4.0 * std::pow(eps, 1.5) * ratio * ratio;
  return pprod(params) * (1.0 - first + second);
}

}  // namespace prodtest
