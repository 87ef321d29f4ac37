#include "prodtest/qma.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace prodtest {

namespace {

std::size_t product_of(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int d : dims) {
    if (d < 1) throw Error(Errc::invalid_argument, "party dimensions must be >= 1");
    p *= static_cast<std::size_t>(d);
  }
  return p;
}

Matrix permute_operator(const Matrix& m, const std::vector<std::size_t>& new_to_old) {
  const auto D = static_cast<Eigen::Index>(new_to_old.size());
  Matrix out(D, D);
  for (Eigen::Index x = 0; x < D; ++x)
    for (Eigen::Index y = 0; y < D; ++y)
      out(x, y) = m(static_cast<Eigen::Index>(new_to_old[static_cast<std::size_t>(x)]),
                    static_cast<Eigen::Index>(new_to_old[static_cast<std::size_t>(y)]));
  return out;
}

// Columns u_a(x) = [x_i = a] prod_{j != i} phi_j(x_j).
Matrix embedding(const std::vector<Vector>& locals, const Dims& dims, int party) {
  const auto D = dims.total();
  Matrix u = Matrix::Zero(static_cast<Eigen::Index>(D), dims[party]);
  for (std::size_t x = 0; x < D; ++x) {
    Complex w(1.0);
    int own = 0;
    for (int j = 0; j < dims.size(); ++j) {
      const auto digit = static_cast<Eigen::Index>(x / dims.stride(j) % static_cast<std::size_t>(dims[j]));
      if (j == party)
        own = static_cast<int>(digit);
      else
        w *= locals[static_cast<std::size_t>(j)](digit);
    }
    u(static_cast<Eigen::Index>(x), own) = w;
  }
  return u;
}

Vector product_vector(const std::vector<Vector>& locals) {
  Vector v = Vector::Ones(1);
  for (const auto& l : locals) {
    Vector next(v.size() * l.size());
    for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * l.size(), l.size()) = v(a) * l;
    v = std::move(next);
  }
  return v;
}

// sign = +1 maximizes, -1 minimizes.
SepOptResult seesaw(const Measurement& meas, const OptimizerOptions& opts, double sign) {
  opts.validate();
  const Dims dims(meas.party_dims());
  const Matrix& m = meas.matrix();
  const int n = dims.size();

  SepOptResult best;
  bool have = false;
  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = substream(opts.seed, static_cast<std::uint64_t>(r));
    std::vector<Vector> locals;
    for (int i = 0; i < n; ++i) locals.push_back(haar_vector(dims[i], rng));
    SepOptResult run;
    Vector v = product_vector(locals);
    double current = sign * v.dot(m * v).real();
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
      const double start = current;
      for (int i = 0; i < n; ++i) {
        const Matrix u = embedding(locals, dims, i);
        const Matrix c = u.adjoint() * m * u;
        Eigen::SelfAdjointEigenSolver<Matrix> es(sign * c);
        const Eigen::Index top = es.eigenvalues().size() - 1;
        locals[static_cast<std::size_t>(i)] = es.eigenvectors().col(top);
        current = es.eigenvalues()(top);
        if (opts.record_trace) run.trace.push_back(sign * current);
      }
      run.iterations = iter;
      if (std::abs(current - start) <= opts.rel_tol * std::max(std::abs(current), 1e-12)) {
        run.converged = true;
        break;
      }
    }
    for (auto& l : locals) canonicalize_phase(l);
    v = product_vector(locals);
    run.value = v.dot(m * v).real();
    run.witness = std::move(locals);
    if (!have || sign * run.value > sign * best.value) {
      best = std::move(run);
      have = true;
    }
  }
  best.restarts_used = opts.restarts;
  return best;
}

}  // namespace

// ---------------------------------------------------------------- types

Measurement::Measurement(Matrix matrix, std::vector<int> party_dims, UncheckedTag)
    : m_(std::move(matrix)), parties_(std::move(party_dims)) {}

Measurement Measurement::unchecked(Matrix matrix, std::vector<int> party_dims) {
  return Measurement(std::move(matrix), std::move(party_dims), UncheckedTag{});
}

Measurement::Measurement(Matrix matrix, std::vector<int> party_dims)
    : m_(std::move(matrix)), parties_(std::move(party_dims)) {
  if (parties_.empty()) throw Error(Errc::invalid_argument, "measurement needs at least one party");
  const auto D = static_cast<Eigen::Index>(product_of(parties_));
  if (m_.rows() != D || m_.cols() != D) throw Error(Errc::dimension_mismatch, "measurement shape does not match parties");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kTolHerm)
    throw Error(Errc::invalid_argument, "measurement is not Hermitian");
  const Matrix h = 0.5 * (m_ + m_.adjoint());
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.minCoeff() < -kTolPsd || ev.maxCoeff() > 1.0 + kTolPsd)
    throw Error(Errc::invalid_argument, "measurement violates 0 <= M <= I");
}

KrausChannel::KrausChannel(std::vector<Matrix> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw Error(Errc::invalid_argument, "channel needs at least one Kraus operator");
  const auto r = ops_.front().rows();
  const auto c = ops_.front().cols();
  if (r < 1 || c < 1) throw Error(Errc::invalid_argument, "Kraus operators must be nonempty");
  Matrix s = Matrix::Zero(c, c);
  for (const auto& k : ops_) {
    if (k.rows() != r || k.cols() != c) throw Error(Errc::dimension_mismatch, "Kraus operators differ in shape");
    s += k.adjoint() * k;
  }
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.maxCoeff() > 1.0 + kTolPsd) throw Error(Errc::invalid_argument, "channel is trace increasing");
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(output_dim(), output_dim());
  for (const auto& k : ops_) out += k * rho * k.adjoint();
  return out;
}

Matrix KrausChannel::apply_adjoint(const Matrix& x) const {
  Matrix out = Matrix::Zero(input_dim(), input_dim());
  for (const auto& k : ops_) out += k.adjoint() * x * k;
  return out;
}

double SepOptResult::min_entropy() const { return -std::log(value); }

void RepetitionSpec::validate() const {
  if (ell < 1) throw Error(Errc::invalid_argument, "repetition needs ell >= 1");
  if (threshold < 0 || threshold > ell) throw Error(Errc::invalid_argument, "threshold must lie in [0, ell]");
}

// ---------------------------------------------------------------- optimization

SepOptResult sep_maximize(const Measurement& m, const OptimizerOptions& opts) { return seesaw(m, opts, 1.0); }
SepOptResult sep_minimize(const Measurement& k, const OptimizerOptions& opts) { return seesaw(k, opts, -1.0); }

// ---------------------------------------------------------------- protocol 2

Matrix pair_symmetric_projector(int d, int k) {
  if (d < 1 || k < 1) throw Error(Errc::invalid_argument, "pair projector needs d, k >= 1");
  const Dims dims = Dims::uniform(d, 2 * k);
  const auto D = static_cast<Eigen::Index>(dims.total());
  Matrix pi = Matrix::Identity(D, D);
  for (int j = 0; j < k; ++j) {
    std::vector<int> order(static_cast<std::size_t>(2 * k));
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(k + j)]);
    const auto map = reorder_map(dims, order);
    Matrix f = Matrix::Zero(D, D);
    for (Eigen::Index x = 0; x < D; ++x) f(x, static_cast<Eigen::Index>(map[static_cast<std::size_t>(x)])) = 1.0;
    pi = pi * (0.5 * (Matrix::Identity(D, D) + f));
  }
  return pi;
}

Measurement protocol2_operator(const Measurement& m, int k, int d) {
  if (m.parties() != k) throw Error(Errc::dimension_mismatch, "protocol2_operator: M must have k parties");
  for (int pd : m.party_dims())
    if (pd != d) throw Error(Errc::dimension_mismatch, "protocol2_operator: every party must have dimension d");
  const Dims dims = Dims::uniform(d, 2 * k);  // budget check on d^{2k}
  const Matrix pi = pair_symmetric_projector(d, k);
  const auto half = static_cast<Eigen::Index>(m.dim());
  const Matrix e = pi * kron(m.matrix(), Matrix::Identity(half, half)) * pi;
  const int side = static_cast<int>(half);
  return Measurement::unchecked(0.5 * (e + e.adjoint()), {side, side});
}

SoundnessReport soundness_bound_check(const Measurement& m, int k, int d, const OptimizerOptions& opts, double slack) {
  SoundnessReport rep;
  rep.slack = slack;
  rep.s = sep_maximize(m, opts).value;
  rep.s_prime = sep_maximize(protocol2_operator(m, k, d), opts).value;
  rep.bound_27 = 1.0 - (1.0 - rep.s) * (1.0 - rep.s) / 27.0;
  rep.holds_27 = rep.s_prime <= rep.bound_27 + slack;
  if (k == 2) {
    rep.bound_k2 = (3.0 + rep.s) / 4.0;
    rep.holds_k2 = rep.s_prime <= *rep.bound_k2 + slack;
  }
  return rep;
}

// ---------------------------------------------------------------- repetition

namespace {

Measurement regroup_by_party(const Matrix& slots_major, const std::vector<int>& party_dims, int ell) {
  const int k = static_cast<int>(party_dims.size());
  std::vector<int> slot_dims;
  for (int t = 0; t < ell; ++t) slot_dims.insert(slot_dims.end(), party_dims.begin(), party_dims.end());
  const Dims dims(slot_dims);
  // New subsystem i * ell + t is old subsystem t * k + i.
  std::vector<int> order;
  for (int i = 0; i < k; ++i)
    for (int t = 0; t < ell; ++t) order.push_back(t * k + i);
  const Matrix out = permute_operator(slots_major, reorder_map(dims, order));
  std::vector<int> grouped;
  for (int d : party_dims) {
    int g = 1;
    for (int t = 0; t < ell; ++t) g *= d;
    grouped.push_back(g);
  }
  return Measurement::unchecked(out, grouped);
}

void require_repetition_budget(const Measurement& m, int ell) {
  double total = 1.0;
  for (int t = 0; t < ell; ++t) total *= static_cast<double>(m.dim());
  if (total > static_cast<double>(Budget::max_dim()))
    throw Error(Errc::resource_budget, "repetition: dimension^ell exceeds budget");
}

}  // namespace

Measurement repeat_measurement(const Measurement& m, const RepetitionSpec& spec) {
  spec.validate();
  if (spec.threshold != spec.ell)
    throw Error(Errc::invalid_argument, "repeat_measurement: plain repetition needs threshold = ell");
  require_repetition_budget(m, spec.ell);
  Matrix t = Matrix::Ones(1, 1);
  for (int s = 0; s < spec.ell; ++s) t = kron(t, m.matrix());
  return regroup_by_party(t, m.party_dims(), spec.ell);
}

Measurement threshold_repeat(const Measurement& m, const RepetitionSpec& spec) {
  spec.validate();
  require_repetition_budget(m, spec.ell);
  const auto D = static_cast<Eigen::Index>(m.dim());
  const Matrix reject = Matrix::Identity(D, D) - m.matrix();
  Matrix total;
  for (std::uint32_t pattern = 0; pattern < (1U << spec.ell); ++pattern) {
    if (std::popcount(pattern) < spec.threshold) continue;
    Matrix t = Matrix::Ones(1, 1);
    // Slot s accepts iff bit (ell - 1 - s) of the pattern is set.
    for (int s = 0; s < spec.ell; ++s) t = kron(t, (pattern >> (spec.ell - 1 - s) & 1U) ? m.matrix() : reject);
    if (total.size() == 0)
      total = std::move(t);
    else
      total += t;
  }
  return regroup_by_party(total, m.party_dims(), spec.ell);
}

// ---------------------------------------------------------------- channels

Measurement channel_to_measurement(const KrausChannel& n) {
  const int d1 = n.output_dim();
  const int k = n.kraus_count();
  Matrix v(static_cast<Eigen::Index>(d1) * k, n.input_dim());
  for (int a = 0; a < d1; ++a)
    for (int i = 0; i < k; ++i) v.row(a * k + i) = n.ops()[static_cast<std::size_t>(i)].row(a);
  const Matrix m = v * v.adjoint();
  return Measurement::unchecked(0.5 * (m + m.adjoint()), {d1, k});
}

Measurement channel_to_measurement_diagonal(const KrausChannel& n) {
  const int d1 = n.output_dim();
  const int k = n.kraus_count();
  const auto D = static_cast<Eigen::Index>(d1) * k;
  Matrix m = Matrix::Zero(D, D);
  for (int i = 0; i < k; ++i) {
    const auto& op = n.ops()[static_cast<std::size_t>(i)];
    const Matrix nn = op * op.adjoint();
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d1; ++b) m(a * k + i, b * k + i) = nn(a, b);
  }
  return Measurement::unchecked(m, {d1, k});
}

KrausChannel measurement_to_channel(const Measurement& m) {
  if (m.parties() != 2) throw Error(Errc::invalid_argument, "measurement_to_channel needs two parties");
  const int d1 = m.party_dims()[0];
  const int d2 = m.party_dims()[1];
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m.matrix() + m.matrix().adjoint()));
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j) > 1e-12) support.push_back(j);
  const auto r = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(support.size()));
  // Columns of M^{1/2} W: sqrt(lambda_j) e_j for e_j spanning supp M.
  Matrix root_w = Matrix::Zero(static_cast<Eigen::Index>(m.dim()), r);
  for (std::size_t c = 0; c < support.size(); ++c)
    root_w.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(support[c])) * es.eigenvectors().col(support[c]);
  std::vector<Matrix> ops;
  for (int j = 0; j < d2; ++j) {
    Matrix kj(d1, r);
    for (int a = 0; a < d1; ++a) kj.row(a) = root_w.row(a * d2 + j);
    ops.push_back(std::move(kj));
  }
  return KrausChannel(std::move(ops));
}

SepOptResult min_output_infinity(const KrausChannel& n, const OptimizerOptions& opts) {
  opts.validate();
  SepOptResult best;
  bool have = false;
  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = substream(opts.seed, static_cast<std::uint64_t>(r));
    Vector psi = haar_vector(n.input_dim(), rng);
    Vector eta;
    SepOptResult run;
    double current = -1.0;
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
      const double start = current;
      Eigen::SelfAdjointEigenSolver<Matrix> out(n.apply(psi * psi.adjoint()));
      eta = out.eigenvectors().col(out.eigenvalues().size() - 1);
      if (opts.record_trace) run.trace.push_back(out.eigenvalues().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Matrix> in(n.apply_adjoint(eta * eta.adjoint()));
      psi = in.eigenvectors().col(in.eigenvalues().size() - 1);
      current = in.eigenvalues().maxCoeff();
      if (opts.record_trace) run.trace.push_back(current);
      run.iterations = iter;
      if (std::abs(current - start) <= opts.rel_tol * std::max(std::abs(current), 1e-12)) {
        run.converged = true;
        break;
      }
    }
    canonicalize_phase(psi);
    canonicalize_phase(eta);
    run.value = eta.dot(n.apply(psi * psi.adjoint()) * eta).real();
    run.witness = {psi, eta};
    if (!have || run.value > best.value) {
      best = std::move(run);
      have = true;
    }
  }
  best.restarts_used = opts.restarts;
  return best;
}

// ---------------------------------------------------------------- gentle measurement

double trace_norm(const Matrix& hermitian) {
  const Matrix h = 0.5 * (hermitian + hermitian.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().sum();
}

GentleReport gentle_check(const DensityOperator& rho, const Matrix& x) {
  const auto D = static_cast<Eigen::Index>(rho.dim());
  if (x.rows() != D || x.cols() != D) throw Error(Errc::dimension_mismatch, "gentle_check: shapes differ");
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() > kTolHerm || (x * x - x).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(Errc::invalid_argument, "gentle_check: X is not a projector");
  GentleReport rep;
  rep.delta = std::max(0.0, 1.0 - (rho.matrix() * x).trace().real());
  rep.distance = 0.5 * trace_norm(rho.matrix() - x * rho.matrix() * x);
  rep.holds = rep.distance <= std::sqrt(rep.delta) + 1e-12;
  return rep;
}

}  // namespace prodtest
