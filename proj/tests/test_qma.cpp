#include "helpers.hpp"
#include "prodtest/grid_search.hpp"
#include "prodtest/product_test.hpp"
#include "prodtest/qma.hpp"
#include "prodtest/samplers.hpp"

#include <doctest.h>

using namespace prodtest;
using testing::max_abs;

namespace {
Measurement bell_projector() {
  const Vector phi = testing::bell().amplitudes();
  return Measurement(phi * phi.adjoint(), {2, 2});
}

KrausChannel fully_depolarising() {
  return KrausChannel({Matrix::Identity(2, 2) / 2.0, testing::pauli_x() / 2.0, testing::pauli_y() / 2.0,
                       testing::pauli_z() / 2.0});
}

double expectation(const Matrix& m, const Vector& v) { return v.dot(m * v).real(); }
}  // namespace

TEST_CASE("measurement validation") {
  CHECK_NOTHROW(Measurement(Matrix::Identity(4, 4), {2, 2}));
  CHECK_THROWS_AS(Measurement(2.0 * Matrix::Identity(4, 4), {2, 2}), Error);
  CHECK_THROWS_AS(Measurement(-Matrix::Identity(4, 4), {2, 2}), Error);
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 0.5;
  CHECK_THROWS_AS(Measurement(skew, {2}), Error);
  CHECK_THROWS_AS(Measurement(Matrix::Identity(4, 4), {2, 3}), Error);
}

TEST_CASE("Kraus channel validation") {
  CHECK_NOTHROW(fully_depolarising());
  CHECK_THROWS_AS(KrausChannel({Matrix::Identity(2, 2), testing::pauli_x()}), Error);
  CHECK_THROWS_AS(KrausChannel({Matrix::Identity(2, 2), Matrix::Identity(3, 3) / 4.0}), Error);
  CHECK_THROWS_AS(KrausChannel(std::vector<Matrix>{}), Error);
  const auto n = fully_depolarising();
  const Matrix rho = sample::density(Dims{2}, 3).matrix();
  CHECK(max_abs(n.apply(rho) - Matrix::Identity(2, 2) / 2.0) < 1e-14);
  CHECK(max_abs(n.apply_adjoint(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("separable optimization examples") {
  CHECK(sep_maximize(Measurement(Matrix::Identity(4, 4), {2, 2})).value == doctest::Approx(1.0));
  CHECK(sep_minimize(Measurement(Matrix::Identity(4, 4), {2, 2})).value == doctest::Approx(1.0));

  const auto top = sep_maximize(bell_projector());
  CHECK(std::abs(top.value - 0.5) < 1e-8);
  for (const auto& w : top.witness) CHECK(std::abs(w.norm() - 1.0) < 1e-12);

  const auto bottom = sep_minimize(bell_projector());
  CHECK(std::abs(bottom.value) < 1e-8);

  const Matrix sym = symmetric_projector(2, 2).matrix;
  CHECK(sep_maximize(Measurement(sym, {2, 2})).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("seesaw objective is monotone") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Measurement m = sample::measurement({2, 3, 2}, s);
    OptimizerOptions o;
    o.seed = s;
    o.record_trace = true;
    const auto up = sep_maximize(m, o);
    REQUIRE(up.trace.size() >= 3);
    for (std::size_t i = 1; i < up.trace.size(); ++i) CHECK(up.trace[i] >= up.trace[i - 1] - 1e-14);
    const auto down = sep_minimize(m, o);
    for (std::size_t i = 1; i < down.trace.size(); ++i) CHECK(down.trace[i] <= down.trace[i - 1] + 1e-14);
    CHECK(down.value <= up.value);
  }
}

TEST_CASE("seesaw agrees with the grid oracle") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const std::vector<int> dims = s % 2 ? std::vector<int>{2, 3} : std::vector<int>{2, 2};
    const Measurement m = sample::measurement(dims, 50 + s);
    OptimizerOptions o;
    o.seed = s;
    const int res = dims[1] == 3 ? 128 : 64;
    CHECK(std::abs(sep_maximize(m, o).value - grid::extremize_expectation(m.matrix(), dims, res, 1.0).value) < 1e-4);
    CHECK(std::abs(sep_minimize(m, o).value - grid::extremize_expectation(m.matrix(), dims, res, -1.0).value) < 1e-4);
  }
}

TEST_CASE("protocol 2 operator") {
  const Matrix pi = pair_symmetric_projector(2, 2);
  CHECK(max_abs(pi * pi - pi) < 1e-12);
  CHECK(pi.trace().real() == doctest::Approx(9.0));

  const Measurement id(Matrix::Identity(4, 4), {2, 2});
  CHECK(max_abs(protocol2_operator(id, 2, 2).matrix() - pi) < 1e-12);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const Measurement m = sample::measurement({2, 2}, 70 + s);
    const Measurement e = protocol2_operator(m, 2, 2);
    const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(e.matrix()).eigenvalues();
    CHECK(ev.minCoeff() >= -kTolPsd);
    CHECK(ev.maxCoeff() <= 1.0 + kTolPsd);

    std::mt19937_64 rng(s);
    std::vector<Vector> locals{haar_vector(2, rng), haar_vector(2, rng)};
    const Vector psi = PureState::product(locals).amplitudes();
    const Vector two = kron(psi, psi);
    CHECK(std::abs(expectation(e.matrix(), two) - expectation(m.matrix(), psi)) < 1e-12);
  }
  const std::size_t saved = Budget::max_dim();
  Budget::set_max_dim(8);
  CHECK_THROWS_AS(protocol2_operator(id, 2, 2), Error);
  Budget::set_max_dim(saved);
}

TEST_CASE("pair acceptance is bounded by the mean of the single-state values") {
  const Matrix pi = pair_symmetric_projector(2, 2);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const PureState a = haar_state(Dims{2, 2}, 500 + s);
    const PureState b = haar_state(Dims{2, 2}, 600 + s);
    const Vector ab = kron(a.amplitudes(), b.amplitudes());
    CHECK(expectation(pi, ab) <= 0.5 * (ptest_exact(a).value + ptest_exact(b).value) + 1e-12);
    const Vector aa = kron(a.amplitudes(), a.amplitudes());
    CHECK(expectation(pi, aa) == doctest::Approx(ptest_exact(a).value).epsilon(1e-12));
  }
}

TEST_CASE("soundness bounds") {
  const auto trivial = soundness_bound_check(Measurement(Matrix::Identity(4, 4), {2, 2}), 2, 2);
  CHECK(trivial.s == doctest::Approx(1.0));
  CHECK(trivial.s_prime == doctest::Approx(1.0));
  CHECK(trivial.holds());

  const auto bell = soundness_bound_check(bell_projector(), 2, 2);
  CHECK(bell.s == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(bell.s_prime <= 0.875 + 1e-6);
  REQUIRE(bell.bound_k2.has_value());
  CHECK(*bell.bound_k2 == doctest::Approx(0.875));
  CHECK(bell.holds());

  for (std::uint64_t s = 0; s < 5; ++s) {
    OptimizerOptions o;
    o.seed = s;
    CHECK(soundness_bound_check(sample::separable_measurement({2, 2}, 3, 80 + s), 2, 2, o).holds());
  }
}

TEST_CASE("repetition") {
  const Measurement m = sample::separable_measurement({2, 2}, 3, 9);
  CHECK(max_abs(repeat_measurement(m, {1, 1}).matrix() - m.matrix()) == 0.0);

  const Measurement r = repeat_measurement(m, {2, 2});
  CHECK(r.party_dims() == std::vector<int>{4, 4});
  const auto single = sep_maximize(m);
  const double s = single.value;
  const Vector w0 = kron(single.witness[0], single.witness[0]);
  const Vector w1 = kron(single.witness[1], single.witness[1]);
  CHECK(expectation(r.matrix(), kron(w0, w1)) == doctest::Approx(s * s).epsilon(1e-12));
  CHECK(std::abs(sep_maximize(r).value - s * s) < 1e-5);

  RepetitionSpec bad{2, 3};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("threshold repetition") {
  const Measurement m = sample::measurement({2, 2}, 31);
  const Matrix id = Matrix::Identity(16, 16);
  CHECK(max_abs(threshold_repeat(m, {2, 2}).matrix() - repeat_measurement(m, {2, 2}).matrix()) < 1e-12);
  CHECK(max_abs(threshold_repeat(m, {2, 0}).matrix() - id) < 1e-12);
  const Matrix rest = Matrix::Identity(4, 4) - m.matrix();
  const Matrix expected = id - repeat_measurement(Measurement::unchecked(rest, {2, 2}), {2, 2}).matrix();
  CHECK(max_abs(threshold_repeat(m, {2, 1}).matrix() - expected) < 1e-12);

  // A product witness accepted with probability p per copy is accepted with
  // the binomial tail.
  std::mt19937_64 rng(5);
  std::vector<Vector> locals{haar_vector(2, rng), haar_vector(2, rng)};
  const double p = expectation(m.matrix(), PureState::product(locals).amplitudes());
  const Vector w = kron(kron(locals[0], locals[0]), kron(locals[1], locals[1]));
  CHECK(expectation(threshold_repeat(m, {2, 1}).matrix(), w) == doctest::Approx(1 - (1 - p) * (1 - p)).epsilon(1e-12));
  const Measurement t3 = threshold_repeat(Measurement(Matrix::Identity(2, 2) * 0.3, {2}), {3, 2});
  CHECK(t3.matrix()(0, 0).real() == doctest::Approx(3 * 0.09 * 0.7 + 0.027).epsilon(1e-12));
}

TEST_CASE("channels and measurements") {
  const KrausChannel ident({Matrix::Identity(2, 2)});
  const Measurement mi = channel_to_measurement(ident);
  CHECK(mi.party_dims() == std::vector<int>{2, 1});
  CHECK(sep_maximize(mi).value == doctest::Approx(1.0));
  CHECK(min_output_infinity(ident).value == doctest::Approx(1.0));
  CHECK(min_output_infinity(ident).min_entropy() == doctest::Approx(0.0).epsilon(1e-12));

  const KrausChannel dep = fully_depolarising();
  CHECK(std::abs(sep_maximize(channel_to_measurement(dep)).value - 0.5) < 1e-6);
  const auto mo = min_output_infinity(dep);
  CHECK(std::abs(mo.value - 0.5) < 1e-6);
  CHECK(mo.min_entropy() == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(std::abs(sep_maximize(channel_to_measurement_diagonal(dep)).value - 0.25) < 1e-6);

  const KrausChannel conj({haar_unitary(3, 4)});
  CHECK(min_output_infinity(conj).value == doctest::Approx(1.0).epsilon(1e-10));

  for (std::uint64_t s = 0; s < 10; ++s) {
    const int in = 2 + static_cast<int>(s % 2), out = 2 + static_cast<int>((s / 2) % 2), k = 2 + static_cast<int>(s % 3 == 0);
    const KrausChannel n = sample::channel(in, out, k, 1.0, 100 + s);
    OptimizerOptions o;
    o.seed = s;
    const double sep = sep_maximize(channel_to_measurement(n), o).value;
    CHECK(std::abs(sep - min_output_infinity(n, o).value) < 1e-6);
    const KrausChannel half = sample::channel(in, out, k, 0.5, 100 + s);
    CHECK(std::abs(sep_maximize(channel_to_measurement(half), o).value - 0.25 * sep) < 1e-6);
  }
}

TEST_CASE("measurement to channel") {
  const KrausChannel tr = measurement_to_channel(Measurement(Matrix::Identity(4, 4), {2, 2}));
  CHECK(min_output_infinity(tr).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(min_output_infinity(measurement_to_channel(bell_projector())).value - 0.5) < 1e-6);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const Measurement m = sample::measurement({2, 2 + static_cast<int>(s % 2)}, 200 + s);
    OptimizerOptions o;
    o.seed = s;
    const KrausChannel n = measurement_to_channel(m);
    CHECK(std::abs(sep_maximize(m, o).value - min_output_infinity(n, o).value) < 1e-6);
  }
}

TEST_CASE("gentle measurement") {
  const auto rho = DensityOperator::from_pure(testing::basis_state(Dims{2}, {0}));
  Matrix keep = Matrix::Zero(2, 2);
  keep(0, 0) = 1.0;
  const auto same = gentle_check(rho, keep);
  CHECK(same.delta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.distance == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(same.holds);

  Matrix other = Matrix::Zero(2, 2);
  other(1, 1) = 1.0;
  const auto away = gentle_check(rho, other);
  CHECK(away.delta == doctest::Approx(1.0));
  CHECK(away.holds);

  CHECK_THROWS_AS(gentle_check(rho, 0.5 * keep), Error);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const int n = 1 + static_cast<int>(s % 3);
    const int dim = 1 << n;
    const auto r = gentle_check(sample::density(Dims::uniform(2, n), s), sample::projector(dim, 1 + static_cast<int>(s % dim), s + 1));
    CHECK(r.holds);
  }
  Matrix h(2, 2);
  h << 1, 0, 0, -3;
  CHECK(trace_norm(h) == doctest::Approx(4.0));
}

TEST_CASE("samplers") {
  const auto rho = sample::density(Dims{2, 3}, 1);
  CHECK(rho.matrix().rows() == 6);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(rho.matrix()).eigenvalues().minCoeff() > 0.0);
  CHECK(max_abs(sample::density(Dims{2, 3}, 1).matrix() - rho.matrix()) == 0.0);

  const Matrix p = sample::projector(4, 2, 3);
  CHECK(max_abs(p * p - p) < 1e-12);
  CHECK(p.trace().real() == doctest::Approx(2.0));

  const Measurement m = sample::separable_measurement({2, 2}, 3, 4);
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(m.matrix()).eigenvalues().maxCoeff();
  CHECK(top >= 0.5 - 1e-12);
  CHECK(top <= 1.0 + 1e-12);

  const KrausChannel n = sample::channel(3, 2, 2, 0.7, 5);
  Matrix sum = Matrix::Zero(3, 3);
  for (const auto& k : n.ops()) sum += k.adjoint() * k;
  CHECK(max_abs(sum - 0.49 * Matrix::Identity(3, 3)) < 1e-12);
}
