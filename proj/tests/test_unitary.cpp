#include "helpers.hpp"
#include "prodtest/unitary_test.hpp"

#include <doctest.h>

using namespace prodtest;
using testing::max_abs;

namespace {
Matrix cnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
  return u;
}
Matrix swap_gate() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = u(1, 2) = u(2, 1) = u(3, 3) = 1.0;
  return u;
}
}  // namespace

TEST_CASE("unitary operator validation") {
  CHECK_NOTHROW(UnitaryOperator(cnot(), 2, 2));
  CHECK_THROWS_AS(UnitaryOperator(2.0 * cnot(), 2, 2), Error);
  CHECK_THROWS_AS(UnitaryOperator(cnot(), 2, 3), Error);
}

TEST_CASE("choi vector examples") {
  const ChoiVector id = choi_vector(Matrix::Identity(4, 4), 2, 2);
  CHECK(id.state.dims() == Dims({4, 4}));
  // |Phi> on one d^2 site has amplitude 1/sqrt(2) on indices 0 and 3.
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  CHECK((id.state.amplitudes() - kron(phi, phi)).norm() < 1e-15);

  const ChoiVector x = choi_vector(testing::pauli_x(), 2, 1);
  CHECK(std::abs(x.state[1] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(x.state[2] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(x.state[0]) == 0.0);

  // Component identity <j|<k|v(M)> = <j|M|k> / sqrt(d^n) for one site.
  const Matrix m = haar_unitary(3, 4);
  const ChoiVector v = choi_vector(m, 3, 1);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(v.state[static_cast<std::size_t>(j * 3 + k)] - m(j, k) / std::sqrt(3.0)) < 1e-15);

  CHECK_THROWS_AS(choi_vector(Matrix::Identity(3, 3), 2, 2), Error);
  CHECK_THROWS_AS(choi_vector(2.0 * Matrix::Identity(2, 2), 2, 1), Error);
}

TEST_CASE("choi inner products and linearity") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix a = haar_unitary(4, s);
    const Matrix b = haar_unitary(4, 100 + s);
    const Complex ip = choi_vector(a, 2, 2).state.amplitudes().dot(choi_vector(b, 2, 2).state.amplitudes());
    CHECK(std::abs(ip - hs_inner(a, b, 4)) < 1e-12);

    Matrix g = Matrix::Random(4, 4);
    const Complex ca(0.3, -1.2), cb(2.0, 0.5);
    const Vector lhs = choi_map(ca * a + cb * g, 2, 2);
    const Vector rhs = ca * choi_map(a, 2, 2) + cb * choi_map(g, 2, 2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("hs_inner") {
  CHECK(std::abs(hs_inner(Matrix::Identity(2, 2), Matrix::Identity(2, 2), 2) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(hs_inner(testing::pauli_x(), testing::pauli_z(), 2)) < 1e-15);
  for (std::uint64_t s = 0; s < 100; ++s)
    CHECK(std::abs(hs_inner(haar_unitary(3, s), haar_unitary(3, s + 1000), 3)) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(hs_inner(Matrix::Identity(2, 2), Matrix::Identity(3, 3), 2), Error);
}

TEST_CASE("unitary product test values") {
  const Matrix prod = kron(haar_unitary(2, 1), haar_unitary(2, 2));
  CHECK(unitary_ptest(UnitaryOperator(prod, 2, 2)).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unitary_ptest(UnitaryOperator(cnot(), 2, 2)).value == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(unitary_ptest(UnitaryOperator(swap_gate(), 2, 2)).value == doctest::Approx(0.625).epsilon(1e-12));
  const Matrix three = kron(kron(haar_unitary(2, 3), haar_unitary(2, 4)), haar_unitary(2, 5));
  CHECK(unitary_ptest(UnitaryOperator(three, 2, 3)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("polar factor") {
  const Matrix a = Matrix::Random(3, 3);
  bool singular = true;
  const Matrix v = polar_unitary(a, &singular);
  CHECK_FALSE(singular);
  CHECK(max_abs(v.adjoint() * v - Matrix::Identity(3, 3)) < 1e-12);
  const Matrix p = v.adjoint() * a;  // |a|
  CHECK(max_abs(p - p.adjoint()) < 1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (p + p.adjoint())).eigenvalues().minCoeff() >= -1e-12);

  Matrix rank1 = Matrix::Zero(2, 2);
  rank1(0, 0) = 1.0;
  const Matrix w = polar_unitary(rank1, &singular);
  CHECK(singular);
  CHECK(max_abs(w.adjoint() * w - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("closest product unitary") {
  const Matrix v1 = haar_unitary(2, 11), v2 = haar_unitary(2, 12);
  const auto p = closest_product_unitary(UnitaryOperator(kron(v1, v2), 2, 2));
  CHECK(p.report.eps_operator == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.report.eps_unitary == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(hs_inner(p.factors[0], v1, 2)) == doctest::Approx(1.0));
  CHECK(std::abs(hs_inner(p.factors[1], v2, 2)) == doctest::Approx(1.0));

  const auto c = closest_product_unitary(UnitaryOperator(cnot(), 2, 2));
  CHECK(std::abs(c.report.eps_operator - 0.5) < 1e-6);
  CHECK(c.report.eps_operator <= c.report.eps_unitary + 1e-12);
}

TEST_CASE("nearest unitary guarantee, sandwich and containment on Haar unitaries") {
  int applicable = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const UnitaryOperator u(haar_unitary(4, 7000 + s), 2, 2);
    OptimizerOptions o;
    o.seed = s;
    const auto r = closest_product_unitary(u, o);
    const double eo = r.report.eps_operator, eu = r.report.eps_unitary;
    CHECK(eo >= -1e-12);
    CHECK(eo <= eu + 1e-12);
    CHECK(eu <= 1.0 + 1e-12);
    CHECK(eo >= eu / 4.0 - 1e-4);
    CHECK(std::abs(std::norm(r.report.hs_value) - (1.0 - eu)) < 1e-10);
    if (eo <= 0.5) {
      ++applicable;
      CHECK(std::norm(r.report.hs_value) >= (1 - 2 * eo) * (1 - 2 * eo) - 1e-6);
    }
    CHECK(unitary_ptest(u).value <= unitary_bounds(eu).upper + 1e-6);

    // Polar certification: <V_i, A_i> = (1/d) tr |A_i| >= 0.
    for (std::size_t i = 0; i < r.factors.size(); ++i) {
      const Matrix& a = r.operator_factors[i];
      const Complex ip = hs_inner(r.factors[i], a, 2);
      const double tr_abs = Eigen::JacobiSVD<Matrix>(a).singularValues().sum() / 2.0;
      CHECK(std::abs(ip.imag()) < 1e-10);
      CHECK(std::abs(ip.real() - tr_abs) < 1e-10);
      CHECK(std::abs(hs_inner(a, a, 2) - Complex(1.0)) < 1e-10);
    }
  }
  CHECK(applicable > 0);
}

TEST_CASE("unitary bounds") {
  CHECK(unitary_bounds(0.0).upper == 1.0);
  CHECK(unitary_bounds(0.5).upper == 501.0 / 512.0);
  const double e = 0.08;
  const double formula = 1 - e / 4 + e * e / 16 + std::pow(e, 1.5) / 8;
  CHECK(unitary_bounds(e).upper == doctest::Approx(formula).epsilon(1e-15));
  CHECK(unitary_bounds(e).upper == doctest::Approx(0.983228).epsilon(1e-6));
  const double x = unitary_bounds_crossover();
  CHECK(x == doctest::Approx(0.106).epsilon(1e-2));
  CHECK(1 - x / 4 + x * x / 16 + std::pow(x, 1.5) / 8 == doctest::Approx(501.0 / 512.0).epsilon(1e-12));
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const auto w = unitary_bounds(t);
    CHECK(w.lower <= w.upper);
    CHECK(w.upper <= 1.0);
    if (t >= x) CHECK(w.upper == 501.0 / 512.0);
  }
  CHECK_THROWS_AS(unitary_bounds(1.2), Error);
}
