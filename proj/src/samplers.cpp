#include "prodtest/samplers.hpp"

namespace prodtest::sample {

namespace {
Matrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      z(i, j) = Complex(re, im);
    }
  return z;
}

Matrix random_density(int d, std::mt19937_64& rng) {
  const Matrix g = ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}
}  // namespace

DensityOperator density(const Dims& dims, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  return DensityOperator(random_density(static_cast<int>(dims.total()), rng), dims);
}

Matrix projector(int dim, int rank, std::uint64_t seed) {
  if (rank < 0 || rank > dim) throw Error(Errc::invalid_argument, "projector rank out of range");
  const Matrix u = haar_unitary(dim, seed);
  const Matrix cols = u.leftCols(rank);
  return cols * cols.adjoint();
}

Measurement measurement(const std::vector<int>& party_dims, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  int D = 1;
  for (int d : party_dims) D *= d;
  const Matrix u = haar_unitary(D, rng);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RealVector ev(D);
  for (int i = 0; i < D; ++i) ev(i) = uni(rng);
  const Matrix m = u * ev.cast<Complex>().asDiagonal() * u.adjoint();
  return Measurement(0.5 * (m + m.adjoint()), party_dims);
}

Measurement separable_measurement(const std::vector<int>& party_dims, int terms, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Matrix m;
  for (int j = 0; j < terms; ++j) {
    Matrix t = Matrix::Ones(1, 1);
    for (int d : party_dims) t = kron(t, random_density(d, rng));
    t *= uni(rng);
    if (m.size() == 0)
      m = std::move(t);
    else
      m += t;
  }
  m = 0.5 * (m + m.adjoint());
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  m *= (0.5 + 0.5 * uni(rng)) / top;
  return Measurement(m, party_dims);
}

KrausChannel channel(int input_dim, int output_dim, int kraus, double scale, std::uint64_t seed) {
  if (output_dim * kraus < input_dim)
    throw Error(Errc::invalid_argument, "channel sampler needs output_dim * kraus >= input_dim");
  if (!(scale > 0.0 && scale <= 1.0)) throw Error(Errc::invalid_argument, "channel scale must lie in (0, 1]");
  const Matrix u = haar_unitary(output_dim * kraus, seed);
  const Matrix v = u.leftCols(input_dim) * scale;
  std::vector<Matrix> ops;
  for (int i = 0; i < kraus; ++i) {
    Matrix k(output_dim, input_dim);
    for (int a = 0; a < output_dim; ++a) k.row(a) = v.row(a * kraus + i);
    ops.push_back(std::move(k));
  }
  return KrausChannel(std::move(ops));
}

}  // namespace prodtest::sample
