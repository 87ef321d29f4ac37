#pragma once

#include "prodtest/tensor.hpp"

#include <cmath>

namespace testing {

using namespace prodtest;

inline PureState bell() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return PureState(v, Dims{2, 2});
}

inline PureState basis_state(const Dims& dims, std::vector<int> digits) { return PureState::basis(dims, digits); }

inline PureState from_amplitudes(std::vector<Complex> amps, Dims dims) {
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return PureState(v, std::move(dims));
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace testing
