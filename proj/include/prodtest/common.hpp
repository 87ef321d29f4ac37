#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace prodtest {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances shared by every validity check.
inline constexpr double kTolNorm = 1e-9;
inline constexpr double kTolHerm = 1e-9;
inline constexpr double kTolPsd = 1e-8;
inline constexpr double kTolRecon = 1e-8;

enum class Errc {
  invalid_mask,
  invalid_cut,
  invalid_partition,
  invalid_target,
  dimension_mismatch,
  invalid_argument,
  unsupported_profile,
  degenerate_residual,
  resource_budget,
  parse_error,
  io_error,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Process-wide size limits for exact computations. Readers are lock-free.
struct Budget {
  static std::size_t max_dim();
  static void set_max_dim(std::size_t dim);
  // Upper limit on the elementary-operation estimate of one call.
  static double max_work();
  static void set_max_work(double work);

  static void require_dim(std::size_t dim, const std::string& what);
  static void require_work(double work, const std::string& what);
};

// Deterministic generator for the substream (seed, index). Results of any
// randomized loop keyed this way do not depend on how the loop is scheduled.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

}  // namespace prodtest
