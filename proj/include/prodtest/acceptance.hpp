#pragma once

// The numbered acceptance checks, shared by `prodtest verify` and the
// acceptance test binary.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace prodtest::acceptance {

enum class Suite { quick, full };

struct CriterionResult {
  int index = 0;
  std::string title;
  std::string tolerance;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every criterion in index order. Each result line is also written to
// `live` as soon as it is known, when given.
std::vector<CriterionResult> run(Suite suite, std::uint64_t seed, std::ostream* live = nullptr);

std::string format_line(const CriterionResult& r);

}  // namespace prodtest::acceptance
