#pragma once

// Line-oriented text files for states and operators.
//
//   # comment
//   kind state
//   label bell
//   dims 2 2
//   amp 0.70710678118654757 0
//   ...
//
// Operator files use `kind density|measurement|unitary`, a `party_dims`
// line and D*D `entry re im` lines in row-major order. Kraus lists use
// `kind kraus-list`, `output_dim`, `input_dim`, `kraus k` and the entries
// of each operator in turn. Numbers are written with 17 significant digits
// so a write/read cycle reproduces every double exactly.

#include "prodtest/qma.hpp"
#include "prodtest/unitary_test.hpp"

#include <optional>
#include <string>

namespace prodtest::io {

struct StateFile {
  PureState state;
  std::optional<std::string> label;
  std::vector<std::string> warnings;
};

enum class OperatorKind { density, measurement, unitary, kraus_list };
const char* to_string(OperatorKind k);

struct OperatorFile {
  OperatorKind kind = OperatorKind::density;
  std::vector<int> party_dims;     // unused for kraus-list
  Matrix matrix;                   // unused for kraus-list
  std::vector<Matrix> kraus;       // kraus-list only
};

// Reads a whole file; throws io_error.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// First `kind` value in the text, or "state" if the line is absent.
std::string peek_kind(const std::string& text);

// Parses and validates. Norms within 1e-3 of one are rescaled; anything
// beyond 1e-6 adds a warning. Throws parse_error or the validation error.
StateFile parse_state(const std::string& text);
std::string format_state(const PureState& psi, const std::optional<std::string>& label = std::nullopt);

// Parses and validates according to the kind.
OperatorFile parse_operator(const std::string& text);
std::string format_operator(const OperatorFile& op);

DensityOperator to_density(const OperatorFile& op);
Measurement to_measurement(const OperatorFile& op);
UnitaryOperator to_unitary(const OperatorFile& op);
KrausChannel to_channel(const OperatorFile& op);

// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string digest(const std::string& bytes);

}  // namespace prodtest::io
