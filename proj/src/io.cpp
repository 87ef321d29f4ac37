#include "prodtest/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace prodtest::io {

namespace {

struct Line {
  int number;
  std::string key;
  std::vector<std::string> args;
  std::string rest;  // everything after the key, trimmed
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    Line line;
    line.number = number;
    std::istringstream words(t);
    words >> line.key;
    std::string w;
    while (words >> w) line.args.push_back(w);
    line.rest = trim(t.substr(line.key.size()));
    out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line.number << ": " << msg;
  throw Error(Errc::parse_error, os.str());
}

double to_double(const Line& line, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    fail(line, "not a finite number: '" + s + "'");
  return v;
}

int to_int(const Line& line, const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || v < 1 || v > 1 << 20) fail(line, "not a positive integer: '" + s + "'");
  return static_cast<int>(v);
}

std::vector<int> int_list(const Line& line) {
  if (line.args.empty()) fail(line, line.key + " needs at least one value");
  std::vector<int> out;
  for (const auto& a : line.args) out.push_back(to_int(line, a));
  return out;
}

int single_int(const Line& line) {
  if (line.args.size() != 1) fail(line, line.key + " takes one value");
  return to_int(line, line.args[0]);
}

Complex pair(const Line& line) {
  if (line.args.size() != 2) fail(line, line.key + " takes two values: re im");
  return {to_double(line, line.args[0]), to_double(line, line.args[1])};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_pair(std::ostringstream& os, const char* key, Complex c) {
  os << key << ' ' << num(c.real()) << ' ' << num(c.imag()) << '\n';
}

std::size_t product(const std::vector<int>& dims) {
  std::size_t p = 1;
  for (int d : dims) {
    p *= static_cast<std::size_t>(d);
    Budget::require_dim(p, "operator file");
  }
  return p;
}

}  // namespace

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::density: return "density";
    case OperatorKind::measurement: return "measurement";
    case OperatorKind::unitary: return "unitary";
    case OperatorKind::kraus_list: return "kraus-list";
  }
  return "unknown";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "error reading '" + path + "'");
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::io_error, "error writing '" + path + "'");
}

std::string peek_kind(const std::string& text) {
  for (const auto& line : tokenize(text))
    if (line.key == "kind") return line.rest;
  return "state";
}

StateFile parse_state(const std::string& text) {
  std::optional<std::vector<int>> dims;
  std::optional<std::string> label;
  std::vector<Complex> amps;
  const auto lines = tokenize(text);
  for (const auto& line : lines) {
    if (line.key == "kind") {
      if (line.rest != "state") fail(line, "expected kind state, found '" + line.rest + "'");
    } else if (line.key == "label") {
      label = line.rest;
    } else if (line.key == "dims") {
      if (dims) fail(line, "duplicate dims");
      dims = int_list(line);
    } else if (line.key == "amp") {
      amps.push_back(pair(line));
    } else {
      fail(line, "unknown key '" + line.key + "'");
    }
  }
  if (!dims) throw Error(Errc::parse_error, "state file has no dims line");
  const Dims profile(*dims);
  if (amps.size() != profile.total()) {
    std::ostringstream os;
    os << "state file has " << amps.size() << " amplitudes, dims require " << profile.total();
    throw Error(Errc::parse_error, os.str());
  }
  Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];

  std::vector<std::string> warnings;
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "state norm " << norm << " is not within 1e-3 of 1";
    throw Error(Errc::invalid_argument, os.str());
  }
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "state norm " << norm << " renormalized on load";
    warnings.push_back(os.str());
  }
  if (std::abs(norm - 1.0) > kTolNorm) v /= norm;
  return {PureState(std::move(v), profile), label, std::move(warnings)};
}

std::string format_state(const PureState& psi, const std::optional<std::string>& label) {
  std::ostringstream os;
  os << "kind state\n";
  if (label) os << "label " << *label << '\n';
  os << "dims";
  for (int d : psi.dims().local()) os << ' ' << d;
  os << '\n';
  for (std::size_t i = 0; i < psi.dim(); ++i) put_pair(os, "amp", psi[i]);
  return os.str();
}

OperatorFile parse_operator(const std::string& text) {
  OperatorFile op;
  std::optional<std::string> kind;
  std::optional<int> out_dim, in_dim, count;
  std::vector<Complex> entries;
  for (const auto& line : tokenize(text)) {
    if (line.key == "kind") {
      if (kind) fail(line, "duplicate kind");
      kind = line.rest;
      if (*kind == "density") op.kind = OperatorKind::density;
      else if (*kind == "measurement") op.kind = OperatorKind::measurement;
      else if (*kind == "unitary") op.kind = OperatorKind::unitary;
      else if (*kind == "kraus-list") op.kind = OperatorKind::kraus_list;
      else fail(line, "unknown operator kind '" + *kind + "'");
    } else if (line.key == "party_dims") {
      op.party_dims = int_list(line);
    } else if (line.key == "output_dim") {
      out_dim = single_int(line);
    } else if (line.key == "input_dim") {
      in_dim = single_int(line);
    } else if (line.key == "kraus") {
      count = single_int(line);
    } else if (line.key == "entry") {
      entries.push_back(pair(line));
    } else if (line.key == "label") {
    } else {
      fail(line, "unknown key '" + line.key + "'");
    }
  }
  if (!kind) throw Error(Errc::parse_error, "operator file has no kind line");

  auto fill = [&](std::size_t rows, std::size_t cols, std::size_t offset) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries[offset + r * cols + c];
    return m;
  };
  auto expect = [&](std::size_t n) {
    if (entries.size() != n) {
      std::ostringstream os;
      os << to_string(op.kind) << " file has " << entries.size() << " entries, expected " << n;
      throw Error(Errc::parse_error, os.str());
    }
  };

  if (op.kind == OperatorKind::kraus_list) {
    if (!out_dim || !in_dim || !count)
      throw Error(Errc::parse_error, "kraus-list file needs output_dim, input_dim and kraus lines");
    Budget::require_dim(static_cast<std::size_t>(*out_dim) * static_cast<std::size_t>(*count), "kraus-list");
    Budget::require_dim(static_cast<std::size_t>(*in_dim), "kraus-list");
    const auto block = static_cast<std::size_t>(*out_dim) * static_cast<std::size_t>(*in_dim);
    expect(block * static_cast<std::size_t>(*count));
    for (int k = 0; k < *count; ++k)
      op.kraus.push_back(fill(static_cast<std::size_t>(*out_dim), static_cast<std::size_t>(*in_dim),
                              block * static_cast<std::size_t>(k)));
    to_channel(op);
    return op;
  }

  if (op.party_dims.empty()) throw Error(Errc::parse_error, "operator file has no party_dims line");
  const std::size_t D = product(op.party_dims);
  expect(D * D);
  op.matrix = fill(D, D, 0);
  switch (op.kind) {
    case OperatorKind::density: to_density(op); break;
    case OperatorKind::measurement: to_measurement(op); break;
    case OperatorKind::unitary: to_unitary(op); break;
    case OperatorKind::kraus_list: break;
  }
  return op;
}

std::string format_operator(const OperatorFile& op) {
  std::ostringstream os;
  os << "kind " << to_string(op.kind) << '\n';
  if (op.kind == OperatorKind::kraus_list) {
    if (op.kraus.empty()) throw Error(Errc::invalid_argument, "empty kraus list");
    os << "output_dim " << op.kraus.front().rows() << "\ninput_dim " << op.kraus.front().cols() << "\nkraus "
       << op.kraus.size() << '\n';
    for (const auto& k : op.kraus)
      for (Eigen::Index r = 0; r < k.rows(); ++r)
        for (Eigen::Index c = 0; c < k.cols(); ++c) put_pair(os, "entry", k(r, c));
    return os.str();
  }
  os << "party_dims";
  for (int d : op.party_dims) os << ' ' << d;
  os << '\n';
  for (Eigen::Index r = 0; r < op.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) put_pair(os, "entry", op.matrix(r, c));
  return os.str();
}

namespace {
void require_kind(const OperatorFile& op, OperatorKind want) {
  if (op.kind != want)
    throw Error(Errc::invalid_argument,
                std::string("expected a ") + to_string(want) + " file, found " + to_string(op.kind));
}
}  // namespace

DensityOperator to_density(const OperatorFile& op) {
  require_kind(op, OperatorKind::density);
  return DensityOperator(op.matrix, Dims(op.party_dims));
}

Measurement to_measurement(const OperatorFile& op) {
  require_kind(op, OperatorKind::measurement);
  return Measurement(op.matrix, op.party_dims);
}

UnitaryOperator to_unitary(const OperatorFile& op) {
  require_kind(op, OperatorKind::unitary);
  for (int d : op.party_dims)
    if (d != op.party_dims.front())
      throw Error(Errc::unsupported_profile, "unitary files need equal party dimensions");
  return UnitaryOperator(op.matrix, op.party_dims.front(), static_cast<int>(op.party_dims.size()));
}

KrausChannel to_channel(const OperatorFile& op) {
  require_kind(op, OperatorKind::kraus_list);
  return KrausChannel(op.kraus);
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace prodtest::io
