#include "prodtest/common.hpp"

#include <atomic>
#include <sstream>

namespace prodtest {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_mask: return "invalid-mask";
    case Errc::invalid_cut: return "invalid-cut";
    case Errc::invalid_partition: return "invalid-partition";
    case Errc::invalid_target: return "invalid-target";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::unsupported_profile: return "unsupported-profile";
    case Errc::degenerate_residual: return "degenerate-residual";
    case Errc::resource_budget: return "resource-budget";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

namespace {
std::atomic<std::size_t> g_max_dim{4096};
std::atomic<double> g_max_work{1e11};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::size_t Budget::max_dim() { return g_max_dim.load(std::memory_order_relaxed); }
void Budget::set_max_dim(std::size_t dim) { g_max_dim.store(dim, std::memory_order_relaxed); }
double Budget::max_work() { return g_max_work.load(std::memory_order_relaxed); }
void Budget::set_max_work(double work) { g_max_work.store(work, std::memory_order_relaxed); }

void Budget::require_dim(std::size_t dim, const std::string& what) {
  if (dim > max_dim()) {
    std::ostringstream os;
    os << what << ": dimension " << dim << " exceeds budget " << max_dim();
    throw Error(Errc::resource_budget, os.str());
  }
}

void Budget::require_work(double work, const std::string& what) {
  if (work > max_work()) {
    std::ostringstream os;
    os << what << ": estimated work " << work << " exceeds budget " << max_work();
    throw Error(Errc::resource_budget, os.str());
  }
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 1)));
}

}  // namespace prodtest
