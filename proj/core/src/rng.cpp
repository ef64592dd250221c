#include "plantlab/rng.hpp"

#include <algorithm>
#include <cmath>

#include "plantlab/errors.hpp"

namespace plantlab {

std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t k = 0x243F6A8885A308D3ull;  // arbitrary non-zero start
  for (std::uint64_t w : words) {
    k = CounterRng::mix(k + CounterRng::kGamma + w);
  }
  return k;
}

std::uint64_t RowRng::below(std::uint64_t n) {
  if (n == 0) fail(Errc::InvalidParams, "below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = u64();
  while (v >= limit) v = u64();
  return v % n;
}

std::vector<long long> RowRng::subset(long long n, long long k) {
  if (k < 0 || k > n) fail(Errc::InvalidParams, "subset: k out of range");
  // Floyd's algorithm: exactly k accepted draws regardless of n.
  std::vector<long long> out;
  out.reserve(static_cast<std::size_t>(k));
  for (long long j = n - k; j < n; ++j) {
    long long t = static_cast<long long>(below(static_cast<std::uint64_t>(j) + 1));
    bool seen = false;
    for (long long s : out) {
      if (s == t) {
        seen = true;
        break;
      }
    }
    out.push_back(seen ? j : t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

ZigguratTables::ZigguratTables() {
  const double q = kV / pdf(kR);  // x-extent of the base strip
  k[0] = static_cast<std::uint64_t>((kR / q) * kM);
  k[1] = 0;
  w[0] = q / kM;
  w[kLayers - 1] = kR / kM;
  f[0] = 1.0;
  f[kLayers - 1] = pdf(kR);
  double outer = kR;
  double edge = kR;
  for (int i = kLayers - 2; i >= 1; --i) {
    edge = std::sqrt(-2.0 * std::log(kV / edge + pdf(edge)));
    k[i + 1] = static_cast<std::uint64_t>((edge / outer) * kM);
    outer = edge;
    f[i] = pdf(edge);
    w[i] = edge / kM;
  }
}

const ZigguratTables kZig;

}  // namespace detail

bool RowRng::normal_edge(std::uint64_t bits, double& out) {
  using detail::ZigguratTables;
  const auto& zig = detail::kZig;
  const unsigned layer = static_cast<unsigned>(bits & 127u);
  const bool neg = (bits >> 7) & 1u;
  const std::uint64_t mant = bits >> 12;
  if (layer == 0) {
    // Exact tail sample beyond kR (Marsaglia's exponential method).
    double a, b;
    do {
      a = -std::log(1.0 - unit()) / ZigguratTables::kR;
      b = -std::log(1.0 - unit());
    } while (b + b < a * a);
    const double r = ZigguratTables::kR + a;
    out = neg ? -r : r;
    return true;
  }
  // Wedge between the rectangle and the density curve.
  const double v = static_cast<double>(mant) * zig.w[layer];
  const double gap = zig.f[layer] + unit() * (zig.f[layer - 1] - zig.f[layer]);
  if (gap < ZigguratTables::pdf(v)) {
    out = neg ? -v : v;
    return true;
  }
  return false;
}

}  // namespace plantlab
