#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace plantlab {

namespace detail {
// 128-layer ziggurat for the standard normal (Marsaglia & Tsang layout):
// layer i covers [0, x_i) horizontally; a 52-bit mantissa below k[i] is
// accepted immediately, otherwise the wedge or tail is resolved exactly.
// The tables live here so the fast-accept path inlines into callers; the
// single instance is defined in rng.cpp.
struct ZigguratTables {
  static constexpr int kLayers = 128;
  static constexpr double kR = 3.442619855899;       // base strip edge
  static constexpr double kV = 9.91256303526217e-3;  // area of each layer
  static constexpr double kM = 4503599627370496.0;   // 2^52

  double w[kLayers];         // value = mantissa * w[layer]
  double f[kLayers];         // pdf at the layer's lower edge
  std::uint64_t k[kLayers];  // fast-accept threshold on the mantissa

  static double pdf(double v) { return std::exp(-0.5 * v * v); }

  ZigguratTables();
};

extern const ZigguratTables kZig;
}  // namespace detail

// Counter-based pseudo-random function: output w at counter c is the
// SplitMix64 stream of `key` evaluated at index c, which gives O(1) random
// access into any row/cell of a stream without storing state. Rows, trials,
// and purposes get statistically independent streams by deriving distinct
// keys with derive_key().
struct CounterRng {
  std::uint64_t key = 0;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t at(std::uint64_t counter) const {
    return mix(key + kGamma * (counter + 1));
  }
};

// Folds words into a single well-mixed 64-bit key.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> words);

// Domain-separation tags for derive_key.
enum : std::uint64_t {
  kTagInstance = 0x01,
  kTagRow = 0x02,
  kTagAdversary = 0x03,
  kTagPermute = 0x04,
  kTagTrial = 0x05,
  kTagArm = 0x06,
  kTagScratch = 0x07,
};

// Sequential sampling view over a CounterRng. Rewinding a row means
// reconstructing the RowRng with the same key: the draw sequence replays
// bit-identically.
class RowRng {
 public:
  explicit RowRng(std::uint64_t key) : prf_{key} {}

  std::uint64_t u64() { return prf_.at(ctr_++); }

  // Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}, unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t n);

  // Standard normal via a 128-layer ziggurat over the u64 stream. The
  // common rectangle-accept case stays inline; wedge and tail cases are
  // resolved out of line without changing the u64 consumption pattern.
  double normal() {
    for (;;) {
      const std::uint64_t bits = u64();
      const unsigned layer = static_cast<unsigned>(bits & 127u);
      const std::uint64_t mant = bits >> 12;
      if (mant < detail::kZig.k[layer]) {
        return apply_sign(static_cast<double>(mant) * detail::kZig.w[layer],
                          bits);
      }
      double out;
      if (normal_edge(bits, out)) return out;
    }
  }

  // Fills dst[0..n) with standard normals, identical to calling normal() n
  // times; the counter stays in a register across the batch, which matters
  // for wide rows.
  void fill_normal(double* dst, std::size_t n) {
    const std::uint64_t key = prf_.key;
    std::uint64_t c = ctr_;
    for (std::size_t i = 0; i < n; ++i) {
      for (;;) {
        const std::uint64_t bits = CounterRng::mix(key + CounterRng::kGamma * (++c));
        const unsigned layer = static_cast<unsigned>(bits & 127u);
        const std::uint64_t mant = bits >> 12;
        if (mant < detail::kZig.k[layer]) {
          dst[i] = apply_sign(
              static_cast<double>(mant) * detail::kZig.w[layer], bits);
          break;
        }
        ctr_ = c;  // hand the live counter to the out-of-line path
        double out;
        const bool done = normal_edge(bits, out);
        c = ctr_;
        if (done) {
          dst[i] = out;
          break;
        }
      }
    }
    ctr_ = c;
  }

  // Draws a uniform k-subset of {0, ..., n-1}, returned sorted.
  std::vector<long long> subset(long long n, long long k);

 private:
  // Negates r when sign bit 7 of the layer draw is set; branch-free because
  // the sign is a coin flip the predictor cannot learn.
  static double apply_sign(double r, std::uint64_t bits) {
    const std::uint64_t flipped =
        std::bit_cast<std::uint64_t>(r) ^
        ((bits << 56) & 0x8000000000000000ull);
    return std::bit_cast<double>(flipped);
  }

  // Tail and wedge handling for normal(); returns false when the wedge
  // rejects and a fresh layer draw is needed.
  bool normal_edge(std::uint64_t bits, double& out);

  CounterRng prf_;
  std::uint64_t ctr_ = 0;
};

}  // namespace plantlab
