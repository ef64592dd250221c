#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "plantlab/problem.hpp"
#include "plantlab/stream.hpp"

namespace plantlab {

struct Verdict {
  Arm decision = Arm::Null;
  double statistic = 0;
  double threshold = 0;
};

// Canonical bit-level encoder. State sizes are measured as the exact number
// of bits written, not a byte-rounded estimate.
class BitWriter {
 public:
  void put(std::uint64_t value, int bits);
  void put_double(double v) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    __builtin_memcpy(&u, &v, 8);
    put(u, 64);
  }
  long long bits() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  long long bits_ = 0;
  int fill_ = 0;  // bits used in the last byte
};

struct StateSnapshot {
  std::vector<std::uint8_t> bytes;
  long long bits = 0;  // exact bit length of the canonical encoding
};

// Number of bits needed to store counts in [0, top] inclusive.
int count_bits(long long top);

// Accumulator precision for real-valued detector state:
// rho = ceil(log2(n d)) + 12.
int rho_bits(long long n, long long d);

// Real accumulator with a fixed-point shadow for the memory meter: the
// serialized form is a signed rho-bit integer on the scale [-max_abs,
// max_abs]; the statistic itself stays in full double precision, and
// dequantized() supports the quantized-recompute cross-check.
class QuantizedAcc {
 public:
  QuantizedAcc(int rho, double max_abs) : rho_(rho), max_abs_(max_abs) {}

  void add(double v) { value_ += v; }
  void reset() { value_ = 0; }
  double value() const { return value_; }
  int rho() const { return rho_; }
  std::int64_t quantized() const;
  double dequantized() const;
  void write(BitWriter& w) const;  // exactly rho bits

 private:
  int rho_;
  double max_abs_;
  double value_ = 0;
};

// A multi-pass streaming state machine. The harness feeds rows in order,
// calls end_pass() at each pass boundary (state carries across), and reads
// the verdict after the final pass. state() is the canonical serialization:
// a 64-bit header (16-bit detector tag + 48-bit payload length) followed by
// the payload at bit granularity.
class StreamingDetector {
 public:
  virtual ~StreamingDetector() = default;
  virtual const char* name() const = 0;
  virtual bool wants_binary() const = 0;
  virtual void reset() = 0;
  virtual void absorb(const Row& row) = 0;
  virtual void end_pass() {}
  virtual Verdict verdict() const = 0;
  virtual StateSnapshot state() const = 0;
};

// Single counter of one-bits; Planted iff count >= m n q + k^2 (1-q)/2
// (midpoint between the null mean and the planted mean shift).
std::unique_ptr<StreamingDetector> edge_count_detector(long long m, long long n,
                                                       double q, long long k);

// Per-row block weights over width-t column blocks; a block is flagged when
// its weight exceeds t q + C sqrt(t q log2(nm_context)) + margin, and the
// stream is Planted iff any block was flagged. The window constants are the
// detector's own (independent of whatever truncation generated the stream);
// `margin` is typically k(1-q)/2.
std::unique_ptr<StreamingDetector> partition_weight_detector(
    long long t, double q, double C, double nm_context, double margin = 0.0);

// Grand sum of all entries; Planted iff sum > n q ell alpha / 2.
std::unique_ptr<StreamingDetector> coordinate_sum_detector(long long d,
                                                           long long n,
                                                           double q,
                                                           long long ell,
                                                           double alpha);

// Sum over rows and aligned ell-blocks of squared block sums;
// Planted iff total > n d + n alpha ell / 2. Requires ell | d.
std::unique_ptr<StreamingDetector> block_square_detector(long long d,
                                                         long long ell,
                                                         double alpha,
                                                         long long n);

struct SubsetScanParams {
  long long s1 = 1;
  long long s2 = 1;
  std::vector<long long> r_cols;  // stored column subset; empty = all columns
  double delta = 0.1;
  enum class Mode { Auto, Exact, Heuristic };
  Mode mode = Mode::Auto;
  int restarts = 32;   // random restarts for alternating maximization
  int iterations = 3;  // alternating steps per restart
};

// tau = sqrt(2 s1 s2 ln(2 C(n,s1) C(r,s2) / delta)).
double subset_scan_tau(long long n, long long r, long long s1, long long s2,
                       double delta);

// Stores each row restricted to r_cols during the single pass; the decision
// maximizes the (s1 x s2)-block sum, exactly when C(n,s1) C(r,s2) <= 10^6,
// otherwise by alternating maximization (top-s1 rows given columns, top-s2
// columns given rows) with random restarts. The heuristic statistic never
// exceeds the exact maximum. Mode::Exact beyond the enumeration cap throws
// Error{InfeasibleExact}.
std::unique_ptr<StreamingDetector> subset_scan_detector(
    long long n, const SubsetScanParams& params, std::uint64_t seed);

// Baselines for harness calibration: a detector that always answers Null,
// and one that answers with a fixed arm supplied at construction (used to
// realize the instance-revealing oracle).
std::unique_ptr<StreamingDetector> constant_detector(Arm answer);

}  // namespace plantlab
