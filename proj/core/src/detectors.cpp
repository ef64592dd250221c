#include "plantlab/detectors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "plantlab/errors.hpp"
#include "plantlab/rng.hpp"

namespace plantlab {

namespace {

// 16-bit detector tags for the canonical state header.
constexpr std::uint16_t kTagEdgeCount = 1;
constexpr std::uint16_t kTagPartitionWeight = 2;
constexpr std::uint16_t kTagCoordinateSum = 3;
constexpr std::uint16_t kTagBlockSquare = 4;
constexpr std::uint16_t kTagSubsetScan = 5;
constexpr std::uint16_t kTagConstant = 6;

double lchoose(long long n, long long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1) -
         std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

void require_binary(const Row& row, const char* who) {
  if (!row.binary)
    fail(Errc::IncompatibleDetector,
         std::string(who) + " consumes binary rows, got real-valued");
}

void require_real(const Row& row, const char* who) {
  if (row.binary)
    fail(Errc::IncompatibleDetector,
         std::string(who) + " consumes real-valued rows, got binary");
}

// Indices of the `k` largest entries (ties broken toward lower index).
std::vector<long long> top_indices(const std::vector<double>& vals,
                                   long long k) {
  std::vector<long long> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](long long a, long long b) {
                      const double va = vals[static_cast<std::size_t>(a)];
                      const double vb = vals[static_cast<std::size_t>(b)];
                      if (va != vb) return va > vb;
                      return a < b;
                    });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

void BitWriter::put(std::uint64_t value, int bits) {
  if (bits < 0 || bits > 64)
    fail(Errc::InvalidParams, "bits: field width must be in [0, 64]");
  for (int b = 0; b < bits; ++b) {
    if (fill_ == 0) bytes_.push_back(0);
    if ((value >> b) & 1u)
      bytes_.back() |= static_cast<std::uint8_t>(1u << fill_);
    fill_ = (fill_ + 1) & 7;
  }
  bits_ += bits;
}

int count_bits(long long top) {
  if (top < 0) fail(Errc::InvalidParams, "top: counter range must be >= 0");
  return top == 0 ? 0
                  : std::bit_width(static_cast<unsigned long long>(top));
}

int rho_bits(long long n, long long d) {
  if (n < 1 || d < 1)
    fail(Errc::InvalidParams, "n, d: accumulator context must be positive");
  const unsigned long long prod = static_cast<unsigned long long>(n) *
                                  static_cast<unsigned long long>(d);
  const int ceil_log = prod <= 1 ? 0 : std::bit_width(prod - 1);
  return ceil_log + 12;
}

std::int64_t QuantizedAcc::quantized() const {
  const std::int64_t qmax = (std::int64_t{1} << (rho_ - 1)) - 1;
  const double scaled = value_ * (static_cast<double>(qmax) / max_abs_);
  if (scaled >= static_cast<double>(qmax)) return qmax;
  if (scaled <= -static_cast<double>(qmax)) return -qmax;
  return std::llround(scaled);
}

double QuantizedAcc::dequantized() const {
  const std::int64_t qmax = (std::int64_t{1} << (rho_ - 1)) - 1;
  return static_cast<double>(quantized()) * max_abs_ /
         static_cast<double>(qmax);
}

void QuantizedAcc::write(BitWriter& w) const {
  const std::int64_t qmax = (std::int64_t{1} << (rho_ - 1)) - 1;
  w.put(static_cast<std::uint64_t>(quantized() + qmax), rho_);
}

namespace {

class EdgeCountDetector final : public StreamingDetector {
 public:
  EdgeCountDetector(long long m, long long n, double q, long long k)
      : cells_(m * n),
        threshold_(static_cast<double>(m) * static_cast<double>(n) * q +
                   static_cast<double>(k) * static_cast<double>(k) * (1 - q) /
                       2) {
    if (m < 1 || n < 1)
      fail(Errc::InvalidParams, "m, n: matrix shape must be positive");
    if (k < 0 || k > std::min(m, n))
      fail(Errc::InvalidParams, "k: plant size must be in [0, min(m, n)]");
    if (!(q > 0 && q < 1)) fail(Errc::InvalidParams, "q: must be in (0, 1)");
  }

  const char* name() const override { return "edge_count"; }
  bool wants_binary() const override { return true; }
  void reset() override { count_ = 0; }

  void absorb(const Row& row) override {
    require_binary(row, name());
    for (std::uint8_t b : row.bits) count_ += (b != 0);
  }

  Verdict verdict() const override {
    return {static_cast<double>(count_) >= threshold_ ? Arm::Planted
                                                      : Arm::Null,
            static_cast<double>(count_), threshold_};
  }

  StateSnapshot state() const override {
    BitWriter w;
    const int pb = count_bits(cells_);
    w.put(kTagEdgeCount, 16);
    w.put(static_cast<std::uint64_t>(pb), 48);
    w.put(static_cast<std::uint64_t>(count_), pb);
    return {w.bytes(), w.bits()};
  }

 private:
  long long cells_;
  double threshold_;
  long long count_ = 0;
};

class PartitionWeightDetector final : public StreamingDetector {
 public:
  PartitionWeightDetector(long long t, double q, double C, double nm_context,
                          double margin)
      : t_(t),
        block_threshold_(static_cast<double>(t) * q +
                         C * std::sqrt(static_cast<double>(t) * q *
                                       std::log2(nm_context)) +
                         margin) {
    if (t < 1) fail(Errc::InvalidParams, "t: block width must be positive");
    if (!(q > 0 && q < 1)) fail(Errc::InvalidParams, "q: must be in (0, 1)");
    if (C < 0) fail(Errc::InvalidParams, "C: window constant must be >= 0");
    if (!(nm_context > 1))
      fail(Errc::InvalidParams, "nm_context: must exceed 1 for a log2 window");
  }

  const char* name() const override { return "partition_weight"; }
  bool wants_binary() const override { return true; }
  void reset() override { flags_ = 0; }

  void absorb(const Row& row) override {
    require_binary(row, name());
    if (row.width() % t_ != 0)
      fail(Errc::DimensionMismatch,
           "row width is not a multiple of the block width t");
    const auto& bits = row.bits;
    for (std::size_t off = 0; off < bits.size();
         off += static_cast<std::size_t>(t_)) {
      long long weight = 0;
      for (long long j = 0; j < t_; ++j)
        weight += (bits[off + static_cast<std::size_t>(j)] != 0);
      if (static_cast<double>(weight) > block_threshold_) ++flags_;
    }
  }

  Verdict verdict() const override {
    return {flags_ >= 1 ? Arm::Planted : Arm::Null,
            static_cast<double>(flags_), 1.0};
  }

  StateSnapshot state() const override {
    BitWriter w;
    w.put(kTagPartitionWeight, 16);
    w.put(48, 48);
    w.put(static_cast<std::uint64_t>(flags_), 48);
    return {w.bytes(), w.bits()};
  }

 private:
  long long t_;
  double block_threshold_;
  long long flags_ = 0;
};

class CoordinateSumDetector final : public StreamingDetector {
 public:
  CoordinateSumDetector(long long d, long long n, double q, long long ell,
                        double alpha)
      : d_(d),
        threshold_(static_cast<double>(n) * q * static_cast<double>(ell) *
                   alpha / 2),
        acc_(rho_bits(n, d),
             4.0 * static_cast<double>(n) * static_cast<double>(d)) {
    if (d < 1 || n < 1 || ell < 1)
      fail(Errc::InvalidParams, "d, n, ell: must be positive");
    if (!(q > 0 && q < 1)) fail(Errc::InvalidParams, "q: must be in (0, 1)");
    if (!(alpha > 0)) fail(Errc::InvalidParams, "alpha: must be positive");
  }

  const char* name() const override { return "coordinate_sum"; }
  bool wants_binary() const override { return false; }
  void reset() override { acc_.reset(); }

  void absorb(const Row& row) override {
    require_real(row, name());
    if (row.width() != d_)
      fail(Errc::DimensionMismatch, "row width does not match d");
    for (double v : row.reals) acc_.add(v);
  }

  Verdict verdict() const override {
    return {acc_.value() > threshold_ ? Arm::Planted : Arm::Null, acc_.value(),
            threshold_};
  }

  StateSnapshot state() const override {
    BitWriter w;
    w.put(kTagCoordinateSum, 16);
    w.put(static_cast<std::uint64_t>(acc_.rho()), 48);
    acc_.write(w);
    return {w.bytes(), w.bits()};
  }

 private:
  long long d_;
  double threshold_;
  QuantizedAcc acc_;
};

class BlockSquareDetector final : public StreamingDetector {
 public:
  BlockSquareDetector(long long d, long long ell, double alpha, long long n)
      : d_(d),
        ell_(ell),
        threshold_(static_cast<double>(n) * static_cast<double>(d) +
                   static_cast<double>(n) * alpha * static_cast<double>(ell) /
                       2),
        acc_(rho_bits(n, d),
             4.0 * static_cast<double>(n) * static_cast<double>(d)) {
    if (d < 1 || n < 1)
      fail(Errc::InvalidParams, "d, n: must be positive");
    if (ell < 1 || d % ell != 0)
      fail(Errc::InvalidParams, "ell: blocks must tile the row: ell | d");
    if (!(alpha > 0)) fail(Errc::InvalidParams, "alpha: must be positive");
  }

  const char* name() const override { return "block_square"; }
  bool wants_binary() const override { return false; }
  void reset() override { acc_.reset(); }

  void absorb(const Row& row) override {
    require_real(row, name());
    if (row.width() != d_)
      fail(Errc::DimensionMismatch, "row width does not match d");
    for (long long off = 0; off < d_; off += ell_) {
      double s = 0;
      for (long long j = 0; j < ell_; ++j)
        s += row.reals[static_cast<std::size_t>(off + j)];
      acc_.add(s * s);
    }
  }

  Verdict verdict() const override {
    return {acc_.value() > threshold_ ? Arm::Planted : Arm::Null, acc_.value(),
            threshold_};
  }

  StateSnapshot state() const override {
    BitWriter w;
    w.put(kTagBlockSquare, 16);
    w.put(static_cast<std::uint64_t>(acc_.rho()), 48);
    acc_.write(w);
    return {w.bytes(), w.bits()};
  }

 private:
  long long d_;
  long long ell_;
  double threshold_;
  QuantizedAcc acc_;
};

class SubsetScanDetector final : public StreamingDetector {
 public:
  SubsetScanDetector(long long n, SubsetScanParams params, std::uint64_t seed)
      : n_(n), params_(std::move(params)), seed_(seed) {
    if (n < 1) fail(Errc::InvalidParams, "n: row count must be positive");
    if (params_.s1 < 1 || params_.s1 > n)
      fail(Errc::InvalidParams, "s1: row-subset size must be in [1, n]");
    if (params_.s2 < 1)
      fail(Errc::InvalidParams, "s2: column-subset size must be positive");
    if (!(params_.delta > 0 && params_.delta < 1))
      fail(Errc::InvalidParams, "delta: must be in (0, 1)");
    if (params_.restarts < 1 || params_.iterations < 1)
      fail(Errc::InvalidParams, "restarts/iterations: must be positive");
    for (long long c : params_.r_cols)
      if (c < 0) fail(Errc::InvalidParams, "r_cols: indices must be >= 0");
    clear();
  }

  const char* name() const override { return "subset_scan"; }
  bool wants_binary() const override { return false; }
  void reset() override { clear(); }

  void absorb(const Row& row) override {
    require_real(row, name());
    if (row.index < 0 || row.index >= n_)
      fail(Errc::DimensionMismatch, "row index outside [0, n)");
    std::vector<double> restricted;
    if (params_.r_cols.empty()) {
      restricted = row.reals;
    } else {
      restricted.reserve(params_.r_cols.size());
      for (long long c : params_.r_cols) {
        if (c >= row.width())
          fail(Errc::DimensionMismatch, "r_cols index beyond the row width");
        restricted.push_back(row.reals[static_cast<std::size_t>(c)]);
      }
    }
    const long long w = static_cast<long long>(restricted.size());
    if (width_ < 0)
      width_ = w;
    else if (width_ != w)
      fail(Errc::DimensionMismatch, "row width changed mid-stream");
    store_[static_cast<std::size_t>(row.index)] = std::move(restricted);
    seen_[static_cast<std::size_t>(row.index)] = true;
  }

  Verdict verdict() const override {
    if (width_ < 1)
      return {Arm::Null, 0, std::numeric_limits<double>::infinity()};
    const long long r = width_;
    if (params_.s2 > r)
      fail(Errc::InvalidParams, "s2 exceeds the stored column count");
    const double tau =
        subset_scan_tau(n_, r, params_.s1, params_.s2, params_.delta);
    const double log_pairs =
        lchoose(n_, params_.s1) + lchoose(r, params_.s2);
    const bool small_enough = log_pairs <= std::log(1e6) * (1 + 1e-12);
    double stat;
    if (params_.mode == SubsetScanParams::Mode::Exact && !small_enough)
      fail(Errc::InfeasibleExact,
           "subset pair count exceeds the 10^6 enumeration cap");
    if (params_.mode != SubsetScanParams::Mode::Heuristic && small_enough)
      stat = exact_stat(r);
    else
      stat = heuristic_stat(r);
    return {stat >= tau ? Arm::Planted : Arm::Null, stat, tau};
  }

  StateSnapshot state() const override {
    BitWriter w;
    long long seen_count = 0;
    for (bool s : seen_) seen_count += s;
    const long long row_bits = width_ < 0 ? 0 : 64 * width_;
    const long long payload = n_ + seen_count * row_bits;
    w.put(kTagSubsetScan, 16);
    w.put(static_cast<std::uint64_t>(payload), 48);
    for (long long i = 0; i < n_; ++i)
      w.put(seen_[static_cast<std::size_t>(i)] ? 1 : 0, 1);
    for (long long i = 0; i < n_; ++i) {
      if (!seen_[static_cast<std::size_t>(i)]) continue;
      for (double v : store_[static_cast<std::size_t>(i)]) w.put_double(v);
    }
    return {w.bytes(), w.bits()};
  }

 private:
  void clear() {
    store_.assign(static_cast<std::size_t>(n_), {});
    seen_.assign(static_cast<std::size_t>(n_), false);
    width_ = -1;
  }

  double entry(long long i, long long j) const {
    const auto& row = store_[static_cast<std::size_t>(i)];
    return row.empty() ? 0.0 : row[static_cast<std::size_t>(j)];
  }

  // Sum of the s1 largest values.
  static double top_sum(std::vector<double> vals, long long s1) {
    std::nth_element(vals.begin(), vals.begin() + (s1 - 1), vals.end(),
                     std::greater<>());
    return std::accumulate(vals.begin(), vals.begin() + s1, 0.0);
  }

  double block_sum(const std::vector<long long>& rows,
                   const std::vector<long long>& cols) const {
    double s = 0;
    for (long long i : rows)
      for (long long j : cols) s += entry(i, j);
    return s;
  }

  // For a fixed column subset the optimal row subset is the top-s1 row
  // partial sums, so enumerating the smaller side is exhaustive.
  double exact_stat(long long r) const {
    const bool enum_cols = lchoose(r, params_.s2) <= lchoose(n_, params_.s1);
    const long long universe = enum_cols ? r : n_;
    const long long pick = enum_cols ? params_.s2 : params_.s1;
    const long long keep = enum_cols ? params_.s1 : params_.s2;
    const long long other = enum_cols ? n_ : r;

    std::vector<long long> comb(static_cast<std::size_t>(pick));
    std::iota(comb.begin(), comb.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
      std::vector<double> partial(static_cast<std::size_t>(other), 0.0);
      for (long long u = 0; u < other; ++u)
        for (long long c : comb)
          partial[static_cast<std::size_t>(u)] +=
              enum_cols ? entry(u, c) : entry(c, u);
      best = std::max(best, top_sum(std::move(partial), keep));
      // Lexicographic next combination of `pick` items out of `universe`.
      long long pos = pick - 1;
      while (pos >= 0 &&
             comb[static_cast<std::size_t>(pos)] == universe - pick + pos)
        --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (long long p = pos + 1; p < pick; ++p)
        comb[static_cast<std::size_t>(p)] =
            comb[static_cast<std::size_t>(p - 1)] + 1;
    }
    return best;
  }

  std::vector<long long> top_rows_for(const std::vector<long long>& cols) const {
    std::vector<double> partial(static_cast<std::size_t>(n_), 0.0);
    for (long long i = 0; i < n_; ++i)
      for (long long j : cols)
        partial[static_cast<std::size_t>(i)] += entry(i, j);
    return top_indices(partial, params_.s1);
  }

  std::vector<long long> top_cols_for(const std::vector<long long>& rows,
                                      long long r) const {
    std::vector<double> partial(static_cast<std::size_t>(r), 0.0);
    for (long long i : rows)
      for (long long j = 0; j < r; ++j)
        partial[static_cast<std::size_t>(j)] += entry(i, j);
    return top_indices(partial, params_.s2);
  }

  // Alternating maximization; every candidate block is feasible, so the
  // result can never exceed the exact maximum.
  double heuristic_stat(long long r) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < params_.restarts; ++restart) {
      std::vector<long long> cols;
      if (restart == 0) {
        std::vector<double> colsum(static_cast<std::size_t>(r), 0.0);
        for (long long i = 0; i < n_; ++i)
          for (long long j = 0; j < r; ++j)
            colsum[static_cast<std::size_t>(j)] += entry(i, j);
        cols = top_indices(colsum, params_.s2);
      } else {
        RowRng rng(derive_key(
            {seed_, kTagScratch, static_cast<std::uint64_t>(restart)}));
        cols = rng.subset(r, params_.s2);
      }
      std::vector<long long> rows;
      for (int it = 0; it < params_.iterations; ++it) {
        rows = top_rows_for(cols);
        cols = top_cols_for(rows, r);
      }
      best = std::max(best, block_sum(rows, cols));
    }
    return best;
  }

  long long n_;
  SubsetScanParams params_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> store_;
  std::vector<bool> seen_;
  long long width_ = -1;
};

class ConstantDetector final : public StreamingDetector {
 public:
  explicit ConstantDetector(Arm answer) : answer_(answer) {}

  const char* name() const override { return "constant"; }
  bool wants_binary() const override { return true; }
  void reset() override {}
  void absorb(const Row&) override {}  // accepts any row shape

  Verdict verdict() const override {
    return {answer_, answer_ == Arm::Planted ? 1.0 : 0.0, 0.5};
  }

  StateSnapshot state() const override {
    BitWriter w;
    w.put(kTagConstant, 16);
    w.put(1, 48);
    w.put(answer_ == Arm::Planted ? 1 : 0, 1);
    return {w.bytes(), w.bits()};
  }

 private:
  Arm answer_;
};

}  // namespace

std::unique_ptr<StreamingDetector> edge_count_detector(long long m, long long n,
                                                       double q, long long k) {
  return std::make_unique<EdgeCountDetector>(m, n, q, k);
}

std::unique_ptr<StreamingDetector> partition_weight_detector(
    long long t, double q, double C, double nm_context, double margin) {
  return std::make_unique<PartitionWeightDetector>(t, q, C, nm_context, margin);
}

std::unique_ptr<StreamingDetector> coordinate_sum_detector(long long d,
                                                           long long n,
                                                           double q,
                                                           long long ell,
                                                           double alpha) {
  return std::make_unique<CoordinateSumDetector>(d, n, q, ell, alpha);
}

std::unique_ptr<StreamingDetector> block_square_detector(long long d,
                                                         long long ell,
                                                         double alpha,
                                                         long long n) {
  return std::make_unique<BlockSquareDetector>(d, ell, alpha, n);
}

double subset_scan_tau(long long n, long long r, long long s1, long long s2,
                       double delta) {
  if (n < 1 || r < 1) fail(Errc::InvalidParams, "n, r: must be positive");
  if (s1 < 1 || s1 > n) fail(Errc::InvalidParams, "s1: must be in [1, n]");
  if (s2 < 1 || s2 > r) fail(Errc::InvalidParams, "s2: must be in [1, r]");
  if (!(delta > 0 && delta < 1))
    fail(Errc::InvalidParams, "delta: must be in (0, 1)");
  const double ln_count =
      std::log(2.0) + lchoose(n, s1) + lchoose(r, s2) - std::log(delta);
  return std::sqrt(2.0 * static_cast<double>(s1) * static_cast<double>(s2) *
                   ln_count);
}

std::unique_ptr<StreamingDetector> subset_scan_detector(
    long long n, const SubsetScanParams& params, std::uint64_t seed) {
  return std::make_unique<SubsetScanDetector>(n, params, seed);
}

std::unique_ptr<StreamingDetector> constant_detector(Arm answer) {
  return std::make_unique<ConstantDetector>(answer);
}

}  // namespace plantlab
