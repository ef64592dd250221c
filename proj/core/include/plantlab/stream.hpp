#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "plantlab/problem.hpp"
#include "plantlab/rng.hpp"

namespace plantlab {

// High-probability regions used to truncate base laws so that the
// planted-to-null likelihood ratio becomes pointwise bounded.
enum class TruncKind {
  TypicalWeight,    // bit blocks whose total weight lies in a central window
  GaussianExpSum,   // real blocks with bounded sum of exp(alpha * x_j)
  PcaBlockExpSum,   // real blocks with bounded sum of per-block exp statistics
};

// Two readings of the truncated binary law: the base product law conditioned
// on the window, or the uniform distribution over the window set. They
// coincide at q = 1/2 and differ otherwise; both are supported everywhere.
enum class TruncLaw { Conditional, Uniform };

const char* trunc_kind_name(TruncKind k);

struct TruncationSpec {
  TruncKind kind = TruncKind::TypicalWeight;
  TruncLaw law = TruncLaw::Conditional;
  double C = 20.0;        // window / slack constant
  double C1 = 20.0;       // inner constant of the Gaussian exp-sum bound
  double epsilon = 0.01;  // dimension exponent in the real-valued bounds
  // Context parameters; logs are base 2 throughout.
  long long n = 1;
  long long m = 1;
  long long d = 1;
  long long t = 1;
  long long ell = 1;
  double alpha = 0.5;
  double q = 0.5;
  std::optional<double> delta_override;  // replaces the computed PCA slack

  // TypicalWeight window [lo, hi] on block weight: t*q +- C*sqrt(t*q*log2(n*m)),
  // intersected with [0, t]. lo > hi means the window is empty.
  double weight_center() const;
  double weight_halfwidth() const;
  long long window_lo() const;
  long long window_hi() const;

  // GaussianExpSum: sum_j exp(alpha x_j) <= t e^{alpha^2/2}
  //                 + C1 alpha sqrt(t) d^{eps/2} log2(200 n d).
  double gaussian_bound() const;

  // PcaBlockExpSum: sum over aligned ell-blocks R of
  //   exp(alpha/(2(1+alpha)) * (sum_{j in R} x_j)^2 / ell)
  // <= (t/ell)(1-alpha)^{-1/2} + delta,
  //   delta = C d^{eps/2} sqrt((t/ell) log2(400 n d)).
  double pca_delta() const;
  double pca_bound() const;

  // Derives context from a problem spec (t defaults to the full row width
  // for kinds without a partition).
  static TruncationSpec from(const ProblemSpec& spec, TruncKind kind);
};

// Membership tests for a single width-t block. Throws
// Error{DimensionMismatch} when the block length differs from trunc.t.
bool in_truncation_set(const TruncationSpec& trunc,
                       const std::vector<std::uint8_t>& block);
bool in_truncation_set(const TruncationSpec& trunc,
                       const std::vector<double>& block);

// Rejection budget for the truncated samplers: exceeding it throws
// Error{RejectionBudgetExceeded} instead of silently falling back.
inline constexpr int kRejectionBudget = 10000;

// Ber(q)^t with the coordinates in `forced_ones` pinned to 1, conditioned on
// the weight window (law Conditional, by rejection), or uniform over the
// window set with the same pins (law Uniform, sampled directly).
std::vector<std::uint8_t> sample_truncated_bits(
    const TruncationSpec& trunc, const std::vector<long long>& forced_ones,
    RowRng& rng);

// N(mean, I_t) conditioned on the exp-sum set; empty mean = origin.
std::vector<double> sample_truncated_gaussian(const TruncationSpec& trunc,
                                              const std::vector<double>& mean,
                                              RowRng& rng);

// N(0, I_t + (alpha/ell) 1_S 1_S^T) with S = [s_off, s_off + ell),
// conditioned on the block-square set; s_off < 0 means the null law.
std::vector<double> sample_truncated_pca(const TruncationSpec& trunc,
                                         long long s_off, RowRng& rng);

struct Row {
  long long index = 0;
  bool binary = true;
  std::vector<std::uint8_t> bits;
  std::vector<double> reals;

  long long width() const {
    return static_cast<long long>(binary ? bits.size() : reals.size());
  }
};

// A rewindable, seeded source of rows. Row contents are a pure function of
// (seed, row index), so replay and multi-pass consumption are exact and
// parallel row generation is order-independent.
class StreamSource {
 public:
  virtual ~StreamSource() = default;

  const ProblemSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  long long rows() const { return spec_.rows(); }
  long long cols() const { return spec_.cols(); }
  bool binary() const { return spec_.binary(); }

  virtual void fill_row(long long i, Row& out) const = 0;

  // Sequential cursor over the same rows.
  bool next(Row& out) {
    if (cursor_ >= rows()) return false;
    fill_row(cursor_++, out);
    return true;
  }
  void rewind() { cursor_ = 0; }

 protected:
  StreamSource(const ProblemSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed) {}

  ProblemSpec spec_;
  std::uint64_t seed_;
  long long cursor_ = 0;
};

struct StreamHandle {
  std::unique_ptr<StreamSource> source;
  PlantedInstance instance;
};

// Draws the hidden structure (Planted arm) and returns the row source.
// `trunc` restricts block laws to the truncation set and is currently
// supported for PartitionBiclique only.
StreamHandle make_stream(const ProblemSpec& spec, Arm arm, std::uint64_t seed,
                         const std::optional<TruncationSpec>& trunc = {});

// Monotone adversary: draws one uniform set I of k - k_prime non-planted
// columns and zeroes them in every planted row. Null-arm sources pass
// through unchanged; non-binary kinds throw Error{NotApplicable}.
std::unique_ptr<StreamSource> apply_monotone_adversary(
    std::unique_ptr<StreamSource> source, const PlantedInstance& instance,
    long long k_prime);

// Applies one column permutation (drawn from `seed`) to every row.
// `debug_identity` forces the identity permutation.
std::unique_ptr<StreamSource> consistent_permute(
    std::unique_ptr<StreamSource> source, std::uint64_t seed,
    bool debug_identity = false);

// The permutation consistent_permute(seed) would draw for `ncols` columns;
// entry j is the destination index of source column j.
std::vector<long long> drawn_permutation(long long ncols, std::uint64_t seed);

// Applies an explicit permutation (destination indices) to every row.
std::unique_ptr<StreamSource> permute_with(std::unique_ptr<StreamSource> source,
                                           std::vector<long long> perm);

}  // namespace plantlab
