#include "plantlab/stream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plantlab/errors.hpp"

namespace plantlab {

namespace {

double lchoose(long long n, long long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1) -
         std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

std::uint64_t row_key(std::uint64_t seed, long long i) {
  return derive_key({seed, kTagRow, static_cast<std::uint64_t>(i)});
}

std::uint64_t row_block_key(std::uint64_t seed, long long i, long long b) {
  return derive_key({seed, kTagRow, static_cast<std::uint64_t>(i),
                     static_cast<std::uint64_t>(b)});
}

}  // namespace

const char* trunc_kind_name(TruncKind k) {
  switch (k) {
    case TruncKind::TypicalWeight: return "typical_weight";
    case TruncKind::GaussianExpSum: return "gaussian_exp_sum";
    case TruncKind::PcaBlockExpSum: return "pca_block_exp_sum";
  }
  return "unknown";
}

double TruncationSpec::weight_center() const {
  return static_cast<double>(t) * q;
}

double TruncationSpec::weight_halfwidth() const {
  const double lognm =
      std::log2(static_cast<double>(n) * static_cast<double>(m));
  return C * std::sqrt(std::max(0.0, static_cast<double>(t) * q * lognm));
}

long long TruncationSpec::window_lo() const {
  const double lo = weight_center() - weight_halfwidth();
  return std::max<long long>(0, static_cast<long long>(std::ceil(lo)));
}

long long TruncationSpec::window_hi() const {
  const double hi = weight_center() + weight_halfwidth();
  return std::min<long long>(t, static_cast<long long>(std::floor(hi)));
}

double TruncationSpec::gaussian_bound() const {
  const double td = static_cast<double>(t);
  const double dd = static_cast<double>(d);
  return td * std::exp(alpha * alpha / 2) +
         C1 * alpha * std::sqrt(td) * std::pow(dd, epsilon / 2) *
             std::log2(200.0 * static_cast<double>(n) * dd);
}

double TruncationSpec::pca_delta() const {
  const double blocks = static_cast<double>(t) / static_cast<double>(ell);
  const double dd = static_cast<double>(d);
  return C * std::pow(dd, epsilon / 2) *
         std::sqrt(blocks * std::log2(400.0 * static_cast<double>(n) * dd));
}

double TruncationSpec::pca_bound() const {
  if (alpha >= 1.0)
    fail(Errc::InvalidParams, "alpha: block-square bound needs alpha < 1");
  const double blocks = static_cast<double>(t) / static_cast<double>(ell);
  const double delta = delta_override ? *delta_override : pca_delta();
  return blocks / std::sqrt(1.0 - alpha) + delta;
}

TruncationSpec TruncationSpec::from(const ProblemSpec& spec, TruncKind kind) {
  TruncationSpec tr;
  tr.kind = kind;
  tr.n = std::max<long long>(1, spec.n);
  tr.m = std::max<long long>(1, spec.binary() ? spec.m : spec.n);
  tr.d = std::max<long long>(1, spec.d > 0 ? spec.d : spec.cols());
  tr.t = spec.t > 0 ? spec.t : spec.cols();
  tr.ell = std::max<long long>(1, spec.ell);
  tr.alpha = spec.alpha;
  tr.q = spec.q;
  return tr;
}

bool in_truncation_set(const TruncationSpec& trunc,
                       const std::vector<std::uint8_t>& block) {
  if (trunc.kind != TruncKind::TypicalWeight)
    fail(Errc::UnsupportedKind,
         std::string(trunc_kind_name(trunc.kind)) + " does not apply to bit blocks");
  if (static_cast<long long>(block.size()) != trunc.t)
    fail(Errc::DimensionMismatch, "block length does not match trunc.t");
  long long w = 0;
  for (std::uint8_t b : block) w += b;
  return w >= trunc.window_lo() && w <= trunc.window_hi();
}

bool in_truncation_set(const TruncationSpec& trunc,
                       const std::vector<double>& block) {
  if (static_cast<long long>(block.size()) != trunc.t)
    fail(Errc::DimensionMismatch, "block length does not match trunc.t");
  switch (trunc.kind) {
    case TruncKind::GaussianExpSum: {
      double s = 0;
      for (double x : block) s += std::exp(trunc.alpha * x);
      return s <= trunc.gaussian_bound();
    }
    case TruncKind::PcaBlockExpSum: {
      if (trunc.t % trunc.ell != 0)
        fail(Errc::InvalidParams, "ell: spike blocks must tile the width: ell | t");
      const double coef = trunc.alpha / (2 * (1 + trunc.alpha));
      double s = 0;
      for (long long off = 0; off < trunc.t; off += trunc.ell) {
        double y = 0;
        for (long long j = 0; j < trunc.ell; ++j)
          y += block[static_cast<std::size_t>(off + j)];
        s += std::exp(coef * y * y / static_cast<double>(trunc.ell));
      }
      return s <= trunc.pca_bound();
    }
    case TruncKind::TypicalWeight:
      fail(Errc::UnsupportedKind, "typical_weight does not apply to real blocks");
  }
  return false;
}

std::vector<std::uint8_t> sample_truncated_bits(
    const TruncationSpec& trunc, const std::vector<long long>& forced_ones,
    RowRng& rng) {
  if (trunc.kind != TruncKind::TypicalWeight)
    fail(Errc::UnsupportedKind, "bit sampler needs a typical_weight truncation");
  const long long t = trunc.t;
  const long long kf = static_cast<long long>(forced_ones.size());
  const long long wlo = trunc.window_lo();
  const long long whi = trunc.window_hi();
  if (std::max(wlo, kf) > whi)
    fail(Errc::EmptyTruncationWindow,
         "no block weight satisfies the window and the pinned coordinates");

  std::vector<std::uint8_t> out(static_cast<std::size_t>(t), 0);
  std::vector<std::uint8_t> pinned(static_cast<std::size_t>(t), 0);
  for (long long j : forced_ones) {
    if (j < 0 || j >= t) fail(Errc::InvalidParams, "forced_ones: index out of range");
    pinned[static_cast<std::size_t>(j)] = 1;
    out[static_cast<std::size_t>(j)] = 1;
  }
  std::vector<long long> free_pos;
  free_pos.reserve(static_cast<std::size_t>(t - kf));
  for (long long j = 0; j < t; ++j)
    if (!pinned[static_cast<std::size_t>(j)]) free_pos.push_back(j);

  if (trunc.law == TruncLaw::Uniform) {
    // Uniform over the window set: weight class w has C(t-kf, w-kf) members.
    const long long lo = std::max(wlo, kf);
    std::vector<double> lw;
    double lmax = -std::numeric_limits<double>::infinity();
    for (long long w = lo; w <= whi; ++w) {
      lw.push_back(lchoose(t - kf, w - kf));
      lmax = std::max(lmax, lw.back());
    }
    double total = 0;
    for (double& v : lw) {
      v = std::exp(v - lmax);
      total += v;
    }
    double u = rng.unit() * total;
    std::size_t idx = 0;
    while (idx + 1 < lw.size() && u > lw[idx]) {
      u -= lw[idx];
      ++idx;
    }
    const long long extra = lo + static_cast<long long>(idx) - kf;
    for (long long pos : rng.subset(static_cast<long long>(free_pos.size()), extra))
      out[static_cast<std::size_t>(free_pos[static_cast<std::size_t>(pos)])] = 1;
    return out;
  }

  // Conditional law: the product law given the window, by rejection.
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    long long w = kf;
    for (long long pos : free_pos) {
      const std::uint8_t bit = rng.unit() < trunc.q ? 1 : 0;
      out[static_cast<std::size_t>(pos)] = bit;
      w += bit;
    }
    if (w >= wlo && w <= whi) return out;
  }
  fail(Errc::RejectionBudgetExceeded,
       "typical-weight rejection sampler exhausted its attempt budget");
}

std::vector<double> sample_truncated_gaussian(const TruncationSpec& trunc,
                                              const std::vector<double>& mean,
                                              RowRng& rng) {
  if (trunc.kind != TruncKind::GaussianExpSum)
    fail(Errc::UnsupportedKind, "gaussian sampler needs a gaussian_exp_sum truncation");
  if (!mean.empty() && static_cast<long long>(mean.size()) != trunc.t)
    fail(Errc::DimensionMismatch, "mean length does not match trunc.t");
  std::vector<double> x(static_cast<std::size_t>(trunc.t));
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    rng.fill_normal(x.data(), x.size());
    if (!mean.empty())
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += mean[j];
    if (in_truncation_set(trunc, x)) return x;
  }
  fail(Errc::RejectionBudgetExceeded,
       "exp-sum rejection sampler exhausted its attempt budget");
}

std::vector<double> sample_truncated_pca(const TruncationSpec& trunc,
                                         long long s_off, RowRng& rng) {
  if (trunc.kind != TruncKind::PcaBlockExpSum)
    fail(Errc::UnsupportedKind, "pca sampler needs a pca_block_exp_sum truncation");
  if (trunc.t % trunc.ell != 0)
    fail(Errc::InvalidParams, "ell: spike blocks must tile the width: ell | t");
  if (s_off >= 0 && (s_off % trunc.ell != 0 || s_off + trunc.ell > trunc.t))
    fail(Errc::InvalidParams, "s_off: spike block must be aligned and inside [0, t)");
  std::vector<double> x(static_cast<std::size_t>(trunc.t));
  const double spread = (std::sqrt(1.0 + trunc.alpha) - 1.0) /
                        static_cast<double>(trunc.ell);
  for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
    rng.fill_normal(x.data(), x.size());
    if (s_off >= 0) {
      double y = 0;
      for (long long j = 0; j < trunc.ell; ++j)
        y += x[static_cast<std::size_t>(s_off + j)];
      for (long long j = 0; j < trunc.ell; ++j)
        x[static_cast<std::size_t>(s_off + j)] += spread * y;
    }
    if (in_truncation_set(trunc, x)) return x;
  }
  fail(Errc::RejectionBudgetExceeded,
       "block-square rejection sampler exhausted its attempt budget");
}

namespace {

// Shared plumbing for planted-row lookups.
std::vector<std::uint8_t> row_bitmap(const std::vector<long long>& rows,
                                     long long nrows) {
  std::vector<std::uint8_t> bm(static_cast<std::size_t>(nrows), 0);
  for (long long i : rows) bm[static_cast<std::size_t>(i)] = 1;
  return bm;
}

class BitMatrixStream final : public StreamSource {
 public:
  BitMatrixStream(const ProblemSpec& spec, std::uint64_t seed,
                  const PlantedInstance& inst)
      : StreamSource(spec, seed),
        planted_row_(row_bitmap(inst.R, spec.rows())),
        cols_(inst.S) {
    vals_.reserve(inst.S.size());
    for (std::size_t a = 0; a < inst.S.size(); ++a)
      vals_.push_back(inst.v.empty() ? 1 : (inst.v[a] != 0.0 ? 1 : 0));
  }

  void fill_row(long long i, Row& out) const override {
    out.index = i;
    out.binary = true;
    out.reals.clear();
    out.bits.assign(static_cast<std::size_t>(cols()), 0);
    RowRng rng(row_key(seed_, i));
    for (auto& b : out.bits) b = rng.unit() < spec_.q ? 1 : 0;
    if (planted_row_[static_cast<std::size_t>(i)]) {
      for (std::size_t a = 0; a < cols_.size(); ++a)
        out.bits[static_cast<std::size_t>(cols_[a])] = vals_[a];
    }
  }

 private:
  std::vector<std::uint8_t> planted_row_;
  std::vector<long long> cols_;
  std::vector<std::uint8_t> vals_;
};

class PartitionBitStream final : public StreamSource {
 public:
  PartitionBitStream(const ProblemSpec& spec, std::uint64_t seed,
                     const PlantedInstance& inst,
                     std::optional<TruncationSpec> trunc)
      : StreamSource(spec, seed),
        trunc_(std::move(trunc)),
        planted_row_(row_bitmap(inst.R, spec.rows())),
        block_(inst.r),
        blocks_(spec.d / spec.t) {
    for (long long c : inst.S) in_block_.push_back(c - block_ * spec.t);
    if (trunc_) {
      trunc_->t = spec.t;  // block-level membership
    }
  }

  void fill_row(long long i, Row& out) const override {
    const long long t = spec_.t;
    out.index = i;
    out.binary = true;
    out.reals.clear();
    out.bits.assign(static_cast<std::size_t>(cols()), 0);
    const bool planted = planted_row_[static_cast<std::size_t>(i)] != 0;
    for (long long b = 0; b < blocks_; ++b) {
      RowRng rng(row_block_key(seed_, i, b));
      const bool plant_here = planted && b == block_;
      if (trunc_) {
        const std::vector<long long> empty;
        auto blk = sample_truncated_bits(*trunc_, plant_here ? in_block_ : empty, rng);
        std::copy(blk.begin(), blk.end(),
                  out.bits.begin() + static_cast<std::ptrdiff_t>(b * t));
      } else {
        for (long long j = 0; j < t; ++j)
          out.bits[static_cast<std::size_t>(b * t + j)] = rng.unit() < spec_.q ? 1 : 0;
        if (plant_here)
          for (long long j : in_block_)
            out.bits[static_cast<std::size_t>(b * t + j)] = 1;
      }
    }
    // Filler columns beyond the last full block follow the null marginal.
    RowRng fill(row_block_key(seed_, i, blocks_));
    for (long long j = blocks_ * t; j < cols(); ++j)
      out.bits[static_cast<std::size_t>(j)] = fill.unit() < spec_.q ? 1 : 0;
  }

 private:
  std::optional<TruncationSpec> trunc_;
  std::vector<std::uint8_t> planted_row_;
  long long block_;
  long long blocks_;
  std::vector<long long> in_block_;
};

class GaussianMeanStream final : public StreamSource {
 public:
  GaussianMeanStream(const ProblemSpec& spec, std::uint64_t seed,
                     const PlantedInstance& inst)
      : StreamSource(spec, seed),
        planted_row_(row_bitmap(inst.R, spec.rows())),
        cols_(inst.S),
        vals_(inst.v) {}

  void fill_row(long long i, Row& out) const override {
    out.index = i;
    out.binary = false;
    out.bits.clear();
    out.reals.resize(static_cast<std::size_t>(cols()));
    RowRng rng(row_key(seed_, i));
    rng.fill_normal(out.reals.data(), out.reals.size());
    if (planted_row_[static_cast<std::size_t>(i)]) {
      for (std::size_t a = 0; a < cols_.size(); ++a)
        out.reals[static_cast<std::size_t>(cols_[a])] += vals_[a];
    }
  }

 private:
  std::vector<std::uint8_t> planted_row_;
  std::vector<long long> cols_;
  std::vector<double> vals_;
};

class PcaStream final : public StreamSource {
 public:
  PcaStream(const ProblemSpec& spec, std::uint64_t seed,
            const PlantedInstance& inst)
      : StreamSource(spec, seed), planted_(inst.arm == Arm::Planted) {
    if (planted_) {
      s_off_ = inst.S.front();
      spread_ = (std::sqrt(1.0 + spec.alpha) - 1.0) /
                static_cast<double>(spec.ell);
    }
  }

  void fill_row(long long i, Row& out) const override {
    out.index = i;
    out.binary = false;
    out.bits.clear();
    out.reals.resize(static_cast<std::size_t>(cols()));
    RowRng rng(row_key(seed_, i));
    rng.fill_normal(out.reals.data(), out.reals.size());
    if (planted_) {
      double y = 0;
      for (long long j = 0; j < spec_.ell; ++j)
        y += out.reals[static_cast<std::size_t>(s_off_ + j)];
      for (long long j = 0; j < spec_.ell; ++j)
        out.reals[static_cast<std::size_t>(s_off_ + j)] += spread_ * y;
    }
  }

 private:
  bool planted_;
  long long s_off_ = 0;
  double spread_ = 0;
};

class ZeroColumnsStream final : public StreamSource {
 public:
  ZeroColumnsStream(std::unique_ptr<StreamSource> base,
                    std::vector<long long> zero_cols,
                    std::vector<std::uint8_t> rows)
      : StreamSource(base->spec(), base->seed()),
        base_(std::move(base)),
        zero_cols_(std::move(zero_cols)),
        planted_row_(std::move(rows)) {}

  void fill_row(long long i, Row& out) const override {
    base_->fill_row(i, out);
    if (planted_row_[static_cast<std::size_t>(i)])
      for (long long j : zero_cols_) out.bits[static_cast<std::size_t>(j)] = 0;
  }

 private:
  std::unique_ptr<StreamSource> base_;
  std::vector<long long> zero_cols_;
  std::vector<std::uint8_t> planted_row_;
};

class PermuteStream final : public StreamSource {
 public:
  PermuteStream(std::unique_ptr<StreamSource> base, std::vector<long long> perm)
      : StreamSource(base->spec(), base->seed()),
        base_(std::move(base)),
        perm_(std::move(perm)) {}

  void fill_row(long long i, Row& out) const override {
    base_->fill_row(i, scratch_);
    out.index = scratch_.index;
    out.binary = scratch_.binary;
    if (out.binary) {
      out.reals.clear();
      out.bits.resize(scratch_.bits.size());
      for (std::size_t j = 0; j < scratch_.bits.size(); ++j)
        out.bits[static_cast<std::size_t>(perm_[j])] = scratch_.bits[j];
    } else {
      out.bits.clear();
      out.reals.resize(scratch_.reals.size());
      for (std::size_t j = 0; j < scratch_.reals.size(); ++j)
        out.reals[static_cast<std::size_t>(perm_[j])] = scratch_.reals[j];
    }
  }

 private:
  std::unique_ptr<StreamSource> base_;
  std::vector<long long> perm_;
  mutable Row scratch_;
};

}  // namespace

StreamHandle make_stream(const ProblemSpec& spec, Arm arm, std::uint64_t seed,
                         const std::optional<TruncationSpec>& trunc) {
  spec.validate();
  if (trunc && spec.kind != ProblemKind::PartitionBiclique)
    fail(Errc::InvalidParams,
         "trunc: truncated streams are supported for partition_biclique only");

  PlantedInstance inst;
  inst.arm = arm;

  RowRng ir(derive_key({seed, kTagInstance}));
  const long long nrows = spec.rows();
  const long long ncols = spec.cols();

  auto exact_rows = [&](long long count) { return ir.subset(nrows, count); };
  auto iid_rows = [&](double p) {
    std::vector<long long> rows;
    for (long long i = 0; i < nrows; ++i) {
      RowRng coin(derive_key({seed, kTagArm, static_cast<std::uint64_t>(i)}));
      if (coin.unit() < p) rows.push_back(i);
    }
    return rows;
  };
  auto planted_rows = [&](long long count, double p) {
    return spec.row_mode == RowMode::ExactK ? exact_rows(count) : iid_rows(p);
  };

  if (arm == Arm::Planted) {
    switch (spec.kind) {
      case ProblemKind::Biclique:
      case ProblemKind::DistributionalBiclique:
        inst.S = ir.subset(ncols, spec.k);
        inst.R = planted_rows(spec.k, static_cast<double>(spec.k) /
                                          static_cast<double>(nrows));
        break;
      case ProblemKind::PatternBiclique: {
        inst.S = ir.subset(ncols, spec.k);
        inst.v.reserve(static_cast<std::size_t>(spec.k));
        for (long long a = 0; a < spec.k; ++a)
          inst.v.push_back(ir.unit() < 0.5 ? 1.0 : 0.0);
        inst.R = planted_rows(spec.k, static_cast<double>(spec.k) /
                                          static_cast<double>(nrows));
        break;
      }
      case ProblemKind::SemiRandomBiclique: {
        const long long k2 = spec.ell > 0 ? spec.ell : spec.k;
        inst.S = ir.subset(ncols, k2);
        inst.R = planted_rows(spec.k, static_cast<double>(spec.k) /
                                          static_cast<double>(nrows));
        break;
      }
      case ProblemKind::PartitionBiclique: {
        const long long blocks = spec.d / spec.t;
        inst.r = static_cast<long long>(ir.below(static_cast<std::uint64_t>(blocks)));
        for (long long j : ir.subset(spec.t, spec.k))
          inst.S.push_back(inst.r * spec.t + j);
        inst.R = planted_rows(spec.k, static_cast<double>(spec.k) /
                                          static_cast<double>(nrows));
        break;
      }
      case ProblemKind::SparseMean:
        inst.S = ir.subset(spec.d, spec.ell);
        inst.v.assign(inst.S.size(), spec.alpha);
        inst.R = planted_rows(spec.k, spec.q);
        break;
      case ProblemKind::PartitionSparseMean: {
        const long long blocks = spec.d / spec.t;
        inst.r = static_cast<long long>(ir.below(static_cast<std::uint64_t>(blocks)));
        const double rate = static_cast<double>(spec.ell) /
                            static_cast<double>(spec.t);
        bool ok = false;
        for (int attempt = 0; attempt < kRejectionBudget && !ok; ++attempt) {
          inst.S.clear();
          for (long long j = 0; j < spec.t; ++j)
            if (ir.unit() < rate) inst.S.push_back(inst.r * spec.t + j);
          ok = static_cast<long long>(inst.S.size()) <= 100 * spec.ell;
        }
        if (!ok)
          fail(Errc::RejectionBudgetExceeded,
               "mean-vector sparsity cap was never met");
        inst.v.assign(inst.S.size(), spec.alpha);
        inst.R = planted_rows(spec.k, spec.q);
        break;
      }
      case ProblemKind::SparsePca:
        inst.S = ir.subset(spec.d, spec.ell);
        break;
      case ProblemKind::BlockSparsePca: {
        const long long blocks = spec.d / spec.ell;
        const long long b =
            static_cast<long long>(ir.below(static_cast<std::uint64_t>(blocks)));
        for (long long j = 0; j < spec.ell; ++j) inst.S.push_back(b * spec.ell + j);
        break;
      }
      case ProblemKind::PartitionPca: {
        const long long blocks = spec.d / spec.t;
        inst.r = static_cast<long long>(ir.below(static_cast<std::uint64_t>(blocks)));
        const long long sub =
            static_cast<long long>(ir.below(static_cast<std::uint64_t>(spec.t / spec.ell)));
        for (long long j = 0; j < spec.ell; ++j)
          inst.S.push_back(inst.r * spec.t + sub * spec.ell + j);
        break;
      }
      case ProblemKind::GeneralDp: {
        const long long blocks = spec.d / spec.t;
        inst.r = static_cast<long long>(ir.below(static_cast<std::uint64_t>(blocks)));
        for (long long j : ir.subset(spec.t, spec.ell))
          inst.S.push_back(inst.r * spec.t + j);
        inst.v.assign(inst.S.size(), spec.alpha);
        inst.R = planted_rows(spec.k, spec.q);
        break;
      }
    }
  }

  StreamHandle handle;
  handle.instance = inst;
  switch (spec.kind) {
    case ProblemKind::Biclique:
    case ProblemKind::DistributionalBiclique:
    case ProblemKind::PatternBiclique:
    case ProblemKind::SemiRandomBiclique:
      handle.source = std::make_unique<BitMatrixStream>(spec, seed, inst);
      break;
    case ProblemKind::PartitionBiclique:
      handle.source =
          std::make_unique<PartitionBitStream>(spec, seed, inst, trunc);
      break;
    case ProblemKind::SparseMean:
    case ProblemKind::PartitionSparseMean:
    case ProblemKind::GeneralDp:
      handle.source = std::make_unique<GaussianMeanStream>(spec, seed, inst);
      break;
    case ProblemKind::SparsePca:
    case ProblemKind::BlockSparsePca:
    case ProblemKind::PartitionPca:
      handle.source = std::make_unique<PcaStream>(spec, seed, inst);
      break;
  }
  if (!handle.source) fail(Errc::UnsupportedKind, "unhandled problem kind");
  return handle;
}

std::unique_ptr<StreamSource> apply_monotone_adversary(
    std::unique_ptr<StreamSource> source, const PlantedInstance& instance,
    long long k_prime) {
  if (!source->binary())
    fail(Errc::NotApplicable, "monotone adversary applies to binary streams only");
  if (instance.arm == Arm::Null) return source;  // nothing to delete

  const long long k = static_cast<long long>(instance.S.size());
  if (k_prime < 0 || k_prime > k)
    fail(Errc::InvalidParams, "k_prime: must be in [0, |S|]");
  const long long del = k - k_prime;
  if (del == 0) return source;

  std::vector<std::uint8_t> in_s(static_cast<std::size_t>(source->cols()), 0);
  for (long long j : instance.S) in_s[static_cast<std::size_t>(j)] = 1;
  std::vector<long long> candidates;
  for (long long j = 0; j < source->cols(); ++j)
    if (!in_s[static_cast<std::size_t>(j)]) candidates.push_back(j);
  if (del > static_cast<long long>(candidates.size()))
    fail(Errc::InvalidParams, "k_prime: not enough non-planted columns to delete");

  RowRng ar(derive_key({source->seed(), kTagAdversary}));
  std::vector<long long> zero_cols;
  for (long long idx : ar.subset(static_cast<long long>(candidates.size()), del))
    zero_cols.push_back(candidates[static_cast<std::size_t>(idx)]);

  auto rows = row_bitmap(instance.R, source->rows());
  return std::make_unique<ZeroColumnsStream>(std::move(source),
                                             std::move(zero_cols),
                                             std::move(rows));
}

std::vector<long long> drawn_permutation(long long ncols, std::uint64_t seed) {
  std::vector<long long> perm(static_cast<std::size_t>(ncols));
  std::iota(perm.begin(), perm.end(), 0);
  RowRng rng(derive_key({seed, kTagPermute}));
  for (long long j = ncols - 1; j > 0; --j) {
    const long long r =
        static_cast<long long>(rng.below(static_cast<std::uint64_t>(j) + 1));
    std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(r)]);
  }
  return perm;
}

std::unique_ptr<StreamSource> permute_with(std::unique_ptr<StreamSource> source,
                                           std::vector<long long> perm) {
  if (static_cast<long long>(perm.size()) != source->cols())
    fail(Errc::DimensionMismatch, "perm length does not match column count");
  return std::make_unique<PermuteStream>(std::move(source), std::move(perm));
}

std::unique_ptr<StreamSource> consistent_permute(
    std::unique_ptr<StreamSource> source, std::uint64_t seed,
    bool debug_identity) {
  std::vector<long long> perm;
  if (debug_identity) {
    perm.resize(static_cast<std::size_t>(source->cols()));
    std::iota(perm.begin(), perm.end(), 0);
  } else {
    perm = drawn_permutation(source->cols(), seed);
  }
  return permute_with(std::move(source), std::move(perm));
}

}  // namespace plantlab
