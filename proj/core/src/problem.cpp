#include "plantlab/problem.hpp"

#include <algorithm>
#include <utility>

#include "plantlab/errors.hpp"

namespace plantlab {

namespace {

struct KindRow {
  ProblemKind kind;
  const char* name;
};

constexpr KindRow kKinds[] = {
    {ProblemKind::Biclique, "biclique"},
    {ProblemKind::DistributionalBiclique, "distributional_biclique"},
    {ProblemKind::PartitionBiclique, "partition_biclique"},
    {ProblemKind::PatternBiclique, "pattern_biclique"},
    {ProblemKind::SemiRandomBiclique, "semi_random_biclique"},
    {ProblemKind::SparseMean, "sparse_mean"},
    {ProblemKind::PartitionSparseMean, "partition_sparse_mean"},
    {ProblemKind::SparsePca, "sparse_pca"},
    {ProblemKind::BlockSparsePca, "block_sparse_pca"},
    {ProblemKind::PartitionPca, "partition_pca"},
    {ProblemKind::GeneralDp, "general_dp"},
};

bool is_binary_kind(ProblemKind k) {
  switch (k) {
    case ProblemKind::Biclique:
    case ProblemKind::DistributionalBiclique:
    case ProblemKind::PartitionBiclique:
    case ProblemKind::PatternBiclique:
    case ProblemKind::SemiRandomBiclique:
      return true;
    default:
      return false;
  }
}

[[noreturn]] void bad_field(const char* field, const std::string& why) {
  fail(Errc::InvalidParams, std::string(field) + ": " + why);
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) bad_field(field, why);
}

}  // namespace

const char* problem_kind_name(ProblemKind k) {
  for (const auto& row : kKinds)
    if (row.kind == k) return row.name;
  return "unknown";
}

const char* arm_name(Arm a) { return a == Arm::Null ? "null" : "planted"; }

bool parse_problem_kind(const std::string& s, ProblemKind& out) {
  for (const auto& row : kKinds) {
    if (s == row.name) {
      out = row.kind;
      return true;
    }
  }
  return false;
}

long long ProblemSpec::rows() const {
  return binary() ? m : n;
}

long long ProblemSpec::cols() const {
  switch (kind) {
    case ProblemKind::Biclique:
    case ProblemKind::DistributionalBiclique:
    case ProblemKind::PatternBiclique:
    case ProblemKind::SemiRandomBiclique:
      return n;
    default:
      return d;  // partitioned binary and all real kinds
  }
}

bool ProblemSpec::binary() const { return is_binary_kind(kind); }

void ProblemSpec::validate() const {
  require(rows() >= 1, binary() ? "m" : "n", "need at least one row");
  require(cols() >= 1, cols() == n ? "n" : "d", "need at least one column");

  if (binary()) {
    require(q > 0.0 && q <= 0.5, "q", "Bernoulli probability must be in (0, 1/2]");
  } else {
    require(q > 0.0 && q < 1.0, "q", "plant probability must be in (0, 1)");
    require(alpha > 0.0 && alpha <= 1.0, "alpha", "signal strength must be in (0, 1]");
  }

  switch (kind) {
    case ProblemKind::Biclique:
    case ProblemKind::DistributionalBiclique:
    case ProblemKind::PatternBiclique:
      require(k >= 1 && k <= std::min(m, n), "k",
              "planted size must be in [1, min(m, n)]");
      break;
    case ProblemKind::SemiRandomBiclique: {
      require(m == n, "m", "semi-random streams are square: set m = n");
      require(k >= 1 && k <= n, "k", "planted row count must be in [1, n]");
      const long long k2 = ell > 0 ? ell : k;
      require(k2 <= n, "ell", "planted column count must be at most n");
      break;
    }
    case ProblemKind::PartitionBiclique:
      require(t >= 1 && t <= d, "t", "block width must be in [1, d]");
      require(k >= 1 && k <= t, "k", "planted columns live in one block: k <= t");
      require(k <= m, "k", "planted row count must be at most m");
      break;
    case ProblemKind::SparseMean:
      require(ell >= 1 && ell <= d, "ell", "sparsity must be in [1, d]");
      if (row_mode == RowMode::ExactK)
        require(k >= 1 && k <= n, "k", "planted row count must be in [1, n]");
      break;
    case ProblemKind::PartitionSparseMean:
      require(t >= 1 && t <= d, "t", "block width must be in [1, d]");
      require(ell >= 1 && ell <= t, "ell", "mean sparsity rate needs ell <= t");
      if (row_mode == RowMode::ExactK)
        require(k >= 1 && k <= n, "k", "planted row count must be in [1, n]");
      break;
    case ProblemKind::SparsePca:
      require(ell >= 1 && ell <= d, "ell", "spike sparsity must be in [1, d]");
      break;
    case ProblemKind::BlockSparsePca:
      require(ell >= 1 && ell <= d, "ell", "block width must be in [1, d]");
      break;
    case ProblemKind::PartitionPca:
      require(t >= 1 && t <= d, "t", "block width must be in [1, d]");
      require(ell >= 1 && ell <= t, "ell", "spike block must fit: ell <= t");
      require(t % ell == 0, "ell", "spike blocks must tile the partition: ell | t");
      break;
    case ProblemKind::GeneralDp:
      require(t >= 1 && t <= d, "t", "block width must be in [1, d]");
      require(ell >= 1 && ell <= t, "ell", "planted subset lives in one block: ell <= t");
      if (row_mode == RowMode::ExactK)
        require(k >= 1 && k <= n, "k", "planted row count must be in [1, n]");
      break;
  }
}

std::pair<ProblemSpec, PaddingInfo> pad_dimension(const ProblemSpec& spec) {
  const long long width =
      (spec.kind == ProblemKind::BlockSparsePca) ? spec.ell : spec.t;
  if (width < 1 || width > spec.d)
    fail(Errc::InvalidParams, "t: block width must be in [1, d] to pad");
  PaddingInfo info;
  info.d_active = width * (spec.d / width);
  info.filler = spec.d - info.d_active;
  return {spec, info};
}

}  // namespace plantlab
