#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plantlab {

// Which distinguishing problem a stream is drawn from.
//
// Binary matrix kinds (rows are adjacency bit-vectors):
//   Biclique              m x n Bernoulli(q) matrix; planted arm hides an
//                         all-ones k x k submatrix at random rows R / cols S.
//   DistributionalBiclique  same, but each row is planted independently
//                         (row_mode defaults to IidQ with probability k/m).
//   PartitionBiclique     m x d matrix, columns split into d/t blocks; the
//                         planted arm fills a k-subset S of one block r with
//                         ones in exactly k rows.
//   PatternBiclique       m x n; planted rows carry a fixed random bit
//                         pattern v on S instead of all-ones.
//   SemiRandomBiclique    n x n (set m = n), q = 1/2; the planted biclique
//                         has k rows and `ell` columns; a monotone adversary
//                         may later delete non-planted edges.
//
// Real-valued kinds (rows are length-d Gaussian vectors):
//   SparseMean            null N(0, I_d); planted rows get mean alpha on an
//                         ell-subset S of coordinates.
//   PartitionSparseMean   planted mean lives inside one width-t block r with
//                         iid alpha entries of rate ell/t (resampled until at
//                         most 100*ell nonzeros).
//   SparsePCA             every row N(0, I + alpha v v^T), v = 1_S/sqrt(ell),
//                         S a uniform ell-subset.
//   BlockSparsePCA        as SparsePCA with S a uniform aligned ell-block.
//   PartitionPCA          S is a uniform aligned ell-block inside a uniform
//                         width-t block r (ell | t, t | d).
//   GeneralDP             k planted rows get mean alpha on a uniform
//                         ell-subset of one width-t block r.
enum class ProblemKind {
  Biclique,
  DistributionalBiclique,
  PartitionBiclique,
  PatternBiclique,
  SemiRandomBiclique,
  SparseMean,
  PartitionSparseMean,
  SparsePca,
  BlockSparsePca,
  PartitionPca,
  GeneralDp,
};

// How planted rows are selected: exactly k uniform rows, or each row
// independently with the kind's plant probability (k/rows for binary kinds,
// q for Gaussian-mean kinds). PCA kinds plant every row and ignore this.
enum class RowMode { ExactK, IidQ };

enum class Arm { Null, Planted };

const char* problem_kind_name(ProblemKind k);
const char* arm_name(Arm a);
bool parse_problem_kind(const std::string& s, ProblemKind& out);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Biclique;
  long long n = 0;     // right-vertex count (binary) or sample count (real)
  long long m = 0;     // row count for binary matrix kinds
  long long d = 0;     // column/dimension count for partition & real kinds
  long long t = 0;     // partition block width
  long long k = 0;     // planted row count (and column count for Biclique)
  long long ell = 0;   // sparsity / planted column count where distinct from k
  double q = 0.5;      // Bernoulli edge probability or plant probability
  double alpha = 0.5;  // signal strength
  long long beta = 0;  // subgraph size cap (density reduction only)
  RowMode row_mode = RowMode::ExactK;

  long long rows() const;  // number of stream rows
  long long cols() const;  // length of each row
  bool binary() const;     // bit rows vs real rows

  // Throws Error{InvalidParams} naming the violated field.
  void validate() const;
};

// Hidden structure of one planted draw. Index sets use global column/row
// indices; `v` carries pattern bits (0/1 values) or the real mean vector
// restricted to S (aligned with S's order); `r` is the chosen partition
// block, -1 when not applicable.
struct PlantedInstance {
  Arm arm = Arm::Null;
  std::vector<long long> S;  // planted columns
  std::vector<long long> R;  // planted rows
  std::vector<double> v;     // pattern bits or mean values on S
  long long r = -1;          // partition block index
};

struct PaddingInfo {
  long long d_active = 0;  // t * floor(d / t)
  long long filler = 0;    // d - d_active, drawn from the null marginal
};

// Restricts the planted structure to the first t*floor(d/t) columns and
// marks the remainder as filler. Throws Error{InvalidParams} if t > d.
std::pair<ProblemSpec, PaddingInfo> pad_dimension(const ProblemSpec& spec);

}  // namespace plantlab
