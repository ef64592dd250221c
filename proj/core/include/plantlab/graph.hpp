#pragma once

#include <cstdint>
#include <vector>

#include "plantlab/detectors.hpp"
#include "plantlab/stream.hpp"

namespace plantlab {

// Vertex i arrives knowing only its edges to vertices j <= i (j = i is a
// self-loop, taken from the diagonal bit).
struct VertexArrivalEvent {
  long long vertex = 0;
  std::vector<long long> neighbors;  // sorted, all <= vertex
};

// Reads a square binary stream as a vertex-arrival sequence: event i lists
// {j <= i : row i has bit j set}. Throws Error{ShapeMismatch} for non-square
// or real-valued sources.
std::vector<VertexArrivalEvent> vertex_arrival_adapter(StreamSource& source);

// Undirected graph with self-loops, adjacency kept as row bitsets.
class Graph {
 public:
  explicit Graph(long long n);

  long long size() const { return n_; }
  void add_edge(long long a, long long b);
  bool edge(long long a, long long b) const;
  long long degree(long long v) const;      // self-loop counts once
  long long edge_count() const;             // unordered pairs + self-loops

  // Edges inside the induced subgraph (self-loops included).
  long long induced_edges(const std::vector<long long>& vertices) const;

  const std::vector<std::uint64_t>& row(long long v) const {
    return adj_[static_cast<std::size_t>(v)];
  }

 private:
  long long n_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> adj_;
};

Graph graph_from_events(long long n, const std::vector<VertexArrivalEvent>& ev);

// Largest k' such that some S, R (each of size k', overlap allowed) have
// every u in S adjacent to every v in R. Subset-DP over common
// neighborhoods; n <= 24 or Error{TooLarge}.
long long max_biclique_exact(const Graph& g);

// Independent branch-and-bound implementation of the same quantity, used to
// cross-check max_biclique_exact. Same n <= 24 guard.
long long max_biclique_exact_alt(const Graph& g);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Exact max over all nonempty H with |H| <= beta of |E(H)| / |H|.
// Subset enumeration; n <= 20 or Error{TooLarge}.
Rational densest_at_most_beta_exact(const Graph& g, long long beta);

// Density estimate from `samples` uniform candidate subgraphs (size uniform
// in [2, beta]) plus, when enabled, deterministic top-degree prefixes of
// sizes {8, 16, 24, 32, 48, 64} ∩ [1, beta].
double densest_at_most_beta_sampled(const Graph& g, long long beta,
                                    long long samples, std::uint64_t seed,
                                    bool with_degree_prefixes = true);

// Planted-side witness: over all low/high vertex splits, packs up to beta/2
// smallest planted columns and beta/2 largest planted rows into one
// subgraph and measures its actual density; returns the best value found.
double density_witness(const Graph& g, const std::vector<long long>& S,
                       const std::vector<long long>& R, long long beta);

// Adapts a square binary stream to vertex arrival, computes the exact
// max-biclique size (small n), and answers Planted iff size >= tau.
Verdict reduction_to_max_biclique(StreamSource& source, double tau);

// Adapts to vertex arrival and answers Planted iff the sampled density
// estimate (including top-degree prefixes) reaches tau.
Verdict reduction_to_density(StreamSource& source, long long beta, double tau,
                             long long samples, std::uint64_t seed);

}  // namespace plantlab
