#include "plantlab/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <numeric>

#include "plantlab/errors.hpp"
#include "plantlab/rng.hpp"

namespace plantlab {

namespace {

int pc(std::uint32_t m) { return std::popcount(m); }

std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
  const long long n = g.size();
  std::vector<std::uint32_t> nbr(static_cast<std::size_t>(n), 0);
  for (long long v = 0; v < n; ++v)
    for (long long u = 0; u < n; ++u)
      if (g.edge(v, u)) nbr[static_cast<std::size_t>(v)] |= (1u << u);
  return nbr;
}

}  // namespace

std::vector<VertexArrivalEvent> vertex_arrival_adapter(StreamSource& source) {
  if (!source.binary())
    fail(Errc::ShapeMismatch, "vertex arrival needs a binary stream");
  if (source.rows() != source.cols())
    fail(Errc::ShapeMismatch, "vertex arrival needs a square stream");
  const long long n = source.rows();
  std::vector<VertexArrivalEvent> events(static_cast<std::size_t>(n));
  Row row;
  for (long long i = 0; i < n; ++i) {
    source.fill_row(i, row);
    auto& ev = events[static_cast<std::size_t>(i)];
    ev.vertex = i;
    ev.neighbors.clear();
    for (long long j = 0; j <= i; ++j)
      if (row.bits[static_cast<std::size_t>(j)]) ev.neighbors.push_back(j);
  }
  return events;
}

Graph::Graph(long long n) : n_(n) {
  if (n < 1) fail(Errc::InvalidParams, "n: vertex count must be positive");
  words_ = static_cast<std::size_t>((n + 63) / 64);
  adj_.assign(static_cast<std::size_t>(n),
              std::vector<std::uint64_t>(words_, 0));
}

void Graph::add_edge(long long a, long long b) {
  if (a < 0 || a >= n_ || b < 0 || b >= n_)
    fail(Errc::InvalidParams, "edge endpoints must be in [0, n)");
  adj_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b >> 6)] |=
      std::uint64_t{1} << (b & 63);
  adj_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a >> 6)] |=
      std::uint64_t{1} << (a & 63);
}

bool Graph::edge(long long a, long long b) const {
  if (a < 0 || a >= n_ || b < 0 || b >= n_)
    fail(Errc::InvalidParams, "edge endpoints must be in [0, n)");
  return (adj_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b >> 6)] >>
          (b & 63)) &
         1u;
}

long long Graph::degree(long long v) const {
  long long deg = 0;
  for (std::uint64_t w : adj_[static_cast<std::size_t>(v)])
    deg += std::popcount(w);
  return deg;
}

long long Graph::edge_count() const {
  long long total = 0, loops = 0;
  for (long long v = 0; v < n_; ++v) {
    total += degree(v);
    loops += edge(v, v) ? 1 : 0;
  }
  return (total + loops) / 2;
}

long long Graph::induced_edges(const std::vector<long long>& vertices) const {
  std::vector<std::uint64_t> mask(words_, 0);
  for (long long v : vertices) {
    if (v < 0 || v >= n_)
      fail(Errc::InvalidParams, "vertex index must be in [0, n)");
    mask[static_cast<std::size_t>(v >> 6)] |= std::uint64_t{1} << (v & 63);
  }
  long long total = 0, loops = 0;
  for (long long v : vertices) {
    const auto& row = adj_[static_cast<std::size_t>(v)];
    for (std::size_t w = 0; w < words_; ++w)
      total += std::popcount(row[w] & mask[w]);
    loops += edge(v, v) ? 1 : 0;
  }
  return (total + loops) / 2;
}

Graph graph_from_events(long long n, const std::vector<VertexArrivalEvent>& ev) {
  Graph g(n);
  for (const auto& e : ev)
    for (long long nb : e.neighbors) {
      if (nb > e.vertex)
        fail(Errc::InvalidParams, "arrival event lists a future neighbor");
      g.add_edge(e.vertex, nb);
    }
  return g;
}

long long max_biclique_exact(const Graph& g) {
  const long long n = g.size();
  if (n > 24)
    fail(Errc::TooLarge, "subset DP over 2^n sets needs n <= 24");
  const auto nbr = neighbor_masks(g);
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  std::vector<std::uint32_t> common(std::size_t{1} << n);
  common[0] = full;
  long long best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::uint32_t low = mask & (~mask + 1);
    const int idx = std::countr_zero(mask);
    const std::uint32_t c = common[mask ^ low] & nbr[static_cast<std::size_t>(idx)];
    common[mask] = c;
    best = std::max<long long>(best, std::min(pc(mask), pc(c)));
  }
  return best;
}

namespace {

void biclique_dfs(const std::vector<std::uint32_t>& nbr, long long n,
                  long long v, std::uint32_t s_mask, std::uint32_t common,
                  long long& best) {
  best = std::max<long long>(best, std::min(pc(s_mask), pc(common)));
  if (v == n) return;
  const long long potential =
      std::min<long long>(pc(s_mask) + (n - v), pc(common));
  if (potential <= best) return;
  biclique_dfs(nbr, n, v + 1, s_mask | (1u << v),
               common & nbr[static_cast<std::size_t>(v)], best);
  biclique_dfs(nbr, n, v + 1, s_mask, common, best);
}

}  // namespace

long long max_biclique_exact_alt(const Graph& g) {
  const long long n = g.size();
  if (n > 24)
    fail(Errc::TooLarge, "branch and bound mirror capped at n <= 24");
  const auto nbr = neighbor_masks(g);
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  long long best = 0;
  biclique_dfs(nbr, n, 0, 0, full, best);
  return best;
}

Rational densest_at_most_beta_exact(const Graph& g, long long beta) {
  const long long n = g.size();
  if (n > 20)
    fail(Errc::TooLarge, "subset enumeration of densities needs n <= 20");
  if (beta < 1) fail(Errc::InvalidParams, "beta: size cap must be positive");
  const auto nbr = neighbor_masks(g);
  std::vector<std::uint16_t> edges(std::size_t{1} << n, 0);
  Rational best{-1, 1};
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::uint32_t low = mask & (~mask + 1);
    const int idx = std::countr_zero(mask);
    const std::uint32_t rest = mask ^ low;
    const bool loop = (nbr[static_cast<std::size_t>(idx)] >> idx) & 1u;
    edges[mask] = static_cast<std::uint16_t>(
        edges[rest] + pc(nbr[static_cast<std::size_t>(idx)] & rest) +
        (loop ? 1 : 0));
    const long long size = pc(mask);
    if (size > beta) continue;
    const long long e = edges[mask];
    if (e * best.den > best.num * size) best = Rational{e, size};
  }
  return best;
}

double densest_at_most_beta_sampled(const Graph& g, long long beta,
                                    long long samples, std::uint64_t seed,
                                    bool with_degree_prefixes) {
  const long long n = g.size();
  if (beta < 1) fail(Errc::InvalidParams, "beta: size cap must be positive");
  if (samples < 0) fail(Errc::InvalidParams, "samples: must be >= 0");
  const long long hi = std::min(beta, n);
  const long long lo = std::min<long long>(2, hi);
  RowRng rng(derive_key({seed, kTagScratch}));
  double best = 0;
  for (long long s = 0; s < samples; ++s) {
    const long long size = lo + static_cast<long long>(rng.below(
                                    static_cast<std::uint64_t>(hi - lo + 1)));
    const auto subset = rng.subset(n, size);
    best = std::max(best, static_cast<double>(g.induced_edges(subset)) /
                              static_cast<double>(size));
  }
  if (with_degree_prefixes) {
    std::vector<long long> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
      const long long da = g.degree(a), db = g.degree(b);
      if (da != db) return da > db;
      return a < b;
    });
    for (long long L : {8, 16, 24, 32, 48, 64}) {
      if (L < 1 || L > hi) continue;
      const std::vector<long long> prefix(order.begin(), order.begin() + L);
      best = std::max(best, static_cast<double>(g.induced_edges(prefix)) /
                                static_cast<double>(L));
    }
  }
  return best;
}

double density_witness(const Graph& g, const std::vector<long long>& S,
                       const std::vector<long long>& R, long long beta) {
  const long long n = g.size();
  if (beta < 2) fail(Errc::InvalidParams, "beta: witness needs beta >= 2");
  std::vector<long long> rows = R, cols = S;
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  double best = 0;
  for (long long tau = 1; tau < n; ++tau) {
    // Column ids <= tau pair with row ids > tau: every such cross pair is an
    // arrival-order-consistent edge slot.
    const auto cols_end =
        std::upper_bound(cols.begin(), cols.end(), tau) - cols.begin();
    const auto rows_begin =
        std::upper_bound(rows.begin(), rows.end(), tau) - rows.begin();
    const long long avail_cols = cols_end;
    const long long avail_rows =
        static_cast<long long>(rows.size()) - rows_begin;
    const long long take =
        std::min({beta / 2, avail_cols, avail_rows});
    if (take < 1) continue;
    std::vector<long long> h(cols.begin(), cols.begin() + take);
    h.insert(h.end(), rows.begin() + rows_begin,
             rows.begin() + rows_begin + take);
    best = std::max(best, static_cast<double>(g.induced_edges(h)) /
                              static_cast<double>(h.size()));
  }
  return best;
}

Verdict reduction_to_max_biclique(StreamSource& source, double tau) {
  const auto events = vertex_arrival_adapter(source);
  const Graph g = graph_from_events(source.rows(), events);
  const double value = static_cast<double>(max_biclique_exact(g));
  return {value >= tau ? Arm::Planted : Arm::Null, value, tau};
}

Verdict reduction_to_density(StreamSource& source, long long beta, double tau,
                             long long samples, std::uint64_t seed) {
  const auto events = vertex_arrival_adapter(source);
  const Graph g = graph_from_events(source.rows(), events);
  const double value =
      densest_at_most_beta_sampled(g, beta, samples, seed, true);
  return {value >= tau ? Arm::Planted : Arm::Null, value, tau};
}

}  // namespace plantlab
