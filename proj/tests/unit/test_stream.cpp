#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "plantlab/errors.hpp"
#include "plantlab/rng.hpp"
#include "plantlab/stream.hpp"

using namespace plantlab;

namespace {

ProblemSpec biclique_spec(long long n, long long m, double q, long long k) {
  ProblemSpec s;
  s.kind = ProblemKind::Biclique;
  s.n = n;
  s.m = m;
  s.q = q;
  s.k = k;
  return s;
}

std::vector<Row> drain(StreamSource& src) {
  std::vector<Row> rows;
  Row r;
  src.rewind();
  while (src.next(r)) rows.push_back(r);
  return rows;
}

}  // namespace

TEST_SUITE_BEGIN("stream");

TEST_CASE("rows replay identically across rewinds and rebuilds") {
  const auto spec = biclique_spec(64, 48, 0.25, 8);
  auto h1 = make_stream(spec, Arm::Planted, 101);
  auto h2 = make_stream(spec, Arm::Planted, 101);
  const auto a = drain(*h1.source);
  const auto b = drain(*h1.source);  // second pass over the same source
  const auto c = drain(*h2.source);  // fresh source, same seed
  REQUIRE(a.size() == 48);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].bits == b[i].bits);
    CHECK(a[i].bits == c[i].bits);
    CHECK(a[i].index == static_cast<long long>(i));
    CHECK(a[i].binary);
    CHECK(a[i].width() == 64);
  }
  CHECK(h1.instance.S == h2.instance.S);
  CHECK(h1.instance.R == h2.instance.R);
  auto h3 = make_stream(spec, Arm::Planted, 102);
  const auto d3 = drain(*h3.source);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (d3[i].bits != a[i].bits) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("planted rows carry all-ones on the planted columns") {
  const auto spec = biclique_spec(64, 64, 0.5, 8);
  auto h = make_stream(spec, Arm::Planted, 7);
  REQUIRE(h.instance.arm == Arm::Planted);
  REQUIRE(h.instance.S.size() == 8);
  REQUIRE(h.instance.R.size() == 8);
  const auto rows = drain(*h.source);
  for (long long i : h.instance.R)
    for (long long j : h.instance.S)
      CHECK(rows[static_cast<std::size_t>(i)]
                .bits[static_cast<std::size_t>(j)] == 1);
}

TEST_CASE("independent-plant row mode marks exactly the forced rows") {
  auto spec = biclique_spec(48, 96, 0.5, 24);
  spec.row_mode = RowMode::IidQ;
  long long total_planted = 0;
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    auto h = make_stream(spec, Arm::Planted, seed);
    const auto rows = drain(*h.source);
    total_planted += static_cast<long long>(h.instance.R.size());
    for (long long i : h.instance.R)
      for (long long j : h.instance.S)
        CHECK(rows[static_cast<std::size_t>(i)]
                  .bits[static_cast<std::size_t>(j)] == 1);
  }
  // Plant probability is k/m = 1/4 per row: 4 seeds x Bin(96, 1/4),
  // mean 96, sd ~ 8.5; stay within ~5 sigma.
  CHECK(total_planted > 96 - 43);
  CHECK(total_planted < 96 + 43);
}

TEST_CASE("null cell frequency stays within four standard deviations") {
  const auto spec = biclique_spec(512, 512, 0.25, 4);
  const double sigma = std::sqrt(0.25 * 0.75 / (512.0 * 512.0));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto h = make_stream(spec, Arm::Null, seed);
    CHECK(h.instance.arm == Arm::Null);
    CHECK(h.instance.S.empty());
    long long ones = 0;
    Row r;
    while (h.source->next(r))
      for (auto b : r.bits) ones += b;
    const double frac = static_cast<double>(ones) / (512.0 * 512.0);
    CHECK(std::abs(frac - 0.25) < 4.0 * sigma);
  }
}

TEST_CASE("gaussian-mean plant adds the recorded mean to the null draw") {
  ProblemSpec spec;
  spec.kind = ProblemKind::SparseMean;
  spec.n = 32;
  spec.d = 40;
  spec.ell = 5;
  spec.alpha = 0.75;
  spec.q = 0.5;
  spec.k = 8;
  auto hn = make_stream(spec, Arm::Null, 909);
  auto hp = make_stream(spec, Arm::Planted, 909);
  REQUIRE(hp.instance.S.size() == 5);
  REQUIRE(hp.instance.v.size() == 5);
  for (double v : hp.instance.v) CHECK(v == 0.75);
  const auto rn = drain(*hn.source);
  const auto rp = drain(*hp.source);
  std::set<long long> planted_rows(hp.instance.R.begin(), hp.instance.R.end());
  for (std::size_t i = 0; i < rp.size(); ++i) {
    std::map<long long, double> delta;
    for (std::size_t j = 0; j < rp[i].reals.size(); ++j)
      if (rp[i].reals[j] != rn[i].reals[j])
        delta[static_cast<long long>(j)] = rp[i].reals[j] - rn[i].reals[j];
    if (planted_rows.count(static_cast<long long>(i))) {
      REQUIRE(delta.size() == 5);
      for (std::size_t a = 0; a < hp.instance.S.size(); ++a)
        CHECK(delta.at(hp.instance.S[a]) ==
              doctest::Approx(hp.instance.v[a]).epsilon(1e-12));
    } else {
      CHECK(delta.empty());
    }
  }
}

TEST_CASE("spiked-covariance plant is the recorded rank-one update of the null draw") {
  ProblemSpec spec;
  spec.kind = ProblemKind::BlockSparsePca;
  spec.n = 16;
  spec.d = 32;
  spec.ell = 8;
  spec.alpha = 0.6;
  auto hn = make_stream(spec, Arm::Null, 515);
  auto hp = make_stream(spec, Arm::Planted, 515);
  REQUIRE(hp.instance.S.size() == 8);
  const long long off = hp.instance.S.front();
  REQUIRE(off % 8 == 0);
  const double spread = (std::sqrt(1.6) - 1.0) / 8.0;
  const auto rn = drain(*hn.source);
  const auto rp = drain(*hp.source);
  for (std::size_t i = 0; i < rp.size(); ++i) {
    double y = 0;
    for (long long j = 0; j < 8; ++j)
      y += rn[i].reals[static_cast<std::size_t>(off + j)];
    for (std::size_t j = 0; j < 32; ++j) {
      const bool in_block =
          static_cast<long long>(j) >= off && static_cast<long long>(j) < off + 8;
      const double expect =
          rn[i].reals[j] + (in_block ? spread * y : 0.0);
      CHECK(rp[i].reals[j] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("spiked block sum has variance ell times (1 + alpha)") {
  ProblemSpec spec;
  spec.kind = ProblemKind::BlockSparsePca;
  spec.n = 20000;
  spec.d = 64;
  spec.ell = 16;
  spec.alpha = 0.5;
  auto h = make_stream(spec, Arm::Planted, 333);
  const long long off = h.instance.S.front();
  double s1 = 0, s2 = 0;
  Row r;
  long long count = 0;
  while (h.source->next(r)) {
    double y = 0;
    for (long long j = 0; j < 16; ++j)
      y += r.reals[static_cast<std::size_t>(off + j)];
    s1 += y;
    s2 += y * y;
    ++count;
  }
  const double mean = s1 / static_cast<double>(count);
  const double var = s2 / static_cast<double>(count) - mean * mean;
  const double target = 16.0 * 1.5;  // ell (1 + alpha)
  CHECK(std::abs(var - target) < 0.05 * target);
}

TEST_CASE("monotone adversary zeroes one fixed non-planted set in planted rows") {
  const auto spec = biclique_spec(8, 8, 0.5, 4);
  bool saw_full_deletion_set = false;
  for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u}) {
    auto base = make_stream(spec, Arm::Planted, seed);
    const auto before = drain(*base.source);
    auto adv = apply_monotone_adversary(std::move(base.source), base.instance, 2);
    const auto after = drain(*adv);
    const std::set<long long> planted_rows(base.instance.R.begin(),
                                           base.instance.R.end());
    const std::set<long long> planted_cols(base.instance.S.begin(),
                                           base.instance.S.end());
    std::set<long long> zero_union;
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (!planted_rows.count(static_cast<long long>(i))) {
        CHECK(after[i].bits == before[i].bits);
        continue;
      }
      for (std::size_t j = 0; j < after[i].bits.size(); ++j) {
        if (after[i].bits[j] != before[i].bits[j]) {
          CHECK(before[i].bits[j] == 1);  // only deletions
          CHECK(after[i].bits[j] == 0);
          CHECK(!planted_cols.count(static_cast<long long>(j)));
          zero_union.insert(static_cast<long long>(j));
        }
      }
    }
    CHECK(zero_union.size() <= 2);  // |I| = k - k' = 2
    if (zero_union.size() == 2) saw_full_deletion_set = true;
    // The deletion set is consistent: every planted row is zero on it.
    for (long long i : base.instance.R)
      for (long long j : zero_union)
        CHECK(after[static_cast<std::size_t>(i)]
                  .bits[static_cast<std::size_t>(j)] == 0);
  }
  CHECK(saw_full_deletion_set);
}

TEST_CASE("adversary with k_prime = k leaves the stream byte-identical") {
  const auto spec = biclique_spec(16, 16, 0.5, 4);
  auto base = make_stream(spec, Arm::Planted, 5);
  const auto before = drain(*base.source);
  auto adv = apply_monotone_adversary(std::move(base.source), base.instance, 4);
  const auto after = drain(*adv);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(before[i].bits == after[i].bits);
}

TEST_CASE("adversary passes null arms through and rejects real-valued kinds") {
  const auto spec = biclique_spec(16, 16, 0.5, 4);
  auto null_h = make_stream(spec, Arm::Null, 6);
  const auto before = drain(*null_h.source);
  auto pass = apply_monotone_adversary(std::move(null_h.source),
                                       null_h.instance, 2);
  const auto after = drain(*pass);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(before[i].bits == after[i].bits);

  ProblemSpec real_spec;
  real_spec.kind = ProblemKind::SparseMean;
  real_spec.n = 8;
  real_spec.d = 8;
  real_spec.ell = 2;
  real_spec.row_mode = RowMode::IidQ;
  auto rh = make_stream(real_spec, Arm::Planted, 7);
  CHECK_THROWS_WITH_AS(
      (void)apply_monotone_adversary(std::move(rh.source), rh.instance, 1),
      doctest::Contains("binary streams only"), Error);
}

TEST_CASE("column permutation round-trips and preserves column-sum multiset") {
  const auto spec = biclique_spec(32, 24, 0.5, 6);
  auto base = make_stream(spec, Arm::Planted, 88);
  const auto original = drain(*base.source);

  const auto perm = drawn_permutation(32, 4711);
  std::vector<long long> inverse(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j)
    inverse[static_cast<std::size_t>(perm[j])] = static_cast<long long>(j);

  auto permuted = permute_with(std::move(base.source), perm);
  const auto mid = drain(*permuted);
  std::vector<long long> col_before(32, 0), col_after(32, 0);
  for (std::size_t i = 0; i < original.size(); ++i)
    for (std::size_t j = 0; j < 32; ++j) {
      col_before[j] += original[i].bits[j];
      col_after[j] += mid[i].bits[j];
    }
  std::sort(col_before.begin(), col_before.end());
  std::sort(col_after.begin(), col_after.end());
  CHECK(col_before == col_after);

  auto back = permute_with(std::move(permuted), inverse);
  const auto round = drain(*back);
  for (std::size_t i = 0; i < original.size(); ++i)
    CHECK(round[i].bits == original[i].bits);

  // consistent_permute(seed) applies exactly drawn_permutation(seed).
  auto again = make_stream(spec, Arm::Planted, 88);
  auto via_seed = consistent_permute(std::move(again.source), 4711);
  const auto mid2 = drain(*via_seed);
  for (std::size_t i = 0; i < mid.size(); ++i) CHECK(mid2[i].bits == mid[i].bits);

  auto ident = make_stream(spec, Arm::Planted, 88);
  auto debug = consistent_permute(std::move(ident.source), 4711,
                                  /*debug_identity=*/true);
  const auto same = drain(*debug);
  for (std::size_t i = 0; i < original.size(); ++i)
    CHECK(same[i].bits == original[i].bits);
}

TEST_CASE("typical-weight membership follows the stored window") {
  TruncationSpec tr;
  tr.kind = TruncKind::TypicalWeight;
  tr.t = 100;
  tr.q = 0.5;
  tr.C = 10.0 / std::sqrt(50.0);  // half-width exactly 10 at log2(nm)=1
  tr.n = 1;
  tr.m = 2;
  CHECK(tr.window_lo() == 40);
  CHECK(tr.window_hi() == 60);
  std::vector<std::uint8_t> x(100, 0);
  for (int j = 0; j < 50; ++j) x[static_cast<std::size_t>(j)] = 1;
  CHECK(in_truncation_set(tr, x));
  for (int j = 50; j < 70; ++j) x[static_cast<std::size_t>(j)] = 1;
  CHECK(!in_truncation_set(tr, x));
  std::vector<std::uint8_t> wrong(99, 0);
  CHECK_THROWS_AS((void)in_truncation_set(tr, wrong), Error);
}

TEST_CASE("truncated bit sampler matches the exact conditioned law") {
  TruncationSpec tr;
  tr.kind = TruncKind::TypicalWeight;
  tr.t = 12;
  tr.q = 0.25;
  tr.C = 1.5;
  tr.n = 1;
  tr.m = 2;  // log2(nm) = 1
  REQUIRE(tr.window_lo() == 1);
  REQUIRE(tr.window_hi() == 5);
  const std::vector<long long> forced{0, 5};

  for (TruncLaw law : {TruncLaw::Conditional, TruncLaw::Uniform}) {
    tr.law = law;
    // Exact weight pmf on w in [2, 5]: the 2 forced ones plus j = w - 2 of
    // the 10 free coordinates; conditional multiplies in Bernoulli weights.
    std::vector<double> pmf(6, 0.0);
    double z = 0;
    for (int w = 2; w <= 5; ++w) {
      const int j = w - 2;
      double mass = 1;
      for (int a = 0; a < j; ++a) mass *= static_cast<double>(10 - a) / (a + 1);
      if (law == TruncLaw::Conditional)
        mass *= std::pow(0.25, j) * std::pow(0.75, 10 - j);
      pmf[static_cast<std::size_t>(w)] = mass;
      z += mass;
    }
    for (double& p : pmf) p /= z;

    RowRng rng(derive_key({991, static_cast<std::uint64_t>(law)}));
    const int N = 200000;
    std::vector<long long> weight_counts(6, 0);
    std::vector<long long> pos_counts(12, 0);
    for (int it = 0; it < N; ++it) {
      const auto x = sample_truncated_bits(tr, forced, rng);
      REQUIRE(x.size() == 12);
      CHECK(x[0] == 1);
      CHECK(x[5] == 1);
      int w = 0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        w += x[j];
        pos_counts[j] += x[j];
      }
      REQUIRE(w >= 2);
      REQUIRE(w <= 5);
      ++weight_counts[static_cast<std::size_t>(w)];
    }
    double tv = 0;
    for (int w = 0; w <= 5; ++w)
      tv += std::abs(static_cast<double>(weight_counts[static_cast<std::size_t>(w)]) / N -
                     pmf[static_cast<std::size_t>(w)]);
    CHECK(tv / 2 < 0.01);
    // Free coordinates are exchangeable: their inclusion frequencies agree.
    std::vector<double> free_freq;
    for (std::size_t j = 0; j < 12; ++j)
      if (j != 0 && j != 5)
        free_freq.push_back(static_cast<double>(pos_counts[j]) / N);
    const auto [mn, mx] = std::minmax_element(free_freq.begin(), free_freq.end());
    CHECK(*mx - *mn < 0.01);
  }
}

TEST_CASE("rejection sampler reports an exhausted budget") {
  TruncationSpec tr;
  tr.kind = TruncKind::TypicalWeight;
  tr.law = TruncLaw::Conditional;
  tr.t = 200;
  tr.q = 0.5;
  tr.C = 0.5;
  tr.n = 1;
  tr.m = 2;
  // Window is [95, 105]; pinning 105 ones keeps it formally reachable (the
  // 95 free bits must all land 0, probability 2^-95), so the sampler burns
  // its whole attempt budget instead of refusing up front.
  REQUIRE(tr.window_lo() == 95);
  REQUIRE(tr.window_hi() == 105);
  std::vector<long long> forced;
  for (long long j = 0; j < 105; ++j) forced.push_back(j);
  RowRng rng(derive_key({5}));
  CHECK_THROWS_WITH_AS((void)sample_truncated_bits(tr, forced, rng),
                       doctest::Contains("rejection"), Error);
}

TEST_CASE("partitioned binary stream honours block truncation in both arms") {
  ProblemSpec spec;
  spec.kind = ProblemKind::PartitionBiclique;
  spec.m = 40;
  spec.d = 64;
  spec.t = 16;
  spec.k = 6;
  spec.q = 0.5;
  spec.n = 40;
  auto tr = TruncationSpec::from(spec, TruncKind::TypicalWeight);
  tr.C = 0.8;  // tight window so truncation actually bites
  const long long lo = tr.window_lo(), hi = tr.window_hi();
  REQUIRE(lo > 0);
  for (Arm arm : {Arm::Null, Arm::Planted}) {
    auto h = make_stream(spec, arm, 2468, tr);
    Row r;
    while (h.source->next(r)) {
      REQUIRE(r.width() == 64);
      for (int b = 0; b < 4; ++b) {
        long long w = 0;
        for (int j = 0; j < 16; ++j) w += r.bits[static_cast<std::size_t>(16 * b + j)];
        CHECK(w >= lo);
        CHECK(w <= hi);
      }
    }
    if (arm == Arm::Planted) {
      REQUIRE(h.instance.r >= 0);
      const auto rows = drain(*h.source);
      // The partitioned plant is all-ones on S in the planted rows.
      for (long long i : h.instance.R)
        for (long long j : h.instance.S)
          CHECK(rows[static_cast<std::size_t>(i)]
                    .bits[static_cast<std::size_t>(j)] == 1);
    }
  }
}

TEST_CASE("spec validation names the violated field") {
  ProblemSpec spec = biclique_spec(16, 16, 0.5, 20);  // k > n
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("k"), Error);
  spec = biclique_spec(16, 16, 1.5, 4);
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("q"), Error);
  spec = biclique_spec(0, 16, 0.5, 4);
  CHECK_THROWS_AS(spec.validate(), Error);
  ProblemSpec pca;
  pca.kind = ProblemKind::BlockSparsePca;
  pca.n = 8;
  pca.d = 12;
  pca.ell = 13;  // wider than the dimension
  pca.alpha = 0.5;
  CHECK_THROWS_WITH_AS(pca.validate(), doctest::Contains("ell"), Error);
}

TEST_CASE("dimension padding splits into active and filler columns") {
  ProblemSpec spec;
  spec.kind = ProblemKind::PartitionSparseMean;
  spec.n = 8;
  spec.d = 100;
  spec.t = 25;
  spec.ell = 4;
  auto [padded, info] = pad_dimension(spec);
  CHECK(info.d_active == 100);
  CHECK(info.filler == 0);
  spec.t = 30;
  std::tie(padded, info) = pad_dimension(spec);
  CHECK(info.d_active == 90);
  CHECK(info.filler == 10);
  spec.t = 101;
  CHECK_THROWS_AS((void)pad_dimension(spec), Error);
}

TEST_SUITE_END();
