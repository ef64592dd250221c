#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "plantlab/divergence.hpp"
#include "plantlab/errors.hpp"
#include "plantlab/rng.hpp"

using namespace plantlab;

namespace {

// 50-digit reference values, frozen from an independent high-precision
// computation (mpmath, 50 decimal digits), reproduced by tests/oracle.
constexpr double kN2Q1 = 0.520499877813046537683;
constexpr double kN2Q0 = 0.222802634331132094692;
constexpr double kN2KlBits = 0.0540960371406783515235;

constexpr double kKl256 = 2.45847705413734692917e-06;
constexpr double kKl1024 = 1.53066606601832390254e-07;
constexpr double kKl4096 = 9.55760106416238357947e-09;
constexpr double kKl16384 = 5.97208970371394977313e-10;
constexpr double kKl65536 = 3.73233579476175809765e-11;

constexpr double kSpotExact55 = 0.0484742966264307529927;
constexpr double kSpotOrder1At55 = 0.0483941449038286699596;
constexpr double kSpotOrder2At55 = 0.0484748018120017177428;
constexpr double kSpotOrder1At50 = 0.0797884560802865355880;

constexpr double kE1n100 = 0.000199218693108;
constexpr double kE2n100 = 8.49339583360e-7;
constexpr double kE1n1000 = 6.30704184080e-6;
constexpr double kE2n1000 = 2.68183445707e-9;
constexpr double kE1n10000 = 1.99468646500e-7;
constexpr double kE2n10000 = 8.48033032141e-12;

constexpr double kLog2Tail1024 = -972.504512844180392006;
constexpr double kLog2Tail4096 = -919.211072355951363105;
constexpr double kLog2Tail16384 = -1030.19685147175515772;
constexpr double kLog2Tail65536 = -1164.77478254297201832;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_SUITE_BEGIN("divergence");

TEST_CASE("binomial pmf is exact and symmetric") {
  const auto p = binomial_pmf(10);
  CHECK(p.lo == 0);
  CHECK(p.hi() == 10);
  CHECK(p.at(0) == 1.0 / 1024);
  CHECK(p.at(5) == 252.0 / 1024);
  for (int i = 0; i <= 10; ++i) CHECK(p.at(i) == p.at(10 - i));
  REQUIRE(p.exact_log2_den == 10);
  CHECK(p.exact_num[5] == 252);

  const auto q = binomial_pmf(9, 0.3);
  double total = 0;
  for (double v : q.mass) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.at(0) == doctest::Approx(std::pow(0.7, 9)).epsilon(1e-12));
}

TEST_CASE("discretized gaussian cell masses match the frozen reference") {
  const auto q = discretized_gaussian_pmf(2, 0, 2);
  CHECK(close_rel(q.at(1), kN2Q1, 1e-12));
  CHECK(close_rel(q.at(0), kN2Q0, 1e-12));
  CHECK(close_rel(q.at(2), kN2Q0, 1e-12));
  CHECK(q.at(0) == q.at(2));  // symmetric bit-for-bit
}

TEST_CASE("hand-checkable divergences") {
  Pmf p, q;
  p.lo = 0;
  p.mass = {1.0, 0.0};
  q.lo = 0;
  q.mass = {0.5, 0.5};
  const auto d = divergences(p, q);
  CHECK(d.kl_bits == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.tv == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.hellinger ==
        doctest::Approx(std::sqrt(1.0 - std::sqrt(0.5))).epsilon(1e-12));

  // KL undefined when P has mass outside Q's support.
  Pmf r;
  r.lo = 5;
  r.mass = {1.0};
  CHECK_THROWS_AS((void)divergences(r, q), Error);
}

TEST_CASE("hellinger sandwich holds on random pmf pairs") {
  RowRng rng(derive_key({808}));
  for (int rep = 0; rep < 500; ++rep) {
    const int dim = 2 + static_cast<int>(rng.below(30));
    Pmf p, q;
    p.lo = q.lo = 0;
    double sp = 0, sq = 0;
    for (int i = 0; i < dim; ++i) {
      p.mass.push_back(rng.unit() + 1e-12);
      q.mass.push_back(rng.unit() + 1e-12);
      sp += p.mass.back();
      sq += q.mass.back();
    }
    for (auto& v : p.mass) v /= sp;
    for (auto& v : q.mass) v /= sq;
    const auto d = divergences(p, q);
    CHECK(d.hellinger * d.hellinger <= d.tv + 1e-14);
    CHECK(d.tv <= std::sqrt(2.0) * d.hellinger + 1e-14);
  }
}

TEST_CASE("small-n divergence agrees with the frozen reference") {
  // The scan API starts at n = 4, so the n = 2 reference point is assembled
  // from the same building blocks directly.
  const auto P = binomial_pmf(2);
  const auto Q = discretized_gaussian_pmf(2, 0, 2);
  CHECK(close_rel(divergences(P, Q).kl_bits, kN2KlBits, 1e-12));
}

TEST_CASE("divergence scan reproduces the frozen grid and decays") {
  const auto rows = kl_binomial_gaussian_scan({256, 1024, 4096, 16384, 65536});
  REQUIRE(rows.size() == 5);
  const double expected[5] = {kKl256, kKl1024, kKl4096, kKl16384, kKl65536};
  for (int i = 0; i < 5; ++i) {
    CHECK(close_rel(rows[static_cast<std::size_t>(i)].kl_bits, expected[i], 1e-9));
    const auto& r = rows[static_cast<std::size_t>(i)];
    const double log2n = std::log2(static_cast<double>(r.n));
    CHECK(r.normalized ==
          doctest::Approx(r.kl_bits * static_cast<double>(r.n) / (log2n * log2n))
              .epsilon(1e-12));
  }
  for (int i = 1; i < 5; ++i)
    CHECK(rows[static_cast<std::size_t>(i)].kl_bits <
          rows[static_cast<std::size_t>(i - 1)].kl_bits);
}

TEST_CASE("local approximation polynomial and spot values") {
  const auto c = edgeworth_r_coeffs();
  CHECK(c[0] == -0.25);
  CHECK(c[1] == 0.5);
  CHECK(c[2] == -1.0 / 12);

  const auto exact = binomial_pmf(100);
  CHECK(close_rel(exact.at(55), kSpotExact55, 1e-12));
  CHECK(close_rel(edgeworth_binomial_approx(100, 55, 1), kSpotOrder1At55, 1e-12));
  CHECK(close_rel(edgeworth_binomial_approx(100, 55, 2), kSpotOrder2At55, 1e-12));
  CHECK(close_rel(edgeworth_binomial_approx(100, 50, 1), kSpotOrder1At50, 1e-12));
}

TEST_CASE("local approximation errors match the frozen reference") {
  // The max error is a difference of Theta(1/sqrt(n))-sized values, so in
  // double precision it carries an absolute noise floor of a few 1e-15 no
  // matter how small the true error is (relevant for order 2 at n = 10^4,
  // where the true error is ~8.5e-12).
  const auto close_err = [](double a, double b) {
    return std::fabs(a - b) <= std::max(1e-9 * std::fabs(b), 2e-14);
  };
  CHECK(close_err(edgeworth_max_error(100, 1, 3.0), kE1n100));
  CHECK(close_err(edgeworth_max_error(100, 2, 3.0), kE2n100));
  CHECK(close_err(edgeworth_max_error(1000, 1, 3.0), kE1n1000));
  CHECK(close_err(edgeworth_max_error(1000, 2, 3.0), kE2n1000));
  CHECK(close_err(edgeworth_max_error(10000, 1, 3.0), kE1n10000));
  CHECK(close_err(edgeworth_max_error(10000, 2, 3.0), kE2n10000));
}

TEST_CASE("central window and tail mass match the frozen reference") {
  const auto s256 = central_tail_split(256);
  CHECK(s256.tail == 0.0);
  CHECK(s256.log2_tail == -std::numeric_limits<double>::infinity());
  CHECK(s256.central == doctest::Approx(1.0).epsilon(1e-12));

  const auto s1024 = central_tail_split(1024);
  CHECK(s1024.lo == 7);
  CHECK(s1024.hi == 1017);
  CHECK(close_rel(s1024.log2_tail, kLog2Tail1024, 1e-9));

  const auto s4096 = central_tail_split(4096);
  CHECK(s4096.lo == 940);
  CHECK(s4096.hi == 3156);
  CHECK(close_rel(s4096.log2_tail, kLog2Tail4096, 1e-9));

  const auto s16384 = central_tail_split(16384);
  CHECK(s16384.lo == 5798);
  CHECK(s16384.hi == 10586);
  CHECK(close_rel(s16384.log2_tail, kLog2Tail16384, 1e-9));

  const auto s65536 = central_tail_split(65536);
  CHECK(s65536.lo == 27648);
  CHECK(s65536.hi == 37888);
  CHECK(close_rel(s65536.log2_tail, kLog2Tail65536, 1e-9));
}

TEST_SUITE_END();
