#include "plantlab/divergence.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "plantlab/errors.hpp"

namespace plantlab {

namespace {

using f128 = __float128;

// log of the Binomial(n, 1/2) pmf at i, in nats, 128-bit precision.
f128 log_binom_half(long long n, long long i, f128 lgamma_np1) {
  return lgamma_np1 - lgammaq(static_cast<f128>(i) + 1) -
         lgammaq(static_cast<f128>(n - i) + 1) -
         static_cast<f128>(n) * M_LN2q;
}

// Q(i) for N(n/2, n/4) discretized over unit intervals, 128-bit precision.
// Evaluated from the tail side nearest to i so the CDF difference keeps its
// relative accuracy far from the mean.
f128 disc_gauss_q(long long n, long long i) {
  const f128 half = 0.5Q;
  const f128 center = static_cast<f128>(n) * half;
  const f128 sigma = sqrtq(static_cast<f128>(n)) * half;
  const f128 scale = sigma * sqrtq(2.0Q);
  f128 a = (static_cast<f128>(i) - half - center) / scale;
  f128 b = (static_cast<f128>(i) + half - center) / scale;
  if (a + b < 0) {  // mirror to the right tail
    const f128 na = -b, nb = -a;
    a = na;
    b = nb;
  }
  return (erfcq(a) - erfcq(b)) * half;
}

}  // namespace

Pmf binomial_pmf(long long n) {
  if (n < 1) fail(Errc::InvalidParams, "n: need at least one trial");
  Pmf p;
  p.lo = 0;
  p.mass.resize(static_cast<std::size_t>(n) + 1);
  if (n <= 64) {
    p.exact_log2_den = static_cast<int>(n);
    p.exact_num.resize(p.mass.size());
    std::uint64_t c = 1;
    for (long long i = 0; i <= n; ++i) {
      p.exact_num[static_cast<std::size_t>(i)] = c;
      p.mass[static_cast<std::size_t>(i)] =
          static_cast<double>(c) * std::exp2(-static_cast<double>(n));
      if (i < n) c = c / (i + 1) * (n - i) + c % (i + 1) * (n - i) / (i + 1);
    }
    return p;
  }
  const double lg = std::lgamma(static_cast<double>(n) + 1);
  const double ln2n = static_cast<double>(n) * M_LN2;
  for (long long i = 0; i <= n; ++i) {
    p.mass[static_cast<std::size_t>(i)] =
        std::exp(lg - std::lgamma(static_cast<double>(i) + 1) -
                 std::lgamma(static_cast<double>(n - i) + 1) - ln2n);
  }
  return p;
}

Pmf binomial_pmf(long long n, double q) {
  if (n < 1) fail(Errc::InvalidParams, "n: need at least one trial");
  if (!(q > 0.0 && q < 1.0))
    fail(Errc::InvalidParams, "q: success probability must be in (0, 1)");
  Pmf p;
  p.lo = 0;
  p.mass.resize(static_cast<std::size_t>(n) + 1);
  const double lg = std::lgamma(static_cast<double>(n) + 1);
  const double lq = std::log(q), l1q = std::log1p(-q);
  for (long long i = 0; i <= n; ++i) {
    p.mass[static_cast<std::size_t>(i)] =
        std::exp(lg - std::lgamma(static_cast<double>(i) + 1) -
                 std::lgamma(static_cast<double>(n - i) + 1) +
                 static_cast<double>(i) * lq + static_cast<double>(n - i) * l1q);
  }
  return p;
}

Pmf discretized_gaussian_pmf(long long n, long long lo, long long hi) {
  if (n < 1) fail(Errc::InvalidParams, "n: need at least one trial");
  if (lo > hi) fail(Errc::InvalidParams, "range: lo must not exceed hi");
  Pmf p;
  p.lo = lo;
  p.mass.resize(static_cast<std::size_t>(hi - lo) + 1);
  for (long long i = lo; i <= hi; ++i) {
    p.mass[static_cast<std::size_t>(i - lo)] =
        static_cast<double>(disc_gauss_q(n, i));
  }
  return p;
}

DivergenceResult divergences(const Pmf& P, const Pmf& Q) {
  const long long lo = std::min(P.lo, Q.lo);
  const long long hi = std::max(P.hi(), Q.hi());
  DivergenceResult r;
  double bc = 0;
  for (long long i = lo; i <= hi; ++i) {
    const double p = P.at(i);
    const double q = Q.at(i);
    if (p > 0) {
      if (q <= 0)
        fail(Errc::SupportMismatch,
             "P has mass at " + std::to_string(i) + " where Q has none");
      r.kl_bits += p * std::log2(p / q);
    }
    r.tv += std::abs(p - q);
    bc += std::sqrt(p * q);
  }
  r.tv /= 2;
  r.hellinger = std::sqrt(std::max(0.0, 1.0 - bc));
  return r;
}

std::vector<KlScanRow> kl_binomial_gaussian_scan(
    const std::vector<long long>& n_values) {
  std::vector<KlScanRow> out;
  out.reserve(n_values.size());
  // Terms with pmf below this floor contribute less than ~1e-30 in total,
  // far under the 1e-9 relative target of the smallest KL in range.
  const f128 lp_floor = logq(1e-40Q);
  for (long long n : n_values) {
    if (n < 4) fail(Errc::InvalidParams, "n: scan needs n >= 4");
    const f128 lgamma_np1 = lgammaq(static_cast<f128>(n) + 1);
    f128 kl = 0;  // nats
    for (long long i = 0; i <= n; ++i) {
      const f128 lp = log_binom_half(n, i, lgamma_np1);
      if (lp < lp_floor) continue;
      const f128 lq = logq(disc_gauss_q(n, i));
      kl += expq(lp) * (lp - lq);
    }
    KlScanRow row;
    row.n = n;
    row.kl_bits = static_cast<double>(kl / M_LN2q);
    const double l2n = std::log2(static_cast<double>(n));
    row.normalized = row.kl_bits * static_cast<double>(n) / (l2n * l2n);
    out.push_back(row);
  }
  return out;
}

std::array<double, 3> edgeworth_r_coeffs() {
  // r(z) = c0 + c2 z^2 + c4 z^4 from the fourth-cumulant correction of the
  // symmetric Bernoulli local limit expansion.
  return {-0.25, 0.5, -1.0 / 12.0};
}

double edgeworth_binomial_approx(long long n, long long i, int order) {
  if (order != 1 && order != 2)
    fail(Errc::InvalidParams, "order: must be 1 or 2");
  const double z = 2 * (static_cast<double>(i) - static_cast<double>(n) / 2) /
                   std::sqrt(static_cast<double>(n));
  const double base = 2.0 / std::sqrt(2 * M_PI * static_cast<double>(n)) *
                      std::exp(-z * z / 2);
  if (order == 1) return base;
  const auto c = edgeworth_r_coeffs();
  const double r = c[0] + c[1] * z * z + c[2] * z * z * z * z;
  return base * (1 + r / static_cast<double>(n));
}

double edgeworth_max_error(long long n, int order, double z_max) {
  const double lg = std::lgamma(static_cast<double>(n) + 1);
  const double half_span = z_max * std::sqrt(static_cast<double>(n)) / 2;
  const long long lo = std::max<long long>(
      0, static_cast<long long>(std::ceil(static_cast<double>(n) / 2 - half_span)));
  const long long hi = std::min<long long>(
      n, static_cast<long long>(std::floor(static_cast<double>(n) / 2 + half_span)));
  double worst = 0;
  for (long long i = lo; i <= hi; ++i) {
    const double exact =
        std::exp(lg - std::lgamma(static_cast<double>(i) + 1) -
                 std::lgamma(static_cast<double>(n - i) + 1) -
                 static_cast<double>(n) * M_LN2);
    worst = std::max(worst,
                     std::abs(edgeworth_binomial_approx(n, i, order) - exact));
  }
  return worst;
}

TailSplit central_tail_split(long long n, double width_multiplier) {
  if (n < 16) fail(Errc::InvalidParams, "n: split needs n >= 16");
  TailSplit s;
  const double bound = width_multiplier * std::sqrt(std::log2(static_cast<double>(n)));
  const double half_span = bound * std::sqrt(static_cast<double>(n)) / 2;
  s.lo = std::max<long long>(
      0, static_cast<long long>(std::ceil(static_cast<double>(n) / 2 - half_span)));
  s.hi = std::min<long long>(
      n, static_cast<long long>(std::floor(static_cast<double>(n) / 2 + half_span)));

  const f128 lgamma_np1 = lgammaq(static_cast<f128>(n) + 1);
  f128 tail = 0;
  for (long long i = 0; i < s.lo; ++i)
    tail += expq(log_binom_half(n, i, lgamma_np1));
  for (long long i = s.hi + 1; i <= n; ++i)
    tail += expq(log_binom_half(n, i, lgamma_np1));

  s.central = static_cast<double>(1.0Q - tail);
  s.tail = static_cast<double>(tail);
  s.log2_tail = tail > 0 ? static_cast<double>(log2q(tail))
                         : -std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace plantlab
