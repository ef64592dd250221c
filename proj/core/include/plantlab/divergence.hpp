#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace plantlab {

// Finite pmf on the integer interval [lo, lo + mass.size() - 1]. For
// binomials with n <= 64 the exact numerators over 2^n are kept alongside,
// which makes symmetry and equality checks exact.
struct Pmf {
  long long lo = 0;
  std::vector<double> mass;
  std::vector<std::uint64_t> exact_num;  // optional; mass = num * 2^-exact_log2_den
  int exact_log2_den = -1;               // -1 when no exact form is stored

  long long hi() const { return lo + static_cast<long long>(mass.size()) - 1; }
  double at(long long i) const {
    return (i < lo || i > hi()) ? 0.0 : mass[static_cast<std::size_t>(i - lo)];
  }
};

// Binomial(n, 1/2) on {0..n}. Values are computed symmetrically, so
// mass[i] == mass[n-i] holds bit-for-bit for every n.
Pmf binomial_pmf(long long n);

// General Binomial(n, q) in doubles (log-space internally).
Pmf binomial_pmf(long long n, double q);

// Q(i) = integral of the N(n/2, n/4) density over [i - 1/2, i + 1/2],
// for i in [lo, hi] (the range may extend beyond [0, n]). Symmetric
// bit-for-bit about n/2 when the range is.
Pmf discretized_gaussian_pmf(long long n, long long lo, long long hi);

struct DivergenceResult {
  double kl_bits = 0;    // sum p log2(p/q)
  double tv = 0;         // (1/2) sum |p - q|
  double hellinger = 0;  // h with h^2 = 1 - sum sqrt(p q)
};

// Supports are aligned by integer index; P mass outside Q's support makes
// KL undefined and throws Error{SupportMismatch}.
DivergenceResult divergences(const Pmf& P, const Pmf& Q);

struct KlScanRow {
  long long n = 0;
  double kl_bits = 0;
  double normalized = 0;  // kl_bits * n / log2(n)^2
};

// Exact KL(Binomial(n,1/2) || discretized N(n/2, n/4)) per n, in bits.
// Internally summed in 128-bit floats; the discretized Gaussian is evaluated
// on all integers but only i in [0, n] carry P mass.
std::vector<KlScanRow> kl_binomial_gaussian_scan(
    const std::vector<long long>& n_values);

// Local approximation of Binomial(n,1/2) at i, z = 2(i - n/2)/sqrt(n):
// order 1:  (2/sqrt(2 pi n)) exp(-z^2/2)
// order 2:  order 1 * (1 + r(z)/n),  r(z) = -z^4/12 + z^2/2 - 1/4.
double edgeworth_binomial_approx(long long n, long long i, int order);

// Coefficients {c0, c2, c4} of r(z).
std::array<double, 3> edgeworth_r_coeffs();

// Max |approx - exact| over i with |z| <= z_max.
double edgeworth_max_error(long long n, int order, double z_max);

struct TailSplit {
  long long lo = 0;        // central region [lo, hi]:
  long long hi = 0;        //   |2(i - n/2)/sqrt(n)| <= mult * sqrt(log2 n)
  double central = 0;      // binomial mass inside
  double tail = 0;         // mass outside (0 when it underflows double)
  double log2_tail = 0;    // log2 of the tail mass (-inf if exactly zero)
};

// Exact Binomial(n, 1/2) mass inside/outside the central |z| window,
// summed in 128-bit floats so astronomically small tails keep a valid log.
TailSplit central_tail_split(long long n, double width_multiplier = 10.0);

}  // namespace plantlab
