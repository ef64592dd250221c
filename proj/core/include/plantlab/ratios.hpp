#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plantlab/stream.hpp"

namespace plantlab {

// Exact maximum of the planted-mixture-to-null density ratio for truncated
// width-t bit blocks: null is Ber(q)^t restricted to the weight window, the
// mixture averages over all k-subsets S forced to ones. The ratio depends on
// a block only through its weight, so the maximum is taken per weight class
// with binomial coefficients — no 2^t enumeration. Both truncation readings
// are reported.
struct BicliqueRatioReport {
  long long t = 0, k = 0;
  double q = 0.5;
  long long window_lo = 0, window_hi = 0;
  double c_conditional = 1;       // max ratio, product law conditioned on window
  double c_uniform = 1;           // max ratio, uniform law over the window set
  long long argmax_w_conditional = 0;
  long long argmax_w_uniform = 0;
};

// Window is [tq - C sqrt(tq log2(nm)), tq + C sqrt(tq log2(nm))] ∩ [0, t].
// Throws Error{EmptyTruncationWindow} when the window (or its planted
// counterpart, which additionally needs weight >= k) is empty.
BicliqueRatioReport biclique_ratio_max(long long t, long long k, double q,
                                       double C, double nm_context);

// E_v[f_v(x)/f_0(x)] for the sparse-mean mixture where each coordinate of v
// is alpha with probability ell/t independently:
//   prod_j (1 - ell/t + (ell/t) e^{-alpha^2/2} e^{alpha x_j}),
// accumulated in log space.
double gaussian_mixture_ratio(const std::vector<double>& x, long long t,
                              long long ell, double alpha);

// Density of N(0, I_t + (alpha/ell) 1_S 1_S^T) at x for the aligned block
// S = [s_off, s_off + ell), via the rank-one closed form
//   f_S(x) = f_0(x) (1+alpha)^{-1/2} exp(alpha/(2(1+alpha)) * Y^2/ell),
// with Y the block sum of x over S.
double pca_density(const std::vector<double>& x, long long s_off, double alpha,
                   long long ell);

// Same density through the generic multivariate normal form with the
// explicit covariance matrix (dense linear algebra); verification route.
double pca_density_explicit(const std::vector<double>& x, long long s_off,
                            double alpha, long long ell);

// Determinant of I_t + (alpha/ell) 1_S 1_S^T computed densely (equals
// 1 + alpha in exact arithmetic).
double pca_sigma_det(long long t, long long s_off, double alpha, long long ell);

// E_S[f_S(x)/f_0(x)] over the t/ell aligned blocks:
//   (1+alpha)^{-1/2} (ell/t) sum_R exp(alpha/(2(1+alpha)) * Y_R^2/ell).
// Throws Error{InvalidParams} when ell does not divide t.
double pca_mixture_ratio(const std::vector<double>& x, long long t,
                         long long ell, double alpha);

// Estimate of Pr[x not in T] under the block's base law. TypicalWeight is
// computed exactly from binomial tails (the interval degenerates to a
// point); the real-valued kinds are Monte Carlo with an exact
// Clopper-Pearson interval at the given confidence.
struct TailEstimate {
  double p_hat = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  bool exact = false;
  long long trials = 0;
};

TailEstimate trunc_tail_prob(const TruncationSpec& trunc, long long trials,
                             std::uint64_t seed, double confidence = 0.99);

// Memory lower-bound formulas as literal calculators with every hidden
// constant set to 1 (order-of-magnitude context only, never a pass/fail
// oracle). Logs are base 2.
enum class BoundFormula { GeneralFramework, BicliqueMain, PatternPlanted, MicBudget };

const char* bound_formula_name(BoundFormula f);
bool parse_bound_formula(const std::string& s, BoundFormula& out);

struct BoundInputs {
  long long n = 1, m = 1, d = 1, t = 1, k = 1, p = 1, s = 1;
  double q = 0.5, c = 1.0;
};

struct BoundPrediction {
  BoundFormula formula = BoundFormula::MicBudget;
  double value_bits = 0;
  BoundInputs inputs;
};

// GeneralFramework: n d / (p c k^2 t)
// BicliqueMain:     n m q / (p k^4 log2(n m))
// PatternPlanted:   n^2 / (p k^3)
// MicBudget:        2 p s n (exact)
BoundPrediction bound_prediction(BoundFormula formula, const BoundInputs& in);

}  // namespace plantlab
