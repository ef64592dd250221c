#include "plantlab/ratios.hpp"

#include <quadmath.h>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <cmath>
#include <limits>

#include "plantlab/errors.hpp"

namespace plantlab {

namespace {

double lchoose(long long n, long long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1) -
         std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

BicliqueRatioReport biclique_ratio_max(long long t, long long k, double q,
                                       double C, double nm_context) {
  if (t < 1) fail(Errc::InvalidParams, "t: block width must be positive");
  if (k < 0 || k > t) fail(Errc::InvalidParams, "k: must be in [0, t]");
  if (!(q > 0 && q < 1)) fail(Errc::InvalidParams, "q: must be in (0, 1)");

  // Window bounds from the real-valued context (nm need not be integral).
  const double center = static_cast<double>(t) * q;
  const double half = C * std::sqrt(center * std::log2(nm_context));
  const long long wlo =
      std::max<long long>(0, static_cast<long long>(std::ceil(center - half)));
  const long long whi =
      std::min<long long>(t, static_cast<long long>(std::floor(center + half)));
  if (wlo > whi)
    fail(Errc::EmptyTruncationWindow, "weight window contains no integer");
  const long long plo = std::max(wlo, k);
  if (plo > whi)
    fail(Errc::EmptyTruncationWindow,
         "planted window is empty: every in-window weight is below k");

  BicliqueRatioReport rep;
  rep.t = t;
  rep.k = k;
  rep.q = q;
  rep.window_lo = wlo;
  rep.window_hi = whi;

  const double lq = std::log(q), l1q = std::log1p(-q);
  std::vector<double> lz0, lzs, lt0, lts;
  for (long long w = wlo; w <= whi; ++w) {
    lz0.push_back(lchoose(t, w) + w * lq + (t - w) * l1q);
    lt0.push_back(lchoose(t, w));
  }
  for (long long w = plo; w <= whi; ++w) {
    lzs.push_back(lchoose(t - k, w - k) + (w - k) * lq + (t - w) * l1q);
    lts.push_back(lchoose(t - k, w - k));
  }
  const double lZ0 = logsumexp(lz0), lZS = logsumexp(lzs);
  const double lT0 = logsumexp(lt0), lTS = logsumexp(lts);

  rep.c_conditional = 0;
  rep.c_uniform = 0;
  for (long long w = plo; w <= whi; ++w) {
    const double lab = lchoose(w, k) - lchoose(t, k);
    const double cond = std::exp(lab - k * lq + lZ0 - lZS);
    const double unif = std::exp(lab + lT0 - lTS);
    if (cond > rep.c_conditional) {
      rep.c_conditional = cond;
      rep.argmax_w_conditional = w;
    }
    if (unif > rep.c_uniform) {
      rep.c_uniform = unif;
      rep.argmax_w_uniform = w;
    }
  }
  if (k == 0) {
    // Mixture equals the null law; guard the degenerate loop result.
    rep.c_conditional = 1;
    rep.c_uniform = 1;
    rep.argmax_w_conditional = rep.argmax_w_uniform = wlo;
  }
  return rep;
}

double gaussian_mixture_ratio(const std::vector<double>& x, long long t,
                              long long ell, double alpha) {
  if (ell < 1 || ell > t)
    fail(Errc::InvalidParams, "ell: sparsity must be in [1, t]");
  if (static_cast<long long>(x.size()) != t)
    fail(Errc::DimensionMismatch, "x length does not match t");
  const double p = static_cast<double>(ell) / static_cast<double>(t);
  const double lkeep = std::log1p(-p);
  const double lflip = std::log(p);
  double acc = 0;
  for (double xi : x) {
    const double a = lflip + alpha * xi - alpha * alpha / 2;
    const double m = std::max(lkeep, a);
    acc += m + std::log(std::exp(lkeep - m) + std::exp(a - m));
  }
  return std::exp(acc);
}

double pca_density(const std::vector<double>& x, long long s_off, double alpha,
                   long long ell) {
  const long long t = static_cast<long long>(x.size());
  if (ell < 1 || s_off < 0 || s_off + ell > t)
    fail(Errc::InvalidParams, "s_off/ell: spike block must lie inside [0, t)");
  if (!(alpha > 0 && alpha < 1))
    fail(Errc::InvalidParams, "alpha: must be in (0, 1)");
  double ss = 0, y = 0;
  for (long long j = 0; j < t; ++j) ss += x[static_cast<std::size_t>(j)] *
                                          x[static_cast<std::size_t>(j)];
  for (long long j = 0; j < ell; ++j) y += x[static_cast<std::size_t>(s_off + j)];
  const double lf0 = -0.5 * (t * std::log(2 * M_PI) + ss);
  const double corr = alpha / (2 * (1 + alpha)) * y * y / static_cast<double>(ell);
  return std::exp(lf0 - 0.5 * std::log1p(alpha) + corr);
}

double pca_density_explicit(const std::vector<double>& x, long long s_off,
                            double alpha, long long ell) {
  const long long t = static_cast<long long>(x.size());
  if (ell < 1 || s_off < 0 || s_off + ell > t)
    fail(Errc::InvalidParams, "s_off/ell: spike block must lie inside [0, t)");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(t, t);
  for (long long a = 0; a < ell; ++a)
    for (long long b = 0; b < ell; ++b)
      sigma(s_off + a, s_off + b) += alpha / static_cast<double>(ell);
  Eigen::VectorXd xv(t);
  for (long long j = 0; j < t; ++j) xv(j) = x[static_cast<std::size_t>(j)];
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  double logdet = 0;
  for (long long j = 0; j < t; ++j) logdet += 2 * std::log(llt.matrixL()(j, j));
  const double quad = xv.dot(llt.solve(xv));
  return std::exp(-0.5 * (t * std::log(2 * M_PI) + logdet + quad));
}

double pca_sigma_det(long long t, long long s_off, double alpha, long long ell) {
  if (ell < 1 || s_off < 0 || s_off + ell > t)
    fail(Errc::InvalidParams, "s_off/ell: spike block must lie inside [0, t)");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(t, t);
  for (long long a = 0; a < ell; ++a)
    for (long long b = 0; b < ell; ++b)
      sigma(s_off + a, s_off + b) += alpha / static_cast<double>(ell);
  return sigma.determinant();
}

double pca_mixture_ratio(const std::vector<double>& x, long long t,
                         long long ell, double alpha) {
  if (static_cast<long long>(x.size()) != t)
    fail(Errc::DimensionMismatch, "x length does not match t");
  if (ell < 1 || t % ell != 0)
    fail(Errc::InvalidParams, "ell: spike blocks must tile the width: ell | t");
  const double coef = alpha / (2 * (1 + alpha));
  std::vector<double> terms;
  for (long long off = 0; off < t; off += ell) {
    double y = 0;
    for (long long j = 0; j < ell; ++j) y += x[static_cast<std::size_t>(off + j)];
    terms.push_back(coef * y * y / static_cast<double>(ell));
  }
  const double blocks = static_cast<double>(t) / static_cast<double>(ell);
  return std::exp(logsumexp(terms) - std::log(blocks) - 0.5 * std::log1p(alpha));
}

namespace {

// One-sided Clopper-Pearson bounds at the given confidence.
double cp_upper(long long hits, long long trials, double confidence) {
  if (hits >= trials) return 1.0;
  boost::math::beta_distribution<double> b(static_cast<double>(hits) + 1,
                                           static_cast<double>(trials - hits));
  return boost::math::quantile(b, confidence);
}

double cp_lower(long long hits, long long trials, double confidence) {
  if (hits <= 0) return 0.0;
  boost::math::beta_distribution<double> b(static_cast<double>(hits),
                                           static_cast<double>(trials - hits) + 1);
  return boost::math::quantile(b, 1 - confidence);
}

}  // namespace

TailEstimate trunc_tail_prob(const TruncationSpec& trunc, long long trials,
                             std::uint64_t seed, double confidence) {
  if (trials < 1000)
    fail(Errc::InvalidParams, "trials: tail estimation needs at least 10^3");

  TailEstimate est;
  est.trials = trials;

  if (trunc.kind == TruncKind::TypicalWeight) {
    // Exact binomial mass outside the window; no Monte Carlo involved.
    using f128 = __float128;
    const long long wlo = trunc.window_lo();
    const long long whi = trunc.window_hi();
    const f128 lg = lgammaq(static_cast<f128>(trunc.t) + 1);
    const f128 lq = logq(static_cast<f128>(trunc.q));
    const f128 l1q = logq(1.0Q - static_cast<f128>(trunc.q));
    f128 tail = 0;
    for (long long w = 0; w <= trunc.t; ++w) {
      if (w >= wlo && w <= whi) continue;
      tail += expq(lg - lgammaq(static_cast<f128>(w) + 1) -
                   lgammaq(static_cast<f128>(trunc.t - w) + 1) +
                   static_cast<f128>(w) * lq +
                   static_cast<f128>(trunc.t - w) * l1q);
    }
    est.p_hat = static_cast<double>(tail);
    est.ci_lo = est.ci_hi = est.p_hat;
    est.exact = true;
    return est;
  }

  RowRng rng(derive_key({seed, kTagScratch}));
  long long hits = 0;
  if (trunc.kind == TruncKind::GaussianExpSum) {
    // Planted block law: mean alpha on the first ell coordinates (the
    // statistic only depends on the multiset of entries).
    std::vector<double> x(static_cast<std::size_t>(trunc.t));
    for (long long it = 0; it < trials; ++it) {
      rng.fill_normal(x.data(), x.size());
      for (long long j = 0; j < trunc.ell; ++j)
        x[static_cast<std::size_t>(j)] += trunc.alpha;
      if (!in_truncation_set(trunc, x)) ++hits;
    }
  } else {
    if (trunc.t % trunc.ell != 0)
      fail(Errc::InvalidParams, "ell: spike blocks must tile the width: ell | t");
    const double spread =
        (std::sqrt(1.0 + trunc.alpha) - 1.0) / static_cast<double>(trunc.ell);
    std::vector<double> x(static_cast<std::size_t>(trunc.t));
    for (long long it = 0; it < trials; ++it) {
      rng.fill_normal(x.data(), x.size());
      double y = 0;
      for (long long j = 0; j < trunc.ell; ++j)
        y += x[static_cast<std::size_t>(j)];
      for (long long j = 0; j < trunc.ell; ++j)
        x[static_cast<std::size_t>(j)] += spread * y;
      if (!in_truncation_set(trunc, x)) ++hits;
    }
  }
  est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  est.ci_lo = cp_lower(hits, trials, confidence);
  est.ci_hi = cp_upper(hits, trials, confidence);
  return est;
}

const char* bound_formula_name(BoundFormula f) {
  switch (f) {
    case BoundFormula::GeneralFramework: return "general_framework";
    case BoundFormula::BicliqueMain: return "biclique_main";
    case BoundFormula::PatternPlanted: return "pattern_planted";
    case BoundFormula::MicBudget: return "mic_budget";
  }
  return "unknown";
}

bool parse_bound_formula(const std::string& s, BoundFormula& out) {
  for (BoundFormula f :
       {BoundFormula::GeneralFramework, BoundFormula::BicliqueMain,
        BoundFormula::PatternPlanted, BoundFormula::MicBudget}) {
    if (s == bound_formula_name(f)) {
      out = f;
      return true;
    }
  }
  return false;
}

BoundPrediction bound_prediction(BoundFormula formula, const BoundInputs& in) {
  if (in.n < 1 || in.m < 1 || in.d < 1 || in.t < 1 || in.k < 1 || in.p < 1 ||
      in.s < 1 || in.q <= 0 || in.c <= 0)
    fail(Errc::InvalidParams, "inputs: all bound inputs must be positive");
  BoundPrediction pred;
  pred.formula = formula;
  pred.inputs = in;
  const double n = static_cast<double>(in.n), m = static_cast<double>(in.m);
  const double d = static_cast<double>(in.d), t = static_cast<double>(in.t);
  const double k = static_cast<double>(in.k), p = static_cast<double>(in.p);
  switch (formula) {
    case BoundFormula::GeneralFramework:
      pred.value_bits = n * d / (p * in.c * k * k * t);
      break;
    case BoundFormula::BicliqueMain:
      pred.value_bits = n * m * in.q / (p * k * k * k * k * std::log2(n * m));
      break;
    case BoundFormula::PatternPlanted:
      pred.value_bits = n * n / (p * k * k * k);
      break;
    case BoundFormula::MicBudget:
      pred.value_bits = 2 * p * static_cast<double>(in.s) * n;
      break;
  }
  return pred;
}

}  // namespace plantlab
