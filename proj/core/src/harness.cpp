#include "plantlab/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <optional>

#include "plantlab/errors.hpp"
#include "plantlab/rng.hpp"

namespace plantlab {

WilsonInterval wilson_interval(long long successes, long long trials,
                               double confidence) {
  if (trials < 0 || successes < 0 || successes > trials)
    fail(Errc::InvalidParams, "successes: must satisfy 0 <= h <= trials");
  if (!(confidence > 0 && confidence < 1))
    fail(Errc::InvalidParams, "confidence: must be in (0, 1)");
  if (trials == 0) return {0, 1};
  const boost::math::normal_distribution<double> nd;
  const double z = boost::math::quantile(nd, (1 + confidence) / 2);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::clamp(center - half, 0.0, 1.0),
          std::clamp(center + half, 0.0, 1.0)};
}

namespace {

double get_param(const std::map<std::string, double>& m, const std::string& key,
                 double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

long long get_count(const std::map<std::string, double>& m,
                    const std::string& key, long long fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : std::llround(it->second);
}

void check_keys(const std::map<std::string, double>& m,
                std::initializer_list<const char*> allowed,
                const std::string& detector) {
  for (const auto& [key, value] : m) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      fail(Errc::ConfigError,
           "unknown parameter '" + key + "' for detector " + detector);
  }
}

}  // namespace

DetectorFactory detector_factory(const std::string& name,
                                 const std::map<std::string, double>& params) {
  if (name == "edge_count") {
    check_keys(params, {"m", "n", "q", "k"}, name);
    return [params](const ProblemSpec& spec, const PlantedInstance&,
                    std::uint64_t) {
      return edge_count_detector(
          get_count(params, "m", spec.m), get_count(params, "n", spec.n),
          get_param(params, "q", spec.q), get_count(params, "k", spec.k));
    };
  }
  if (name == "partition_weight") {
    check_keys(params, {"t", "q", "C", "nm_context", "margin"}, name);
    return [params](const ProblemSpec& spec, const PlantedInstance&,
                    std::uint64_t) {
      const double q = get_param(params, "q", spec.q);
      const double margin_default =
          static_cast<double>(spec.k) * (1 - q) / 2;
      return partition_weight_detector(
          get_count(params, "t", spec.t), q, get_param(params, "C", 20.0),
          get_param(params, "nm_context",
                    static_cast<double>(spec.n) * static_cast<double>(spec.m)),
          get_param(params, "margin", margin_default));
    };
  }
  if (name == "coordinate_sum") {
    check_keys(params, {"d", "n", "q", "ell", "alpha"}, name);
    return [params](const ProblemSpec& spec, const PlantedInstance&,
                    std::uint64_t) {
      return coordinate_sum_detector(
          get_count(params, "d", spec.d), get_count(params, "n", spec.n),
          get_param(params, "q", spec.q), get_count(params, "ell", spec.ell),
          get_param(params, "alpha", spec.alpha));
    };
  }
  if (name == "block_square") {
    check_keys(params, {"d", "ell", "alpha", "n"}, name);
    return [params](const ProblemSpec& spec, const PlantedInstance&,
                    std::uint64_t) {
      return block_square_detector(
          get_count(params, "d", spec.d), get_count(params, "ell", spec.ell),
          get_param(params, "alpha", spec.alpha), get_count(params, "n", spec.n));
    };
  }
  if (name == "subset_scan") {
    check_keys(params,
               {"s1", "s2", "delta", "restarts", "iterations", "mode",
                "r_cols"},
               name);
    return [params](const ProblemSpec& spec, const PlantedInstance&,
                    std::uint64_t trial_seed) {
      SubsetScanParams p;
      p.s1 = get_count(params, "s1", spec.ell);
      p.s2 = get_count(params, "s2", spec.ell);
      p.delta = get_param(params, "delta", 0.1);
      p.restarts = static_cast<int>(get_count(params, "restarts", 32));
      p.iterations = static_cast<int>(get_count(params, "iterations", 3));
      switch (get_count(params, "mode", 0)) {
        case 0: p.mode = SubsetScanParams::Mode::Auto; break;
        case 1: p.mode = SubsetScanParams::Mode::Exact; break;
        case 2: p.mode = SubsetScanParams::Mode::Heuristic; break;
        default:
          fail(Errc::ConfigError, "mode: 0 = auto, 1 = exact, 2 = heuristic");
      }
      const long long r = get_count(params, "r_cols", 0);
      if (r < 0) fail(Errc::ConfigError, "r_cols: must be >= 0");
      for (long long c = 0; c < r; ++c) p.r_cols.push_back(c);
      return subset_scan_detector(spec.rows(), p, trial_seed);
    };
  }
  if (name == "constant_null") {
    check_keys(params, {}, name);
    return [](const ProblemSpec&, const PlantedInstance&, std::uint64_t) {
      return constant_detector(Arm::Null);
    };
  }
  if (name == "oracle") {
    check_keys(params, {}, name);
    return [](const ProblemSpec&, const PlantedInstance& instance,
              std::uint64_t) { return constant_detector(instance.arm); };
  }
  fail(Errc::IncompatibleDetector, "unknown detector name: " + name);
}

std::pair<Verdict, MemoryReport> multi_pass_run(StreamingDetector& det,
                                                StreamSource& source,
                                                long long passes) {
  if (passes < 1) fail(Errc::InvalidParams, "passes: must be >= 1");
  det.reset();
  MemoryReport mem;
  mem.per_pass_max.assign(static_cast<std::size_t>(passes), 0);
  Row row;
  for (long long pass = 0; pass < passes; ++pass) {
    source.rewind();
    long long& pass_max = mem.per_pass_max[static_cast<std::size_t>(pass)];
    while (source.next(row)) {
      det.absorb(row);
      const long long bits = det.state().bits;
      pass_max = std::max(pass_max, bits);
      mem.max_state_bits = std::max(mem.max_state_bits, bits);
    }
    det.end_pass();
  }
  return {det.verdict(), mem};
}

std::pair<AdvantageReport, MemoryReport> run_trials(
    const ExperimentConfig& config, const DetectorFactory& factory) {
  if (config.trials < 1) fail(Errc::InvalidParams, "trials: must be >= 1");
  if (config.passes < 1) fail(Errc::InvalidParams, "passes: must be >= 1");
  if (config.workers < 1) fail(Errc::InvalidParams, "workers: must be >= 1");
  config.problem.validate();

  AdvantageReport rep;
  MemoryReport mem;
  mem.per_pass_max.assign(static_cast<std::size_t>(config.passes), 0);

  std::optional<TruncationSpec> trunc;
  if (config.problem.kind == ProblemKind::PartitionBiclique)
    trunc = TruncationSpec::from(config.problem, TruncKind::TypicalWeight);

  for (long long idx = 0; idx < config.trials; ++idx) {
    const std::uint64_t trial_seed =
        derive_key({config.seed, kTagTrial, static_cast<std::uint64_t>(idx)});
    Arm arm;
    if (config.stratified) {
      arm = idx % 2 == 0 ? Arm::Null : Arm::Planted;
    } else {
      RowRng coin(derive_key({trial_seed, kTagArm}));
      arm = coin.unit() < 0.5 ? Arm::Null : Arm::Planted;
    }

    StreamHandle handle = make_stream(config.problem, arm, trial_seed, trunc);
    std::unique_ptr<StreamSource> src = std::move(handle.source);
    if (config.adversary_k_prime >= 0)
      src = apply_monotone_adversary(std::move(src), handle.instance,
                                     config.adversary_k_prime);

    auto det = factory(config.problem, handle.instance, trial_seed);
    auto [verdict, trial_mem] = multi_pass_run(*det, *src, config.passes);

    const bool correct = verdict.decision == arm;
    if (arm == Arm::Null) {
      ++rep.trials_null;
      rep.correct_null += correct;
    } else {
      ++rep.trials_planted;
      rep.correct_planted += correct;
    }
    mem.max_state_bits = std::max(mem.max_state_bits, trial_mem.max_state_bits);
    for (std::size_t p = 0; p < mem.per_pass_max.size(); ++p)
      mem.per_pass_max[p] =
          std::max(mem.per_pass_max[p], trial_mem.per_pass_max[p]);
  }

  rep.trials = config.trials;
  rep.acc_null = rep.trials_null
                     ? static_cast<double>(rep.correct_null) /
                           static_cast<double>(rep.trials_null)
                     : 0.0;
  rep.acc_planted = rep.trials_planted
                        ? static_cast<double>(rep.correct_planted) /
                              static_cast<double>(rep.trials_planted)
                        : 0.0;
  rep.advantage = (rep.acc_null + rep.acc_planted) / 2;
  rep.wilson_ci_99 = wilson_interval(rep.correct_null + rep.correct_planted,
                                     rep.trials, config.confidence);
  return {rep, mem};
}

std::pair<AdvantageReport, MemoryReport> run_trials(
    const ExperimentConfig& config) {
  return run_trials(config,
                    detector_factory(config.detector, config.detector_params));
}

BoundComparison compare_to_bound(const MemoryReport& mem,
                                 const BoundPrediction& pred) {
  BoundComparison cmp;
  cmp.measured_bits = static_cast<double>(mem.max_state_bits);
  cmp.predicted_bits = pred.value_bits;
  if (pred.value_bits <= 0) {
    cmp.ratio = "inf";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g",
                  cmp.measured_bits / cmp.predicted_bits);
    cmp.ratio = buf;
  }
  return cmp;
}

}  // namespace plantlab
