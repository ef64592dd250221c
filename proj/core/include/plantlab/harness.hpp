#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "plantlab/detectors.hpp"
#include "plantlab/problem.hpp"
#include "plantlab/ratios.hpp"
#include "plantlab/stream.hpp"

namespace plantlab {

struct WilsonInterval {
  double lo = 0;
  double hi = 0;
};

// Standard Wilson score interval, clamped to [0, 1].
WilsonInterval wilson_interval(long long successes, long long trials,
                               double confidence);

struct AdvantageReport {
  long long trials = 0;
  long long trials_null = 0;
  long long trials_planted = 0;
  long long correct_null = 0;
  long long correct_planted = 0;
  double acc_null = 0;
  double acc_planted = 0;
  double advantage = 0;            // (acc_null + acc_planted) / 2
  WilsonInterval wilson_ci_99{};   // on pooled correct counts
};

struct MemoryReport {
  long long max_state_bits = 0;        // max over every (trial, pass, row)
  std::vector<long long> per_pass_max; // per-pass maxima
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::string detector;
  std::map<std::string, double> detector_params;
  long long trials = 100;
  long long passes = 1;
  std::uint64_t seed = 1;
  std::string out;
  bool reveal = false;
  bool stratified = true;  // arms alternate exactly T/2 : T/2
  int workers = 1;
  long long adversary_k_prime = -1;  // >= 0 applies the monotone adversary
  double confidence = 0.99;
};

// Builds a fresh detector for one trial. The planted instance is visible so
// that oracle baselines can peek; real detectors must ignore it.
using DetectorFactory = std::function<std::unique_ptr<StreamingDetector>(
    const ProblemSpec& spec, const PlantedInstance& instance,
    std::uint64_t trial_seed)>;

// Looks up a detector by registry name ("edge_count", "partition_weight",
// "coordinate_sum", "block_square", "subset_scan", "constant_null",
// "oracle") with parameters taken from the map (missing entries fall back
// to values derived from the problem spec). Unknown names throw
// Error{IncompatibleDetector}.
DetectorFactory detector_factory(const std::string& name,
                                 const std::map<std::string, double>& params);

// Feeds every row in order `passes` times; state carries across pass
// boundaries unchanged, and the verdict is read only after the final pass.
// State bits are checkpointed after every absorbed row.
std::pair<Verdict, MemoryReport> multi_pass_run(StreamingDetector& det,
                                                StreamSource& source,
                                                long long passes);

// Runs config.trials independent trials: per trial, the arm (stratified by
// trial parity or drawn from the trial key), a derived seed, a fresh stream
// and detector, and a multi-pass run. Any trial error aborts the whole set.
// Reports aggregate both arms separately; trial order cannot matter because
// every trial's randomness is derived from (config.seed, trial index).
std::pair<AdvantageReport, MemoryReport> run_trials(
    const ExperimentConfig& config);
std::pair<AdvantageReport, MemoryReport> run_trials(
    const ExperimentConfig& config, const DetectorFactory& factory);

// Juxtaposes measured state bits with a bound-formula value. Reporting
// only: lower-bound formulas constrain all algorithms, so no pass/fail
// semantics attach to a single detector's numbers.
struct BoundComparison {
  double measured_bits = 0;
  double predicted_bits = 0;
  std::string ratio;  // measured/predicted, or "inf" when predicted == 0
};

BoundComparison compare_to_bound(const MemoryReport& mem,
                                 const BoundPrediction& pred);

}  // namespace plantlab
