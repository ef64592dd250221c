// plantlab — command-line front end for the streaming testbed.
//
// Subcommands:
//   gen         draw one stream instance and write it to a binary file
//   detect      run one detector over a stream file and print the verdict
//   trials      run repeated null/planted trials and print the advantage
//   divergence  exact binomial-vs-Gaussian divergence table for one n
//   bound       evaluate a memory-bound formula
//   report      trials plus bound-formula comparison
//
// Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plantlab/config.hpp"
#include "plantlab/divergence.hpp"
#include "plantlab/errors.hpp"
#include "plantlab/harness.hpp"
#include "plantlab/ratios.hpp"
#include "plantlab/rng.hpp"
#include "plantlab/stream.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace plantlab;

constexpr char kMagic[8] = {'P', 'L', 'A', 'N', 'T', 'L', 'B', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

std::string fd(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open for writing: " + out_path);
  out << text;
  if (!out) fail(Errc::IoError, "short write: " + out_path);
}

// ---------------------------------------------------------------------------
// Stream file format (host little-endian):
//   8-byte magic, u32 version, u32 kind, i64 n m d t k ell beta,
//   f64 q alpha, u32 row_mode, u64 seed, i64 rows, i64 cols, u32 binary,
// then the rows: binary rows are bit-packed LSB-first into ceil(cols/8)
// bytes; real rows are cols f64 values.
// ---------------------------------------------------------------------------

class Packer {
 public:
  explicit Packer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }

 private:
  std::ostream& out_;
};

class Unpacker {
 public:
  explicit Unpacker(std::istream& in, const std::string& path)
      : in_(in), path_(path) {}
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in_) fail(Errc::IoError, "truncated stream file: " + path_);
    return v;
  }

 private:
  std::istream& in_;
  const std::string& path_;
};

void write_stream_file(const std::string& path, StreamSource& src) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open for writing: " + path);
  Packer p(out);
  out.write(kMagic, 8);
  const ProblemSpec& spec = src.spec();
  p.put(kFormatVersion);
  p.put(static_cast<std::uint32_t>(spec.kind));
  for (long long v : {spec.n, spec.m, spec.d, spec.t, spec.k, spec.ell,
                      spec.beta})
    p.put(static_cast<std::int64_t>(v));
  p.put(spec.q);
  p.put(spec.alpha);
  p.put(static_cast<std::uint32_t>(spec.row_mode));
  p.put(src.seed());
  p.put(static_cast<std::int64_t>(src.rows()));
  p.put(static_cast<std::int64_t>(src.cols()));
  p.put(static_cast<std::uint32_t>(src.binary() ? 1 : 0));

  Row row;
  src.rewind();
  const long long cols = src.cols();
  std::vector<std::uint8_t> packed(static_cast<std::size_t>((cols + 7) / 8));
  while (src.next(row)) {
    if (src.binary()) {
      std::fill(packed.begin(), packed.end(), 0);
      for (long long j = 0; j < cols; ++j)
        if (row.bits[static_cast<std::size_t>(j)])
          packed[static_cast<std::size_t>(j >> 3)] |=
              static_cast<std::uint8_t>(1u << (j & 7));
      out.write(reinterpret_cast<const char*>(packed.data()),
                static_cast<std::streamsize>(packed.size()));
    } else {
      out.write(reinterpret_cast<const char*>(row.reals.data()),
                static_cast<std::streamsize>(row.reals.size() * sizeof(double)));
    }
  }
  if (!out) fail(Errc::IoError, "short write: " + path);
}

// Replays a stream file through the StreamSource interface.
class StoredStream final : public StreamSource {
 public:
  StoredStream(const ProblemSpec& spec, std::uint64_t seed,
               std::vector<std::vector<std::uint8_t>> bit_rows,
               std::vector<std::vector<double>> real_rows)
      : StreamSource(spec, seed),
        bit_rows_(std::move(bit_rows)),
        real_rows_(std::move(real_rows)) {}

  void fill_row(long long i, Row& out) const override {
    out.index = i;
    out.binary = spec_.binary();
    if (out.binary) {
      out.bits = bit_rows_[static_cast<std::size_t>(i)];
      out.reals.clear();
    } else {
      out.reals = real_rows_[static_cast<std::size_t>(i)];
      out.bits.clear();
    }
  }

 private:
  std::vector<std::vector<std::uint8_t>> bit_rows_;
  std::vector<std::vector<double>> real_rows_;
};

std::unique_ptr<StoredStream> read_stream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open for reading: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    fail(Errc::IoError, "not a plantlab stream file: " + path);
  Unpacker u(in, path);
  if (u.get<std::uint32_t>() != kFormatVersion)
    fail(Errc::IoError, "unsupported stream file version: " + path);
  ProblemSpec spec;
  spec.kind = static_cast<ProblemKind>(u.get<std::uint32_t>());
  spec.n = u.get<std::int64_t>();
  spec.m = u.get<std::int64_t>();
  spec.d = u.get<std::int64_t>();
  spec.t = u.get<std::int64_t>();
  spec.k = u.get<std::int64_t>();
  spec.ell = u.get<std::int64_t>();
  spec.beta = u.get<std::int64_t>();
  spec.q = u.get<double>();
  spec.alpha = u.get<double>();
  spec.row_mode = static_cast<RowMode>(u.get<std::uint32_t>());
  const std::uint64_t seed = u.get<std::uint64_t>();
  const long long rows = u.get<std::int64_t>();
  const long long cols = u.get<std::int64_t>();
  const bool binary = u.get<std::uint32_t>() != 0;
  spec.validate();
  if (rows != spec.rows() || cols != spec.cols() || binary != spec.binary())
    fail(Errc::IoError, "stream file shape disagrees with its spec: " + path);

  std::vector<std::vector<std::uint8_t>> bit_rows;
  std::vector<std::vector<double>> real_rows;
  if (binary) {
    std::vector<std::uint8_t> packed(static_cast<std::size_t>((cols + 7) / 8));
    bit_rows.reserve(static_cast<std::size_t>(rows));
    for (long long i = 0; i < rows; ++i) {
      in.read(reinterpret_cast<char*>(packed.data()),
              static_cast<std::streamsize>(packed.size()));
      if (!in) fail(Errc::IoError, "truncated stream file: " + path);
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(cols));
      for (long long j = 0; j < cols; ++j)
        bits[static_cast<std::size_t>(j)] =
            (packed[static_cast<std::size_t>(j >> 3)] >> (j & 7)) & 1u;
      bit_rows.push_back(std::move(bits));
    }
  } else {
    real_rows.reserve(static_cast<std::size_t>(rows));
    for (long long i = 0; i < rows; ++i) {
      std::vector<double> reals(static_cast<std::size_t>(cols));
      in.read(reinterpret_cast<char*>(reals.data()),
              static_cast<std::streamsize>(reals.size() * sizeof(double)));
      if (!in) fail(Errc::IoError, "truncated stream file: " + path);
      real_rows.push_back(std::move(reals));
    }
  }
  return std::make_unique<StoredStream>(spec, seed, std::move(bit_rows),
                                        std::move(real_rows));
}

std::optional<TruncationSpec> default_trunc(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::PartitionBiclique)
    return TruncationSpec::from(spec, TruncKind::TypicalWeight);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Record rendering
// ---------------------------------------------------------------------------

std::string params_field(const std::map<std::string, double>& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ';';
    s += k + '=' + fd(v);
  }
  return s;
}

std::string render_verdict(const std::string& format,
                           const std::string& detector,
                           const std::map<std::string, double>& params,
                           const Verdict& verdict, const MemoryReport& mem,
                           long long passes) {
  if (format == "json") {
    json j;
    j["detector"] = detector;
    j["params"] = json::object();
    for (const auto& [k, v] : params) j["params"][k] = v;
    j["statistic"] = verdict.statistic;
    j["threshold"] = verdict.threshold;
    j["decision"] = arm_name(verdict.decision);
    j["max_state_bits"] = mem.max_state_bits;
    j["passes"] = passes;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "detector,params,statistic,threshold,decision,max_state_bits,passes\n";
  out << detector << ',' << params_field(params) << ','
      << fd(verdict.statistic) << ',' << fd(verdict.threshold) << ','
      << arm_name(verdict.decision) << ',' << mem.max_state_bits << ','
      << passes << "\n";
  return out.str();
}

std::string render_trials(const std::string& format,
                          const ExperimentConfig& cfg,
                          const AdvantageReport& rep,
                          const MemoryReport& mem) {
  if (format == "json") {
    json j;
    j["detector"] = cfg.detector;
    j["kind"] = problem_kind_name(cfg.problem.kind);
    j["trials"] = rep.trials;
    j["passes"] = cfg.passes;
    j["acc_null"] = rep.acc_null;
    j["acc_planted"] = rep.acc_planted;
    j["advantage"] = rep.advantage;
    j["wilson_lo"] = rep.wilson_ci_99.lo;
    j["wilson_hi"] = rep.wilson_ci_99.hi;
    j["max_state_bits"] = mem.max_state_bits;
    j["per_pass_max"] = mem.per_pass_max;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "detector,kind,trials,passes,acc_null,acc_planted,advantage,"
         "wilson_lo,wilson_hi,max_state_bits\n";
  out << cfg.detector << ',' << problem_kind_name(cfg.problem.kind) << ','
      << rep.trials << ',' << cfg.passes << ',' << fd(rep.acc_null) << ','
      << fd(rep.acc_planted) << ',' << fd(rep.advantage) << ','
      << fd(rep.wilson_ci_99.lo) << ',' << fd(rep.wilson_ci_99.hi) << ','
      << mem.max_state_bits << "\n";
  return out.str();
}

BoundInputs bound_inputs_from(const ProblemSpec& spec, long long passes) {
  BoundInputs in;
  in.n = std::max<long long>(1, spec.n > 0 ? spec.n : spec.rows());
  in.m = std::max<long long>(1, spec.m);
  in.d = std::max<long long>(1, spec.d > 0 ? spec.d : spec.cols());
  in.t = std::max<long long>(1, spec.t > 0 ? spec.t : spec.cols());
  in.k = std::max<long long>(1, spec.k);
  in.p = std::max<long long>(1, passes);
  in.s = 1;
  in.q = spec.q > 0 ? spec.q : 0.5;
  in.c = 1.0;
  return in;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  long long trials = 0;
  long long passes = 0;
  int workers = 0;
  bool reveal = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* passes_opt = nullptr;
  CLI::Option* workers_opt = nullptr;

  ExperimentConfig load() const {
    ExperimentConfig cfg = parse_experiment_config(read_file(config_path));
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    if (trials_opt && trials_opt->count()) cfg.trials = trials;
    if (passes_opt && passes_opt->count()) cfg.passes = passes;
    if (workers_opt && workers_opt->count()) cfg.workers = workers;
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_run_flags) {
  cmd->add_option("--config", f.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out_path, "output path (default: stdout)");
  f.seed_opt = cmd->add_option("--seed", f.seed, "override the config seed");
  if (with_run_flags) {
    f.trials_opt =
        cmd->add_option("--trials", f.trials, "override the trial count");
    f.passes_opt =
        cmd->add_option("--passes", f.passes, "override the pass count");
    f.workers_opt =
        cmd->add_option("--workers", f.workers, "override the worker count");
    cmd->add_option("--format", f.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

int run_gen(const CommonFlags& f) {
  ExperimentConfig cfg = f.load();
  cfg.problem.validate();
  RowRng coin(derive_key({cfg.seed, kTagArm}));
  const Arm arm = coin.unit() < 0.5 ? Arm::Null : Arm::Planted;
  StreamHandle handle =
      make_stream(cfg.problem, arm, cfg.seed, default_trunc(cfg.problem));
  std::unique_ptr<StreamSource> src = std::move(handle.source);
  if (cfg.adversary_k_prime >= 0)
    src = apply_monotone_adversary(std::move(src), handle.instance,
                                   cfg.adversary_k_prime);
  if (f.out_path.empty())
    fail(Errc::ConfigError, "gen: --out is required (binary stream file)");
  write_stream_file(f.out_path, *src);
  if (f.reveal || cfg.reveal) {
    json j;
    j["arm"] = arm_name(handle.instance.arm);
    j["S"] = handle.instance.S;
    j["R"] = handle.instance.R;
    j["v"] = handle.instance.v;
    j["r"] = handle.instance.r;
    std::ofstream side(f.out_path + ".reveal.json", std::ios::binary);
    if (!side) fail(Errc::IoError, "cannot write sidecar");
    side << j.dump(2) << "\n";
  }
  std::cout << "wrote " << f.out_path << ": " << src->rows() << " x "
            << src->cols() << (src->binary() ? " binary" : " real")
            << " rows\n";
  return 0;
}

int run_detect(const CommonFlags& f, const std::string& in_path) {
  ExperimentConfig cfg = f.load();
  auto src = read_stream_file(in_path);
  const DetectorFactory factory =
      detector_factory(cfg.detector, cfg.detector_params);
  auto det = factory(src->spec(), PlantedInstance{}, cfg.seed);
  const auto [verdict, mem] = multi_pass_run(*det, *src, cfg.passes);
  write_output(f.out_path, render_verdict(f.format, cfg.detector,
                                          cfg.detector_params, verdict, mem,
                                          cfg.passes));
  return 0;
}

int run_trials_cmd(const CommonFlags& f) {
  ExperimentConfig cfg = f.load();
  const auto [rep, mem] = run_trials(cfg);
  const std::string target = !f.out_path.empty() ? f.out_path : cfg.out;
  write_output(target, render_trials(f.format, cfg, rep, mem));
  return 0;
}

int run_divergence(long long n, double mult, double zmax,
                   const std::string& format, const std::string& out_path) {
  const KlScanRow scan = kl_binomial_gaussian_scan({n}).front();
  const Pmf p = binomial_pmf(n);
  const Pmf g = discretized_gaussian_pmf(n, 0, n);
  const DivergenceResult div = divergences(p, g);
  const double e1 = edgeworth_max_error(n, 1, zmax);
  const double e2 = edgeworth_max_error(n, 2, zmax);
  const TailSplit split = central_tail_split(n, mult);
  if (format == "json") {
    json j;
    j["n"] = n;
    j["kl_bits"] = scan.kl_bits;
    j["kl_normalized"] = scan.normalized;
    j["tv"] = div.tv;
    j["hellinger"] = div.hellinger;
    j["edgeworth_err1"] = e1;
    j["edgeworth_err2"] = e2;
    j["central_mass"] = split.central;
    j["log2_tail"] = split.log2_tail;
    write_output(out_path, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream out;
  out << "n,kl_bits,kl_normalized,tv,hellinger,edgeworth_err1,edgeworth_err2,"
         "central_mass,log2_tail\n";
  out << n << ',' << fd(scan.kl_bits) << ',' << fd(scan.normalized) << ','
      << fd(div.tv) << ',' << fd(div.hellinger) << ',' << fd(e1) << ','
      << fd(e2) << ',' << fd(split.central) << ',' << fd(split.log2_tail)
      << "\n";
  write_output(out_path, out.str());
  return 0;
}

int run_bound(const std::string& formula_name, const BoundInputs& in,
              const std::string& format, const std::string& out_path) {
  BoundFormula formula;
  if (!parse_bound_formula(formula_name, formula))
    fail(Errc::ConfigError, "unknown bound formula: " + formula_name);
  const BoundPrediction pred = bound_prediction(formula, in);
  if (format == "json") {
    json j;
    j["formula"] = formula_name;
    j["n"] = in.n;
    j["m"] = in.m;
    j["d"] = in.d;
    j["t"] = in.t;
    j["k"] = in.k;
    j["p"] = in.p;
    j["s"] = in.s;
    j["q"] = in.q;
    j["c"] = in.c;
    j["value_bits"] = pred.value_bits;
    write_output(out_path, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream out;
  out << "formula,n,m,d,t,k,p,s,q,c,value_bits\n";
  out << formula_name << ',' << in.n << ',' << in.m << ',' << in.d << ','
      << in.t << ',' << in.k << ',' << in.p << ',' << in.s << ',' << fd(in.q)
      << ',' << fd(in.c) << ',' << fd(pred.value_bits) << "\n";
  write_output(out_path, out.str());
  return 0;
}

int run_report(const CommonFlags& f) {
  ExperimentConfig cfg = f.load();
  const auto [rep, mem] = run_trials(cfg);
  const BoundInputs in = bound_inputs_from(cfg.problem, cfg.passes);
  const BoundFormula formulas[] = {
      BoundFormula::GeneralFramework, BoundFormula::BicliqueMain,
      BoundFormula::PatternPlanted, BoundFormula::MicBudget};
  if (f.format == "json") {
    json j;
    j["trials"] = json::parse(render_trials("json", cfg, rep, mem));
    j["bounds"] = json::array();
    for (BoundFormula formula : formulas) {
      const BoundPrediction pred = bound_prediction(formula, in);
      const BoundComparison cmp = compare_to_bound(mem, pred);
      json b;
      b["formula"] = bound_formula_name(formula);
      b["predicted_bits"] = cmp.predicted_bits;
      b["measured_bits"] = cmp.measured_bits;
      b["ratio"] = cmp.ratio;
      j["bounds"].push_back(b);
    }
    const std::string target = !f.out_path.empty() ? f.out_path : cfg.out;
    write_output(target, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream out;
  out << "formula,predicted_bits,measured_bits,ratio,advantage,wilson_lo,"
         "wilson_hi,trials,passes\n";
  for (BoundFormula formula : formulas) {
    const BoundPrediction pred = bound_prediction(formula, in);
    const BoundComparison cmp = compare_to_bound(mem, pred);
    out << bound_formula_name(formula) << ',' << fd(cmp.predicted_bits) << ','
        << fd(cmp.measured_bits) << ',' << cmp.ratio << ','
        << fd(rep.advantage) << ',' << fd(rep.wilson_ci_99.lo) << ','
        << fd(rep.wilson_ci_99.hi) << ',' << rep.trials << ',' << cfg.passes
        << "\n";
  }
  const std::string target = !f.out_path.empty() ? f.out_path : cfg.out;
  write_output(target, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "plantlab: memory-metered streaming testbed for planted-structure "
      "distinguishing problems"};
  app.require_subcommand(1);

  CommonFlags gen_f, detect_f, trials_f, report_f;
  std::string detect_in;
  long long div_n = 256;
  double div_mult = 10.0, div_zmax = 3.0;
  std::string div_format = "csv", div_out;
  std::string bound_formula, bound_format = "csv", bound_out;
  BoundInputs bound_in;

  auto* gen = app.add_subcommand("gen", "write one stream instance to a file");
  add_common(gen, gen_f, false);
  gen->add_flag("--reveal", gen_f.reveal,
                "write the planted structure sidecar next to the stream");

  auto* detect =
      app.add_subcommand("detect", "run one detector over a stream file");
  detect->add_option("input", detect_in, "stream file written by gen")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(detect, detect_f, true);

  auto* trials = app.add_subcommand(
      "trials", "run repeated null/planted trials and report the advantage");
  add_common(trials, trials_f, true);

  auto* divergence = app.add_subcommand(
      "divergence", "exact binomial-vs-Gaussian divergence table");
  divergence->add_option("--n", div_n, "number of fair coins")
      ->required()
      ->check(CLI::Range(16LL, 100000000LL));
  divergence->add_option("--mult", div_mult, "tail window multiplier");
  divergence->add_option("--zmax", div_zmax, "Edgeworth comparison range");
  divergence->add_option("--format", div_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  divergence->add_option("--out", div_out, "output path (default: stdout)");

  auto* bound =
      app.add_subcommand("bound", "evaluate a memory-bound formula");
  bound->add_option("--formula", bound_formula,
                    "general_framework | biclique_main | pattern_planted | "
                    "mic_budget")
      ->required();
  bound->add_option("--n", bound_in.n, "sample / vertex count");
  bound->add_option("--m", bound_in.m, "row count");
  bound->add_option("--d", bound_in.d, "dimension");
  bound->add_option("--t", bound_in.t, "block width");
  bound->add_option("--k", bound_in.k, "plant size");
  bound->add_option("--p", bound_in.p, "pass count");
  bound->add_option("--s", bound_in.s, "budget size parameter");
  bound->add_option("--q", bound_in.q, "edge probability");
  bound->add_option("--c", bound_in.c, "framework constant");
  bound->add_option("--format", bound_format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  bound->add_option("--out", bound_out, "output path (default: stdout)");

  auto* report = app.add_subcommand(
      "report", "trials plus bound-formula comparison");
  add_common(report, report_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_f);
    if (detect->parsed()) return run_detect(detect_f, detect_in);
    if (trials->parsed()) return run_trials_cmd(trials_f);
    if (divergence->parsed())
      return run_divergence(div_n, div_mult, div_zmax, div_format, div_out);
    if (bound->parsed())
      return run_bound(bound_formula, bound_in, bound_format, bound_out);
    if (report->parsed()) return run_report(report_f);
  } catch (const plantlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::ConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
