#include "plantlab/config.hpp"

#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

#include "plantlab/errors.hpp"

namespace plantlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Tracks which keys the schema consumed so leftovers can be reported.
class KvReader {
 public:
  explicit KvReader(std::map<std::string, std::string> kv)
      : kv_(std::move(kv)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }

  long long take_ll(const std::string& key, long long fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      const long long out = std::stoll(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return out;
    } catch (const std::exception&) {
      fail(Errc::ConfigError, "key '" + key + "': not an integer: " + *v);
    }
  }

  std::uint64_t take_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      const std::uint64_t out = std::stoull(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return out;
    } catch (const std::exception&) {
      fail(Errc::ConfigError,
           "key '" + key + "': not an unsigned integer: " + *v);
    }
  }

  double take_double(const std::string& key, double fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    return to_double(key, *v);
  }

  bool take_bool(const std::string& key, bool fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    fail(Errc::ConfigError, "key '" + key + "': expected true or false: " + *v);
  }

  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double out = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return out;
    } catch (const std::exception&) {
      fail(Errc::ConfigError, "key '" + key + "': not a number: " + v);
    }
  }

  // Removes and returns every key with the given prefix.
  std::map<std::string, std::string> take_prefixed(const std::string& prefix) {
    std::map<std::string, std::string> out;
    for (auto it = kv_.begin(); it != kv_.end();) {
      if (it->first.rfind(prefix, 0) == 0) {
        out.emplace(it->first.substr(prefix.size()), it->second);
        it = kv_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  void expect_empty() const {
    if (kv_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : kv_) {
      (void)v;
      if (!keys.empty()) keys += ", ";
      keys += k;
    }
    fail(Errc::ConfigError, "unknown keys: " + keys);
  }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  long long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(Errc::ConfigError,
           "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      fail(Errc::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      fail(Errc::ConfigError, "duplicate key: " + key);
  }
  return kv;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  KvReader kv(parse_kv_text(text));
  ExperimentConfig cfg;

  const auto kind = kv.take("kind");
  if (!kind) fail(Errc::ConfigError, "missing required key: kind");
  if (!parse_problem_kind(*kind, cfg.problem.kind))
    fail(Errc::ConfigError, "unknown problem kind: " + *kind);

  cfg.problem.n = kv.take_ll("n", cfg.problem.n);
  cfg.problem.m = kv.take_ll("m", cfg.problem.m);
  cfg.problem.d = kv.take_ll("d", cfg.problem.d);
  cfg.problem.t = kv.take_ll("t", cfg.problem.t);
  cfg.problem.k = kv.take_ll("k", cfg.problem.k);
  cfg.problem.ell = kv.take_ll("ell", cfg.problem.ell);
  cfg.problem.q = kv.take_double("q", cfg.problem.q);
  cfg.problem.alpha = kv.take_double("alpha", cfg.problem.alpha);
  cfg.problem.beta = kv.take_ll("beta", cfg.problem.beta);
  if (const auto mode = kv.take("row_mode")) {
    if (*mode == "exact_k")
      cfg.problem.row_mode = RowMode::ExactK;
    else if (*mode == "iid_q")
      cfg.problem.row_mode = RowMode::IidQ;
    else
      fail(Errc::ConfigError, "row_mode: expected exact_k or iid_q: " + *mode);
  }

  if (const auto det = kv.take("detector")) cfg.detector = *det;
  for (const auto& [key, value] : kv.take_prefixed("detector."))
    cfg.detector_params[key] = KvReader::to_double("detector." + key, value);

  cfg.trials = kv.take_ll("trials", cfg.trials);
  cfg.passes = kv.take_ll("passes", cfg.passes);
  cfg.seed = kv.take_u64("seed", cfg.seed);
  if (const auto out = kv.take("out")) cfg.out = *out;
  cfg.reveal = kv.take_bool("reveal", cfg.reveal);
  cfg.stratified = kv.take_bool("stratified", cfg.stratified);
  cfg.workers = static_cast<int>(kv.take_ll("workers", cfg.workers));
  cfg.adversary_k_prime =
      kv.take_ll("adversary_k_prime", cfg.adversary_k_prime);
  cfg.confidence = kv.take_double("confidence", cfg.confidence);

  kv.expect_empty();
  return cfg;
}

std::string write_experiment_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "kind = " << problem_kind_name(config.problem.kind) << "\n";
  out << "n = " << config.problem.n << "\n";
  out << "m = " << config.problem.m << "\n";
  out << "d = " << config.problem.d << "\n";
  out << "t = " << config.problem.t << "\n";
  out << "k = " << config.problem.k << "\n";
  out << "ell = " << config.problem.ell << "\n";
  out << "q = " << fmt_double(config.problem.q) << "\n";
  out << "alpha = " << fmt_double(config.problem.alpha) << "\n";
  out << "beta = " << config.problem.beta << "\n";
  out << "row_mode = "
      << (config.problem.row_mode == RowMode::ExactK ? "exact_k" : "iid_q")
      << "\n";
  out << "detector = " << config.detector << "\n";
  for (const auto& [key, value] : config.detector_params)
    out << "detector." << key << " = " << fmt_double(value) << "\n";
  out << "trials = " << config.trials << "\n";
  out << "passes = " << config.passes << "\n";
  out << "seed = " << config.seed << "\n";
  out << "out = " << config.out << "\n";
  out << "reveal = " << (config.reveal ? "true" : "false") << "\n";
  out << "stratified = " << (config.stratified ? "true" : "false") << "\n";
  out << "workers = " << config.workers << "\n";
  out << "adversary_k_prime = " << config.adversary_k_prime << "\n";
  out << "confidence = " << fmt_double(config.confidence) << "\n";
  return out.str();
}

}  // namespace plantlab
