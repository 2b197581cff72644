#include "uquant/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uquant/asymptotics.hpp"
#include "uquant/bahadur.hpp"
#include "uquant/empirical.hpp"
#include "uquant/errors.hpp"
#include "uquant/kernels.hpp"
#include "uquant/math_util.hpp"
#include "uquant/processes.hpp"
#include "uquant/rng.hpp"
#include "uquant/serialize.hpp"
#include "uquant/version.hpp"

namespace uquant {

namespace {

constexpr const char* kCommands[] = {"gen",      "estimate", "rate-study",
                                     "coverage", "lil",      "selftest"};

bool known_command(const std::string& c) {
  return std::find(std::begin(kCommands), std::end(kCommands), c) != std::end(kCommands);
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t parse_count(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    require(pos == s.size(), "UsageError", std::string(what) + ": not an integer: " + s);
    return static_cast<std::size_t>(v);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise("UsageError", std::string(what) + ": not an integer: " + s);
  }
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), "UsageError", std::string(what) + ": not a number: " + s);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    raise("UsageError", std::string(what) + ": not a number: " + s);
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// config keys mirror the long flags of the active command; "n" therefore
// means the grid range for rate-study and the sample size elsewhere
void assign_config_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "process")
    c.process = value;
  else if (key == "kernel")
    c.kernel = value;
  else if (key == "statistic")
    c.statistic = value;
  else if (key == "method")
    c.method = value;
  else if (key == "out")
    c.out = value;
  else if (key == "format")
    c.format = value;
  else if (key == "dump")
    c.dump = value;
  else if (key == "p")
    c.p = parse_real(value, "config p");
  else if (key == "level")
    c.level = parse_real(value, "config level");
  else if (key == "n" && c.command == "rate-study")
    c.n_range = value;
  else if (key == "n")
    c.n = parse_count(value, "config n");
  else if (key == "reps")
    c.replicates = parse_count(value, "config reps");
  else if (key == "nmax")
    c.nmax = parse_count(value, "config nmax");
  else if (key == "threads")
    c.threads = parse_count(value, "config threads");
  else if (key == "seed")
    c.seed = static_cast<std::uint64_t>(parse_count(value, "config seed"));
  else
    raise("UsageError", "unknown config key: " + key);
}

// key=value lines; explicit flags on the command line take precedence
void apply_config_file(RunConfig& c, const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "UsageError", "cannot read config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "UsageError",
            "config file " + path + ": expected key=value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), "UsageError", "config file " + path + ": empty key");
    const CLI::Option* op = sub.get_option_no_throw("--" + key);
    if (op != nullptr && op->count() > 0) continue;
    assign_config_key(c, key, value);
  }
}

std::vector<std::size_t> expand_n_range(const std::string& range) {
  const auto pos = range.find("..");
  require(pos != std::string::npos, "UsageError",
          "--n for rate-study must be a range like 128..8192");
  const std::size_t lo = parse_count(range.substr(0, pos), "--n range start");
  const std::size_t hi = parse_count(range.substr(pos + 2), "--n range end");
  require(is_power_of_two(lo) && is_power_of_two(hi), "UsageError",
          "--n range endpoints must be powers of two");
  require(lo < hi, "UsageError", "--n range start must be below its end");
  std::vector<std::size_t> grid;
  for (std::size_t v = lo; v <= hi; v *= 2) grid.push_back(v);
  return grid;
}

void validate_config(const RunConfig& c) {
  require(known_command(c.command), "UsageError", "unknown command: " + c.command);
  require(c.p > 0.0 && c.p < 1.0, "UsageError", "--p must lie strictly inside (0,1)");
  require(c.level > 0.0 && c.level < 1.0, "UsageError",
          "--level must lie strictly inside (0,1)");
  require(c.threads >= 1, "UsageError", "--threads must be at least 1");
  require(c.statistic == "quantile" || c.statistic == "u-quantile", "UsageError",
          "--statistic must be quantile or u-quantile");
  require(c.method == "fast" || c.method == "naive", "UsageError",
          "--method must be fast or naive");
  require(c.format == "json" || c.format == "csv", "UsageError",
          "--format must be json or csv");
  require(has_kernel(c.kernel), "UsageError", "unknown kernel: " + c.kernel);
  try {
    parse_process(c.process);
  } catch (const Error& e) {
    raise("UsageError", std::string("--process ") + c.process + ": " + e.what());
  }
  if (c.command == "estimate" || c.command == "gen" || c.command == "coverage")
    require(c.n >= 1, "UsageError", "--n is required and must be positive");
  if (c.command == "rate-study") {
    require(!c.n_range.empty(), "UsageError", "rate-study needs --n as a range like 128..8192");
    expand_n_range(c.n_range);
  }
  if (c.command == "rate-study" || c.command == "coverage")
    require(c.replicates >= 1, "UsageError", "--reps is required and must be positive");
  if (c.format == "csv")
    require(c.command == "estimate" || c.command == "coverage", "UsageError",
            "--format csv conflicts with command " + c.command +
                "; only estimate and coverage emit flat rows");
}

// N(0, sd^2) marginal processes admit analytic hl/qn truths
std::optional<double> normal_marginal_sd(const ProcessModel& proc) {
  if (proc.name == "iid" || proc.name == "ar1") return 1.0;
  if (proc.name == "ma") return proc.params.at("sigma");
  return std::nullopt;
}

QuantileTruth marginal_truth(const ProcessModel& proc, double p) {
  require(static_cast<bool>(proc.marginal_quantile) && static_cast<bool>(proc.marginal_pdf),
          "UsageError",
          "process " + proc.name + " has no closed-form marginal quantile; use iid, ar1, ma, or gauss");
  QuantileTruth truth;
  truth.p = p;
  truth.t_p = proc.marginal_quantile(p);
  truth.density_at_tp = proc.marginal_pdf(truth.t_p);
  return truth;
}

// truth and marginal-equipped kernel for statistic == u-quantile
QuantileTruth u_truth(const ProcessModel& proc, const std::string& kernel_name, double p,
                      KernelSpec& kernel_out) {
  const std::optional<double> sd = normal_marginal_sd(proc);
  require(sd.has_value(), "UsageError",
          "U-quantile studies need a normal-marginal process (iid, ar1, ma)");
  kernel_out = with_normal_marginal(find_kernel(kernel_name), *sd);
  if (kernel_name == "hl") return hl_normal_truth(p, *sd);
  if (kernel_name == "qn") return qn_normal_truth(p, *sd);
  raise("UsageError", "no analytic U-quantile truth for kernel " + kernel_name);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "UsageError", "cannot open output file: " + path);
  out << content;
  require(static_cast<bool>(out.flush()), "UsageError", "cannot write output file: " + path);
}

std::string sidecar_path(const std::string& csv_path) {
  const auto slash = csv_path.find_last_of('/');
  const auto dot = csv_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

std::string rfc3339_utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json run_estimate(const RunConfig& c, const ProcessModel& proc) {
  const SamplePath path = proc.generate(c.n, c.seed);
  double est = 0.0;
  if (c.statistic == "quantile") {
    std::vector<double> sorted(path.values);
    std::sort(sorted.begin(), sorted.end());
    est = sorted[order_index(c.p, sorted.size()) - 1];
  } else {
    const KernelSpec k = find_kernel(c.kernel);
    require(k.pair_statistic.has_value(), "NotIndicator",
            "u-quantile estimation needs a pair-statistic kernel");
    if (c.method == "fast") {
      est = u_quantile_fast(path, *k.pair_statistic, c.p);
    } else {
      require(c.n <= 16384, "InvalidParam",
              "naive method enumerates all pairs; use --n <= 16384 or --method fast");
      std::vector<double> values = pair_statistic_values(path.values, *k.pair_statistic);
      require(!values.empty(), "SampleTooSmall", "u-quantile needs n >= 2");
      est = values[order_index(c.p, values.size()) - 1];
    }
  }
  json results;
  results["estimate"] = est;
  results["n"] = c.n;
  results["p"] = c.p;
  results["kernel"] = c.kernel;
  results["seed"] = c.seed;
  results["method"] = c.method;
  return results;
}

json run_gen(const RunConfig& c, const ProcessModel& proc) {
  const SamplePath path = proc.generate(c.n, c.seed);
  json sidecar = path_sidecar(path, proc);
  if (proc.marginal_cdf) sidecar["ks_vs_marginal"] = ks_distance(path.values, proc.marginal_cdf);
  const std::string meta_path = sidecar_path(c.out);
  write_text_file(c.out, path_to_csv(path));
  write_text_file(meta_path, sidecar.dump(2) + "\n");
  json results;
  results["out"] = c.out;
  results["sidecar"] = meta_path;
  results["n"] = c.n;
  results["process"] = c.process;
  results["seed"] = c.seed;
  if (sidecar.contains("ks_vs_marginal")) results["ks_vs_marginal"] = sidecar["ks_vs_marginal"];
  return results;
}

json run_rate_study(const RunConfig& c, const ProcessModel& proc) {
  RateStudyConfig rc;
  rc.process = proc;
  rc.n_grid = expand_n_range(c.n_range);
  rc.replicates = c.replicates;
  rc.master_seed = c.seed;
  rc.threads = c.threads;
  if (c.statistic == "quantile") {
    rc.statistic = StatisticKind::Quantile;
    rc.truth = marginal_truth(proc, c.p);
  } else {
    rc.statistic = StatisticKind::UQuantile;
    rc.truth = u_truth(proc, c.kernel, c.p, rc.kernel);
  }
  std::vector<ReplicateRecord> rows;
  const RateStudyResult res = rate_study(rc, c.dump.empty() ? nullptr : &rows);
  if (!c.dump.empty()) write_text_file(c.dump, replicate_dump_csv(rows));
  return to_json(res);
}

json run_coverage(const RunConfig& c, const ProcessModel& proc) {
  CoverageResult cov;
  if (c.statistic == "quantile") {
    cov = clt_coverage(proc, marginal_truth(proc, c.p), c.n, c.replicates, c.level, c.seed,
                       c.threads);
  } else {
    KernelSpec kernel;
    const QuantileTruth truth = u_truth(proc, c.kernel, c.p, kernel);
    cov = clt_coverage(proc, kernel, truth, c.n, c.replicates, c.level, c.seed, c.threads);
  }
  return to_json(cov);
}

json run_lil(const RunConfig& c, const ProcessModel& proc) {
  std::vector<std::size_t> checkpoints;
  for (std::size_t v = 16; v <= c.nmax && v != 0; v *= 2) checkpoints.push_back(v);
  // plug-in scaling variance from a calibration path, not the diagnostic path
  const std::size_t cal_n = std::min<std::size_t>(c.nmax, 32768);
  const SamplePath cal = proc.generate(cal_n, derive_seed(c.seed, 0x5eed));
  LilResult res;
  if (c.statistic == "quantile") {
    const QuantileTruth truth = marginal_truth(proc, c.p);
    const double sigma2 = quantile_sigma2(cal, truth);
    res = lil_diagnostic(proc, truth, c.nmax, checkpoints, sigma2, c.seed);
  } else {
    KernelSpec kernel;
    const QuantileTruth truth = u_truth(proc, c.kernel, c.p, kernel);
    const double sigma2 = quantile_sigma2(cal, kernel, truth);
    res = lil_diagnostic(proc, kernel, truth, c.nmax, checkpoints, sigma2, c.seed);
  }
  return to_json(res);
}

json run_selftest(const RunConfig& c) {
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass) {
    json row;
    row["name"] = name;
    row["pass"] = pass;
    checks.push_back(row);
    all_pass = all_pass && pass;
  };

  const ProcessModel proc = iid_normal();
  const double ps[] = {0.1, 0.25, 0.5, 0.9, 0.99};
  const std::size_t ns[] = {2, 3, 5, 17, 64, 301};

  for (PairStatistic stat : {PairStatistic::Mean, PairStatistic::AbsDiff}) {
    bool ok = true;
    for (std::size_t n : ns)
      for (std::uint64_t s = 1; s <= 3; ++s) {
        const SamplePath path = proc.generate(n, derive_seed(c.seed, 100 * n + s));
        const std::vector<double> values = pair_statistic_values(path.values, stat);
        for (double p : ps) {
          const double naive = values[order_index(p, values.size()) - 1];
          ok = ok && u_quantile_fast(path, stat, p) == naive;
        }
      }
    record(stat == PairStatistic::Mean ? "fast_naive_equivalence_hl"
                                       : "fast_naive_equivalence_qn",
           ok);
  }

  {
    bool ok = true;
    const SamplePath path = proc.generate(40, derive_seed(c.seed, 7));
    std::vector<double> sorted(path.values);
    std::sort(sorted.begin(), sorted.end());
    for (PairStatistic stat : {PairStatistic::Mean, PairStatistic::AbsDiff})
      for (double t : {-1.0, -0.2, 0.0, 0.3, 1.5}) {
        std::uint64_t brute = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
          for (std::size_t j = i + 1; j < sorted.size(); ++j)
            if (pair_value(stat, sorted[i], sorted[j]) <= t) ++brute;
        ok = ok && count_pairs_leq(sorted, stat, t) == brute;
      }
    record("pair_count_bruteforce", ok);
  }

  {
    bool ok = true;
    for (const char* name : {"hl", "qn"}) {
      const KernelSpec k = find_kernel(name);
      const SamplePath path = proc.generate(200, derive_seed(c.seed, 11));
      const std::vector<double> pseudo = h1_pseudo_values(path, k, 0.3);
      CompensatedSum s;
      for (double v : pseudo) s.add(v);
      ok = ok && std::abs(s.value()) <= 1e-9;
    }
    record("hoeffding_mean_zero", ok);
  }

  {
    bool ok = true;
    const KernelSpec k = with_normal_marginal(find_kernel("hl"));
    MarginalOracle oracle;
    for (double x : {-1.0, 0.2, 0.9})
      for (double y : {-0.4, 0.1, 1.3})
        for (double t : {-0.5, 0.0, 0.7}) {
          const double recomposed = u_value(k, t, oracle) + h1_value(k, x, t, oracle) +
                                    h1_value(k, y, t, oracle) + h2_value(k, x, y, t, oracle);
          ok = ok && std::abs(recomposed - k.eval(x, y, t)) <= 1e-12;
        }
    record("hoeffding_recomposition", ok);
  }

  {
    bool ok = true;
    const QuantileTruth truth = normal_quantile_truth(0.5);
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const SamplePath path = proc.generate(128, derive_seed(c.seed, 900 + s));
      const RemainderSample r = remainder_quantile(path, truth);
      ok = ok && r.r == r.estimate - truth.t_p - r.linear_term;
    }
    record("remainder_identity", ok);
  }

  {
    bool ok = true;
    for (std::size_t n : {1, 2, 7, 10, 100, 12345})
      for (double p : {0.001, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999}) {
        const std::size_t k = order_index(p, n);
        const double nd = static_cast<double>(n);
        ok = ok && static_cast<double>(k) / nd >= p &&
             (k == 1 || static_cast<double>(k - 1) / nd < p);
      }
    record("order_index_galois", ok);
  }

  json results;
  results["checks"] = checks;
  results["passed"] = all_pass;
  return results;
}

std::string results_csv(const json& results) {
  std::string header, row;
  for (const auto& [key, value] : results.items()) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += key;
    if (value.is_string())
      row += value.get<std::string>();
    else
      row += value.dump();
  }
  return header + "\n" + row + "\n";
}

json error_json(const std::string& code, const std::string& message) {
  json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  return j;
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["process"] = c.process;
  j["kernel"] = c.kernel;
  j["statistic"] = c.statistic;
  j["method"] = c.method;
  j["p"] = c.p;
  j["n"] = c.n;
  j["n_range"] = c.n_range;
  j["replicates"] = c.replicates;
  j["level"] = c.level;
  j["nmax"] = c.nmax;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["format"] = c.format;
  j["dump"] = c.dump;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command")
        c.command = value.get<std::string>();
      else if (key == "process")
        c.process = value.get<std::string>();
      else if (key == "kernel")
        c.kernel = value.get<std::string>();
      else if (key == "statistic")
        c.statistic = value.get<std::string>();
      else if (key == "method")
        c.method = value.get<std::string>();
      else if (key == "p")
        c.p = value.get<double>();
      else if (key == "n")
        c.n = value.get<std::size_t>();
      else if (key == "n_range")
        c.n_range = value.get<std::string>();
      else if (key == "replicates")
        c.replicates = value.get<std::size_t>();
      else if (key == "level")
        c.level = value.get<double>();
      else if (key == "nmax")
        c.nmax = value.get<std::size_t>();
      else if (key == "seed")
        c.seed = value.get<std::uint64_t>();
      else if (key == "threads")
        c.threads = value.get<std::size_t>();
      else if (key == "out")
        c.out = value.get<std::string>();
      else if (key == "format")
        c.format = value.get<std::string>();
      else if (key == "dump")
        c.dump = value.get<std::string>();
      else
        raise("UsageError", "unknown config key: " + key);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    raise("UsageError", std::string("bad config value: ") + e.what());
  }
  validate_config(c);
  return c;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"U-quantile estimation, Bahadur remainder rates, and asymptotics diagnostics"};
  app.name("uquant");
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_kernel_stat) {
    sub->add_option("--process", cfg.process,
                    "process spec: iid | ar1:phi=.. | ma:q=..,w=.. | lin:a=..,inn=.. | gauss");
    if (with_kernel_stat) {
      sub->add_option("--kernel", cfg.kernel, "kernel name (hl, qn)");
      sub->add_option("--statistic", cfg.statistic, "quantile | u-quantile");
      sub->add_option("--p", cfg.p, "quantile level in (0,1)");
    }
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--out", cfg.out, "output file path");
    sub->add_option("--format", cfg.format, "stdout format: json | csv");
    sub->add_option("--config", config_path, "key=value config file; flags override it");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a sample path as CSV plus a JSON sidecar");
  add_common(gen, false);
  gen->add_option("--n", cfg.n, "path length")->required();

  CLI::App* est = app.add_subcommand("estimate", "point estimate of a quantile or U-quantile");
  add_common(est, true);
  est->add_option("--n", cfg.n, "sample size")->required();
  est->add_option("--method", cfg.method, "fast | naive");

  CLI::App* rate = app.add_subcommand("rate-study", "Monte Carlo remainder decay study");
  add_common(rate, true);
  rate->add_option("--n", cfg.n_range, "doubling grid as a range, e.g. 128..8192")->required();
  rate->add_option("--reps", cfg.replicates, "replicates per grid point")->required();
  rate->add_option("--dump", cfg.dump, "per-replicate CSV path");

  CLI::App* cov = app.add_subcommand("coverage", "CLT confidence-interval coverage study");
  add_common(cov, true);
  cov->add_option("--n", cfg.n, "sample size per replicate")->required();
  cov->add_option("--reps", cfg.replicates, "replicates")->required();
  cov->add_option("--level", cfg.level, "nominal confidence level");

  CLI::App* lil = app.add_subcommand("lil", "law-of-iterated-logarithm boundedness diagnostic");
  add_common(lil, true);
  lil->add_option("--nmax", cfg.nmax, "path length; checkpoints are powers of two up to it");

  CLI::App* self = app.add_subcommand("selftest", "bundled equivalence and identity checks");
  add_common(self, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    raise("__help", app.help());
  } catch (const CLI::CallForAllHelp&) {
    raise("__help", app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::CallForVersion&) {
    raise("__help", std::string(version_string) + "\n");
  } catch (const CLI::ParseError& e) {
    raise("UsageError", e.what());
  }

  for (const char* name : kCommands)
    if (app.got_subcommand(name)) cfg.command = name;
  if (!config_path.empty()) apply_config_file(cfg, config_path, *app.get_subcommand(cfg.command));
  if (cfg.command == "gen" && cfg.out.empty()) cfg.out = "samples.csv";
  validate_config(cfg);
  return cfg;
}

RunReport run(const RunConfig& config) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  const ProcessModel proc = parse_process(config.process);
  json results;
  if (config.command == "estimate")
    results = run_estimate(config, proc);
  else if (config.command == "gen")
    results = run_gen(config, proc);
  else if (config.command == "rate-study")
    results = run_rate_study(config, proc);
  else if (config.command == "coverage")
    results = run_coverage(config, proc);
  else if (config.command == "lil")
    results = run_lil(config, proc);
  else
    results = run_selftest(config);
  RunReport report;
  report.config = config;
  report.results = std::move(results);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.version = version_string;
  report.timestamp = rfc3339_utc_now();
  return report;
}

nlohmann::json report_to_json(const RunReport& r) {
  json j = r.results;
  j["config"] = config_to_json(r.config);
  j["wall_time_s"] = r.wall_time_s;
  j["version"] = r.version;
  j["timestamp"] = r.timestamp;
  return j;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const Error& e) {
    if (std::string(e.code()) == "__help") {
      std::cout << e.what();
      return 0;
    }
    std::cerr << error_json(e.code(), e.what()).dump() << "\n";
    return 2;
  }
  try {
    const RunReport report = run(config);
    if (config.format == "csv")
      std::cout << results_csv(report.results);
    else
      std::cout << report_to_json(report).dump(2) << "\n";
    if (!config.out.empty() && config.command != "gen") {
      json file_json = report.results;
      file_json["config"] = config_to_json(report.config);
      file_json["version"] = report.version;
      write_text_file(config.out, file_json.dump(2) + "\n");
    }
    if (config.command == "selftest" && !report.results.value("passed", false)) return 1;
    return 0;
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()).dump() << "\n";
    return std::string(e.code()) == "UsageError" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("InternalError", e.what()).dump() << "\n";
    return 1;
  }
}

}  // namespace uquant
