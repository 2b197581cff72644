#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace uquant {

// one validated invocation; round-trips through JSON with unknown keys
// rejected
struct RunConfig {
  std::string command;  // gen | estimate | rate-study | coverage | lil | selftest
  std::string process = "iid";
  std::string kernel = "hl";
  std::string statistic = "quantile";  // quantile | u-quantile
  std::string method = "fast";         // fast | naive (estimate only)
  double p = 0.5;
  std::size_t n = 0;
  std::string n_range;  // rate-study: "128..8192", powers of two expanded
  std::size_t replicates = 0;
  double level = 0.95;
  std::size_t nmax = 65536;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;        // output file; command-specific default
  std::string format = "json";
  std::string dump;       // rate-study per-replicate CSV path, empty = off

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);  // UsageError on unknown keys

// argv without the program name; UsageError on any invalid input
RunConfig parse_args(const std::vector<std::string>& args);

struct RunReport {
  RunConfig config;
  nlohmann::json results;
  double wall_time_s = 0.0;
  std::string version;
  std::string timestamp;  // UTC, RFC 3339
};

// {config, results, wall_time_s, version, timestamp}; the results subtree is
// the determinism contract, wall_time_s and timestamp are not
nlohmann::json report_to_json(const RunReport& r);

RunReport run(const RunConfig& config);

// parse + run + print; returns the process exit code:
// 0 success, 1 computational error, 2 usage error
int main_entry(int argc, char** argv);

}  // namespace uquant
