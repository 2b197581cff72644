#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "test_helpers.hpp"
#include "uquant/cli.hpp"
#include "uquant/empirical.hpp"
#include "uquant/processes.hpp"
#include "uquant/version.hpp"

using namespace uquant;
using nlohmann::json;
using uquant::testing::error_code_of;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + UQUANT_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {};
  CliRun res;
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) res.output += buf;
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -2;
  return res;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: parse_args happy paths") {
  SUBCASE("rate-study with the full flag set") {
    const RunConfig c = parse_args({"rate-study", "--process", "ar1:phi=0.5", "--statistic",
                                    "u-quantile", "--kernel", "hl", "--p", "0.5", "--n",
                                    "128..1024", "--reps", "600", "--seed", "42", "--threads",
                                    "2"});
    CHECK(c.command == "rate-study");
    CHECK(c.process == "ar1:phi=0.5");
    CHECK(c.statistic == "u-quantile");
    CHECK(c.kernel == "hl");
    CHECK(c.p == 0.5);
    CHECK(c.n_range == "128..1024");
    CHECK(c.replicates == 600);
    CHECK(c.seed == 42);
    CHECK(c.threads == 2);
    CHECK(c.format == "json");
  }

  SUBCASE("estimate defaults") {
    const RunConfig c = parse_args({"estimate", "--n", "100"});
    CHECK(c.command == "estimate");
    CHECK(c.n == 100);
    CHECK(c.process == "iid");
    CHECK(c.kernel == "hl");
    CHECK(c.statistic == "quantile");
    CHECK(c.method == "fast");
    CHECK(c.p == 0.5);
    CHECK(c.seed == 0);
    CHECK(c.threads == 1);
    CHECK(c.out.empty());
  }

  SUBCASE("gen picks a default output path") {
    CHECK(parse_args({"gen", "--n", "50"}).out == "samples.csv");
    CHECK(parse_args({"gen", "--n", "50", "--out", "p.csv"}).out == "p.csv");
  }

  SUBCASE("coverage and lil specifics") {
    const RunConfig cov =
        parse_args({"coverage", "--n", "200", "--reps", "500", "--level", "0.9"});
    CHECK(cov.level == 0.9);
    CHECK(cov.replicates == 500);
    const RunConfig lil = parse_args({"lil", "--nmax", "2048"});
    CHECK(lil.nmax == 2048);
  }

  SUBCASE("help and version surface through a sentinel") {
    CHECK(error_code_of([] { parse_args({"--help"}); }) == "__help");
    CHECK(error_code_of([] { parse_args({"--version"}); }) == "__help");
  }
}

TEST_CASE("cli: parse_args rejections") {
  auto usage = [](std::vector<std::string> args) {
    return error_code_of([&] { parse_args(args); }) == "UsageError";
  };
  CHECK(usage({}));                                    // no subcommand
  CHECK(usage({"bogus"}));                             // unknown subcommand
  CHECK(usage({"estimate"}));                          // missing --n
  CHECK(usage({"estimate", "--n", "0"}));              // empty sample
  CHECK(usage({"estimate", "--n", "100", "--zap"}));   // unknown flag
  CHECK(usage({"estimate", "--n", "100", "--p", "1.5"}));
  CHECK(usage({"estimate", "--n", "100", "--p", "0"}));
  CHECK(usage({"estimate", "--n", "100", "--process", "ar1:phi=1.2"}));
  CHECK(usage({"estimate", "--n", "100", "--process", "wat"}));
  CHECK(usage({"estimate", "--n", "100", "--kernel", "nope"}));
  CHECK(usage({"estimate", "--n", "100", "--statistic", "bogus"}));
  CHECK(usage({"estimate", "--n", "100", "--method", "slow"}));
  CHECK(usage({"estimate", "--n", "100", "--format", "xml"}));
  CHECK(usage({"estimate", "--n", "100", "--threads", "0"}));
  CHECK(usage({"rate-study", "--n", "10..80", "--reps", "600"}));    // not powers of two
  CHECK(usage({"rate-study", "--n", "1024..128", "--reps", "600"}));
  CHECK(usage({"rate-study", "--n", "128", "--reps", "600"}));       // not a range
  CHECK(usage({"rate-study", "--n", "128..1024", "--reps", "600", "--format", "csv"}));
  CHECK(usage({"lil", "--nmax", "2048", "--format", "csv"}));
  CHECK(usage({"coverage", "--n", "200", "--reps", "500", "--level", "1.0"}));
}

TEST_CASE("cli: config file merges under explicit flags") {
  const std::string path = "/tmp/uquant_test_cfg.ini";
  {
    std::ofstream out(path);
    out << "p=0.25\nseed=9\n";
  }
  const RunConfig c = parse_args({"estimate", "--n", "100", "--config", path, "--seed", "11"});
  CHECK(c.p == 0.25);   // from the file
  CHECK(c.seed == 11);  // flag wins over the file
  CHECK(c.n == 100);

  {
    std::ofstream out(path);
    out << "zap=1\n";
  }
  CHECK(error_code_of([&] { parse_args({"estimate", "--n", "100", "--config", path}); }) ==
        "UsageError");
}

TEST_CASE("cli: config JSON round trip") {
  const RunConfig c = parse_args({"coverage", "--n", "300", "--reps", "800", "--level", "0.99",
                                  "--statistic", "u-quantile", "--kernel", "qn", "--seed",
                                  "13"});
  const json j = config_to_json(c);
  const RunConfig back = config_from_json(j);
  CHECK(back == c);

  SUBCASE("unknown keys and bad values are usage errors") {
    json extra = j;
    extra["surprise"] = 1;
    CHECK(error_code_of([&] { config_from_json(extra); }) == "UsageError");
    json typed = j;
    typed["p"] = "not-a-number";
    CHECK(error_code_of([&] { config_from_json(typed); }) == "UsageError");
    json invalid = j;
    invalid["p"] = 2.0;
    CHECK(error_code_of([&] { config_from_json(invalid); }) == "UsageError");
  }
}

TEST_CASE("cli: run payloads") {
  SUBCASE("estimate quantile matches the order statistic") {
    RunConfig c = parse_args({"estimate", "--n", "200", "--seed", "3"});
    const RunReport rep = run(c);
    for (const char* key : {"estimate", "n", "p", "kernel", "seed", "method"})
      CHECK(rep.results.contains(key));
    const SamplePath path = parse_process("iid").generate(200, 3);
    const EmpiricalCdf F(path);
    CHECK(rep.results["estimate"].get<double>() == ecdf_quantile(F, 0.5));
    CHECK(rep.version == std::string(version_string));
    CHECK_FALSE(rep.timestamp.empty());

    // identical configs give identical result payloads
    CHECK(run(c).results.dump() == rep.results.dump());
  }

  SUBCASE("estimate u-quantile: fast and naive agree") {
    RunConfig fast = parse_args({"estimate", "--n", "257", "--seed", "5", "--statistic",
                                 "u-quantile", "--kernel", "qn", "--p", "0.25"});
    RunConfig naive = fast;
    naive.method = "naive";
    const double a = run(fast).results["estimate"].get<double>();
    const double b = run(naive).results["estimate"].get<double>();
    CHECK(a == b);
    const SamplePath path = parse_process("iid").generate(257, 5);
    CHECK(a == u_quantile_fast(path, PairStatistic::AbsDiff, 0.25));
  }

  SUBCASE("naive method refuses huge n") {
    RunConfig c = parse_args({"estimate", "--n", "20000", "--statistic", "u-quantile",
                              "--method", "naive"});
    CHECK(error_code_of([&] { run(c); }) == "InvalidParam");
  }

  SUBCASE("rate-study payload and thread invariance") {
    RunConfig c = parse_args({"rate-study", "--n", "128..1024", "--reps", "500", "--seed",
                              "7"});
    const RunReport rep = run(c);
    for (const char* key :
         {"per_n", "replicates", "fitted_slope", "slope_se", "theoretical_exponent", "gamma"})
      CHECK(rep.results.contains(key));
    REQUIRE(rep.results["per_n"].is_array());
    REQUIRE(rep.results["per_n"].size() == 4);
    for (const auto& row : rep.results["per_n"])
      for (const char* key : {"n", "rms_r", "mean_r", "q90_abs_r"}) CHECK(row.contains(key));
    CHECK(rep.results["per_n"][0]["n"].get<std::size_t>() == 128);
    CHECK(rep.results["gamma"].get<double>() == 1.0);
    CHECK(rep.results["theoretical_exponent"].get<double>() == 0.75);

    RunConfig threaded = c;
    threaded.threads = 2;
    CHECK(run(threaded).results.dump() == rep.results.dump());
  }

  SUBCASE("rate-study dump file") {
    const std::string dump_path = "/tmp/uquant_test_dump.csv";
    RunConfig c = parse_args({"rate-study", "--n", "128..1024", "--reps", "500", "--seed", "7",
                              "--dump", dump_path});
    run(c);
    const std::string csv = read_file(dump_path);
    REQUIRE_FALSE(csv.empty());
    CHECK(csv.rfind("n,rep,r\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 500);
  }

  SUBCASE("coverage payload") {
    RunConfig c = parse_args({"coverage", "--n", "128", "--reps", "500", "--seed", "9"});
    const RunReport rep = run(c);
    for (const char* key : {"nominal", "empirical", "replicates", "n", "std_error"})
      CHECK(rep.results.contains(key));
    CHECK(rep.results["nominal"].get<double>() == 0.95);
    CHECK(rep.results["replicates"].get<std::size_t>() == 500);
    const double emp = rep.results["empirical"].get<double>();
    CHECK(emp >= 0.85);
    CHECK(emp <= 1.0);
  }

  SUBCASE("lil payload") {
    RunConfig c = parse_args({"lil", "--nmax", "2048", "--seed", "4"});
    const RunReport rep = run(c);
    for (const char* key : {"statistic", "checkpoints", "per_checkpoint", "sigma2"})
      CHECK(rep.results.contains(key));
    REQUIRE(rep.results["checkpoints"].is_array());
    CHECK(rep.results["checkpoints"].size() == 8);  // 16, 32, ..., 2048
    CHECK(rep.results["checkpoints"][0].get<std::size_t>() == 16);
    CHECK(rep.results["checkpoints"][7].get<std::size_t>() == 2048);
    CHECK(rep.results["sigma2"].get<double>() > 0.0);
    CHECK(rep.results["statistic"].get<double>() >= 0.0);
    CHECK(rep.results["statistic"].get<double>() <= 5.0);
  }

  SUBCASE("selftest payload") {
    const RunReport rep = run(parse_args({"selftest"}));
    CHECK(rep.results["passed"].get<bool>());
    REQUIRE(rep.results["checks"].is_array());
    CHECK(rep.results["checks"].size() == 7);
    for (const auto& row : rep.results["checks"]) {
      CHECK(row.contains("name"));
      CHECK(row["pass"].get<bool>());
    }
  }

  SUBCASE("report_to_json merges results with run metadata") {
    const RunReport rep = run(parse_args({"estimate", "--n", "64"}));
    const json j = report_to_json(rep);
    CHECK(j.contains("estimate"));
    CHECK(j.contains("config"));
    CHECK(j.contains("wall_time_s"));
    CHECK(j.contains("version"));
    CHECK(j.contains("timestamp"));
    CHECK(config_from_json(j["config"]) == rep.config);
  }
}

TEST_CASE("cli: gen writes a path with a sidecar") {
  const std::string out = "/tmp/uquant_test_gen.csv";
  RunConfig c = parse_args({"gen", "--n", "40", "--seed", "5", "--process", "gauss", "--out",
                            out});
  const RunReport rep = run(c);
  CHECK(rep.results["out"].get<std::string>() == out);
  CHECK(rep.results["sidecar"].get<std::string>() == "/tmp/uquant_test_gen.json");
  CHECK(rep.results.contains("ks_vs_marginal"));

  const std::string csv = read_file(out);
  REQUIRE_FALSE(csv.empty());
  CHECK(csv.rfind("x\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);

  // the shortest-round-trip format restores every value bit for bit
  const SamplePath path = parse_process("gauss").generate(40, 5);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  for (double expected : path.values) {
    REQUIRE(static_cast<bool>(std::getline(lines, line)));
    CHECK(std::stod(line) == expected);
  }

  const json sidecar = json::parse(read_file("/tmp/uquant_test_gen.json"));
  CHECK(sidecar["process"].get<std::string>() == "gauss");
  CHECK(sidecar["n"].get<std::size_t>() == 40);
  CHECK(sidecar["seed"].get<std::uint64_t>() == 5);
  CHECK(sidecar.contains("params"));
  CHECK(sidecar["ks_vs_marginal"].get<double>() >= 0.0);
}

TEST_CASE("cli: binary end to end") {
  SUBCASE("selftest exits zero") {
    const CliRun r = run_cli("selftest");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"passed\": true") != std::string::npos);
  }

  SUBCASE("usage errors exit two") {
    const CliRun r = run_cli("estimate --n 100 --zap");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("UsageError") != std::string::npos);
  }

  SUBCASE("computational errors exit one") {
    const CliRun r = run_cli("rate-study --n 128..256 --reps 600");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("InsufficientGrid") != std::string::npos);
  }

  SUBCASE("estimate prints the merged report") {
    const CliRun r = run_cli("estimate --n 100 --seed 1");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.output);
    CHECK(j.contains("estimate"));
    CHECK(j["config"]["n"].get<std::size_t>() == 100);
    CHECK(j["version"].get<std::string>() == std::string(version_string));
  }

  SUBCASE("csv format emits one flat row") {
    const CliRun r = run_cli("estimate --n 100 --seed 1 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("estimate") != std::string::npos);
    CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 2);
  }

  SUBCASE("version and help") {
    const CliRun v = run_cli("--version");
    CHECK(v.exit_code == 0);
    CHECK(v.output.find(version_string) != std::string::npos);
    const CliRun h = run_cli("--help");
    CHECK(h.exit_code == 0);
    CHECK(h.output.find("uquant") != std::string::npos);
  }
}
