#include "uquant/serialize.hpp"

#include <charconv>
#include <cstdio>

namespace uquant {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const VariationEstimate& v) {
  json j;
  j["kernel"] = v.kernel;
  j["t"] = v.t;
  j["epsilons"] = v.epsilon_grid;
  j["estimates"] = v.estimates;
  j["std_errors"] = v.std_errors;
  j["fitted_L"] = v.fitted_L;
  j["fitted_L_se"] = v.fitted_L_se;
  j["reps"] = v.reps;
  j["seed"] = v.seed;
  return j;
}

json to_json(const LrvEstimate& e) {
  json j;
  j["value"] = e.value;
  j["bandwidth"] = e.bandwidth;
  j["method"] = e.method;
  j["series_length"] = e.series_length;
  return j;
}

json to_json(const CoverageResult& c) {
  json j;
  j["nominal"] = c.nominal;
  j["empirical"] = c.empirical;
  j["replicates"] = c.replicates;
  j["n"] = c.n;
  j["std_error"] = c.std_error;
  return j;
}

json to_json(const LilResult& l) {
  json j;
  j["statistic"] = l.statistic;
  j["checkpoints"] = l.checkpoints;
  j["per_checkpoint"] = l.per_checkpoint;
  j["sigma2"] = l.sigma2;
  return j;
}

json to_json(const RemainderSample& r) {
  json j;
  j["n"] = r.n;
  j["r"] = r.r;
  j["estimate"] = r.estimate;
  j["linear_term"] = r.linear_term;
  j["seed"] = r.seed;
  return j;
}

json to_json(const RateStudyResult& r) {
  json per_n = json::array();
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    json row;
    row["n"] = r.n_grid[i];
    row["rms_r"] = r.rms_r[i];
    row["mean_r"] = r.mean_r[i];
    row["q90_abs_r"] = r.q90_abs_r[i];
    per_n.push_back(row);
  }
  json j;
  j["per_n"] = per_n;
  j["replicates"] = r.replicates;
  j["fitted_slope"] = r.fitted_slope;
  j["slope_se"] = r.slope_se;
  j["theoretical_exponent"] = r.theoretical_exponent;
  j["gamma"] = r.gamma;
  return j;
}

json path_sidecar(const SamplePath& path, const ProcessModel& proc) {
  json j;
  j["process"] = path.process_name;
  j["n"] = path.size();
  j["seed"] = path.seed;
  j["params"] = json(proc.params);
  return j;
}

std::string path_to_csv(const SamplePath& path) {
  std::string out = "x\n";
  for (double v : path.values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::string replicate_dump_csv(const std::vector<ReplicateRecord>& rows) {
  std::string out = "n,rep,r\n";
  for (const ReplicateRecord& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.rep);
    out += ',';
    out += format_double(row.r);
    out += '\n';
  }
  return out;
}

}  // namespace uquant
