#pragma once

#include <string>

#include <json.hpp>

#include "uquant/asymptotics.hpp"
#include "uquant/bahadur.hpp"
#include "uquant/kernels.hpp"
#include "uquant/processes.hpp"

namespace uquant {

using json = nlohmann::json;

json to_json(const VariationEstimate& v);
json to_json(const LrvEstimate& e);
json to_json(const CoverageResult& c);
json to_json(const LilResult& l);
json to_json(const RemainderSample& r);
// {per_n: [{n, rms_r, mean_r, q90_abs_r}], fitted_slope, slope_se,
//  theoretical_exponent, gamma, replicates}
json to_json(const RateStudyResult& r);
// sidecar metadata {process, n, seed, params}
json path_sidecar(const SamplePath& path, const ProcessModel& proc);

// single-column CSV with header "x"; shortest round-trip formatting
std::string path_to_csv(const SamplePath& path);
std::string replicate_dump_csv(const std::vector<ReplicateRecord>& rows);

// shortest decimal string that parses back to exactly the same double
std::string format_double(double v);

}  // namespace uquant
