#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uquant/bahadur.hpp"
#include "uquant/kernels.hpp"
#include "uquant/processes.hpp"

namespace uquant {

struct LrvEstimate {
  double value = 0.0;  // >= 0 by the Bartlett weights
  std::size_t bandwidth = 0;
  std::string method = "bartlett";
  std::size_t series_length = 0;
};

// gamma_0 + 2 sum_{k=1}^{b} (1 - k/(b+1)) gamma_k with 1/n autocovariances
// (the 1/n normalization is what makes the Bartlett form nonnegative);
// default bandwidth ceil(n^{1/3}); bandwidth 0 gives the plain 1/n variance
LrvEstimate long_run_variance(const std::vector<double>& series,
                              std::optional<std::size_t> bandwidth = std::nullopt);

// jackknife-style linear part: (1/(n-1)) sum_{j != i} h(X_i, X_j, t) - U_n(t);
// returned values sum to zero up to rounding
std::vector<double> h1_pseudo_values(const SamplePath& path, const KernelSpec& kernel,
                                     double t);

// plug-in CLT variance for sqrt(n)(estimate - t_p):
// quantile mode: LRV of 1{X_i <= t_p} divided by f^2(t_p)
double quantile_sigma2(const SamplePath& path, const QuantileTruth& truth,
                       std::optional<std::size_t> bandwidth = std::nullopt);
// u-quantile mode: 4 x LRV of the h1 pseudo-values divided by u^2(t_p)
// (the 4 comes from the (2/n) sum h1 linear term)
double quantile_sigma2(const SamplePath& path, const KernelSpec& kernel,
                       const QuantileTruth& truth,
                       std::optional<std::size_t> bandwidth = std::nullopt);

struct CoverageResult {
  double nominal = 0.0;
  double empirical = 0.0;
  std::size_t replicates = 0;
  std::size_t n = 0;
  double std_error = 0.0;  // binomial
};

// fraction of replicates where t_p lies in
// estimate +- z_{(1+level)/2} sigma_hat / sqrt(n)
CoverageResult clt_coverage(const ProcessModel& proc, const QuantileTruth& truth,
                            std::size_t n, std::size_t replicates, double level,
                            std::uint64_t seed, std::size_t threads = 1);
CoverageResult clt_coverage(const ProcessModel& proc, const KernelSpec& kernel,
                            const QuantileTruth& truth, std::size_t n,
                            std::size_t replicates, double level, std::uint64_t seed,
                            std::size_t threads = 1);

struct LilResult {
  double statistic = 0.0;  // max over checkpoints
  std::vector<std::size_t> checkpoints;
  std::vector<double> per_checkpoint;
  double sigma2 = 0.0;
};

// sqrt(n / log log n) |estimate_n - t_p| / sqrt(2 sigma2) along one path,
// evaluated at the checkpoints (prefix property reused); values <= 3 are
// consistent with the iterated-logarithm bound
LilResult lil_diagnostic(const ProcessModel& proc, const QuantileTruth& truth,
                         std::size_t n_max, const std::vector<std::size_t>& checkpoints,
                         double sigma2, std::uint64_t seed);
LilResult lil_diagnostic(const ProcessModel& proc, const KernelSpec& kernel,
                         const QuantileTruth& truth, std::size_t n_max,
                         const std::vector<std::size_t>& checkpoints, double sigma2,
                         std::uint64_t seed);

}  // namespace uquant
