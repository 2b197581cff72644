#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uquant/empirical.hpp"
#include "uquant/kernels.hpp"
#include "uquant/processes.hpp"

namespace uquant {

// true quantile location and density of the sampling (U-)distribution;
// supplied, never estimated
struct QuantileTruth {
  double p = 0.5;
  double t_p = 0.0;
  double density_at_tp = 0.0;  // f(t_p) or u(t_p)
  std::string source = "analytic";
};

// marginal quantile of N(0, sigma^2)
QuantileTruth normal_quantile_truth(double p, double sigma = 1.0);
// (X+Y)/2 for X,Y iid N(0, sigma^2)
QuantileTruth hl_normal_truth(double p, double sigma = 1.0);
// |X-Y| for X,Y iid N(0, sigma^2); t_p solved by bisection
QuantileTruth qn_normal_truth(double p, double sigma = 1.0);
// marginal of the continued-fraction map: F(x) = log2(1+x) on [0,1]
QuantileTruth gauss_measure_truth(double p);

// local smoothness assumption |U(t) - p - u(t_p)(t - t_p)| <= c |t-t_p|^{3/2}
// on a shrinking grid around t_p; a false return is advisory, not an error
bool check_local_smoothness(const std::function<double(double)>& U, const QuantileTruth& truth,
                            double c = 0.5);

struct RemainderSample {
  std::size_t n = 0;
  double r = 0.0;            // estimate - t_p - linear_term
  double estimate = 0.0;
  double linear_term = 0.0;  // (p - F_n(t_p)) / f(t_p) analogue
  std::uint64_t seed = 0;
};

// R_n for the sample quantile with indicator g: F_n^{-1}(p) - t_p plus the
// linearized empirical term (F(t_p) - F_n(t_p))/f(t_p), F(t_p) = p
RemainderSample remainder_quantile(const SamplePath& path, const QuantileTruth& truth);
// R'_n for the U-quantile of an indicator pair-statistic kernel
RemainderSample remainder_uquantile(const SamplePath& path, const KernelSpec& kernel,
                                    const QuantileTruth& truth);

// sup over |t - t_p| <= C sqrt(log log n / n) of
// |F_n(t) - F(t) - F_n(t_p) + F(t_p)|, evaluated on the proof grid with
// step (log log n / n)^{3/4} plus the exact jump points of F_n
double oscillation_sup(const SamplePath& path, const std::function<double(double)>& true_cdf,
                       const QuantileTruth& truth, double C);
// U-statistic version; true U taken from kernel.analytic_U
double oscillation_sup(const SamplePath& path, const KernelSpec& kernel,
                       const QuantileTruth& truth, double C);

// remainder rate exponent 5/8 + gamma/8
double theoretical_exponent(double gamma);

// limsup constant 2^{1/2} 3^{-3/4} (p(1-p))^{1/4} of the classical
// iid remainder law
double kiefer_constant(double p);

enum class StatisticKind { Quantile, UQuantile };

struct RateStudyConfig {
  ProcessModel process;
  KernelSpec kernel;  // used when statistic == UQuantile
  QuantileTruth truth;
  StatisticKind statistic = StatisticKind::Quantile;
  std::vector<std::size_t> n_grid;  // powers of two, >= 4 points, min >= 128
  std::size_t replicates = 0;       // >= 500
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
};

struct RateStudyResult {
  std::vector<std::size_t> n_grid;
  std::vector<double> rms_r;
  std::vector<double> mean_r;
  std::vector<double> q90_abs_r;
  std::size_t replicates = 0;
  double fitted_slope = 0.0;
  double slope_se = 0.0;
  double theoretical_exponent = 0.0;
  double gamma = 0.0;
};

// per-replicate remainder row (n, replicate index, r) for optional dumps
struct ReplicateRecord {
  std::size_t n;
  std::size_t rep;
  double r;
};

// Simulates replicates at each n (derived seeds, common paths across n via
// the generator prefix property), aggregates |R_n| and fits log2(rms) on
// log2(n). Identical output for any thread count.
RateStudyResult rate_study(const RateStudyConfig& config,
                           std::vector<ReplicateRecord>* dump = nullptr);

}  // namespace uquant
