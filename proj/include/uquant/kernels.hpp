#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uquant/processes.hpp"

namespace uquant {

// pair statistics with a fast selection path: s(x,y) = (x+y)/2 or |x-y|
enum class PairStatistic { Mean, AbsDiff };

double pair_value(PairStatistic stat, double x, double y);

// Bounded symmetric kernel h(x,y,t), nondecreasing in t. The analytic_*
// fields describe the U-distribution for a specific marginal and are only
// populated by the marginal attachment helpers below.
struct KernelSpec {
  std::string name;
  std::function<double(double, double, double)> eval;
  double bound_K = 1.0;
  // indicator kernels h = 1{s(x,y) <= t} carry their pair statistic, which
  // unlocks u_quantile and the O(n log n) counting paths
  std::optional<PairStatistic> pair_statistic;
  std::function<double(double)> analytic_U;            // t -> E h(X,Y,t)
  std::function<double(double)> analytic_u;            // t -> U'(t)
  std::function<double(double, double)> analytic_h1;   // (x,t) -> E h(x,Y,t) - U(t)
};

KernelSpec make_hl_kernel();  // h(x,y,t) = 1{(x+y)/2 <= t}
KernelSpec make_qn_kernel();  // h(x,y,t) = 1{|x-y| <= t}

// Attaches analytic U, u, h1 for an N(0, sigma^2) marginal to the built-in
// kernels (by pair statistic); other kernels are returned unchanged.
KernelSpec with_normal_marginal(KernelSpec k, double sigma = 1.0);

// registry addressable from the CLI; "hl" and "qn" are pre-registered
void register_kernel(const std::string& name, std::function<KernelSpec()> factory);
KernelSpec find_kernel(const std::string& name);
bool has_kernel(const std::string& name);

// Marginal evidence for Hoeffding components when the kernel lacks analytic
// forms: an iid reference sample of the Y-marginal. Precedence in h1/h2 is
// analytic form, then reference sample, then MissingMarginal.
struct MarginalOracle {
  std::vector<double> reference;

  static MarginalOracle from_sample(std::vector<double> draws);
  // draws via marginal_quantile when the process has one, otherwise takes a
  // generated path (iid processes only give truly independent draws)
  static MarginalOracle from_process(const ProcessModel& proc, std::size_t m,
                                     std::uint64_t seed);
};

// U(t) = E h(X,Y,t): analytic_U if present, else disjoint-pair average over
// the reference sample
double u_value(const KernelSpec& k, double t, const MarginalOracle& marginal);

// h1(x,t) = E h(x,Y,t) - U(t); se_out (when non-null) reports the Monte
// Carlo standard error of the fallback path, 0 for analytic evaluation
double h1_value(const KernelSpec& k, double x, double t, const MarginalOracle& marginal,
                double* se_out = nullptr);

// h2(x,y,t) = h(x,y,t) - h1(x,t) - h1(y,t) - U(t); recomposition is exact by
// construction whenever h1 and U come from the same oracle
double h2_value(const KernelSpec& k, double x, double y, double t,
                const MarginalOracle& marginal);

struct VariationEstimate {
  std::string kernel;
  double t = 0.0;
  std::vector<double> epsilon_grid;
  std::vector<double> estimates;    // isotonic-adjusted Monte Carlo means
  std::vector<double> std_errors;   // per-epsilon binomial standard errors
  double fitted_L = 0.0;
  double fitted_L_se = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of E[sup over the epsilon-ball of |h - h|] per
// epsilon, with (X,Y) independent copies of the process marginal. Indicator
// kernels use the closed-form ball-crossing event; generic kernels use a
// 16-point boundary search, a documented lower bound. Common random pairs
// across the epsilon grid.
VariationEstimate estimate_variation_constant(const KernelSpec& k, const ProcessModel& proc,
                                              double t, const std::vector<double>& epsilons,
                                              std::size_t reps, std::uint64_t seed = 0x5eed);

// one-argument variant for functions g(x,t) such as h1; oscillation over
// [X-eps, X+eps] is evaluated on a 17-point grid (exact for monotone g)
VariationEstimate estimate_variation_constant_1d(const std::function<double(double, double)>& g,
                                                 const std::string& name,
                                                 const ProcessModel& proc, double t,
                                                 const std::vector<double>& epsilons,
                                                 std::size_t reps, std::uint64_t seed = 0x5eed);

}  // namespace uquant
