#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "uquant/kernels.hpp"
#include "uquant/processes.hpp"

namespace uquant {

// smallest 1-based k with (double)k/total >= p, adjusted so that the integer
// index and floating-ratio comparisons agree exactly (the generalized
// inverse and the order-statistic index form a Galois connection)
std::size_t order_index(double p, std::size_t total);

// F_n(t) = (1/n) sum_i g(X_i, t). The default g is the indicator 1{x <= t}.
// Stores a sorted copy so evaluation is permutation invariant; indicator
// evaluation is an exact rational count.
struct EmpiricalCdf {
  std::vector<double> sorted;
  std::function<double(double, double)> g;  // empty: indicator 1{x <= t}
  double bound = 1.0;

  explicit EmpiricalCdf(const SamplePath& path);
  EmpiricalCdf(const SamplePath& path, std::function<double(double, double)> g_fn,
               double bound_K);

  bool indicator() const noexcept { return !g; }
};

double ecdf_eval(const EmpiricalCdf& F, double t);
// inf{t : F_n(t) >= p}: the order_index(p,n)-th order statistic
double ecdf_quantile(const EmpiricalCdf& F, double p);

// U_n(t) = 2/(n(n-1)) sum_{i<j} h(X_i, X_j, t)
struct EmpiricalUDist {
  std::vector<double> sorted;
  KernelSpec kernel;

  EmpiricalUDist(const SamplePath& path, KernelSpec k);
};

double u_stat_eval(const EmpiricalUDist& U, double t);
// inf{t : U_n(t) >= p}: the order_index(p, n(n-1)/2)-th smallest pair
// statistic; requires a pair-statistic kernel
double u_quantile(const EmpiricalUDist& U, double p);

// pairs i<j of the sorted sample with pair_value(stat, x_i, x_j) <= t;
// O(n) two-pointer on the rounded pair values, exact
std::uint64_t count_pairs_leq(const std::vector<double>& sorted, PairStatistic stat, double t);

// k-th smallest pair statistic (1-based) by bisection over the ordinal
// encoding of doubles; bit-identical to enumerating and sorting all pairs
double kth_pair_statistic(const std::vector<double>& sorted, PairStatistic stat,
                          std::uint64_t k);

double u_quantile_fast(const std::vector<double>& sample, PairStatistic stat, double p);
double u_quantile_fast(const SamplePath& path, PairStatistic stat, double p);

// O(n^2) enumeration of all pair statistics, ascending (test oracle)
std::vector<double> pair_statistic_values(const std::vector<double>& sample,
                                          PairStatistic stat);

}  // namespace uquant
