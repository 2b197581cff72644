#include "uquant/empirical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "uquant/errors.hpp"
#include "uquant/math_util.hpp"

namespace uquant {

std::size_t order_index(double p, std::size_t total) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "quantile level must lie in (0,1)");
  require(total >= 1, "EmptySample", "order_index over an empty set");
  const double target = p * static_cast<double>(total);
  std::size_t k = static_cast<std::size_t>(std::ceil(target));
  if (k < 1) k = 1;
  if (k > total) k = total;
  // ceil(p*total) can land one off after rounding; the index must agree with
  // the floating comparisons that define inf{t : F_n(t) >= p}
  while (k > 1 && static_cast<double>(k - 1) / static_cast<double>(total) >= p) --k;
  while (k < total && static_cast<double>(k) / static_cast<double>(total) < p) ++k;
  return k;
}

EmpiricalCdf::EmpiricalCdf(const SamplePath& path) : sorted(path.values) {
  std::sort(sorted.begin(), sorted.end());
}

EmpiricalCdf::EmpiricalCdf(const SamplePath& path, std::function<double(double, double)> g_fn,
                           double bound_K)
    : sorted(path.values), g(std::move(g_fn)), bound(bound_K) {
  std::sort(sorted.begin(), sorted.end());
}

double ecdf_eval(const EmpiricalCdf& F, double t) {
  require(!F.sorted.empty(), "EmptySample", "ecdf over an empty sample");
  const double n = static_cast<double>(F.sorted.size());
  if (F.indicator()) {
    const auto count = std::upper_bound(F.sorted.begin(), F.sorted.end(), t) - F.sorted.begin();
    return static_cast<double>(count) / n;
  }
  CompensatedSum s;
  for (double x : F.sorted) s.add(F.g(x, t));
  return s.value() / n;
}

double ecdf_quantile(const EmpiricalCdf& F, double p) {
  require(!F.sorted.empty(), "EmptySample", "quantile of an empty sample");
  require(F.indicator(), "NotInvertible",
          "generalized inverse needs an indicator-type g");
  return F.sorted[order_index(p, F.sorted.size()) - 1];
}

EmpiricalUDist::EmpiricalUDist(const SamplePath& path, KernelSpec k)
    : sorted(path.values), kernel(std::move(k)) {
  require(sorted.size() >= 2, "SampleTooSmall", "U-statistic needs n >= 2");
  std::sort(sorted.begin(), sorted.end());
}

std::uint64_t count_pairs_leq(const std::vector<double>& sorted, PairStatistic stat, double t) {
  const std::size_t n = sorted.size();
  std::uint64_t count = 0;
  if (stat == PairStatistic::Mean) {
    // both marginal maps of the rounded pair value are monotone, so the
    // classic shrink-from-both-ends walk counts exactly
    std::size_t lo = 0, hi = n - 1;
    while (lo < hi) {
      if (pair_value(PairStatistic::Mean, sorted[lo], sorted[hi]) <= t) {
        count += hi - lo;
        ++lo;
      } else {
        --hi;
      }
    }
    return count;
  }
  // the smallest i with |x_j - x_i| <= t is nondecreasing in j
  std::size_t i = 0;
  for (std::size_t j = 1; j < n; ++j) {
    while (i < j && pair_value(PairStatistic::AbsDiff, sorted[i], sorted[j]) > t) ++i;
    count += j - i;
  }
  return count;
}

namespace {

std::uint64_t ordinal(double x) noexcept {
  const std::uint64_t b = std::bit_cast<std::uint64_t>(x);
  return (b >> 63) ? ~b : (b | 0x8000000000000000ull);
}

double from_ordinal(std::uint64_t u) noexcept {
  const std::uint64_t b = (u >> 63) ? (u ^ 0x8000000000000000ull) : ~u;
  return std::bit_cast<double>(b);
}

}  // namespace

double kth_pair_statistic(const std::vector<double>& sorted, PairStatistic stat,
                          std::uint64_t k) {
  const std::size_t n = sorted.size();
  require(n >= 2, "SampleTooSmall", "pair selection needs n >= 2");
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  require(k >= 1 && k <= total, "OutOfRange", "pair rank outside 1..n(n-1)/2");

  double lo_val, hi_val;
  if (stat == PairStatistic::Mean) {
    lo_val = pair_value(stat, sorted[0], sorted[1]);
    hi_val = pair_value(stat, sorted[n - 2], sorted[n - 1]);
  } else {
    lo_val = pair_value(stat, sorted[0], sorted[1]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      lo_val = std::min(lo_val, pair_value(stat, sorted[i], sorted[i + 1]));
    hi_val = pair_value(stat, sorted[0], sorted[n - 1]);
  }
  if (count_pairs_leq(sorted, stat, lo_val) >= k) return lo_val + 0.0;

  // value-space bisection over the ordinal encoding of doubles; the bracket
  // keeps count(lo) < k <= count(hi) and narrows to adjacent ordinals, so
  // the answer is the smallest realizable pair value of rank >= k,
  // bit-identical to enumerating and sorting all pairs
  std::uint64_t lo = ordinal(lo_val), hi = ordinal(hi_val);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (count_pairs_leq(sorted, stat, from_ordinal(mid)) >= k)
      hi = mid;
    else
      lo = mid;
  }
  return from_ordinal(hi) + 0.0;  // +0.0 folds -0.0 into the canonical zero
}

double u_stat_eval(const EmpiricalUDist& U, double t) {
  const std::size_t n = U.sorted.size();
  const double total = static_cast<double>(static_cast<std::uint64_t>(n) * (n - 1) / 2);
  if (U.kernel.pair_statistic)
    return static_cast<double>(count_pairs_leq(U.sorted, *U.kernel.pair_statistic, t)) / total;
  CompensatedSum s;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s.add(U.kernel.eval(U.sorted[i], U.sorted[j], t));
  return s.value() / total;
}

double u_quantile(const EmpiricalUDist& U, double p) {
  require(U.kernel.pair_statistic.has_value(), "NotIndicator",
          "U-quantile needs an indicator kernel with a pair-statistic form");
  const std::size_t n = U.sorted.size();
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return kth_pair_statistic(U.sorted, *U.kernel.pair_statistic, order_index(p, total));
}

double u_quantile_fast(const std::vector<double>& sample, PairStatistic stat, double p) {
  require(sample.size() >= 2, "SampleTooSmall", "U-quantile needs n >= 2");
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return kth_pair_statistic(sorted, stat, order_index(p, total));
}

double u_quantile_fast(const SamplePath& path, PairStatistic stat, double p) {
  return u_quantile_fast(path.values, stat, p);
}

std::vector<double> pair_statistic_values(const std::vector<double>& sample,
                                          PairStatistic stat) {
  const std::size_t n = sample.size();
  require(n >= 2, "SampleTooSmall", "pair enumeration needs n >= 2");
  std::vector<double> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back(pair_value(stat, sample[i], sample[j]) + 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace uquant
