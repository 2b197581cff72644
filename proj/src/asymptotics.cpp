#include "uquant/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "uquant/errors.hpp"
#include "uquant/math_util.hpp"
#include "uquant/rng.hpp"

namespace uquant {

LrvEstimate long_run_variance(const std::vector<double>& series,
                              std::optional<std::size_t> bandwidth) {
  const std::size_t n = series.size();
  require(n >= 8, "SeriesTooShort", "long-run variance needs n >= 8");
  const std::size_t b =
      bandwidth ? *bandwidth
                : static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
  require(b < n, "InvalidParam", "bandwidth must be below the series length");
  const double m = mean(series);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = series[i] - m;
  // 1/n autocovariances keep the Bartlett form nonnegative
  auto gamma_hat = [&](std::size_t k) {
    CompensatedSum s;
    for (std::size_t i = 0; i + k < n; ++i) s.add(c[i] * c[i + k]);
    return s.value() / static_cast<double>(n);
  };
  double value = gamma_hat(0);
  for (std::size_t k = 1; k <= b; ++k)
    value += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(b + 1)) * gamma_hat(k);
  LrvEstimate out;
  out.value = std::max(0.0, value);
  out.bandwidth = b;
  out.series_length = n;
  return out;
}

namespace {

// row count #{j != i : h(x_i, x_j, t) = 1} for pair-statistic kernels via
// binary searches on the sorted sample
std::uint64_t indicator_row_count(const std::vector<double>& sorted, PairStatistic stat,
                                  double x, double t) {
  if (stat == PairStatistic::Mean) {
    const auto it = std::partition_point(sorted.begin(), sorted.end(), [&](double y) {
      return pair_value(PairStatistic::Mean, x, y) <= t;
    });
    std::uint64_t count = static_cast<std::uint64_t>(it - sorted.begin());
    if (pair_value(PairStatistic::Mean, x, x) <= t) --count;  // drop the self pair
    return count;
  }
  const auto mid = std::lower_bound(sorted.begin(), sorted.end(), x);
  const auto right_end = std::partition_point(mid, sorted.end(), [&](double y) {
    return pair_value(PairStatistic::AbsDiff, x, y) <= t;
  });
  const auto left_begin = std::partition_point(sorted.begin(), mid, [&](double y) {
    return pair_value(PairStatistic::AbsDiff, x, y) > t;
  });
  std::uint64_t count =
      static_cast<std::uint64_t>(right_end - mid) + static_cast<std::uint64_t>(mid - left_begin);
  if (pair_value(PairStatistic::AbsDiff, x, x) <= t) --count;
  return count;
}

}  // namespace

std::vector<double> h1_pseudo_values(const SamplePath& path, const KernelSpec& kernel,
                                     double t) {
  const std::size_t n = path.values.size();
  require(n >= 2, "SampleTooSmall", "pseudo-values need n >= 2");
  std::vector<double> out(n);
  const double denom = static_cast<double>(n - 1);
  const double total = static_cast<double>(static_cast<std::uint64_t>(n) * (n - 1) / 2);
  if (kernel.pair_statistic) {
    std::vector<double> sorted(path.values);
    std::sort(sorted.begin(), sorted.end());
    const PairStatistic stat = *kernel.pair_statistic;
    const double u_n =
        static_cast<double>(count_pairs_leq(sorted, stat, t)) / total;
    for (std::size_t i = 0; i < n; ++i)
      out[i] = static_cast<double>(indicator_row_count(sorted, stat, path.values[i], t)) /
                   denom -
               u_n;
    return out;
  }
  std::vector<CompensatedSum> rows(n);
  CompensatedSum all;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double h = kernel.eval(path.values[i], path.values[j], t);
      rows[i].add(h);
      rows[j].add(h);
      all.add(h);
    }
  const double u_n = all.value() / total;
  for (std::size_t i = 0; i < n; ++i) out[i] = rows[i].value() / denom - u_n;
  return out;
}

double quantile_sigma2(const SamplePath& path, const QuantileTruth& truth,
                       std::optional<std::size_t> bandwidth) {
  require(path.values.size() >= 32, "SampleTooSmall", "plug-in variance needs n >= 32");
  require(truth.density_at_tp > 0.0, "DegenerateDensity",
          "plug-in variance needs a positive density at t_p");
  std::vector<double> series(path.values.size());
  for (std::size_t i = 0; i < series.size(); ++i)
    series[i] = path.values[i] <= truth.t_p ? 1.0 : 0.0;
  const LrvEstimate lrv = long_run_variance(series, bandwidth);
  require(lrv.value > 0.0, "DegenerateDensity",
          "plug-in long-run variance vanished (degenerate series)");
  return lrv.value / (truth.density_at_tp * truth.density_at_tp);
}

double quantile_sigma2(const SamplePath& path, const KernelSpec& kernel,
                       const QuantileTruth& truth, std::optional<std::size_t> bandwidth) {
  require(path.values.size() >= 32, "SampleTooSmall", "plug-in variance needs n >= 32");
  require(truth.density_at_tp > 0.0, "DegenerateDensity",
          "plug-in variance needs a positive density at t_p");
  const std::vector<double> pseudo = h1_pseudo_values(path, kernel, truth.t_p);
  const LrvEstimate lrv = long_run_variance(pseudo, bandwidth);
  require(lrv.value > 0.0, "DegenerateDensity",
          "plug-in long-run variance vanished (degenerate series)");
  // the linear Hoeffding term is (2/n) sum h1, hence the factor 4
  return 4.0 * lrv.value / (truth.density_at_tp * truth.density_at_tp);
}

namespace {

CoverageResult coverage_impl(const ProcessModel& proc, const KernelSpec* kernel,
                             const QuantileTruth& truth, std::size_t n,
                             std::size_t replicates, double level, std::uint64_t seed,
                             std::size_t threads) {
  require(level > 0.0 && level < 1.0, "OutOfRange", "confidence level must lie in (0,1)");
  require(replicates >= 500, "InvalidParam", "coverage study needs replicates >= 500");
  const double z = normal_quantile((1.0 + level) / 2.0);
  std::vector<unsigned char> covered(replicates, 0);
  parallel_for(replicates, threads, [&](std::size_t rep) {
    const SamplePath path = proc.generate(n, derive_seed(seed, rep));
    double estimate, sigma2;
    if (kernel) {
      estimate = u_quantile_fast(path, *kernel->pair_statistic, truth.p);
      sigma2 = quantile_sigma2(path, *kernel, truth);
    } else {
      std::vector<double> sorted(path.values);
      std::sort(sorted.begin(), sorted.end());
      estimate = sorted[order_index(truth.p, sorted.size()) - 1];
      sigma2 = quantile_sigma2(path, truth);
    }
    const double half = z * std::sqrt(sigma2 / static_cast<double>(n));
    covered[rep] = std::abs(estimate - truth.t_p) <= half ? 1 : 0;
  });
  std::uint64_t hits = 0;
  for (unsigned char c : covered) hits += c;
  CoverageResult out;
  out.nominal = level;
  out.empirical = static_cast<double>(hits) / static_cast<double>(replicates);
  out.replicates = replicates;
  out.n = n;
  out.std_error =
      std::sqrt(out.empirical * (1.0 - out.empirical) / static_cast<double>(replicates));
  return out;
}

LilResult lil_impl(const ProcessModel& proc, const KernelSpec* kernel,
                   const QuantileTruth& truth, std::size_t n_max,
                   const std::vector<std::size_t>& checkpoints, double sigma2,
                   std::uint64_t seed) {
  require(n_max >= 1024, "OutOfRange", "LIL diagnostic needs n_max >= 1024");
  require(!checkpoints.empty(), "InvalidGrid", "LIL diagnostic needs checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    require(checkpoints[i] >= 16 && checkpoints[i] <= n_max, "OutOfRange",
            "checkpoints must lie in [16, n_max]");
    if (i > 0)
      require(checkpoints[i] > checkpoints[i - 1], "InvalidGrid",
              "checkpoints must be strictly increasing");
  }
  require(sigma2 > 0.0, "DegenerateDensity", "LIL scaling needs sigma2 > 0");
  const SamplePath full = proc.generate(n_max, seed);
  LilResult out;
  out.checkpoints = checkpoints;
  out.sigma2 = sigma2;
  for (std::size_t c : checkpoints) {
    SamplePath prefix{{full.values.begin(), full.values.begin() + static_cast<long>(c)},
                      full.process_name,
                      seed};
    double estimate;
    if (kernel) {
      estimate = u_quantile_fast(prefix, *kernel->pair_statistic, truth.p);
    } else {
      std::vector<double> sorted(prefix.values);
      std::sort(sorted.begin(), sorted.end());
      estimate = sorted[order_index(truth.p, sorted.size()) - 1];
    }
    const double scale = std::sqrt(static_cast<double>(c) /
                                   std::log(std::log(static_cast<double>(c)))) /
                         std::sqrt(2.0 * sigma2);
    out.per_checkpoint.push_back(scale * std::abs(estimate - truth.t_p));
  }
  out.statistic = *std::max_element(out.per_checkpoint.begin(), out.per_checkpoint.end());
  return out;
}

}  // namespace

CoverageResult clt_coverage(const ProcessModel& proc, const QuantileTruth& truth,
                            std::size_t n, std::size_t replicates, double level,
                            std::uint64_t seed, std::size_t threads) {
  return coverage_impl(proc, nullptr, truth, n, replicates, level, seed, threads);
}

CoverageResult clt_coverage(const ProcessModel& proc, const KernelSpec& kernel,
                            const QuantileTruth& truth, std::size_t n,
                            std::size_t replicates, double level, std::uint64_t seed,
                            std::size_t threads) {
  require(kernel.pair_statistic.has_value(), "NotIndicator",
          "U-quantile coverage needs a pair-statistic kernel");
  return coverage_impl(proc, &kernel, truth, n, replicates, level, seed, threads);
}

LilResult lil_diagnostic(const ProcessModel& proc, const QuantileTruth& truth,
                         std::size_t n_max, const std::vector<std::size_t>& checkpoints,
                         double sigma2, std::uint64_t seed) {
  return lil_impl(proc, nullptr, truth, n_max, checkpoints, sigma2, seed);
}

LilResult lil_diagnostic(const ProcessModel& proc, const KernelSpec& kernel,
                         const QuantileTruth& truth, std::size_t n_max,
                         const std::vector<std::size_t>& checkpoints, double sigma2,
                         std::uint64_t seed) {
  require(kernel.pair_statistic.has_value(), "NotIndicator",
          "U-quantile LIL diagnostic needs a pair-statistic kernel");
  return lil_impl(proc, &kernel, truth, n_max, checkpoints, sigma2, seed);
}

}  // namespace uquant
