#include "uquant/bahadur.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "uquant/errors.hpp"
#include "uquant/math_util.hpp"
#include "uquant/rng.hpp"

namespace uquant {

QuantileTruth normal_quantile_truth(double p, double sigma) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "quantile level must lie in (0,1)");
  require(sigma > 0.0, "InvalidParam", "marginal scale must be positive");
  const double z = normal_quantile(p);
  return QuantileTruth{p, sigma * z, normal_pdf(z) / sigma, "analytic"};
}

QuantileTruth hl_normal_truth(double p, double sigma) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "quantile level must lie in (0,1)");
  require(sigma > 0.0, "InvalidParam", "marginal scale must be positive");
  // (X+Y)/2 ~ N(0, sigma^2/2)
  const double z = normal_quantile(p);
  const double t_p = sigma * z / std::sqrt(2.0);
  const double u = std::sqrt(2.0) / sigma * normal_pdf(z);
  return QuantileTruth{p, t_p, u, "analytic"};
}

QuantileTruth qn_normal_truth(double p, double sigma) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "quantile level must lie in (0,1)");
  require(sigma > 0.0, "InvalidParam", "marginal scale must be positive");
  // solve 2 Phi(t / (sigma sqrt 2)) - 1 = p
  const double z = normal_quantile((1.0 + p) / 2.0);
  const double t_p = sigma * std::sqrt(2.0) * z;
  const double u = std::sqrt(2.0) / sigma * normal_pdf(z);
  return QuantileTruth{p, t_p, u, "derived-numeric"};
}

QuantileTruth gauss_measure_truth(double p) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "quantile level must lie in (0,1)");
  const double t_p = std::exp2(p) - 1.0;
  const double f = 1.0 / (std::log(2.0) * (1.0 + t_p));
  return QuantileTruth{p, t_p, f, "analytic"};
}

bool check_local_smoothness(const std::function<double(double)>& U, const QuantileTruth& truth,
                            double c) {
  for (int j = 2; j <= 26; ++j) {
    const double d = std::ldexp(1.0, -j);
    for (double s : {-1.0, 1.0}) {
      const double lhs =
          std::abs(U(truth.t_p + s * d) - truth.p - truth.density_at_tp * s * d);
      if (lhs > c * std::pow(d, 1.5) + 1e-12) return false;
    }
  }
  return true;
}

RemainderSample remainder_quantile(const SamplePath& path, const QuantileTruth& truth) {
  require(!path.values.empty(), "EmptySample", "remainder of an empty path");
  require(truth.density_at_tp > 0.0, "DegenerateDensity",
          "remainder needs a positive density at t_p");
  std::vector<double> sorted(path.values);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double estimate = sorted[order_index(truth.p, n) - 1];
  const auto leq =
      std::upper_bound(sorted.begin(), sorted.end(), truth.t_p) - sorted.begin();
  const double fn_tp = static_cast<double>(leq) / static_cast<double>(n);
  const double linear = (truth.p - fn_tp) / truth.density_at_tp;
  return RemainderSample{n, estimate - truth.t_p - linear, estimate, linear, path.seed};
}

RemainderSample remainder_uquantile(const SamplePath& path, const KernelSpec& kernel,
                                    const QuantileTruth& truth) {
  require(kernel.pair_statistic.has_value(), "NotIndicator",
          "U-quantile remainder needs a pair-statistic kernel");
  require(path.values.size() >= 2, "SampleTooSmall", "U-quantile remainder needs n >= 2");
  require(truth.density_at_tp > 0.0, "DegenerateDensity",
          "remainder needs a positive density at t_p");
  std::vector<double> sorted(path.values);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const PairStatistic stat = *kernel.pair_statistic;
  const double estimate = kth_pair_statistic(sorted, stat, order_index(truth.p, total));
  const double un_tp = static_cast<double>(count_pairs_leq(sorted, stat, truth.t_p)) /
                       static_cast<double>(total);
  const double linear = (truth.p - un_tp) / truth.density_at_tp;
  return RemainderSample{n, estimate - truth.t_p - linear, estimate, linear, path.seed};
}

namespace {

// shared sup evaluation: the empirical CDF-like object is piecewise constant
// with jumps exactly at `jumps` (values inside the window, sorted,
// multiplicities kept); outside contributions enter through count_below
double window_sup(const std::vector<double>& jumps, double count_below, double total,
                  const std::function<double(double)>& truth_fn, double t_p, double window,
                  double step) {
  const auto fn_at = [&](double t) {
    const auto leq = std::upper_bound(jumps.begin(), jumps.end(), t) - jumps.begin();
    return (count_below + static_cast<double>(leq)) / total;
  };
  const double base = fn_at(t_p) - truth_fn(t_p);
  double sup = 0.0;
  const auto visit = [&](double fn_value, double t) {
    sup = std::max(sup, std::abs(fn_value - truth_fn(t) - base));
  };
  // proof grid with step d_n
  const long m_max = static_cast<long>(std::floor(window / step));
  for (long m = -m_max; m <= m_max; ++m) {
    const double t = t_p + static_cast<double>(m) * step;
    visit(fn_at(t), t);
  }
  visit(fn_at(t_p - window), t_p - window);
  visit(fn_at(t_p + window), t_p + window);
  // exact jump points: both the new value and the left limit
  for (std::size_t i = 0; i < jumps.size();) {
    std::size_t j = i;
    while (j < jumps.size() && jumps[j] == jumps[i]) ++j;
    const double v = jumps[i];
    visit((count_below + static_cast<double>(j)) / total, v);
    visit((count_below + static_cast<double>(i)) / total, v);
    i = j;
  }
  return sup;
}

struct WindowSpec {
  double half_width;
  double step;
};

WindowSpec oscillation_window(std::size_t n, double C) {
  require(n >= 16, "WindowTooSmall", "oscillation window needs n >= 16");
  const double loglog = std::log(std::log(static_cast<double>(n)));
  return WindowSpec{C * std::sqrt(loglog / static_cast<double>(n)),
                    std::pow(loglog / static_cast<double>(n), 0.75)};
}

}  // namespace

double oscillation_sup(const SamplePath& path, const std::function<double(double)>& true_cdf,
                       const QuantileTruth& truth, double C) {
  require(C >= 0.0, "InvalidParam", "window constant must be nonnegative");
  if (C == 0.0) return 0.0;
  const WindowSpec w = oscillation_window(path.values.size(), C);
  std::vector<double> sorted(path.values);
  std::sort(sorted.begin(), sorted.end());
  const double wl = truth.t_p - w.half_width, wh = truth.t_p + w.half_width;
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), wl);
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), wh);
  std::vector<double> jumps(lo, hi);
  const double below = static_cast<double>(lo - sorted.begin());
  return window_sup(jumps, below, static_cast<double>(sorted.size()), true_cdf, truth.t_p,
                    w.half_width, w.step);
}

double oscillation_sup(const SamplePath& path, const KernelSpec& kernel,
                       const QuantileTruth& truth, double C) {
  require(C >= 0.0, "InvalidParam", "window constant must be nonnegative");
  require(kernel.pair_statistic.has_value(), "NotIndicator",
          "U-statistic oscillation needs a pair-statistic kernel");
  require(static_cast<bool>(kernel.analytic_U), "MissingMarginal",
          "U-statistic oscillation needs analytic_U");
  if (C == 0.0) return 0.0;
  const std::size_t n = path.values.size();
  const WindowSpec w = oscillation_window(n, C);
  std::vector<double> sorted(path.values);
  std::sort(sorted.begin(), sorted.end());
  const double wl = truth.t_p - w.half_width, wh = truth.t_p + w.half_width;
  const PairStatistic stat = *kernel.pair_statistic;

  // pair values inside the window, found per left index by value bounds
  // (padded by a little slop, then filtered exactly)
  std::vector<double> jumps;
  const double pad = 1e-9 * (1.0 + std::abs(truth.t_p) + w.half_width);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = sorted[i];
    auto emit_range = [&](double vlo, double vhi) {
      auto a = std::lower_bound(sorted.begin() + static_cast<long>(i) + 1, sorted.end(),
                                vlo - pad);
      auto b = std::upper_bound(sorted.begin() + static_cast<long>(i) + 1, sorted.end(),
                                vhi + pad);
      for (auto it = a; it != b; ++it) {
        const double v = pair_value(stat, xi, *it);
        if (v >= wl && v <= wh) jumps.push_back(v);
      }
    };
    if (stat == PairStatistic::Mean) {
      emit_range(2.0 * wl - xi, 2.0 * wh - xi);
    } else {
      // j > i means x_j >= x_i, so the pair value is x_j - x_i
      emit_range(xi + std::max(0.0, wl), xi + wh);
    }
  }
  std::sort(jumps.begin(), jumps.end());
  const double total = static_cast<double>(static_cast<std::uint64_t>(n) * (n - 1) / 2);
  const double below = static_cast<double>(count_pairs_leq(
      sorted, stat, std::nextafter(wl, -std::numeric_limits<double>::infinity())));
  return window_sup(jumps, below, total, kernel.analytic_U, truth.t_p, w.half_width, w.step);
}

double theoretical_exponent(double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "OutOfRange", "gamma must lie in (0,1]");
  return 0.625 + 0.125 * gamma;
}

double kiefer_constant(double p) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "kiefer constant needs p in (0,1)");
  return std::sqrt(2.0) * std::pow(3.0, -0.75) * std::pow(p * (1.0 - p), 0.25);
}

RateStudyResult rate_study(const RateStudyConfig& config, std::vector<ReplicateRecord>* dump) {
  const auto& grid = config.n_grid;
  require(grid.size() >= 4, "InsufficientGrid", "rate study needs at least 4 grid points");
  require(grid.front() >= 128, "InsufficientGrid", "rate study grid starts at n >= 128");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require((grid[i] & (grid[i] - 1)) == 0, "InsufficientGrid",
            "rate study grid must be powers of two");
    if (i > 0)
      require(grid[i] > grid[i - 1], "InsufficientGrid",
              "rate study grid must be strictly increasing");
  }
  require(config.replicates >= 500, "InsufficientGrid", "rate study needs replicates >= 500");
  require(config.truth.density_at_tp > 0.0, "DegenerateDensity",
          "rate study needs a positive density at t_p");

  const Dependence& dep = config.process.dependence;
  if (config.statistic == StatisticKind::UQuantile) {
    require(config.kernel.pair_statistic.has_value(), "NotIndicator",
            "U-quantile rate study needs a pair-statistic kernel");
    // the U-quantile rate guarantee needs a stricter mixing-decay floor
    if (dep.kind == DependenceKind::StrongMixing && !std::isinf(dep.beta))
      require(dep.beta >= 3.25, "OutOfRange",
              "U-quantile study under strong mixing needs beta >= 13/4");
  }
  const double gamma = gamma_exponent(dep);

  // advisory check of the local smoothness assumption on the truth
  const std::function<double(double)>& analytic =
      config.statistic == StatisticKind::UQuantile ? config.kernel.analytic_U
                                                   : config.process.marginal_cdf;
  if (analytic && !check_local_smoothness(analytic, config.truth))
    std::cerr << "warning: truth fails the local smoothness check near t_p\n";

  const std::size_t reps = config.replicates;
  const std::size_t n_max = grid.back();
  std::vector<std::vector<double>> r_slots(grid.size(), std::vector<double>(reps, 0.0));

  parallel_for(reps, config.threads, [&](std::size_t rep) {
    const std::uint64_t seed = derive_seed(config.master_seed, rep);
    const SamplePath full = config.process.generate(n_max, seed);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      SamplePath prefix{{full.values.begin(), full.values.begin() + static_cast<long>(grid[gi])},
                        full.process_name,
                        seed};
      const RemainderSample rem =
          config.statistic == StatisticKind::UQuantile
              ? remainder_uquantile(prefix, config.kernel, config.truth)
              : remainder_quantile(prefix, config.truth);
      r_slots[gi][rep] = rem.r;
    }
  });

  RateStudyResult out;
  out.n_grid = grid;
  out.replicates = reps;
  out.gamma = gamma;
  out.theoretical_exponent = theoretical_exponent(gamma);
  std::vector<double> log_n, log_rms;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    CompensatedSum sq, lin;
    std::vector<double> abs_r(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const double r = r_slots[gi][rep];
      sq.add(r * r);
      lin.add(r);
      abs_r[rep] = std::abs(r);
    }
    std::sort(abs_r.begin(), abs_r.end());
    const double rms = std::sqrt(sq.value() / static_cast<double>(reps));
    out.rms_r.push_back(rms);
    out.mean_r.push_back(lin.value() / static_cast<double>(reps));
    out.q90_abs_r.push_back(abs_r[order_index(0.9, reps) - 1]);
    log_n.push_back(std::log2(static_cast<double>(grid[gi])));
    log_rms.push_back(std::log2(rms));
    if (dump)
      for (std::size_t rep = 0; rep < reps; ++rep)
        dump->push_back(ReplicateRecord{grid[gi], rep, r_slots[gi][rep]});
  }
  const LineFit fit = fit_line(log_n, log_rms);
  out.fitted_slope = fit.slope;
  out.slope_se = fit.slope_se;
  return out;
}

}  // namespace uquant
