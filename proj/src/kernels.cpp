#include "uquant/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "uquant/errors.hpp"
#include "uquant/math_util.hpp"
#include "uquant/rng.hpp"

namespace uquant {

double pair_value(PairStatistic stat, double x, double y) {
  return stat == PairStatistic::Mean ? (x + y) / 2.0 : std::abs(x - y);
}

KernelSpec make_hl_kernel() {
  KernelSpec k;
  k.name = "hl";
  k.bound_K = 1.0;
  k.pair_statistic = PairStatistic::Mean;
  k.eval = [](double x, double y, double t) {
    return pair_value(PairStatistic::Mean, x, y) <= t ? 1.0 : 0.0;
  };
  return k;
}

KernelSpec make_qn_kernel() {
  KernelSpec k;
  k.name = "qn";
  k.bound_K = 1.0;
  k.pair_statistic = PairStatistic::AbsDiff;
  k.eval = [](double x, double y, double t) {
    return pair_value(PairStatistic::AbsDiff, x, y) <= t ? 1.0 : 0.0;
  };
  return k;
}

KernelSpec with_normal_marginal(KernelSpec k, double sigma) {
  require(sigma > 0.0, "InvalidParam", "marginal scale must be positive");
  if (!k.pair_statistic) return k;
  if (*k.pair_statistic == PairStatistic::Mean) {
    // (X+Y)/2 ~ N(0, sigma^2/2)
    k.analytic_U = [sigma](double t) { return normal_cdf(std::sqrt(2.0) * t / sigma); };
    k.analytic_u = [sigma](double t) {
      return std::sqrt(2.0) / sigma * normal_pdf(std::sqrt(2.0) * t / sigma);
    };
    k.analytic_h1 = [sigma](double x, double t) {
      return normal_cdf((2.0 * t - x) / sigma) - normal_cdf(std::sqrt(2.0) * t / sigma);
    };
  } else {
    // |X-Y| with X-Y ~ N(0, 2 sigma^2)
    k.analytic_U = [sigma](double t) {
      if (t < 0.0) return 0.0;
      return 2.0 * normal_cdf(t / (sigma * std::sqrt(2.0))) - 1.0;
    };
    k.analytic_u = [sigma](double t) {
      if (t < 0.0) return 0.0;
      return std::sqrt(2.0) / sigma * normal_pdf(t / (sigma * std::sqrt(2.0)));
    };
    k.analytic_h1 = [sigma](double x, double t) {
      if (t < 0.0) return 0.0;
      const double u = 2.0 * normal_cdf(t / (sigma * std::sqrt(2.0))) - 1.0;
      return normal_cdf((x + t) / sigma) - normal_cdf((x - t) / sigma) - u;
    };
  }
  return k;
}

namespace {

std::map<std::string, std::function<KernelSpec()>>& registry() {
  static std::map<std::string, std::function<KernelSpec()>> reg = {
      {"hl", make_hl_kernel}, {"qn", make_qn_kernel}};
  return reg;
}

std::mutex& registry_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

void register_kernel(const std::string& name, std::function<KernelSpec()> factory) {
  require(!name.empty(), "InvalidParam", "kernel name must be nonempty");
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[name] = std::move(factory);
}

KernelSpec find_kernel(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(name);
  require(it != registry().end(), "InvalidParam", "unknown kernel: " + name);
  return it->second();
}

bool has_kernel(const std::string& name) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  return registry().count(name) != 0;
}

MarginalOracle MarginalOracle::from_sample(std::vector<double> draws) {
  MarginalOracle m;
  m.reference = std::move(draws);
  return m;
}

MarginalOracle MarginalOracle::from_process(const ProcessModel& proc, std::size_t m,
                                            std::uint64_t seed) {
  MarginalOracle out;
  out.reference.resize(m);
  if (proc.marginal_quantile) {
    Rng rng(seed);
    for (double& x : out.reference) x = proc.marginal_quantile(rng.uniform01());
  } else {
    out.reference = proc.generate(m, seed).values;
  }
  return out;
}

double u_value(const KernelSpec& k, double t, const MarginalOracle& marginal) {
  if (k.analytic_U) return k.analytic_U(t);
  const auto& ref = marginal.reference;
  require(ref.size() >= 2, "MissingMarginal",
          "U(t) needs analytic_U or a reference sample of at least 2 draws");
  // disjoint pairs keep the average unbiased for E h(X,Y,t)
  CompensatedSum s;
  const std::size_t pairs = ref.size() / 2;
  for (std::size_t i = 0; i < pairs; ++i) s.add(k.eval(ref[2 * i], ref[2 * i + 1], t));
  return s.value() / static_cast<double>(pairs);
}

double h1_value(const KernelSpec& k, double x, double t, const MarginalOracle& marginal,
                double* se_out) {
  if (k.analytic_h1) {
    if (se_out) *se_out = 0.0;
    return k.analytic_h1(x, t);
  }
  const auto& ref = marginal.reference;
  require(!ref.empty(), "MissingMarginal",
          "h1 needs analytic_h1 or a nonempty reference sample");
  CompensatedSum s, s2;
  for (double y : ref) {
    const double v = k.eval(x, y, t);
    s.add(v);
    s2.add(v * v);
  }
  const double m = static_cast<double>(ref.size());
  const double avg = s.value() / m;
  if (se_out) {
    const double var = std::max(0.0, s2.value() / m - avg * avg);
    *se_out = std::sqrt(var / m);
  }
  return avg - u_value(k, t, marginal);
}

double h2_value(const KernelSpec& k, double x, double y, double t,
                const MarginalOracle& marginal) {
  return k.eval(x, y, t) - h1_value(k, x, t, marginal) - h1_value(k, y, t, marginal) -
         u_value(k, t, marginal);
}

namespace {

// sup of |h - h| over two points ranging in the epsilon-ball around (x,y):
// 1 exactly when the ball crosses the indicator boundary; generic kernels
// fall back to a 16-point boundary probe (a lower bound on the sup)
double ball_oscillation(const KernelSpec& k, double x, double y, double t, double eps) {
  if (k.pair_statistic) {
    if (*k.pair_statistic == PairStatistic::Mean) {
      const double s = pair_value(PairStatistic::Mean, x, y);
      const double d = eps / std::sqrt(2.0);
      return (s - d <= t && s + d > t) ? 1.0 : 0.0;
    }
    const double s = pair_value(PairStatistic::AbsDiff, x, y);
    const double d = std::sqrt(2.0) * eps;
    return (std::max(0.0, s - d) <= t && s + d > t) ? 1.0 : 0.0;
  }
  double lo = k.eval(x, y, t), hi = lo;
  for (int j = 0; j < 16; ++j) {
    const double ang = 2.0 * 3.14159265358979323846 * j / 16.0;
    const double v = k.eval(x + eps * std::cos(ang), y + eps * std::sin(ang), t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

void check_epsilon_grid(const std::vector<double>& epsilons) {
  require(!epsilons.empty(), "InvalidGrid", "epsilon grid is empty");
  double prev = 0.0;
  for (double e : epsilons) {
    require(e > prev, "InvalidGrid", "epsilons must be positive and strictly increasing");
    prev = e;
  }
}

// one marginal draw per call; independent-copy pairs use two streams when no
// closed-form quantile exists
struct MarginalSampler {
  const ProcessModel& proc;
  Rng rng;
  std::vector<double> fallback;
  std::size_t pos = 0;

  MarginalSampler(const ProcessModel& p, std::size_t need, std::uint64_t seed)
      : proc(p), rng(seed) {
    if (!proc.marginal_quantile) fallback = proc.generate(need, seed).values;
  }

  double draw() {
    if (proc.marginal_quantile) return proc.marginal_quantile(rng.uniform01());
    return fallback[pos++];
  }
};

VariationEstimate finish_variation(std::string name, double t,
                                   const std::vector<double>& epsilons,
                                   std::vector<double> raw, std::vector<double> se,
                                   std::size_t reps, std::uint64_t seed) {
  VariationEstimate v;
  v.kernel = std::move(name);
  v.t = t;
  v.epsilon_grid = epsilons;
  v.std_errors = std::move(se);
  v.estimates = isotonic_nondecreasing(std::move(raw));
  v.reps = reps;
  v.seed = seed;
  const LineFit fit = fit_through_origin(epsilons, v.estimates);
  v.fitted_L = fit.slope;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    num += epsilons[i] * epsilons[i] * v.std_errors[i] * v.std_errors[i];
    den += epsilons[i] * epsilons[i];
  }
  v.fitted_L_se = den > 0.0 ? std::sqrt(num) / den : 0.0;
  return v;
}

}  // namespace

VariationEstimate estimate_variation_constant(const KernelSpec& k, const ProcessModel& proc,
                                              double t, const std::vector<double>& epsilons,
                                              std::size_t reps, std::uint64_t seed) {
  check_epsilon_grid(epsilons);
  require(reps >= 100, "InvalidParam", "variation estimate needs reps >= 100");
  MarginalSampler sx(proc, reps, derive_seed(seed, 1));
  MarginalSampler sy(proc, reps, derive_seed(seed, 2));
  const std::size_t ne = epsilons.size();
  std::vector<double> sum(ne, 0.0), sumsq(ne, 0.0);
  // common random pairs across the grid: monotone in epsilon by construction
  for (std::size_t r = 0; r < reps; ++r) {
    const double x = sx.draw();
    const double y = sy.draw();
    for (std::size_t i = 0; i < ne; ++i) {
      const double v = ball_oscillation(k, x, y, t, epsilons[i]);
      sum[i] += v;
      sumsq[i] += v * v;
    }
  }
  std::vector<double> raw(ne), se(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    raw[i] = sum[i] / static_cast<double>(reps);
    const double var = std::max(0.0, sumsq[i] / static_cast<double>(reps) - raw[i] * raw[i]);
    se[i] = std::sqrt(var / static_cast<double>(reps));
  }
  return finish_variation(k.name, t, epsilons, std::move(raw), std::move(se), reps, seed);
}

VariationEstimate estimate_variation_constant_1d(const std::function<double(double, double)>& g,
                                                 const std::string& name,
                                                 const ProcessModel& proc, double t,
                                                 const std::vector<double>& epsilons,
                                                 std::size_t reps, std::uint64_t seed) {
  check_epsilon_grid(epsilons);
  require(reps >= 100, "InvalidParam", "variation estimate needs reps >= 100");
  MarginalSampler sx(proc, reps, derive_seed(seed, 1));
  const std::size_t ne = epsilons.size();
  std::vector<double> sum(ne, 0.0), sumsq(ne, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const double x = sx.draw();
    for (std::size_t i = 0; i < ne; ++i) {
      double lo = g(x, t), hi = lo;
      for (int j = 0; j <= 16; ++j) {
        const double v = g(x - epsilons[i] + 2.0 * epsilons[i] * j / 16.0, t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double osc = hi - lo;
      sum[i] += osc;
      sumsq[i] += osc * osc;
    }
  }
  std::vector<double> raw(ne), se(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    raw[i] = sum[i] / static_cast<double>(reps);
    const double var = std::max(0.0, sumsq[i] / static_cast<double>(reps) - raw[i] * raw[i]);
    se[i] = std::sqrt(var / static_cast<double>(reps));
  }
  return finish_variation(name, t, epsilons, std::move(raw), std::move(se), reps, seed);
}

}  // namespace uquant
