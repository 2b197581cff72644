#include "uquant/math_util.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "uquant/errors.hpp"

namespace uquant {

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Wichura's algorithm AS 241, PPND16: rational approximations on the
// central and two tail regions.
double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "OutOfRange", "normal_quantile requires p in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-6) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

double compensated_total(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double mean(const std::vector<double>& xs) {
  require(!xs.empty(), "EmptySample", "mean of an empty vector");
  return compensated_total(xs) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  require(xs.size() >= 2, "SampleTooSmall", "variance needs at least 2 values");
  const double m = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "InvalidGrid", "fit_line length mismatch");
  const std::size_t n = x.size();
  require(n >= 2, "InsufficientGrid", "fit_line needs at least 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "InvalidGrid", "fit_line with constant abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      sse += e * e;
    }
    f.slope_se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && !x.empty(), "InvalidGrid",
          "fit_through_origin needs matching nonempty inputs");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  require(sxx > 0.0, "InvalidGrid", "fit_through_origin with all-zero abscissa");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = 0.0;
  if (x.size() > 1) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - f.slope * x[i];
      sse += e * e;
    }
    f.slope_se = std::sqrt(sse / static_cast<double>(x.size() - 1) / sxx);
  }
  return f;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  require(!sample.empty(), "EmptySample", "ks_distance of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "EmptySample", "ks_two_sample of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<double> isotonic_nondecreasing(std::vector<double> v) {
  // PAVA with uniform weights: merge blocks while a violation remains
  const std::size_t n = v.size();
  std::vector<double> level;
  std::vector<std::size_t> count;
  level.reserve(n);
  count.reserve(n);
  for (double x : v) {
    level.push_back(x);
    count.push_back(1);
    while (level.size() >= 2 && level[level.size() - 2] > level.back()) {
      const double merged =
          (level[level.size() - 2] * static_cast<double>(count[count.size() - 2]) +
           level.back() * static_cast<double>(count.back())) /
          static_cast<double>(count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b)
    out.insert(out.end(), count[b], level[b]);
  return out;
}

double lag_autocorrelation(const std::vector<double>& xs, std::size_t lag) {
  require(xs.size() > lag + 1, "SeriesTooShort", "series shorter than the requested lag");
  const double m = mean(xs);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + lag < xs.size(); ++i)
    num += (xs[i] - m) * (xs[i + lag] - m);
  for (double x : xs) den += (x - m) * (x - m);
  require(den > 0.0, "DegenerateDensity", "autocorrelation of a constant series");
  return num / den;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn, &first_error, &error_mutex] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace uquant
