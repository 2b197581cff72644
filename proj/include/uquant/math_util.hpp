#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace uquant {

double normal_pdf(double x);
double normal_cdf(double x);
// inverse of the standard normal CDF (Wichura's PPND16 rational
// approximation, relative error below 1e-15 on (0,1))
double normal_quantile(double p);

// Neumaier compensated accumulator: totals independent of how callers chunk
// their additions, which keeps parallel reductions order-stable.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_total(const std::vector<double>& xs);
double mean(const std::vector<double>& xs);
// unbiased variance, 1/(n-1) normalization
double sample_variance(const std::vector<double>& xs);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// least squares with zero intercept; slope_se from the residual variance
LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

// Kolmogorov-Smirnov distance of a sample against a continuous CDF
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// pool-adjacent-violators: L2 projection onto nondecreasing sequences
std::vector<double> isotonic_nondecreasing(std::vector<double> v);

double lag_autocorrelation(const std::vector<double>& xs, std::size_t lag);

// Runs fn(i) for i in [0, count) split into contiguous blocks across
// `threads` workers. Callers own any output slots; results must not depend
// on scheduling, so fn may not touch shared mutable state.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace uquant
