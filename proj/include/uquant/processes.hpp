#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace uquant {

enum class DependenceKind { Iid, MDependent, StrongMixing, ApproxFunctional };

// beta is the declared polynomial rate exponent of the mixing or
// approximation coefficients. +infinity encodes geometric-or-better decay
// (iid, AR(1), m-dependent) and maps to gamma = 1.
struct Dependence {
  DependenceKind kind = DependenceKind::Iid;
  double beta = std::numeric_limits<double>::infinity();
  std::size_t m = 0;  // MDependent window
};

struct SamplePath {
  std::vector<double> values;
  std::string process_name;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return values.size(); }
};

// Seeded stationary-sequence generator with declared dependence metadata and
// marginal distribution knowledge where a closed form exists. Immutable
// after construction; generate is pure in (n, seed).
struct ProcessModel {
  std::string name;
  Dependence dependence;
  std::function<double(double)> marginal_cdf;       // empty when unknown
  std::function<double(double)> marginal_pdf;       // empty when unknown
  std::function<double(double)> marginal_quantile;  // empty when unknown
  std::map<std::string, double> params;
  std::function<std::vector<double>(std::size_t, std::uint64_t)> sample;

  SamplePath generate(std::size_t n, std::uint64_t seed) const;
};

ProcessModel iid_normal();
ProcessModel ar1_gaussian(double phi);
ProcessModel ma_q(std::size_t q, const std::vector<double>& weights);

enum class Innovation { Rademacher, Poisson };
ProcessModel linear_discrete(double decay_a, Innovation innovation, double lambda = 1.0);

ProcessModel gauss_map(std::size_t burn_in = 1000);

// one step of the continued-fraction map x -> 1/x - floor(1/x)
double gauss_map_iterate(double x);

// gamma entering the remainder rate n^-(5/8 + gamma/8):
// (beta-2)/beta under strong mixing (beta >= 3),
// (beta-3)/(beta+1) for 1-approximating functionals (beta > 3),
// 1 for iid / m-dependent and for the +infinity sentinel.
double gamma_exponent(DependenceKind condition, double beta);
double gamma_exponent(const Dependence& dep);

// a_l = 2 E|Z_1| sum_{k>l} k^-decay_a by partial sums
double linear_approx_constant(double decay_a, double e_abs_z, std::size_t l);

// "iid", "ar1:phi=0.5", "ma:q=2,w=1,1,1", "lin:a=4,inn=rademacher", "gauss"
ProcessModel parse_process(const std::string& spec);

}  // namespace uquant
