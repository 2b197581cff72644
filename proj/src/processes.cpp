#include "uquant/processes.hpp"

#include <cmath>
#include <cstdlib>

#include "uquant/errors.hpp"
#include "uquant/math_util.hpp"
#include "uquant/rng.hpp"

namespace uquant {

namespace {

// inverse-transform Poisson; consumes exactly one uniform per draw
double poisson_draw(Rng& rng, double lambda) {
  const double u = rng.uniform01();
  double cumulative = std::exp(-lambda);
  double term = cumulative;
  double k = 0.0;
  const double cap = 20.0 * lambda + 200.0;
  while (u > cumulative && k < cap) {
    k += 1.0;
    term *= lambda / k;
    cumulative += term;
  }
  return k;
}

}  // namespace

SamplePath ProcessModel::generate(std::size_t n, std::uint64_t seed) const {
  return SamplePath{sample(n, seed), name, seed};
}

ProcessModel iid_normal() {
  ProcessModel m;
  m.name = "iid";
  m.dependence = Dependence{DependenceKind::Iid, std::numeric_limits<double>::infinity(), 0};
  m.marginal_cdf = [](double x) { return normal_cdf(x); };
  m.marginal_pdf = [](double x) { return normal_pdf(x); };
  m.marginal_quantile = [](double p) { return normal_quantile(p); };
  m.sample = [](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& x : out) x = rng.normal();
    return out;
  };
  return m;
}

ProcessModel ar1_gaussian(double phi) {
  require(std::abs(phi) < 1.0, "InvalidParam", "ar1 requires |phi| < 1");
  ProcessModel m;
  m.name = "ar1";
  // geometrically strongly mixing; beta = +inf stands in for "any
  // polynomial rate", so gamma = 1
  m.dependence =
      Dependence{DependenceKind::StrongMixing, std::numeric_limits<double>::infinity(), 0};
  m.params["phi"] = phi;
  m.marginal_cdf = [](double x) { return normal_cdf(x); };
  m.marginal_pdf = [](double x) { return normal_pdf(x); };
  m.marginal_quantile = [](double p) { return normal_quantile(p); };
  m.sample = [phi](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    if (n == 0) return out;
    const double scale = std::sqrt(1.0 - phi * phi);
    // stationary start keeps the marginal standard normal at every index
    out[0] = rng.normal();
    for (std::size_t i = 1; i < n; ++i) out[i] = phi * out[i - 1] + scale * rng.normal();
    return out;
  };
  return m;
}

ProcessModel ma_q(std::size_t q, const std::vector<double>& weights) {
  require(q >= 1, "InvalidParam", "ma requires q >= 1");
  require(weights.size() == q + 1, "InvalidParam", "ma requires q+1 weights");
  double ss = 0.0;
  for (double w : weights) ss += w * w;
  require(ss > 0.0, "InvalidParam", "ma requires a nonzero weight vector");
  const double sigma = std::sqrt(ss);
  ProcessModel m;
  m.name = "ma";
  m.dependence = Dependence{DependenceKind::MDependent, std::numeric_limits<double>::infinity(), q};
  m.params["q"] = static_cast<double>(q);
  m.params["sigma"] = sigma;
  for (std::size_t j = 0; j < weights.size(); ++j)
    m.params["w" + std::to_string(j)] = weights[j];
  m.marginal_cdf = [sigma](double x) { return normal_cdf(x / sigma); };
  m.marginal_pdf = [sigma](double x) { return normal_pdf(x / sigma) / sigma; };
  m.marginal_quantile = [sigma](double p) { return sigma * normal_quantile(p); };
  m.sample = [q, weights](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> e(n + q);
    for (double& x : e) x = rng.normal();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= q; ++j) s += weights[j] * e[q + i - j];
      out[i] = s;
    }
    return out;
  };
  return m;
}

double linear_approx_constant(double decay_a, double e_abs_z, std::size_t l) {
  require(decay_a > 1.0, "InvalidParam", "tail sum diverges for decay_a <= 1");
  double sum = 0.0;
  double k = static_cast<double>(l) + 1.0;
  for (;; k += 1.0) {
    sum += std::pow(k, -decay_a);
    // integral bound on the remaining tail
    if (std::pow(k, 1.0 - decay_a) / (decay_a - 1.0) < 1e-14) break;
    if (k > 5e7) break;
  }
  return 2.0 * e_abs_z * sum;
}

ProcessModel linear_discrete(double decay_a, Innovation innovation, double lambda) {
  require(decay_a > 1.0, "InvalidParam", "linear process requires decay_a > 1");
  if (innovation == Innovation::Poisson)
    require(lambda > 0.0, "InvalidParam", "poisson innovations require lambda > 0");
  // smallest K with integral tail bound K^{1-a}/(a-1) below 1e-12 in l1
  const double k_real =
      std::pow(1.0 / (1e-12 * (decay_a - 1.0)), 1.0 / (decay_a - 1.0));
  require(k_real <= 1e6, "InvalidParam",
          "decay too slow to truncate the coefficient tail at double resolution");
  const std::size_t K = static_cast<std::size_t>(std::ceil(k_real));
  std::vector<double> coeff(K);
  for (std::size_t k = 1; k <= K; ++k)
    coeff[k - 1] = std::pow(static_cast<double>(k), -decay_a);

  const double e_abs_z = (innovation == Innovation::Rademacher) ? 1.0 : lambda;
  ProcessModel m;
  m.name = "lin";
  // a_l decays like l^{-(decay_a - 1)} = l^{-(beta + 3)}
  m.dependence = Dependence{DependenceKind::ApproxFunctional, decay_a - 4.0, 0};
  m.params["decay_a"] = decay_a;
  m.params["truncation_K"] = static_cast<double>(K);
  if (innovation == Innovation::Poisson) m.params["lambda"] = lambda;
  for (std::size_t l = 0; l < 10; ++l)
    m.params["a_" + std::to_string(l)] = linear_approx_constant(decay_a, e_abs_z, l);
  const bool rademacher = innovation == Innovation::Rademacher;
  m.sample = [coeff, rademacher, lambda](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t K = coeff.size();
    std::vector<double> z(n + K);
    for (double& x : z) x = rademacher ? rng.rademacher() : poisson_draw(rng, lambda);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum s;
      for (std::size_t k = 1; k <= K; ++k) s.add(coeff[k - 1] * z[K + i - k]);
      out[i] = s.value();
    }
    return out;
  };
  return m;
}

double gauss_map_iterate(double x) {
  const double y = 1.0 / x;
  return y - std::floor(y);
}

ProcessModel gauss_map(std::size_t burn_in) {
  ProcessModel m;
  m.name = "gauss";
  // 1-approximation error decays exponentially for the continued-fraction
  // map; +inf beta again means gamma = 1
  m.dependence =
      Dependence{DependenceKind::ApproxFunctional, std::numeric_limits<double>::infinity(), 0};
  m.params["burn_in"] = static_cast<double>(burn_in);
  m.marginal_cdf = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::log2(1.0 + x);
  };
  m.marginal_pdf = [](double x) {
    if (x < 0.0 || x > 1.0) return 0.0;
    return 1.0 / (std::log(2.0) * (1.0 + x));
  };
  m.marginal_quantile = [](double p) { return std::exp2(p) - 1.0; };
  m.sample = [burn_in](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    // start from the invariant measure: F^{-1}(U) = 2^U - 1
    double x = std::exp2(rng.uniform01()) - 1.0;
    auto step = [&rng](double v) {
      double next = gauss_map_iterate(v);
      // the map blows up near 0; a fresh invariant draw replaces the
      // (measure-zero) degenerate iterate
      if (next < 1e-15) next = std::exp2(rng.uniform01()) - 1.0;
      return next;
    };
    for (std::size_t b = 0; b < burn_in; ++b) x = step(x);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = x;
      x = step(x);
    }
    return out;
  };
  return m;
}

double gamma_exponent(DependenceKind condition, double beta) {
  switch (condition) {
    case DependenceKind::Iid:
    case DependenceKind::MDependent:
      return 1.0;
    case DependenceKind::StrongMixing:
      if (std::isinf(beta)) return 1.0;
      require(beta >= 3.0, "OutOfRange", "strong mixing gamma requires beta >= 3");
      return (beta - 2.0) / beta;
    case DependenceKind::ApproxFunctional:
      if (std::isinf(beta)) return 1.0;
      require(beta > 3.0, "OutOfRange", "approximating functional gamma requires beta > 3");
      return (beta - 3.0) / (beta + 1.0);
  }
  raise("InvalidParam", "unknown dependence kind");
}

double gamma_exponent(const Dependence& dep) { return gamma_exponent(dep.kind, dep.beta); }

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(const std::string& s) {
  require(!s.empty(), "InvalidParam", "empty numeric field in process spec");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end == s.c_str() + s.size(), "InvalidParam",
          "bad numeric field in process spec: " + s);
  return v;
}

}  // namespace

ProcessModel parse_process(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (head == "iid") {
    require(rest.empty(), "InvalidParam", "iid takes no parameters");
    return iid_normal();
  }
  if (head == "ar1") {
    double phi = 0.0;
    bool seen = false;
    for (const auto& tok : split(rest, ',')) {
      const auto kv = split(tok, '=');
      require(kv.size() == 2 && kv[0] == "phi", "InvalidParam",
              "ar1 expects phi=<value>, got: " + tok);
      phi = parse_number(kv[1]);
      seen = true;
    }
    require(seen, "InvalidParam", "ar1 requires phi=<value>");
    return ar1_gaussian(phi);
  }
  if (head == "ma") {
    std::size_t q = 0;
    std::vector<double> weights;
    bool in_weights = false;
    for (const auto& tok : split(rest, ',')) {
      const auto kv = split(tok, '=');
      if (kv.size() == 2 && kv[0] == "q") {
        q = static_cast<std::size_t>(parse_number(kv[1]));
        in_weights = false;
      } else if (kv.size() == 2 && kv[0] == "w") {
        weights.push_back(parse_number(kv[1]));
        in_weights = true;
      } else if (kv.size() == 1 && in_weights) {
        weights.push_back(parse_number(kv[0]));
      } else {
        raise("InvalidParam", "ma expects q=<count,w=<list>, got: " + tok);
      }
    }
    return ma_q(q, weights);
  }
  if (head == "lin") {
    double a = 0.0, lambda = 1.0;
    bool seen_a = false;
    Innovation inn = Innovation::Rademacher;
    for (const auto& tok : split(rest, ',')) {
      const auto kv = split(tok, '=');
      require(kv.size() == 2, "InvalidParam", "lin expects key=value fields, got: " + tok);
      if (kv[0] == "a") {
        a = parse_number(kv[1]);
        seen_a = true;
      } else if (kv[0] == "inn") {
        if (kv[1] == "rademacher")
          inn = Innovation::Rademacher;
        else if (kv[1] == "poisson")
          inn = Innovation::Poisson;
        else
          raise("InvalidParam", "unknown innovation: " + kv[1]);
      } else if (kv[0] == "lambda") {
        lambda = parse_number(kv[1]);
      } else {
        raise("InvalidParam", "unknown lin field: " + kv[0]);
      }
    }
    require(seen_a, "InvalidParam", "lin requires a=<decay exponent>");
    return linear_discrete(a, inn, lambda);
  }
  if (head == "gauss") {
    std::size_t burn = 1000;
    for (const auto& tok : split(rest, ',')) {
      if (tok.empty()) continue;
      const auto kv = split(tok, '=');
      require(kv.size() == 2 && kv[0] == "burn", "InvalidParam",
              "gauss expects burn=<count>, got: " + tok);
      burn = static_cast<std::size_t>(parse_number(kv[1]));
    }
    return gauss_map(burn);
  }
  raise("InvalidParam", "unknown process: " + head);
}

}  // namespace uquant
