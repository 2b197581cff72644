#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "test_helpers.hpp"
#include "uquant/bahadur.hpp"
#include "uquant/empirical.hpp"
#include "uquant/kernels.hpp"
#include "uquant/math_util.hpp"
#include "uquant/processes.hpp"
#include "uquant/rng.hpp"

using namespace uquant;
using uquant::testing::error_code_of;

namespace {

SamplePath make_path(std::vector<double> values, std::uint64_t seed = 0) {
  SamplePath path;
  path.values = std::move(values);
  path.process_name = "manual";
  path.seed = seed;
  return path;
}

SamplePath normal_path(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  SamplePath path;
  path.values.resize(n);
  for (double& x : path.values) x = rng.normal();
  path.process_name = "manual";
  path.seed = seed;
  return path;
}

}  // namespace

TEST_CASE("bahadur: quantile truth builders") {
  const QuantileTruth med = normal_quantile_truth(0.5);
  CHECK(med.t_p == 0.0);
  CHECK(med.density_at_tp == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(med.p == 0.5);

  const QuantileTruth q975 = normal_quantile_truth(0.975);
  CHECK(q975.t_p == doctest::Approx(1.959963984540053).epsilon(1e-12));
  CHECK(q975.density_at_tp == doctest::Approx(normal_pdf(q975.t_p)).epsilon(1e-13));

  const QuantileTruth hl = hl_normal_truth(0.5);
  CHECK(hl.t_p == 0.0);
  CHECK(hl.density_at_tp == doctest::Approx(0.5641895835477563).epsilon(1e-12));

  const QuantileTruth qn = qn_normal_truth(0.25);
  CHECK(qn.t_p == doctest::Approx(0.450624110024356).epsilon(1e-9));
  CHECK(qn.density_at_tp == doctest::Approx(0.5362630544580467).epsilon(1e-9));

  const QuantileTruth gm = gauss_measure_truth(0.5);
  CHECK(gm.t_p == doctest::Approx(0.4142135623730951).epsilon(1e-12));
  CHECK(gm.density_at_tp == doctest::Approx(1.020139446596789).epsilon(1e-12));
  CHECK(std::log2(1.0 + gm.t_p) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("U(t_p) recovers p across levels") {
    const KernelSpec ahl = with_normal_marginal(make_hl_kernel());
    const KernelSpec aqn = with_normal_marginal(make_qn_kernel());
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(std::abs(ahl.analytic_U(hl_normal_truth(p).t_p) - p) <= 1e-12);
      CHECK(std::abs(aqn.analytic_U(qn_normal_truth(p).t_p) - p) <= 1e-9);
      CHECK(std::abs(normal_cdf(normal_quantile_truth(p).t_p) - p) <= 1e-12);
      const QuantileTruth g = gauss_measure_truth(p);
      CHECK(std::abs(std::log2(1.0 + g.t_p) - p) <= 1e-12);
    }
  }

  SUBCASE("sigma scaling") {
    const QuantileTruth a = hl_normal_truth(0.75, 1.0);
    const QuantileTruth b = hl_normal_truth(0.75, 2.0);
    CHECK(b.t_p == doctest::Approx(2.0 * a.t_p).epsilon(1e-12));
    CHECK(b.density_at_tp == doctest::Approx(a.density_at_tp / 2.0).epsilon(1e-12));
  }

  SUBCASE("guards") {
    CHECK(error_code_of([] { normal_quantile_truth(0.0); }) == "OutOfRange");
    CHECK(error_code_of([] { hl_normal_truth(1.0); }) == "OutOfRange");
    CHECK(error_code_of([] { qn_normal_truth(-0.2); }) == "OutOfRange");
    CHECK(error_code_of([] { gauss_measure_truth(1.0); }) == "OutOfRange");
    CHECK(error_code_of([] { normal_quantile_truth(0.5, 0.0); }) == "InvalidParam");
    CHECK(error_code_of([] { qn_normal_truth(0.5, -1.0); }) == "InvalidParam");
  }
}

TEST_CASE("bahadur: local smoothness check") {
  const KernelSpec ahl = with_normal_marginal(make_hl_kernel());
  CHECK(check_local_smoothness(ahl.analytic_U, hl_normal_truth(0.5)));
  CHECK(check_local_smoothness(ahl.analytic_U, hl_normal_truth(0.9)));
  const KernelSpec aqn = with_normal_marginal(make_qn_kernel());
  CHECK(check_local_smoothness(aqn.analytic_U, qn_normal_truth(0.25)));
  CHECK(check_local_smoothness([](double t) { return normal_cdf(t); },
                               normal_quantile_truth(0.5)));

  // a square-root cusp at t_p violates the 3/2-power envelope
  QuantileTruth cusp;
  cusp.p = 0.5;
  cusp.t_p = 0.0;
  cusp.density_at_tp = 1.0;
  const auto kinked = [](double t) {
    return 0.5 + (t >= 0.0 ? std::sqrt(t) : -std::sqrt(-t));
  };
  CHECK_FALSE(check_local_smoothness(kinked, cusp));
}

TEST_CASE("bahadur: quantile remainder") {
  SUBCASE("exact zero when the order statistic sits on t_p") {
    const QuantileTruth truth = normal_quantile_truth(0.5);
    const RemainderSample rem = remainder_quantile(make_path({-1.0, 0.0, 1.0, 2.0}, 9u), truth);
    CHECK(rem.estimate == 0.0);
    CHECK(rem.linear_term == 0.0);
    CHECK(rem.r == 0.0);
    CHECK(rem.n == 4);
    CHECK(rem.seed == 9u);
  }

  SUBCASE("hand-computed value") {
    QuantileTruth truth;
    truth.p = 0.5;
    truth.t_p = 2.5;
    truth.density_at_tp = 1.0;
    const RemainderSample rem = remainder_quantile(make_path({1.0, 2.0, 3.0, 4.0}), truth);
    // estimate = 2, F_n(2.5) = 1/2 = p, so r = 2 - 2.5
    CHECK(rem.estimate == 2.0);
    CHECK(rem.linear_term == 0.0);
    CHECK(rem.r == -0.5);
  }

  SUBCASE("identity r = estimate - t_p - linear_term") {
    const QuantileTruth truth = normal_quantile_truth(0.3);
    const RemainderSample rem = remainder_quantile(normal_path(301, 5u), truth);
    CHECK(rem.r == rem.estimate - truth.t_p - rem.linear_term);
  }

  SUBCASE("exact equivariance under doubling") {
    const SamplePath base = normal_path(257, 11u);
    SamplePath doubled = base;
    for (double& x : doubled.values) x *= 2.0;
    const QuantileTruth t1 = normal_quantile_truth(0.25, 1.0);
    const QuantileTruth t2 = normal_quantile_truth(0.25, 2.0);
    const RemainderSample r1 = remainder_quantile(base, t1);
    const RemainderSample r2 = remainder_quantile(doubled, t2);
    CHECK(r2.estimate == 2.0 * r1.estimate);
    CHECK(r2.linear_term == 2.0 * r1.linear_term);
    CHECK(r2.r == 2.0 * r1.r);
  }

  SUBCASE("guards") {
    QuantileTruth flat = normal_quantile_truth(0.5);
    flat.density_at_tp = 0.0;
    CHECK(error_code_of([&] { remainder_quantile(normal_path(16, 1u), flat); }) ==
          "DegenerateDensity");
    CHECK(error_code_of([&] { remainder_quantile(make_path({}), normal_quantile_truth(0.5)); }) ==
          "EmptySample");
  }
}

TEST_CASE("bahadur: U-quantile remainder") {
  const KernelSpec hl = make_hl_kernel();

  SUBCASE("identity and fast-path consistency") {
    const QuantileTruth truth = hl_normal_truth(0.5);
    const SamplePath path = normal_path(200, 17u);
    const RemainderSample rem = remainder_uquantile(path, hl, truth);
    CHECK(rem.r == rem.estimate - truth.t_p - rem.linear_term);
    CHECK(rem.estimate == u_quantile_fast(path, PairStatistic::Mean, 0.5));
    CHECK(rem.n == 200);
  }

  SUBCASE("linear term uses the exact pair count at t_p") {
    const QuantileTruth truth = hl_normal_truth(0.5);  // t_p = 0
    const SamplePath path = make_path({-3.0, -1.0, 1.0, 3.0});
    const RemainderSample rem = remainder_uquantile(path, hl, truth);
    // pair means {-2,-1,0,0,1,2}: U_n(0) = 4/6 and the median pair is 0
    CHECK(rem.estimate == 0.0);
    const double expected_linear = (0.5 - 4.0 / 6.0) / truth.density_at_tp;
    CHECK(rem.linear_term == doctest::Approx(expected_linear).epsilon(1e-15));
  }

  SUBCASE("exact equivariance under doubling") {
    const SamplePath base = normal_path(128, 23u);
    SamplePath doubled = base;
    for (double& x : doubled.values) x *= 2.0;
    const RemainderSample r1 = remainder_uquantile(base, hl, hl_normal_truth(0.75, 1.0));
    const RemainderSample r2 = remainder_uquantile(doubled, hl, hl_normal_truth(0.75, 2.0));
    CHECK(r2.estimate == 2.0 * r1.estimate);
    CHECK(r2.r == 2.0 * r1.r);
  }

  SUBCASE("guards") {
    KernelSpec generic = make_hl_kernel();
    generic.pair_statistic.reset();
    CHECK(error_code_of([&] {
            remainder_uquantile(normal_path(32, 1u), generic, hl_normal_truth(0.5));
          }) == "NotIndicator");
    CHECK(error_code_of([&] {
            remainder_uquantile(make_path({1.0}), hl, hl_normal_truth(0.5));
          }) == "SampleTooSmall");
    QuantileTruth flat = hl_normal_truth(0.5);
    flat.density_at_tp = 0.0;
    CHECK(error_code_of([&] { remainder_uquantile(normal_path(32, 1u), hl, flat); }) ==
          "DegenerateDensity");
  }
}

TEST_CASE("bahadur: oscillation sup over the LIL window") {
  const QuantileTruth truth = normal_quantile_truth(0.5);
  const auto true_cdf = [](double t) { return normal_cdf(t); };

  SUBCASE("zero window, zero oscillation") {
    CHECK(oscillation_sup(normal_path(64, 3u), true_cdf, truth, 0.0) == 0.0);
  }

  SUBCASE("monotone in the window constant") {
    const SamplePath path = normal_path(1024, 4u);
    const double o1 = oscillation_sup(path, true_cdf, truth, 1.0);
    const double o2 = oscillation_sup(path, true_cdf, truth, 2.0);
    const double o3 = oscillation_sup(path, true_cdf, truth, 3.0);
    CHECK(o1 >= 0.0);
    CHECK(o1 <= o2);
    CHECK(o2 <= o3);
  }

  SUBCASE("iid envelope at n = 4096") {
    int tight = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const double osc = oscillation_sup(normal_path(4096, 100u + seed), true_cdf, truth, 2.0);
      CHECK(osc <= 0.03);
      if (osc <= 0.02) ++tight;
    }
    CHECK(tight >= 17);
  }

  SUBCASE("guards") {
    CHECK(error_code_of([&] { oscillation_sup(normal_path(15, 1u), true_cdf, truth, 2.0); }) ==
          "WindowTooSmall");
    CHECK(error_code_of([&] { oscillation_sup(normal_path(64, 1u), true_cdf, truth, -1.0); }) ==
          "InvalidParam");
  }

  SUBCASE("U-statistic window") {
    const KernelSpec ahl = with_normal_marginal(make_hl_kernel());
    const QuantileTruth utruth = hl_normal_truth(0.5);
    const double osc = oscillation_sup(normal_path(2048, 6u), ahl, utruth, 2.0);
    CHECK(osc >= 0.0);
    CHECK(osc <= 0.05);  // smooth projection: much tighter than the marginal window

    CHECK(error_code_of([&] {
            oscillation_sup(normal_path(64, 1u), make_hl_kernel(), utruth, 1.0);
          }) == "MissingMarginal");
    KernelSpec generic = ahl;
    generic.pair_statistic.reset();
    CHECK(error_code_of([&] {
            oscillation_sup(normal_path(64, 1u), generic, utruth, 1.0);
          }) == "NotIndicator");
  }
}

TEST_CASE("bahadur: rate constants") {
  CHECK(theoretical_exponent(1.0) == 0.75);
  CHECK(theoretical_exponent(0.5) == 0.6875);
  CHECK(theoretical_exponent(1.0 / 3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(error_code_of([] { theoretical_exponent(0.0); }) == "OutOfRange");
  CHECK(error_code_of([] { theoretical_exponent(-0.5); }) == "OutOfRange");
  CHECK(error_code_of([] { theoretical_exponent(1.5); }) == "OutOfRange");

  CHECK(kiefer_constant(0.5) == doctest::Approx(0.4386913376508308).epsilon(1e-12));
  CHECK(kiefer_constant(0.3) == doctest::Approx(kiefer_constant(0.7)).epsilon(1e-12));
  CHECK(kiefer_constant(1e-8) < 0.01);
  CHECK(kiefer_constant(0.1) < kiefer_constant(0.5));
  CHECK(error_code_of([] { kiefer_constant(0.0); }) == "OutOfRange");
  CHECK(error_code_of([] { kiefer_constant(1.0); }) == "OutOfRange");
}

TEST_CASE("bahadur: rate study validation") {
  RateStudyConfig cfg;
  cfg.process = parse_process("iid");
  cfg.truth = normal_quantile_truth(0.5);
  cfg.statistic = StatisticKind::Quantile;
  cfg.n_grid = {128, 256, 512, 1024};
  cfg.replicates = 500;
  cfg.master_seed = 7;

  SUBCASE("grid guards") {
    RateStudyConfig bad = cfg;
    bad.n_grid = {128, 256, 512};
    CHECK(error_code_of([&] { rate_study(bad); }) == "InsufficientGrid");
    bad.n_grid = {64, 128, 256, 512};
    CHECK(error_code_of([&] { rate_study(bad); }) == "InsufficientGrid");
    bad.n_grid = {128, 192, 256, 512};
    CHECK(error_code_of([&] { rate_study(bad); }) == "InsufficientGrid");
    bad.n_grid = {128, 512, 256, 1024};
    CHECK(error_code_of([&] { rate_study(bad); }) == "InsufficientGrid");
    bad = cfg;
    bad.replicates = 499;
    CHECK(error_code_of([&] { rate_study(bad); }) == "InsufficientGrid");
  }

  SUBCASE("truth and kernel guards") {
    RateStudyConfig bad = cfg;
    bad.truth.density_at_tp = 0.0;
    CHECK(error_code_of([&] { rate_study(bad); }) == "DegenerateDensity");
    bad = cfg;
    bad.statistic = StatisticKind::UQuantile;
    bad.kernel = make_hl_kernel();
    bad.kernel.pair_statistic.reset();
    CHECK(error_code_of([&] { rate_study(bad); }) == "NotIndicator");
    // strong mixing below the beta = 13/4 threshold is rejected for U-quantiles
    bad = cfg;
    bad.statistic = StatisticKind::UQuantile;
    bad.kernel = make_hl_kernel();
    bad.truth = hl_normal_truth(0.5);
    bad.process.dependence.kind = DependenceKind::StrongMixing;
    bad.process.dependence.beta = 3.0;
    CHECK(error_code_of([&] { rate_study(bad); }) == "OutOfRange");
  }
}

TEST_CASE("bahadur: rate study on the iid median") {
  RateStudyConfig cfg;
  cfg.process = parse_process("iid");
  cfg.truth = normal_quantile_truth(0.5);
  cfg.statistic = StatisticKind::Quantile;
  cfg.n_grid = {128, 256, 512, 1024};
  cfg.replicates = 500;
  cfg.master_seed = 7;
  cfg.threads = 1;

  std::vector<ReplicateRecord> dump;
  const RateStudyResult res = rate_study(cfg, &dump);

  CHECK(res.n_grid == cfg.n_grid);
  CHECK(res.replicates == 500);
  CHECK(res.gamma == 1.0);
  CHECK(res.theoretical_exponent == 0.75);
  REQUIRE(res.rms_r.size() == 4);
  for (double v : res.rms_r) CHECK(v > 0.0);
  for (std::size_t i = 1; i < 4; ++i) CHECK(res.rms_r[i] < res.rms_r[i - 1]);
  for (std::size_t i = 0; i < 4; ++i) CHECK(res.q90_abs_r[i] >= 0.0);
  CHECK(res.fitted_slope > -0.95);
  CHECK(res.fitted_slope < -0.55);
  CHECK(res.slope_se > 0.0);

  SUBCASE("dump reproduces the aggregates") {
    REQUIRE(dump.size() == cfg.n_grid.size() * cfg.replicates);
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
      CompensatedSum sq;
      std::size_t count = 0;
      for (const ReplicateRecord& rec : dump) {
        if (rec.n != cfg.n_grid[gi]) continue;
        sq.add(rec.r * rec.r);
        ++count;
      }
      REQUIRE(count == cfg.replicates);
      const double rms = std::sqrt(sq.value() / static_cast<double>(count));
      CHECK(rms == doctest::Approx(res.rms_r[gi]).epsilon(1e-12));
    }
  }

  SUBCASE("thread count does not change the result") {
    RateStudyConfig threaded = cfg;
    threaded.threads = 3;
    const RateStudyResult res3 = rate_study(threaded);
    CHECK(res3.rms_r == res.rms_r);
    CHECK(res3.mean_r == res.mean_r);
    CHECK(res3.q90_abs_r == res.q90_abs_r);
    CHECK(res3.fitted_slope == res.fitted_slope);
  }

  SUBCASE("another master seed lands in the same band") {
    RateStudyConfig other = cfg;
    other.master_seed = 8;
    const RateStudyResult res8 = rate_study(other);
    CHECK(res8.fitted_slope > -0.95);
    CHECK(res8.fitted_slope < -0.55);
  }
}

TEST_CASE("bahadur: empirical cdf variance sanity at t_p") {
  // var F_n(t_p) = p(1-p)/n for iid paths feeds the linear term of the
  // remainder; checked directly on the generator
  const ProcessModel iid = parse_process("iid");
  const std::size_t n = 256, paths = 2000;
  CompensatedSum s, s2;
  for (std::size_t rep = 0; rep < paths; ++rep) {
    const SamplePath path = iid.generate(n, derive_seed(424242u, rep));
    const EmpiricalCdf F(path);
    const double v = ecdf_eval(F, 0.0);
    s.add(v);
    s2.add(v * v);
  }
  const double mean = s.value() / static_cast<double>(paths);
  const double var = s2.value() / static_cast<double>(paths) - mean * mean;
  const double truth = 0.25 / static_cast<double>(n);
  CHECK(std::abs(mean - 0.5) <= 0.01);
  CHECK(std::abs(var - truth) <= 0.10 * truth);
}
