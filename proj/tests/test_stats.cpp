#include "doctest.h"

#include <cmath>

#include "reslab/stats.hpp"

using namespace reslab;

namespace {

std::vector<RescaledCloud> poisson_ensemble(int n, std::uint64_t stream, double x_lo = -4.0, double x_hi = 4.0) {
  std::vector<RescaledCloud> out;
  for (int s = 0; s < n; ++s) out.push_back(synthetic_poisson_cloud(x_lo, x_hi, 0.0, 1.0, static_cast<std::uint64_t>(s), stream));
  return out;
}

Resonance make_res(double re, double log_abs_im) {
  Resonance r;
  r.z = {re, -std::exp(log_abs_im)};
  r.log_abs_im_z = log_abs_im;
  r.cls = ResonanceClass::Resonance;
  return r;
}

}  // namespace

TEST_CASE("distribution tails against tabulated values") {
  CHECK(chi_square_sf(6.635, 1.0) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(chi_square_sf(3.841, 1.0) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_sf(2.0, 2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(kolmogorov_sf(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
  CHECK(kolmogorov_sf(1.628) == doctest::Approx(0.01).epsilon(2e-2));
  CHECK(kolmogorov_sf(0.0) == 1.0);
}

TEST_CASE("KS statistic of a tiny sample") {
  const GofReport r = ks_test({0.5}, [](double x) { return x; });
  CHECK(r.statistic == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_test({}, [](double x) { return x; }), std::invalid_argument);
  CHECK_THROWS_AS(ks_exponential({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("box specs") {
  const BoxSpec b = BoxSpec::defaults();
  CHECK_NOTHROW(b.validate());
  CHECK(b.size() == 6);
  CHECK(b.measure(0) == doctest::Approx(0.3));
  CHECK(b.x_of(5).lo == 2.0);
  CHECK(b.y_of(5).lo == 0.5);
  BoxSpec bad{{{1.0, 1.0}}, {{0.0, 1.0}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  BoxSpec overlap{{{0.0, 1.0}, {0.5, 2.0}}, {{0.0, 1.0}}};
  CHECK_THROWS_AS(overlap.validate(), std::invalid_argument);
}

TEST_CASE("box counts are additive and half-open") {
  const RescaledCloud c = synthetic_poisson_cloud(-4.0, 4.0, 0.0, 1.0, 11);
  CHECK(box_count(c, {-2.0, 0.0}, {0.0, 1.0}) + box_count(c, {0.0, 2.0}, {0.0, 1.0}) ==
        box_count(c, {-2.0, 2.0}, {0.0, 1.0}));
  CHECK(box_count(c, {-4.0, 4.0}, {0.0, 0.3}) + box_count(c, {-4.0, 4.0}, {0.3, 1.0}) ==
        box_count(c, {-4.0, 4.0}, {0.0, 1.0}));
  RescaledCloud one;
  one.points.push_back({1.0, 0.5, 0.0, 0.0});
  CHECK(box_count(one, {0.0, 1.0}, {0.0, 1.0}) == 0);
  CHECK(box_count(one, {1.0, 2.0}, {0.0, 1.0}) == 1);
}

TEST_CASE("synthetic Poisson clouds have unit intensity") {
  const int n = 2000;
  double sum = 0.0;
  for (int s = 0; s < n; ++s) sum += box_count(synthetic_poisson_cloud(-4.0, 4.0, 0.0, 1.0, s), {0.0, 1.0}, {0.0, 1.0});
  CHECK(std::abs(sum / n - 1.0) < 3.0 / std::sqrt(n));
}

TEST_CASE("Poisson counts test accepts the null and rejects a lattice") {
  // a single null draw is rejected 1% of the time, so require a majority of independent draws
  int passed = 0;
  for (std::uint64_t stream = 0; stream < 5; ++stream) passed += poisson_counts_test(poisson_ensemble(200, stream), BoxSpec::defaults()).pass;
  CHECK(passed >= 4);
  std::vector<RescaledCloud> lat;
  for (int s = 0; s < 200; ++s) lat.push_back(synthetic_lattice_cloud(-4.0, 4.0, 0.0, 1.0, s));
  CHECK_FALSE(poisson_counts_test(lat, BoxSpec::defaults()).pass);
}

TEST_CASE("Poisson counts test guards its inputs") {
  CHECK_THROWS_AS(poisson_counts_test(poisson_ensemble(50, 0), BoxSpec::defaults()), std::invalid_argument);
  CHECK_THROWS_AS(poisson_counts_test(poisson_ensemble(200, 0, -1.0, 1.0), BoxSpec::defaults()), std::invalid_argument);
  CHECK_THROWS_AS(poisson_marginal_test(std::vector<int>{}, 1.0), std::invalid_argument);
}

TEST_CASE("spacing test requires enough spacings") {
  std::vector<RescaledCloud> two(1);
  two[0].x_lo = -4.0;
  two[0].x_hi = 4.0;
  two[0].points = {{0.0, 0.5, 0.0, 0.0}, {0.5, 0.5, 0.0, 0.0}};
  CHECK_THROWS_AS(spacing_test(two), std::invalid_argument);
  CHECK(spacing_test(poisson_ensemble(200, 0)).pass);
}

TEST_CASE("independence test") {
  const auto a = poisson_ensemble(200, 1), b = poisson_ensemble(200, 2);
  const GofReport self = independence_test(a, a, {-0.5, 0.5}, {0.0, 1.0});
  CHECK(self.statistic == doctest::Approx(1.0));
  CHECK_FALSE(self.pass);
  CHECK(independence_test(a, b, {-0.5, 0.5}, {0.0, 1.0}).pass);
  auto shifted = b;
  shifted[3].seed = 999;
  CHECK_THROWS_AS(independence_test(a, shifted, {-0.5, 0.5}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(independence_test(a, poisson_ensemble(100, 2), {-0.5, 0.5}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("Pearson correlation with Fisher interval") {
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, y{2, 4, 6, 8, 10, 12, 14, 16, 18, 20}, c(10, 1.0);
  const Correlation r = pearson_fisher(x, y);
  CHECK(r.defined);
  CHECK(r.r == doctest::Approx(1.0));
  CHECK_FALSE(pearson_fisher(x, c).defined);
}

TEST_CASE("density count is monotone in kappa") {
  std::vector<Resonance> res;
  for (int k = 0; k < 100; ++k) res.push_back(make_res(-1.0 + 0.02 * k, -0.5 * k));
  SpectralTable t;
  t.grid = {-2.0, 2.0};
  t.N = {0.0, 1.0};
  t.n = {0.25, 0.25};
  t.rho = {0.5, 0.5};
  t.provenance = EmpiricalRandom{};
  const std::map<int, std::vector<std::vector<Resonance>>> data{{100, {res}}};
  double prev = 1e9;
  for (double kappa : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double m = density_count_check(data, {-1.0, 1.0}, kappa, t).mean.at(100);
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("negative control: no deep resonances in a periodic gap") {
  const std::vector<double> cell{2.0, 0.0};
  const SpectralTable t = ids_periodic(cell, std::vector<double>{0.0});
  const BoxSolution sol = solve_box(make_periodic(cell, 64), 256);
  const std::map<int, std::vector<std::vector<Resonance>>> data{{64, {sol.resonances}}};
  const DensityCountReport r = density_count_check(data, {0.5, 1.5}, 0.3, t);
  CHECK(r.expected == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.mean.at(64) == 0.0);
  CHECK(r.pass);
}

TEST_CASE("density count rejects a band with no resonances at the required depth") {
  const std::vector<double> cell{2.0, 0.0};
  const SpectralTable t = ids_periodic(cell, std::vector<double>{0.0});
  const BoxSolution sol = solve_box(make_periodic(cell, 64), 256);
  const std::map<int, std::vector<std::vector<Resonance>>> data{{64, {sol.resonances}}};
  const DensityCountReport r = density_count_check(data, {-1.0, -0.2}, 0.9, t);
  CHECK(r.expected > 5.0 / 64);
  CHECK(r.mean.at(64) == 0.0);
  CHECK_FALSE(r.pass);
}

TEST_CASE("self-calibration on synthetic ensembles") {
  const SelfCalibration cal = self_calibrate(BoxSpec::defaults(), -4.0, 4.0, {0.1, 0.9}, 200, 40, 12345);
  CHECK(cal.counts.null_pass_rate >= 0.95);
  CHECK(cal.counts.lattice_reject_rate >= 0.95);
  CHECK(cal.spacing.null_pass_rate >= 0.95);
  CHECK(cal.spacing.lattice_reject_rate >= 0.95);
  CHECK(cal.independence.null_pass_rate >= 0.95);
  CHECK(cal.independence.lattice_reject_rate >= 0.95);
}

TEST_CASE("report serialization") {
  const GofReport r = spacing_test(poisson_ensemble(200, 0));
  const auto j = to_json(r);
  CHECK(j.at("test").get<std::string>() == r.test);
  CHECK(j.at("n_samples").get<int>() == r.n_samples);
  const std::vector<GofReport> v{r, r};
  const std::string table = summary_table(v);
  CHECK(std::count(table.begin(), table.end(), '\n') >= 2);
}

TEST_CASE("periodic resonances are rejected by the spacing test") {
  const std::vector<double> cell{2.0, 0.0};
  const SpectralTable t = ids_periodic(cell, std::vector<double>{0.0});
  const double E0 = -0.6, eps = 0.5;
  std::vector<RescaledCloud> clouds;
  for (int L = 60; L < 72; ++L) {
    const BoxSolution sol = solve_box(make_periodic(cell, L), 256);
    RescaledCloud c;
    c.seed = static_cast<std::uint64_t>(L);
    c.L = L;
    const double n = t.n_at(E0);
    c.x_lo = -n * L * eps;
    c.x_hi = n * L * eps;
    for (const auto& r : sol.resonances) {
      if (r.cls != ResonanceClass::Resonance || std::abs(r.z.real() - E0) > eps) continue;
      c.points.push_back({n * L * (r.z.real() - E0), 0.5, r.z.real(), r.log_abs_im_z});
    }
    clouds.push_back(c);
  }
  const GofReport r = spacing_test(clouds, {0.0, 1.0});
  CHECK_FALSE(r.pass);
  CHECK(r.p_value < 1e-6);
}
