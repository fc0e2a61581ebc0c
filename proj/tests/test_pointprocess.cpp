#include "doctest.h"

#include <cmath>
#include <sstream>

#include "reslab/pointprocess.hpp"

using namespace reslab;

namespace {

/// Flat table: N(E) = 0.25 (E + 2), n = 0.25, rho = 0.5 on [-2, 2].
SpectralTable flat_table() {
  SpectralTable t;
  for (int i = 0; i <= 40; ++i) {
    const double E = -2.0 + 0.1 * i;
    t.grid.push_back(E);
    t.N.push_back(0.25 * (E + 2.0));
    t.n.push_back(0.25);
    t.rho.push_back(0.5);
  }
  t.provenance = EmpiricalRandom{};
  return t;
}

Resonance make_res(double re, double log_abs_im, ResonanceClass cls = ResonanceClass::Resonance) {
  Resonance r;
  r.z = {re, -std::exp(log_abs_im)};
  r.log_abs_im_z = log_abs_im;
  r.cls = cls;
  return r;
}

}  // namespace

TEST_CASE("near-axis rescaling maps reference points to (0, 1) and (1, y)") {
  const SpectralTable t = flat_table();
  const int L = 100;
  const double E0 = 0.5, rho = 0.5, n = 0.25;
  std::vector<Resonance> res{make_res(E0, -2.0 * rho * L), make_res(E0 + 1.0 / (n * L), -2.0 * rho * L * 0.5)};
  const RescaledCloud c = rescale_near_axis(res, E0, 0.2, 0.5, L, t, 7);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].x == doctest::Approx(0.0));
  CHECK(c.points[0].y == doctest::Approx(1.0));
  CHECK(c.points[1].x == doctest::Approx(1.0));
  CHECK(c.points[1].y == doctest::Approx(0.5));
  CHECK(c.seed == 7);
  CHECK(c.x_hi == doctest::Approx(n * L * 0.2));
  CHECK(c.y_min == doctest::Approx(std::pow(100.0, 0.5) / (2.0 * rho * L)));
}

TEST_CASE("near-axis window excludes shallow, distant and non-resonance roots") {
  const SpectralTable t = flat_table();
  std::vector<Resonance> res{make_res(0.5, -5.0), make_res(0.9, -50.0),
                             make_res(0.5, -50.0, ResonanceClass::Eigenvalue),
                             make_res(0.5, -50.0, ResonanceClass::Antibound)};
  CHECK(rescale_near_axis(res, 0.5, 0.2, 0.5, 100, t).points.empty());
  CHECK(rescale_near_axis(std::vector<Resonance>{}, 0.5, 0.2, 0.5, 100, t).points.empty());
}

TEST_CASE("near-axis windows shrink as L grows") {
  const SpectralTable t = flat_table();
  std::vector<Resonance> res;
  for (int k = 1; k <= 60; ++k) res.push_back(make_res(0.5 + 0.001 * k, -1.0 * k));
  std::size_t prev = res.size() + 1;
  for (int L : {25, 100, 400, 1600}) {
    const RescaledCloud c = rescale_near_axis(res, 0.5, 0.2, 0.5, L, t);
    CHECK(c.points.size() <= prev);
    prev = c.points.size();
  }
}

TEST_CASE("rescaling rejects bad reference energies and parameters") {
  SpectralTable t = flat_table();
  CHECK_THROWS_AS(rescale_near_axis({}, 3.5, 0.2, 0.5, 100, t), std::invalid_argument);
  CHECK_THROWS_AS(rescale_near_axis({}, 0.5, 0.2, 1.0, 100, t), std::invalid_argument);
  CHECK_THROWS_AS(rescale_near_axis({}, 0.5, 0.0, 0.5, 100, t), std::invalid_argument);
  for (auto& v : t.n) v = kDensityFloor;
  CHECK_THROWS_AS(rescale_near_axis({}, 0.5, 0.2, 0.5, 100, t), std::invalid_argument);
}

TEST_CASE("covariant rescaling: y = 0 at depth x0 and y = 1 one window below") {
  const SpectralTable t = flat_table();
  const int L = 1000;
  const double E0 = 0.5, x0 = 0.5, rho = 0.5, n = 0.25;
  const double ell = default_ell(L);
  CHECK(ell == 126.0);
  REQUIRE(ell_guard(ell, L));
  std::vector<Resonance> res{make_res(E0, -2.0 * rho * L * x0), make_res(E0 + 1.0 / (n * ell), -2.0 * rho * (L * x0 + ell))};
  const RescaledCloud c = rescale_covariant(res, E0, x0, 0.05, ell, L, t);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].x == doctest::Approx(0.0));
  CHECK(c.points[0].y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.points[1].x == doctest::Approx(1.0));
  CHECK(c.points[1].y == doctest::Approx(1.0));
  CHECK(c.x_hi == doctest::Approx(n / 0.05));
}

TEST_CASE("ell guard") {
  CHECK_FALSE(ell_guard(5.0, 100));
  CHECK(ell_guard(25.0, 100));
  CHECK_FALSE(ell_guard(40.0, 100));
  CHECK_FALSE(ell_guard(10.0, 1));
  CHECK_THROWS_AS(rescale_covariant({}, 0.5, 0.5, 0.05, 5.0, 100, flat_table()), std::invalid_argument);
  CHECK_THROWS_AS(rescale_covariant({}, 0.5, 1.5, 0.05, 25.0, 100, flat_table()), std::invalid_argument);
}

TEST_CASE("unscale inverts both rescalings") {
  const SpectralTable t = flat_table();
  std::vector<Resonance> res;
  for (int k = 0; k < 20; ++k) res.push_back(make_res(0.45 + 0.005 * k, -60.0 - 3.0 * k));
  for (const RescaledCloud& c : {rescale_near_axis(res, 0.5, 0.2, 0.5, 100, t),
                                 rescale_covariant(res, 0.5, 0.25, 0.05, 25.0, 100, t)}) {
    REQUIRE_FALSE(c.points.empty());
    const auto back = unscale(c);
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(std::abs(back[i].first - c.points[i].re_z) < 1e-12);
      CHECK(std::abs(back[i].second - c.points[i].log_abs_im_z) < 1e-12 * std::abs(c.points[i].log_abs_im_z));
    }
  }
}

TEST_CASE("cloud writers") {
  const SpectralTable t = flat_table();
  std::vector<Resonance> res{make_res(0.5, -200.0), make_res(0.55, -300.0)};
  std::vector<RescaledCloud> clouds{rescale_near_axis(res, 0.5, 0.2, 0.5, 100, t, 3)};
  std::ostringstream csv, dat;
  write_cloud_csv(csv, clouds);
  write_cloud_dat(dat, clouds);
  const std::string s = csv.str();
  CHECK(s.rfind("x,y,re_z,im_z,seed,L\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  CHECK(dat.str().find(' ') != std::string::npos);
  const auto j = scaling_to_json(clouds[0].scaling);
  CHECK(j.at("E0").get<double>() == 0.5);
}

TEST_CASE("monotone spline preserves monotonicity and interpolates") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0}, y{0.0, 0.1, 2.0, 2.05, 5.0};
  const MonotoneSpline s(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == doctest::Approx(y[i]));
  double prev = s(0.0);
  for (int i = 1; i <= 400; ++i) {
    const double v = s(0.01 * i);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK_THROWS_AS(s(-0.1), std::out_of_range);
  CHECK_THROWS_AS(s(4.1), std::out_of_range);
}

TEST_CASE("periodic curve recovers a smooth profile") {
  const SpectralTable t = flat_table();
  const Interval I{-1.0, 1.0};
  const auto h = [](double E) { return -0.2 - 0.1 * E * E; };
  std::map<int, std::vector<Resonance>> per_L;
  for (int L : {50, 100, 200}) {
    // N' = 0.25, so about (L + 1) / 2 resonances fall in I
    const int m = (L + 1) / 2;
    for (int k = 0; k < m; ++k) {
      const double E = I.lo + I.length() * (k + 0.5) / m;
      per_L[L].push_back(make_res(E, std::log(-h(E) / L)));
    }
  }
  const CurveFit fit = periodic_curve(per_L, I, 2.0, t);
  REQUIRE(fit.per_L.size() == 3);
  for (const auto& k : fit.per_L) {
    CHECK(k.density_ok);
    CHECK(k.expected_density == doctest::Approx(0.5));
  }
  for (double d : fit.sup_distance) CHECK(d < 5e-3);
  CHECK(fit.pooled(0.5) == doctest::Approx(h(0.5)).epsilon(1e-2));
}

TEST_CASE("periodic curve rejects thin data") {
  const SpectralTable t = flat_table();
  std::map<int, std::vector<Resonance>> one{{50, {}}};
  CHECK_THROWS_AS(periodic_curve(one, {-1, 1}, 2.0, t), std::invalid_argument);
  std::map<int, std::vector<Resonance>> close{{50, {}}, {60, {}}};
  CHECK_THROWS_AS(periodic_curve(close, {-1, 1}, 2.0, t), std::invalid_argument);
  std::map<int, std::vector<Resonance>> sparse{{50, {make_res(0.0, -5.0)}}, {100, {}}};
  CHECK_THROWS_AS(periodic_curve(sparse, {-1, 1}, 2.0, t), std::runtime_error);
}

TEST_CASE("Xi matching") {
  CHECK(match_xi_zeros({}, {}, 2.0, 100).counts_equal);
  std::vector<Resonance> res{make_res(0.5, std::log(0.3)), make_res(0.2, std::log(0.001))};
  std::vector<XiZero> zeros{{{0.5005, -0.3}, 1}};
  const XiMatchReport r = match_xi_zeros(res, zeros, 2.0, 100);
  CHECK(r.n_deep == 1);
  CHECK(r.counts_equal);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.max_distance == doctest::Approx(5e-4).epsilon(1e-3));
  CHECK(r.scaled_distance == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("deep resonance stability on synthetic sets") {
  const int L = 50;
  const double thr = std::pow(std::log(50.0), 1.5);
  std::vector<Resonance> a{make_res(0.3, -0.5 * thr), make_res(0.6, -2.0 * thr)};
  std::vector<Resonance> b{make_res(0.3001, -0.5 * thr), make_res(0.9, -3.0 * thr)};
  const StabilityReport r = deep_resonance_stability(a, b, L, 1.5);
  CHECK(r.n_deep_L == 1);
  CHECK(r.n_deep_2L == 1);
  CHECK(r.counts_equal);
  CHECK(r.max_displacement == doctest::Approx(1e-4).epsilon(1e-3));
  CHECK_THROWS_AS(deep_resonance_stability(a, b, L, 1.0), std::invalid_argument);
}
