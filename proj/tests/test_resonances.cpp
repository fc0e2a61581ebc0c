#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "reslab/resonances.hpp"

using namespace reslab;

namespace {

/// Roots with their inclusion radii; a double-rounded unit-circle point needs
/// a radius covering its rounding error.
RootSet synthetic(const std::vector<std::pair<std::complex<double>, double>>& roots, mp::Bits bits = 256) {
  RootSet rs;
  rs.precision = bits;
  for (auto [l, radius] : roots) rs.roots.push_back({mp::Complex(l, bits), 0.0, false, radius});
  return rs;
}

/// Eigenvalues of H_L outside [-2, 2] from a large Dirichlet box (the tail is free).
std::vector<double> bound_states(const Potential& v, int pad) {
  const int n = v.box_end() + 1 + pad;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), off = Eigen::VectorXd::Ones(n - 1);
  for (int i = 0; i <= v.box_end(); ++i) d[i] = v[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, off, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()[i]) > 2.05) out.push_back(es.eigenvalues()[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("sheet classification of synthetic roots") {
  const double t = 0.7;
  const auto res = classify(synthetic({{0.5, 0.0},
                                         {-0.25, 0.0},
                                         {2.0, 0.0},
                                         {std::polar(2.0, -t), 0.0},
                                         {std::polar(2.0, t), 0.0},
                                         {std::polar(1.0, t), 1e-12}}),
                               256);
  const ClassCounts c = count_classes(res);
  CHECK(c.eigenvalue == 2);
  CHECK(c.antibound == 1);
  CHECK(c.resonance == 1);
  CHECK(c.antiresonance == 1);
  CHECK(c.boundary == 1);
  CHECK(count_lower_half(res) == 1);
  for (const auto& r : res) {
    if (r.cls == ResonanceClass::Eigenvalue && r.lambda.re().to_double() == 0.5) CHECK(r.z.real() == doctest::Approx(2.5));
    if (r.cls == ResonanceClass::Resonance) {
      const auto l = std::polar(2.0, -t);
      CHECK(std::abs(r.z - (l + 1.0 / l)) < 1e-15);
      CHECK(r.z.imag() < 0.0);
      CHECK(r.log_abs_im_z == doctest::Approx(std::log(std::abs((l + 1.0 / l).imag()))));
    }
  }
  for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i - 1].z.real() <= res[i].z.real());
}

TEST_CASE("narrow resonances keep their class and an exact log width") {
  // |lambda| - 1 ~ 1e-30 is far above the 256-bit rounding floor
  const mp::Real eps = mp::Real::parse("1e-30", 256);
  mp::Real c(256), s(256);
  mpfr_sin_cos(s.get(), c.get(), mp::Real(1.0, 256).get(), MPFR_RNDN);
  const mp::Real r = mp::Real(1.0, 256) + eps;
  RootSet rs;
  rs.precision = 256;
  rs.roots.push_back({mp::Complex(r * c, -(r * s)), 0.0, false, 0.0});
  const auto res = classify(rs, 256);
  REQUIRE(res.size() == 1);
  CHECK(res[0].cls == ResonanceClass::Resonance);
  // Im z = -sin(1) (r - 1/r) ~ -2e-30 sin(1)
  CHECK(res[0].log_abs_im_z == doctest::Approx(std::log(2e-30 * std::sin(1.0))).epsilon(1e-10));
}

TEST_CASE("class names round trip") {
  for (auto c : {ResonanceClass::Resonance, ResonanceClass::Eigenvalue, ResonanceClass::Antibound,
                 ResonanceClass::AntiResonance, ResonanceClass::Boundary}) {
    CHECK(parse_class(class_name(c)) == c);
  }
  CHECK_THROWS(parse_class("nonsense"));
}

TEST_CASE("lambda_from_z inverts z_of_lambda on both sheets") {
  const mp::Complex z(0.7, -0.3, 256);
  const mp::Complex l1 = lambda_from_z(z, true), l0 = lambda_from_z(z, false);
  CHECK(mp::abs(l1).to_double() > 1.0);
  CHECK(mp::abs(l0).to_double() < 1.0);
  CHECK(std::abs(z_of_lambda(l1).to_cdouble() - z.to_cdouble()) < 1e-30);
  CHECK(std::abs(z_of_lambda(l0).to_cdouble() - z.to_cdouble()) < 1e-30);
}

TEST_CASE("eigenvalue-class roots are the bound states of H_L") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Potential v = sample_random({6.0}, 12, seed);
    const BoxSolution sol = solve_box(v, 256);
    std::vector<double> ev;
    for (const auto& r : sol.resonances) {
      if (r.cls == ResonanceClass::Eigenvalue) ev.push_back(r.z.real());
    }
    const auto oracle = bound_states(v, 400);
    REQUIRE(ev.size() == oracle.size());
    std::sort(ev.begin(), ev.end());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
  }
}

TEST_CASE("root counts add up to the degree and resonances pair with their conjugates") {
  for (int L : {10, 25}) {
    const Potential v = sample_random({1.0}, L, 17);
    const BoxSolution sol = solve_box(v, 256);
    const ClassCounts c = count_classes(sol.resonances);
    CHECK(c.total() == sol.poly.degree());
    CHECK(c.resonance == c.antiresonance);
    CHECK(conjugate_pairing(sol.resonances, 1e-20));
    for (const auto& r : sol.resonances) {
      if (r.cls == ResonanceClass::Resonance) CHECK(r.z.imag() <= 0.0);
    }
  }
}

TEST_CASE("box spectrum bounds agree with dense eigenvalues") {
  const Potential v = sample_random({2.0}, 40, 8);
  Eigen::VectorXd d(41), off = Eigen::VectorXd::Ones(40);
  for (int i = 0; i <= 40; ++i) d[i] = v[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, off, Eigen::EigenvaluesOnly);
  const Interval b = box_spectrum_bounds(v);
  CHECK(b.lo == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-10));
  CHECK(b.hi == doctest::Approx(es.eigenvalues()[40]).epsilon(1e-10));
}

TEST_CASE("solve_box raises precision for ill-conditioned periodic boxes") {
  const Potential v = make_periodic(std::vector<double>{2.0, 0.0}, 64);
  const BoxSolution sol = solve_box(v, 128);
  CHECK(sol.roots.precision >= required_root_precision(sol.poly, v));
  CHECK(sol.roots.precision % 64 == 0);
}

TEST_CASE("free potential has no resonances") {
  const BoxSolution sol = solve_box(make_free(20), 256);
  CHECK(sol.resonances.empty());
}

TEST_CASE("free-region scan on a spectral gap stays at O(1) distance") {
  // cell [4, 0]: bands [2 - 2 sqrt 2, 0] and [4, 2 + 2 sqrt 2], gap (0, 4)
  const PotentialFamily fam = [](int L) { return make_periodic(std::vector<double>{4.0, 0.0}, L); };
  const std::vector<int> Ls{16, 32};
  const auto reps = scan_free_region(fam, {1.5, 2.5}, Ls, 256, Regime::NoResonanceO1);
  for (const auto& r : reps) {
    if (r.n_in_strip > 0) CHECK(r.min_gap > 0.05);
  }
}

TEST_CASE("line fit recovers an exact slope") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("resonance CSV round trip") {
  const BoxSolution sol = solve_box(sample_random({1.0}, 8, 5), 256);
  std::stringstream ss;
  write_resonance_csv(ss, sol.resonances, 8, 5);
  const auto rows = read_resonance_csv(ss);
  REQUIRE(rows.size() == sol.resonances.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].L == 8);
    CHECK(rows[i].seed == 5);
    CHECK(rows[i].z == sol.resonances[i].z);
    CHECK(rows[i].cls == sol.resonances[i].cls);
  }
}
