#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

#include "reslab/spectral.hpp"

using namespace reslab;

namespace {

const std::vector<double> kCell{2.0, 0.0};

/// Fraction of Dirichlet eigenvalues below E for a long periodic box.
double box_ids(std::span<const double> cell, int n, double E) {
  Eigen::VectorXd d(n), off = Eigen::VectorXd::Ones(n - 1);
  for (int i = 0; i < n; ++i) d[i] = cell[static_cast<std::size_t>(i) % cell.size()];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, off, Eigen::EigenvaluesOnly);
  int below = 0;
  for (int i = 0; i < n; ++i) below += es.eigenvalues()[i] < E;
  return static_cast<double>(below) / n;
}

SampleFamily free_family() {
  return [](int L, std::uint64_t) { return make_free(L); };
}

}  // namespace

TEST_CASE("Floquet bands of the [2, 0] cell") {
  const Bands b = floquet_bands(kCell);
  REQUIRE(b.intervals.size() == 2);
  CHECK(b.intervals[0].lo == doctest::Approx(1.0 - std::sqrt(5.0)));
  CHECK(b.intervals[0].hi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.intervals[1].lo == doctest::Approx(2.0));
  CHECK(b.intervals[1].hi == doctest::Approx(1.0 + std::sqrt(5.0)));
  CHECK(b.closed_gaps.empty());
  CHECK(b.band_of(1.0) == -1);
  CHECK(b.band_of(2.5) == 1);
}

TEST_CASE("a doubled free cell has a closed gap at 0") {
  const std::vector<double> cell{0.0, 0.0};
  const Bands b = floquet_bands(cell);
  REQUIRE(b.intervals.size() == 2);
  REQUIRE(b.closed_gaps.size() == 1);
  CHECK(b.closed_gaps[0] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("discriminant derivative matches a finite difference") {
  const std::vector<double> cell{1.0, -0.5, 0.25};
  const std::complex<double> z(0.3, -0.2);
  const double h = 1e-6;
  const auto fd = (discriminant(cell, z + h).value - discriminant(cell, z - h).value) / (2.0 * h);
  CHECK(std::abs(fd - discriminant(cell, z).derivative) < 1e-8);
}

TEST_CASE("free IDS and Lyapunov exponent in closed form") {
  const std::vector<double> cell{0.0};
  const std::vector<double> grid{-1.5, 0.0, 1.0, 3.0};
  const SpectralTable t = ids_periodic(cell, grid);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.N[i] == doctest::Approx(std::acos(-grid[i] / 2.0) / std::numbers::pi).epsilon(1e-12));
    CHECK(t.n[i] == doctest::Approx(1.0 / (std::numbers::pi * std::sqrt(4.0 - grid[i] * grid[i]))).epsilon(1e-10));
  }
  CHECK(t.N[3] == 1.0);
  CHECK(t.rho[3] == doctest::Approx(std::acosh(1.5)).epsilon(1e-12));
  CHECK(t.rho[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("periodic IDS matches eigenvalue counting in a long box") {
  const std::vector<double> cell{1.0, -0.5, 0.25};
  const std::vector<double> grid{-2.0, -1.0, 0.0, 0.7, 1.5, 2.4};
  const SpectralTable t = ids_periodic(cell, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(t.N[i] == doctest::Approx(box_ids(cell, 3000, grid[i])).epsilon(2e-3));
}

TEST_CASE("density integrates to 1/p over each band") {
  const SpectralTable t = ids_periodic(kCell, std::vector<double>{0.0});
  for (const auto& band : t.bands.intervals) {
    // substitution E = mid + half sin(s) removes the edge singularities
    const double mid = 0.5 * (band.lo + band.hi), half = 0.5 * band.length();
    double acc = 0.0;
    const int m = 4000;
    for (int k = 0; k < m; ++k) {
      const double s = -std::numbers::pi / 2 + std::numbers::pi * (k + 0.5) / m;
      acc += t.n_at(mid + half * std::sin(s)) * half * std::cos(s) * std::numbers::pi / m;
    }
    CHECK(acc == doctest::Approx(0.5).epsilon(1e-3));
  }
}

TEST_CASE("empirical IDS and Lyapunov exponent of the free model") {
  const std::vector<double> grid{0.0};
  const SpectralTable t = ids_empirical(free_family(), grid, 10000, 1);
  CHECK(std::abs(t.N_at(0.0) - 0.5) < 1e-3);
  CHECK(std::abs(lyapunov(free_family(), 3.0, 10000, 1) - std::acosh(1.5)) < 1e-3);
}

TEST_CASE("complex-energy Lyapunov exponent of a periodic cell") {
  const SampleFamily fam = [](int L, std::uint64_t) { return make_periodic(kCell, L); };
  const std::complex<double> z(0.5, -0.3);
  CHECK(lyapunov(fam, z, 20000, 1) == doctest::Approx(lyapunov_periodic(kCell, z)).epsilon(1e-3));
}

TEST_CASE("Thouless formula holds exactly for periodic tables") {
  const SpectralTable t = ids_periodic(kCell, std::vector<double>{0.0});
  for (double E : {-2.0, -0.5, 1.0, 2.5, 4.0}) {
    CHECK(thouless_integral(t, E) == doctest::Approx(lyapunov_periodic(kCell, E)).epsilon(1e-8));
  }
}

TEST_CASE("Thouless discrepancy for weak uniform disorder") {
  std::vector<double> grid;
  for (double E = -2.3; E <= 3.3; E += 0.01) grid.push_back(E);
  const SpectralTable t = ids_empirical(uniform_family({1.0}), grid, 4000, 8, {1.0});
  std::vector<double> probe;
  for (double E = -1.2; E <= 2.2; E += 0.1) probe.push_back(E);
  CHECK(thouless_check(t, probe) <= 0.02);
}

TEST_CASE("principal value vanishes inside periodic bands") {
  const SpectralTable t = ids_periodic(kCell, std::vector<double>{0.0});
  for (double E : {-1.0, -0.4, 2.3, 3.0}) CHECK(std::abs(principal_value_S(t, E)) < 1e-5);
  const SpectralTable f = ids_periodic(std::vector<double>{0.0}, std::vector<double>{0.0});
  CHECK(std::abs(principal_value_S(f, 1.0)) < 1e-5);
  CHECK_THROWS_AS(principal_value_S(t, 1.0), std::domain_error);
}

TEST_CASE("exp(-i acos(z/2)) is the small root of w^2 - z w + 1") {
  for (std::complex<double> z : {std::complex<double>(0.3, -0.5), {-2.5, -1e-3}, {0.0, -10.0}}) {
    const auto w = exp_minus_i_acos(z);
    CHECK(std::abs(w) < 1.0);
    CHECK(std::abs(w + 1.0 / w - z) < 1e-12);
  }
  const auto w = exp_minus_i_acos({1.0, -1e-12});
  CHECK(w.imag() > 0.0);
}

TEST_CASE("Xi by quadrature matches the closed form") {
  const SpectralTable t = ids_periodic(kCell, std::vector<double>{0.0});
  for (std::complex<double> z : {std::complex<double>(0.3, -0.2), {2.5, -1.0}, {-1.0, -0.05}, {5.0, -2.0}}) {
    CHECK(std::abs(xi(z, t) - xi_closed_form(z, kCell)) < 1e-9);
  }
  const SpectralTable f = ids_periodic(std::vector<double>{0.0}, std::vector<double>{0.0});
  const std::complex<double> z(0.4, -0.7);
  const auto w = exp_minus_i_acos(z);
  CHECK(std::abs(xi(z, f) - w * w * w / (w * w - 1.0)) < 1e-9);
  CHECK_THROWS_AS(xi({0.0, 0.1}, t), std::domain_error);
}

TEST_CASE("Xi zeros: none for the free model, one simple zero for [2, 0]") {
  const SpectralTable f = ids_periodic(std::vector<double>{0.0}, std::vector<double>{0.0});
  CHECK(xi_zero_count(f, {}) == 0);
  const SpectralTable t = ids_periodic(kCell, std::vector<double>{0.0});
  const auto zs = xi_zeros(t, {});
  REQUIRE(zs.size() == 1);
  CHECK(zs[0].local_count == 1);
  CHECK(std::abs(xi_closed_form(zs[0].z, kCell)) < 1e-10);
  CHECK(xi_zero_count(t, {}) == 1);
}

TEST_CASE("spectral table CSV round trip") {
  const std::vector<double> grid{-1.0, 0.5, 2.5};
  const SpectralTable t = ids_periodic(kCell, grid);
  std::stringstream ss;
  write_spectral_table(ss, t);
  const SpectralTable u = read_spectral_table(ss);
  CHECK(u.is_periodic());
  CHECK(u.grid == t.grid);
  CHECK(u.N == t.N);
  CHECK(u.rho == t.rho);
  CHECK(u.bands.intervals.size() == 2);

  const SpectralTable e = ids_empirical(uniform_family({1.0}), grid, 200, 2, {1.0}, 4);
  std::stringstream se;
  write_spectral_table(se, e);
  const SpectralTable v = read_spectral_table(se);
  CHECK_FALSE(v.is_periodic());
  CHECK(v.N == e.N);
  CHECK(std::get<EmpiricalRandom>(v.provenance).L_ref == 200);
  std::stringstream bad("E,N,n,rho\n1,2,3,4\n");
  CHECK_THROWS(read_spectral_table(bad));
}
