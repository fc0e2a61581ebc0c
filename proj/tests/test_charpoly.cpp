#include "doctest.h"

#include <cmath>

#include "reslab/charpoly.hpp"

using namespace reslab;

namespace {

CharPoly poly(const Potential& v, mp::Bits bits = 256) { return build_charpoly(v, BoxConfig{v.box_end(), bits}); }

}  // namespace

TEST_CASE("free potential gives the constant polynomial") {
  for (int L = 0; L <= 200; ++L) {
    const CharPoly p = poly(make_free(L));
    REQUIRE(p.degree() == 0);
    CHECK(p.coeffs[0].to_double() == 1.0);
  }
}

TEST_CASE("one site: p(lambda) = 1 - v lambda") {
  for (double v : {0.5, 2.0, -3.0}) {
    const CharPoly p = poly(Potential({v}, RandomKind{}));
    REQUIRE(p.degree() == 1);
    CHECK(p.coeffs[0].to_double() == 1.0);
    CHECK(p.coeffs[1].to_double() == -v);
  }
}

TEST_CASE("L = 1 cubic matches the hand expansion") {
  const double v0 = 0.37, v1 = -1.25;
  const CharPoly p = poly(Potential({v0, v1}, RandomKind{}));
  REQUIRE(p.degree() == 3);
  CHECK(p.coeffs[0].to_double() == 1.0);
  CHECK(p.coeffs[1].to_double() == doctest::Approx(-(v0 + v1)).epsilon(1e-15));
  CHECK(p.coeffs[2].to_double() == doctest::Approx(v0 * v1).epsilon(1e-15));
  CHECK(p.coeffs[3].to_double() == doctest::Approx(-v1).epsilon(1e-15));
}

TEST_CASE("degree bound and normalization") {
  for (int L : {3, 10, 31}) {
    const CharPoly p = poly(sample_random({1.0}, L, static_cast<std::uint64_t>(L)));
    CHECK(p.degree() <= 2 * L + 1);
    CHECK(p.coeffs[0].to_double() == 1.0);
    CHECK(p.L == L);
  }
}

TEST_CASE("coefficient and transfer evaluation paths agree") {
  const Potential v = sample_random({2.0}, 25, 4);
  const CharPoly p = poly(v, 256);
  for (std::complex<double> l : {std::complex<double>(0.3, 0.2), {-0.9, 0.1}, {1.4, -0.6}, {0.05, 0.0}}) {
    const mp::Complex lam(l, 256);
    const auto a = eval_charpoly(p, lam).to_cdouble();
    const auto b = eval_transfer(v, lam, 256).to_cdouble();
    CHECK(std::abs(a - b) <= 1e-40 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("derivative matches a finite difference") {
  const CharPoly p = poly(sample_random({1.0}, 8, 1), 256);
  const mp::Complex lam(0.4, 0.3, 256);
  const auto vd = eval_charpoly_with_derivative(p, lam);
  const double h = 1e-20;
  const mp::Complex step(h, 0.0, 256);
  const auto diff = (eval_charpoly(p, lam + step) - eval_charpoly(p, lam - step)).to_cdouble();
  CHECK(std::abs(diff / (2 * h) - vd.derivative.to_cdouble()) < 1e-10);
}

TEST_CASE("hex dump round trip is exact") {
  const CharPoly p = poly(sample_random({1.0}, 12, 3), 192);
  const CharPoly q = from_hex_dump(to_hex_dump(p));
  REQUIRE(q.coeffs.size() == p.coeffs.size());
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) CHECK(p.coeffs[k] == q.coeffs[k]);
  CHECK(q.L == p.L);
  CHECK(q.potential_hash == p.potential_hash);
  CHECK(q.precision == p.precision);
  CHECK_THROWS(from_hex_dump("not a dump"));
}

TEST_CASE("insufficient precision is reported") {
  CHECK_THROWS_AS(build_charpoly(sample_random({50.0}, 200, 1), BoxConfig{200, 64}), PrecisionError);
}

TEST_CASE("recommended precision grows with L") {
  CHECK(recommended_precision(0.1, 10) >= 256);
  CHECK(recommended_precision(0.5, 1000) > recommended_precision(0.5, 500));
}
