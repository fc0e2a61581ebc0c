#include "doctest.h"

#include <cmath>

#include "reslab/mp.hpp"

using namespace reslab;

TEST_CASE("hex round trip is exact") {
  mp::Real x = mp::Real(1.0, 300) / mp::Real(3.0, 300);
  const mp::Real y = mp::Real::parse(x.hex(), 300);
  CHECK(x == y);
  CHECK(mp::Real::parse("0x1.8p+3", 64).to_double() == 12.0);
  CHECK(mp::Real::parse("-2.5", 64).to_double() == -2.5);
}

TEST_CASE("binary operators use the larger precision") {
  const mp::Real a(1.0, 64), b(1.0, 256);
  CHECK((a + b).precision() == 256);
  CHECK((a * a).precision() == 64);
}

TEST_CASE("log_abs covers exponents beyond double range") {
  mp::Real x(1.0, 128);
  mpfr_mul_2si(x.get(), x.get(), -5000, MPFR_RNDN);
  CHECK(mp::log_abs(x) == doctest::Approx(-5000 * std::log(2.0)).epsilon(1e-14));
  CHECK(std::isinf(mp::log_abs(mp::Real(0.0, 64))));
  CHECK(mp::log_abs(mp::Real(-3.0, 64)) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("complex arithmetic matches std::complex") {
  const std::complex<double> a(0.3, -1.2), b(-2.0, 0.7);
  const mp::Complex A(a, 128), B(b, 128);
  const auto q = (A / B).to_cdouble(), p = (A * B).to_cdouble();
  CHECK(std::abs(q - a / b) < 1e-15);
  CHECK(std::abs(p - a * b) < 1e-15);
  CHECK(mp::abs(A).to_double() == doctest::Approx(std::abs(a)));
}
