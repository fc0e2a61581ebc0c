#include "reslab/mp.hpp"

#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace reslab::mp {

Real Real::parse(const std::string& text, Bits bits) {
  Real r(bits);
  if (mpfr_set_str(r.v_, text.c_str(), 0, MPFR_RNDN) != 0) {
    throw std::invalid_argument("cannot parse multiprecision number: " + text);
  }
  return r;
}

long Real::exponent() const {
  if (mpfr_zero_p(v_)) return LONG_MIN;
  return mpfr_get_exp(v_);
}

std::string Real::hex() const {
  // %Ra prints the exact binary value; size first, then format.
  int n = mpfr_snprintf(nullptr, 0, "%Ra", v_);
  std::vector<char> buf(static_cast<size_t>(n) + 1);
  mpfr_snprintf(buf.data(), buf.size(), "%Ra", v_);
  return std::string(buf.data());
}

std::string Real::str(int digits) const {
  int n = mpfr_snprintf(nullptr, 0, "%.*Rg", digits, v_);
  std::vector<char> buf(static_cast<size_t>(n) + 1);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

Real abs(const Real& x) {
  Real r(x.precision());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real sqrt(const Real& x) {
  Real r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real log(const Real& x) {
  Real r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Complex operator+(const Complex& a, const Complex& b) { return Complex(a.re() + b.re(), a.im() + b.im()); }
Complex operator-(const Complex& a, const Complex& b) { return Complex(a.re() - b.re(), a.im() - b.im()); }

Complex operator*(const Complex& a, const Complex& b) {
  Bits bits = std::max(a.precision(), b.precision());
  Complex out(bits);
  Real t0(bits), t1(bits);
  raw::mul(out, a, b, t0, t1);
  return out;
}

Complex operator*(const Complex& a, const Real& b) { return Complex(a.re() * b, a.im() * b); }

Complex operator/(const Complex& a, const Complex& b) {
  Bits bits = std::max(a.precision(), b.precision());
  Complex out(bits);
  Real t0(bits), t1(bits), t2(bits);
  raw::div(out, a, b, t0, t1, t2);
  return out;
}

Complex conj(const Complex& z) { return Complex(z.re(), -z.im()); }

Real norm(const Complex& z) { return z.re() * z.re() + z.im() * z.im(); }

Real abs(const Complex& z) {
  Real r(z.precision());
  mpfr_hypot(r.get(), z.re().get(), z.im().get(), MPFR_RNDN);
  return r;
}

namespace raw {

void mul(Complex& out, const Complex& a, const Complex& b, Real& t0, Real& t1) {
  mpfr_mul(t0.get(), a.re().get(), b.re().get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.im().get(), b.im().get(), MPFR_RNDN);
  mpfr_sub(t0.get(), t0.get(), t1.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.re().get(), b.im().get(), MPFR_RNDN);
  mpfr_fma(out.im().get(), a.im().get(), b.re().get(), t1.get(), MPFR_RNDN);
  mpfr_swap(out.re().get(), t0.get());
}

void div(Complex& out, const Complex& a, const Complex& b, Real& t0, Real& t1, Real& t2) {
  mpfr_sqr(t2.get(), b.re().get(), MPFR_RNDN);
  mpfr_fma(t2.get(), b.im().get(), b.im().get(), t2.get(), MPFR_RNDN);
  if (mpfr_zero_p(t2.get())) throw std::domain_error("complex division by zero");
  // re = (ar br + ai bi) / |b|^2, im = (ai br - ar bi) / |b|^2
  mpfr_mul(t0.get(), a.im().get(), b.im().get(), MPFR_RNDN);
  mpfr_fma(t0.get(), a.re().get(), b.re().get(), t0.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.re().get(), b.im().get(), MPFR_RNDN);
  mpfr_fms(t1.get(), a.im().get(), b.re().get(), t1.get(), MPFR_RNDN);
  mpfr_div(out.re().get(), t0.get(), t2.get(), MPFR_RNDN);
  mpfr_div(out.im().get(), t1.get(), t2.get(), MPFR_RNDN);
}

}  // namespace raw

double log_abs(const Real& x) {
  if (x.is_zero()) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, x.get(), MPFR_RNDN);
  return std::log(std::abs(m)) + static_cast<double>(e) * std::numbers::ln2;
}

}  // namespace reslab::mp
