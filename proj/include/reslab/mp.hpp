#pragma once

/// Thin RAII value types over MPFR.
///
/// Every Real carries its own precision. Binary operators produce a result at
/// the larger of the two operand precisions. Hot loops (Horner, Aberth sweeps)
/// call the mpfr_* functions directly on get() with preallocated scratch.

#include <mpfr.h>

#include <algorithm>
#include <complex>
#include <string>
#include <utility>

namespace reslab::mp {

using Bits = mpfr_prec_t;

inline constexpr Bits kMinBits = 53;

class Real {
 public:
  explicit Real(Bits bits = 256) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(double x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long x, Bits bits) { mpfr_init2(v_, bits); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x, Bits bits) : Real(static_cast<long>(x), bits) {}
  Real(const Real& o) { mpfr_init2(v_, o.precision()); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, kMinBits);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      if (precision() != o.precision()) mpfr_set_prec(v_, o.precision());
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  /// Parses decimal or hex-float ("0x1.8p+3") text.
  static Real parse(const std::string& text, Bits bits);

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  Bits precision() const { return mpfr_get_prec(v_); }
  /// Changes precision keeping the (rounded) value.
  void round_to(Bits bits) { mpfr_prec_round(v_, bits, MPFR_RNDN); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; LONG_MIN for zero.
  long exponent() const;
  /// Exact hexadecimal representation ("0x1.abcp+3").
  std::string hex() const;
  /// Decimal representation with the given number of significant digits.
  std::string str(int digits = 20) const;

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real operator-() const { Real r(*this); mpfr_neg(r.v_, r.v_, MPFR_RNDN); return r; }

 private:
  mpfr_t v_;
};

inline Bits common(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

inline Real operator+(const Real& a, const Real& b) { Real r(common(a, b)); mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator-(const Real& a, const Real& b) { Real r(common(a, b)); mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator*(const Real& a, const Real& b) { Real r(common(a, b)); mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline Real operator/(const Real& a, const Real& b) { Real r(common(a, b)); mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN); return r; }
inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.get(), b.get()) != 0; }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.get(), b.get()) != 0; }

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
/// Natural log of |x| for any exponent range; -inf for zero.
double log_abs(const Real& x);

class Complex {
 public:
  explicit Complex(Bits bits = 256) : re_(bits), im_(bits) {}
  Complex(double re, double im, Bits bits) : re_(re, bits), im_(im, bits) {}
  Complex(std::complex<double> z, Bits bits) : re_(z.real(), bits), im_(z.imag(), bits) {}
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}

  Real& re() { return re_; }
  Real& im() { return im_; }
  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  Bits precision() const { return std::max(re_.precision(), im_.precision()); }
  std::complex<double> to_cdouble() const { return {re_.to_double(), im_.to_double()}; }

  Complex& operator+=(const Complex& o) { re_ += o.re_; im_ += o.im_; return *this; }
  Complex& operator-=(const Complex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  Complex operator-() const { return Complex(-re_, -im_); }

 private:
  Real re_;
  Real im_;
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator/(const Complex& a, const Complex& b);
Complex conj(const Complex& z);
/// |z|^2
Real norm(const Complex& z);
Real abs(const Complex& z);

/// In-place kernels on raw MPFR handles; all outputs must be distinct from inputs
/// unless noted.
namespace raw {

/// out = a * b. tmp must hold two scratch values at output precision.
void mul(Complex& out, const Complex& a, const Complex& b, Real& t0, Real& t1);
/// out = a / b via a * conj(b) / |b|^2.
void div(Complex& out, const Complex& a, const Complex& b, Real& t0, Real& t1, Real& t2);

}  // namespace raw

}  // namespace reslab::mp
