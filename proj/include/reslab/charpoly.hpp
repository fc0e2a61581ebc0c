#pragma once

/// Resonance characteristic polynomial.
///
/// With z = lambda + 1/lambda, the Dirichlet solution u(n) of
/// u(n+1) = (z - V(n)) u(n) - u(n-1), u(-1) = 0, u(0) = 1 is a Laurent
/// polynomial in lambda. Continuing it as c * lambda^n beyond the box requires
/// u(L+1) = lambda u(L); clearing denominators gives
///
///   p(lambda) = lambda^{L+1} (u(L+1) - lambda u(L)),
///
/// a real polynomial with p(0) = 1 and degree <= 2L+1. Roots with |lambda| > 1
/// and Im lambda < 0 are resonances z = lambda + 1/lambda with Im z < 0; real
/// roots inside the unit disk are eigenvalues of H_L.

#include <stdexcept>
#include <string>
#include <vector>

#include "reslab/model.hpp"
#include "reslab/mp.hpp"

namespace reslab {

/// Dense Laurent polynomial sum_{k=min_deg}^{max_deg} c_k lambda^k with real
/// multiprecision coefficients. Canonical form has nonzero end coefficients;
/// the zero polynomial has no coefficients.
class LaurentPoly {
 public:
  explicit LaurentPoly(mp::Bits bits) : bits_(bits) {}
  LaurentPoly(int min_deg, std::vector<mp::Real> coeffs);

  static LaurentPoly monomial(int k, double c, mp::Bits bits);

  bool is_zero() const { return coeffs_.empty(); }
  int min_deg() const { return min_deg_; }
  int max_deg() const { return min_deg_ + static_cast<int>(coeffs_.size()) - 1; }
  mp::Bits precision() const { return bits_; }
  /// Zero outside [min_deg, max_deg].
  mp::Real coeff(int k) const;
  const std::vector<mp::Real>& coeffs() const { return coeffs_; }

  void trim();
  /// Multiplies by lambda^k.
  LaurentPoly shifted(int k) const;
  mp::Complex eval(const mp::Complex& lambda) const;

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);

 private:
  mp::Bits bits_;
  int min_deg_ = 0;
  std::vector<mp::Real> coeffs_;
};

struct CharPoly {
  /// Ascending powers of lambda; coeffs[0] == 1.
  std::vector<mp::Real> coeffs;
  int L = 0;
  std::string potential_hash;
  mp::Bits precision = 256;
  /// Factor the raw polynomial was divided by to make coeffs[0] == 1.
  std::string normalization = "1";

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  /// log2 of the largest coefficient magnitude (coeffs[0] == 1, so >= 0).
  long growth_bits() const;
};

/// Raised when the coefficient range does not fit the working precision.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, long required_bits)
      : std::runtime_error(what), required_bits_(required_bits) {}
  long required_bits() const { return required_bits_; }

 private:
  long required_bits_;
};

/// Guard bits kept above the coefficient growth.
inline constexpr long kPrecisionGuardBits = 64;

/// Precision guidance 4 rho L / ln 2 + 64 for an a-priori Lyapunov bound rho,
/// never below 256 bits.
long recommended_precision(double rho_hat, int L);

/// u(n) for n = 0..L+1 as Laurent polynomials (index n holds u(n)).
std::vector<LaurentPoly> dirichlet_solutions(const Potential& v, const BoxConfig& cfg);

CharPoly build_charpoly(const Potential& v, const BoxConfig& cfg);

mp::Complex eval_charpoly(const CharPoly& p, const mp::Complex& lambda);

struct ValueAndDerivative {
  mp::Complex value;
  mp::Complex derivative;
};
ValueAndDerivative eval_charpoly_with_derivative(const CharPoly& p, const mp::Complex& lambda);

/// lambda^{L+1} (u(L+1) - lambda u(L)) by numeric transfer-matrix iteration at
/// the given lambda; an evaluation path independent of the coefficients.
mp::Complex eval_transfer(const Potential& v, const mp::Complex& lambda, mp::Bits bits);

/// Text dump: header line with metadata, then one hex-float coefficient per line.
std::string to_hex_dump(const CharPoly& p);
CharPoly from_hex_dump(const std::string& text);

}  // namespace reslab
