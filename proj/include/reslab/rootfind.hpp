#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "reslab/charpoly.hpp"
#include "reslab/mp.hpp"

namespace reslab {

struct Root {
  mp::Complex lambda;
  /// Backward error |p(lambda)| / sum_k |c_k| |lambda|^k.
  double residual = 0.0;
  /// Another root lies within 2^{-precision/8} (relative): possible multiplicity.
  bool cluster = false;
  /// A-posteriori inclusion radius (|p| + 4(d+1) 2^{-bits} sum |c_k||lambda|^k) / |p'|.
  double radius = 0.0;
};

struct RootSet {
  std::vector<Root> roots;
  int iterations = 0;
  mp::Bits precision = 256;

  double worst_residual() const;
};

struct RootFindOptions {
  /// Sweep cap; the effective cap is max(max_iterations, degree).
  int max_iterations = 200;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, RootSet partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RootSet& partial() const { return partial_; }

 private:
  RootSet partial_;
};

class PolishError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Residual tolerance 2^{-bits/4}.
double residual_tolerance(mp::Bits bits);

/// All deg(p) roots by Aberth-Ehrlich simultaneous iteration at the working
/// precision of p. Starts from circles given by the Newton polygon of the
/// coefficient moduli; converged roots are frozen; sweeps are Jacobi (every
/// update reads the previous sweep), so results do not depend on update order.
/// Output is sorted lexicographically by (Re lambda, Im lambda).
RootSet find_roots(const CharPoly& p, const RootFindOptions& opts = {});

/// Newton iteration until the step is below 2^{-bits/2} |lambda|.
mp::Complex polish_root(const CharPoly& p, const mp::Complex& lambda0);

/// Backward error of lambda as a root of p.
double root_residual(const CharPoly& p, const mp::Complex& lambda);

struct RootDiagnostics {
  double residual = 0.0;
  double radius = 0.0;
};
RootDiagnostics root_diagnostics(const CharPoly& p, const mp::Complex& lambda);

/// Double-precision companion-matrix roots (balanced QR); a cross-check oracle
/// for small degrees.
std::vector<std::complex<double>> companion_roots(const CharPoly& p);

/// JSON array of {re, im, residual, cluster} with hex-float components, plus
/// iterations and precision.
nlohmann::json to_json(const RootSet& rs);
RootSet rootset_from_json(const nlohmann::json& j);

}  // namespace reslab
