#pragma once

/// Spectral reference data: integrated density of states N, its density n,
/// Lyapunov exponent rho, the principal value S and the function Xi.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reslab/model.hpp"
#include "reslab/resonances.hpp"

namespace reslab {

struct AnalyticPeriodic {
  std::vector<double> cell;
};

struct EmpiricalRandom {
  UniformDist dist;
  int L_ref = 0;
  int n_samples = 0;
  /// Gaussian kernel bandwidth used for n(E).
  double bandwidth = 0.0;
  std::uint64_t seed = 0;
};

using Provenance = std::variant<AnalyticPeriodic, EmpiricalRandom>;

struct Bands {
  /// [a_j^-, a_j^+] ascending; touching bands (closed gaps) are kept separate.
  std::vector<Interval> intervals;
  /// Energies where Delta touches +-2 tangentially.
  std::vector<double> closed_gaps;

  bool contains(double E) const;
  /// 0-based band index or -1.
  int band_of(double E) const;
};

struct SpectralTable {
  std::vector<double> grid;
  std::vector<double> N;
  std::vector<double> n;
  std::vector<double> rho;
  Provenance provenance;
  /// Floquet bands (periodic provenance only).
  Bands bands;

  bool is_periodic() const { return std::holds_alternative<AnalyticPeriodic>(provenance); }
  /// Exact for periodic provenance, linear interpolation on the grid otherwise.
  double N_at(double E) const;
  double n_at(double E) const;
  double rho_at(double E) const;
};

/// Trace of the monodromy T(E, V_{p-1}) ... T(E, V_0) and its E-derivative.
struct Discriminant {
  std::complex<double> value;
  std::complex<double> derivative;
};
Discriminant discriminant(std::span<const double> cell, std::complex<double> E);
double discriminant(std::span<const double> cell, double E);

/// Bands {|Delta| <= 2}; edges are the eigenvalues of the periodic and
/// antiperiodic p x p Bloch matrices.
Bands floquet_bands(std::span<const double> cell);

struct IdsPoint {
  double N = 0.0;
  double n = 0.0;
};
/// Floquet IDS: inside band j (1-based), N = (j - 1 + arccos(s_j Delta / 2) / pi) / p with s_j = (-1)^{p-j+1}.
IdsPoint ids_periodic_point(std::span<const double> cell, const Bands& bands, double E);
SpectralTable ids_periodic(std::span<const double> cell, std::span<const double> grid);

/// rho(z) = log|mu(z)| / p with mu the larger Floquet multiplier.
double lyapunov_periodic(std::span<const double> cell, std::complex<double> z);

/// Potential of size L (box [0, L]) for ensemble member `sample`.
using SampleFamily = std::function<Potential(int L, std::uint64_t sample)>;

/// sample -> sample_random(dist, L, seed = sample, stream).
SampleFamily uniform_family(UniformDist dist, std::uint64_t stream = 0);

/// Averaged Sturm counting functions on [0, L_ref]; n(E) is the derivative of
/// N smoothed by a Gaussian of bandwidth 4 / sqrt(L_ref); rho by transfer
/// products over the same samples. Grid points outside [-2 - B, 2 + B] are
/// dropped with a warning.
SpectralTable ids_empirical(const SampleFamily& family, std::span<const double> grid, int L_ref,
                            int n_samples, UniformDist dist = {}, std::uint64_t seed = 0);

double lyapunov(const SampleFamily& family, double E, int L, int n_samples);
double lyapunov(const SampleFamily& family, std::complex<double> E, int L, int n_samples);

/// int log|E - lambda| dN(lambda).
double thouless_integral(const SpectralTable& table, double E);
/// max over E of |thouless_integral(E) - rho(E)|.
double thouless_check(const SpectralTable& table, std::span<const double> E_grid);

/// p.v. int dN(lambda) / (lambda - E) for E in a band interior of a periodic table.
double principal_value_S(const SpectralTable& table, double E);

/// e^{-i acos_(z/2)}: the root w of w^2 - z w + 1 = 0 with |w| < 1 for Im z < 0
/// (on (-2, 2) the upper unit semicircle).
std::complex<double> exp_minus_i_acos(std::complex<double> z);

/// Xi(z) = int dN(lambda) / (lambda - z) + e^{-i acos_(z/2)} by quadrature; Im z < 0.
std::complex<double> xi(std::complex<double> z, const SpectralTable& table);
/// Closed form -Delta'(z) / (p (mu - 1/mu)) + w(z) for periodic dN.
std::complex<double> xi_closed_form(std::complex<double> z, std::span<const double> cell);

struct SearchBox {
  double re_lo = -3.0;
  double re_hi = 3.0;
  double im_lo = -3.0;
  double im_hi = -0.05;
};

/// Winding number of Xi along the boundary of the box.
int xi_zero_count(const SpectralTable& table, const SearchBox& box);

struct XiZero {
  std::complex<double> z;
  /// Zero count in the 1e-3 box around z.
  int local_count = 0;
};
std::vector<XiZero> xi_zeros(const SpectralTable& table, const SearchBox& box);

/// CSV E,N,n,rho preceded by one "# {json}" provenance line.
void write_spectral_table(std::ostream& os, const SpectralTable& table);
SpectralTable read_spectral_table(std::istream& is);

}  // namespace reslab
