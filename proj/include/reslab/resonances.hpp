#pragma once

/// Sheet classification of characteristic-polynomial roots, pole counts and
/// resonance-free region scans.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reslab/charpoly.hpp"
#include "reslab/model.hpp"
#include "reslab/mp.hpp"
#include "reslab/rootfind.hpp"

namespace reslab {

enum class ResonanceClass { Resonance, Eigenvalue, Antibound, AntiResonance, Boundary };

std::string_view class_name(ResonanceClass c);
ResonanceClass parse_class(std::string_view name);

struct Resonance {
  mp::Complex lambda;
  std::complex<double> z;
  /// log |Im z| computed at working precision; finite even when Im z underflows a double.
  double log_abs_im_z = -std::numeric_limits<double>::infinity();
  ResonanceClass cls = ResonanceClass::Boundary;
  double residual = 0.0;
  bool cluster = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// tol_sheet = 2^{-bits/8}.
double sheet_tolerance(mp::Bits bits);

mp::Complex z_of_lambda(const mp::Complex& lambda);
/// Root of lambda^2 - z lambda + 1 = 0 on the requested side of the unit circle.
mp::Complex lambda_from_z(const mp::Complex& z, bool second_sheet);

/// Maps every root to z and assigns its class. A side of the unit circle or of
/// the real axis is decided only when the root's inclusion disc (16 x its
/// a-posteriori radius, at least 2^{8-bits}) lies on one side; otherwise the
/// root is Boundary (for |lambda| = 1) or real. Sorted by Re z (then Im z).
std::vector<Resonance> classify(const RootSet& rs, mp::Bits bits);

/// #{class == Resonance}
int count_lower_half(std::span<const Resonance> res);

struct ClassCounts {
  int resonance = 0;
  int antiresonance = 0;
  int eigenvalue = 0;
  int antibound = 0;
  int boundary = 0;

  int total() const { return resonance + antiresonance + eigenvalue + antibound + boundary; }
};
ClassCounts count_classes(std::span<const Resonance> res);

/// True when Resonance and AntiResonance roots pair bijectively under
/// lambda -> conj(lambda) to relative distance tol.
bool conjugate_pairing(std::span<const Resonance> res, double tol);

/// Smallest and largest Dirichlet eigenvalue of the box Jacobi matrix
/// tridiag(1, V, 1) on [0, L], by Sturm bisection.
Interval box_spectrum_bounds(const Potential& v);

/// Working precision for reliable roots: the coefficient growth plus the
/// cancellation lambda*^{L+1} suffered by roots whose z lies on the box
/// spectrum, where lambda* + 1/lambda* = max(2, |spectrum|), plus guard bits.
long required_root_precision(const CharPoly& p, const Potential& v);

struct BoxSolution {
  CharPoly poly;
  RootSet roots;
  std::vector<Resonance> resonances;
};

/// build_charpoly + find_roots + classify, raising the precision above
/// min_bits (in steps of 64) when required_root_precision asks for more.
BoxSolution solve_box(const Potential& v, mp::Bits min_bits, const RootFindOptions& opts = {});

enum class Regime { NoResonanceO1, NoResonance1OverL, UniqueExponential, InsideSpectrum };
std::string_view regime_name(Regime r);

struct FreeRegionReport {
  Interval I;
  int L = 0;
  /// min over resonances with Re z in I of |Im z|; +inf for an empty strip.
  double min_gap = std::numeric_limits<double>::infinity();
  double log_min_gap = std::numeric_limits<double>::infinity();
  int n_in_strip = 0;
  Regime regime = Regime::InsideSpectrum;
};

FreeRegionReport free_region(std::span<const Resonance> res, Interval I, int L, Regime regime);

using PotentialFamily = std::function<Potential(int L)>;

std::vector<FreeRegionReport> scan_free_region(const PotentialFamily& family, Interval I,
                                               std::span<const int> Ls, mp::Bits bits, Regime regime);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n = 0;
};
/// Ordinary least squares y = slope x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);
/// log(min_gap) against log(L); reports with empty strips are skipped.
LineFit fit_gap_exponent(std::span<const FreeRegionReport> reports);
/// -log(min_gap) / (2L) per report.
std::vector<double> exponential_rates(std::span<const FreeRegionReport> reports);

struct EigenResonancePair {
  int L = 0;
  int n_in_strip = 0;
  bool unique = false;
  std::complex<double> z;
  double log_dist = 0.0;
  double log_abs_im = 0.0;
};

struct EigenResonanceReport {
  /// Reference eigenvalue of H (left-localized Dirichlet eigenvalue of a box of size 8 L_max).
  double v_ref = 0.0;
  int ref_box = 0;
  bool reference_found = false;
  std::vector<EigenResonancePair> per_L;
  LineFit im_fit;
  LineFit dist_fit;
  /// Both slopes negative and equal within 20%.
  bool slopes_match = false;
  std::string diagnostic;
};

/// Follows the unique resonance in {Re z in I, Im z >= -strip_depth} as L grows.
EigenResonanceReport eigenvalue_resonance_pairs(const PotentialFamily& family, Interval I,
                                                std::span<const int> Ls, mp::Bits bits,
                                                double strip_depth = 0.5);

/// Columns L,seed,re_z,im_z,class,residual.
void write_resonance_csv(std::ostream& os, std::span<const Resonance> res, int L, std::uint64_t seed,
                         bool header = true);

struct ResonanceRow {
  int L = 0;
  std::uint64_t seed = 0;
  std::complex<double> z;
  ResonanceClass cls = ResonanceClass::Boundary;
  double residual = 0.0;
};
std::vector<ResonanceRow> read_resonance_csv(std::istream& is);

}  // namespace reslab
