#pragma once

/// Rescaled resonance clouds: the periodic curve L Im z = h(Re z), the
/// near-axis and covariant point processes of the random case, matching of
/// deep resonances against the zeros of Xi, and the finite-size proxy for
/// deep resonance stability.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "reslab/resonances.hpp"
#include "reslab/spectral.hpp"

namespace reslab {

struct PeriodicScaling {
  int L = 0;
};

struct RandomNearScaling {
  double E0 = 0.0;
  int L = 0;
  double n = 0.0;
  double rho = 0.0;
};

struct CovariantScaling {
  double E0 = 0.0;
  double x0 = 0.0;
  int L = 0;
  double ell = 0.0;
  double n = 0.0;
  double rho = 0.0;
};

using Scaling = std::variant<PeriodicScaling, RandomNearScaling, CovariantScaling>;

/// Re z in [re_lo, re_hi] and -exp(log_depth) <= Im z < 0.
struct Window {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double log_depth = 0.0;

  bool contains(double re_z, double log_abs_im_z) const {
    return re_z >= re_lo && re_z <= re_hi && log_abs_im_z <= log_depth;
  }
};

struct CloudPoint {
  double x = 0.0;
  double y = 0.0;
  double re_z = 0.0;
  double log_abs_im_z = 0.0;
};

struct RescaledCloud {
  std::vector<CloudPoint> points;
  Scaling scaling;
  Window window;
  std::uint64_t seed = 0;
  int L = 0;
  /// Image of the window in (x, y): x in [x_lo, x_hi], y >= y_min.
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_min = 0.0;
};

/// Densities at or below this are rejected as reference energies.
inline constexpr double kDensityFloor = 1e-6;

/// K_L = [E0 - eps, E0 + eps] + i[-e^{-L^kappa}, 0);
/// x = n(E0) L (Re z - E0), y = -log|Im z| / (2 rho(E0) L).
RescaledCloud rescale_near_axis(std::span<const Resonance> res, double E0, double eps, double kappa, int L,
                                const SpectralTable& table, std::uint64_t seed = 0);

/// round(L^gamma).
double default_ell(int L, double gamma = 0.7);
/// ell / log10(L) >= 10 and ell / L <= 0.3.
bool ell_guard(double ell, int L);

/// K~_L = E0 + ell^{-1}[-1/eps, 1/eps] + i[-e^{-ell}, 0);
/// x = n(E0) ell (Re z - E0), y = -(2 rho(E0) L x0 + log|Im z|) / (2 rho(E0) ell).
RescaledCloud rescale_covariant(std::span<const Resonance> res, double E0, double x0, double eps, double ell,
                                int L, const SpectralTable& table, std::uint64_t seed = 0);

/// Inverse of the rescaling: (Re z, log|Im z|) for every point.
std::vector<std::pair<double, double>> unscale(const RescaledCloud& cloud);

/// Columns x,y,re_z,im_z,seed,L.
void write_cloud_csv(std::ostream& os, std::span<const RescaledCloud> clouds);
/// Two columns x y, one block per cloud separated by blank lines.
void write_cloud_dat(std::ostream& os, std::span<const RescaledCloud> clouds);
nlohmann::json scaling_to_json(const Scaling& s);

/// Fritsch-Carlson monotone cubic through (x, y), defined on [x.front(), x.back()].
class MonotoneSpline {
 public:
  MonotoneSpline() = default;
  MonotoneSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  double lo() const { return x_.empty() ? 0.0 : x_.front(); }
  double hi() const { return x_.empty() ? 0.0 : x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, m_;
};

struct CurveKnots {
  int L = 0;
  /// (Re z, L Im z) of every resonance in the strip.
  std::vector<std::pair<double, double>> points;
  /// Bin centres and per-bin medians.
  std::vector<std::pair<double, double>> knots;
  MonotoneSpline curve;
  int n_in_strip = 0;
  /// n_in_strip / (L + 1).
  double density = 0.0;
  /// int_I dN.
  double expected_density = 0.0;
  bool density_ok = false;
};

struct CurveFit {
  std::vector<CurveKnots> per_L;
  /// sup |h_{L_k} - h_{L_{k+1}}| on the common support, for consecutive L.
  std::vector<double> sup_distance;
  /// Pooled medians over all L.
  MonotoneSpline pooled;
};

/// Strip I + i[-C/L, 0); medians over bins of width |I|/50.
CurveFit periodic_curve(const std::map<int, std::vector<Resonance>>& res_per_L, Interval I, double C,
                        const SpectralTable& table);

struct XiMatch {
  std::complex<double> resonance;
  std::complex<double> zero;
  double distance = 0.0;
};

struct XiMatchReport {
  int L = 0;
  double C0 = 0.0;
  int n_deep = 0;
  int n_zeros = 0;
  bool counts_equal = false;
  std::vector<XiMatch> matches;
  double max_distance = 0.0;
  /// max_distance * L
  double scaled_distance = 0.0;
};

/// Deep resonances are those in the search box with Im z <= -C0 / L.
XiMatchReport match_xi_zeros(std::span<const Resonance> res, std::span<const XiZero> zeros, double C0, int L,
                             const SearchBox& box = {});

struct StabilityReport {
  int L = 0;
  double alpha = 0.0;
  /// log of the depth threshold, -log(L)^alpha
  double log_threshold = 0.0;
  int n_deep_L = 0;
  int n_deep_2L = 0;
  bool counts_equal = false;
  /// max over deep resonances at L of the distance to the nearest deep resonance at 2L.
  double max_displacement = 0.0;
  std::vector<std::complex<double>> deep_L;
  std::vector<std::complex<double>> deep_2L;
};

/// Deep set: Resonance class with |Im z| >= e^{-log(L)^alpha}.
std::vector<std::complex<double>> deep_resonances(std::span<const Resonance> res, int L, double alpha);

/// Compares the deep resonances of the reversed potential on [0, L] and [0, 2L]
/// (same omega sequence, omega_0 at the exit site). Finite-size proxy for the
/// infinite-volume statement.
StabilityReport deep_resonance_stability(std::span<const Resonance> res_L, std::span<const Resonance> res_2L,
                                         int L, double alpha);
StabilityReport deep_resonance_stability(UniformDist dist, std::uint64_t seed, int L, double alpha,
                                         mp::Bits bits);

}  // namespace reslab
