#pragma once

/// Goodness-of-fit tests turning ensembles of rescaled clouds into evidence
/// for the Poisson limit and for independence across reference points.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "reslab/pointprocess.hpp"

namespace reslab {

inline constexpr double kSignificance = 0.01;

/// Boxes I_n x C_n; intervals within each family are pairwise disjoint.
struct BoxSpec {
  std::vector<Interval> I;
  std::vector<Interval> C;

  /// I = {[-2,-1], [0,1], [2,3]}, C = {[0.1,0.4], [0.5,0.8]}.
  static BoxSpec defaults();
  /// Throws on empty or overlapping intervals.
  void validate() const;
  std::size_t size() const { return I.size() * C.size(); }
  /// Box k = (I[k / |C|], C[k % |C|]).
  Interval x_of(std::size_t k) const { return I[k / C.size()]; }
  Interval y_of(std::size_t k) const { return C[k % C.size()]; }
  double measure(std::size_t k) const { return x_of(k).length() * y_of(k).length(); }
};

struct GofReport {
  std::string test;
  double statistic = 0.0;
  double p_value = 1.0;
  int n_samples = 0;
  bool pass = false;
  /// Per-component statistics and diagnostics.
  nlohmann::json details;
};

nlohmann::json to_json(const GofReport& r);
/// Fixed-width summary table, one line per report.
std::string summary_table(std::span<const GofReport> reports);

/// Number of points of the cloud in [x.lo, x.hi) x [y.lo, y.hi).
int box_count(const RescaledCloud& cloud, Interval x, Interval y);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);
/// Asymptotic Kolmogorov tail P(sqrt(n) D > t) = 2 sum (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_sf(double t);
/// One-sample KS distance against a continuous cdf and its p-value
/// (Stephens' small-sample correction).
GofReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
/// KS against Exp(rate) conditioned on [0, cutoff].
GofReport ks_exponential(std::vector<double> sample, double rate,
                         double cutoff = std::numeric_limits<double>::infinity());

/// Pearson chi-square of observed counts against Poisson(mu), pooling the
/// tail until every expected cell is at least 5.
GofReport poisson_marginal_test(std::span<const int> counts, double mu);
/// Chi-square independence test on the contingency table of two count
/// vectors, pooling high categories until every expected cell is at least 5.
GofReport joint_factorization_test(std::span<const int> a, std::span<const int> b);

/// Marginal Poisson tests per box plus pairwise factorization over the first
/// three boxes; overall p-value is the Bonferroni-adjusted minimum.
GofReport poisson_counts_test(std::span<const RescaledCloud> clouds, const BoxSpec& boxes,
                              int min_samples = 200);

/// Pooled nearest-neighbour x-spacings of points with y in strip, compared to
/// Exp(|strip|) by KS. Spacings are taken within each cloud; to remove the
/// window-edge bias only forward gaps from points at least c inside the right
/// edge and not exceeding c are kept (c = min(5 / |strip|, window / 2)), and
/// the reference law is Exp(|strip|) conditioned on [0, c].
GofReport spacing_test(std::span<const RescaledCloud> clouds, Interval strip = {0.0, 1.0});

struct Correlation {
  double r = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p_value = 1.0;
  bool defined = false;
};
/// Pearson correlation with a 99% Fisher-z interval.
Correlation pearson_fisher(std::span<const double> a, std::span<const double> b);

/// Per-sample counts in box (x, y) for two processes built from the same
/// seeds; passes when 0 lies in the 99% Fisher-z interval.
GofReport independence_test(std::span<const RescaledCloud> a, std::span<const RescaledCloud> b, Interval x,
                            Interval y);
GofReport independence_test(std::span<const RescaledCloud> a, std::span<const RescaledCloud> b, Interval x_a,
                            Interval y_a, Interval x_b, Interval y_b);

struct DensityCountReport {
  Interval I;
  double kappa = 0.0;
  std::map<int, std::vector<double>> normalized;  // L -> per-seed counts / L
  std::map<int, double> mean;
  std::map<int, double> stderr_;
  double expected = 0.0;
  std::map<int, bool> pass_per_L;
  bool pass = false;
};

/// (1/L) #{Re z in I, -e^{-L^kappa} <= Im z < 0} per (L, seed) against int_I dN.
DensityCountReport density_count_check(const std::map<int, std::vector<std::vector<Resonance>>>& res_per_L,
                                       Interval I, double kappa, const SpectralTable& table);

/// Unit-intensity Poisson points in [x_lo, x_hi] x [y_lo, y_hi], a pure function of (seed, stream).
RescaledCloud synthetic_poisson_cloud(double x_lo, double x_hi, double y_lo, double y_hi, std::uint64_t seed,
                                      std::uint64_t stream = 0);
/// Unit square lattice with a random offset over the same region.
RescaledCloud synthetic_lattice_cloud(double x_lo, double x_hi, double y_lo, double y_hi, std::uint64_t seed,
                                      std::uint64_t stream = 0);

struct Calibration {
  int runs = 0;
  double null_pass_rate = 0.0;
  double lattice_reject_rate = 0.0;
  bool ok = false;
};

/// Repeats poisson_counts_test and spacing_test on synthetic Poisson and
/// lattice ensembles of n_samples clouds; ok when the null passes and the
/// lattice is rejected in at least 95% of runs for both tests.
struct SelfCalibration {
  Calibration counts;
  Calibration spacing;
  Calibration independence;
};
SelfCalibration self_calibrate(const BoxSpec& boxes, double x_lo, double x_hi, Interval strip, int n_samples,
                               int runs, std::uint64_t seed);

}  // namespace reslab
