#include "reslab/pointprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace reslab {

namespace {

void check_reference(double n, double rho, double E0) {
  if (!(n > kDensityFloor)) {
    throw std::invalid_argument("density of states n(E0) = " + std::to_string(n) + " at E0 = " +
                                std::to_string(E0) + " is not positive; choose E0 inside the spectrum");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("Lyapunov exponent rho(E0) = " + std::to_string(rho) + " at E0 = " +
                                std::to_string(E0) + " is not positive");
  }
}

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

/// Per-bin medians of (Re z, L Im z), bins of width |I| / 50.
std::vector<std::pair<double, double>> bin_medians(const std::vector<std::pair<double, double>>& pts,
                                                   Interval I) {
  constexpr int kBins = 50;
  const double w = I.length() / kBins;
  std::vector<std::vector<double>> xs(kBins), ys(kBins);
  for (const auto& [x, y] : pts) {
    const int b = std::clamp(static_cast<int>((x - I.lo) / w), 0, kBins - 1);
    xs[static_cast<std::size_t>(b)].push_back(x);
    ys[static_cast<std::size_t>(b)].push_back(y);
  }
  std::vector<std::pair<double, double>> out;
  for (int b = 0; b < kBins; ++b) {
    const auto k = static_cast<std::size_t>(b);
    if (xs[k].empty()) continue;
    out.emplace_back(median(xs[k]), median(ys[k]));
  }
  return out;
}

MonotoneSpline spline_of(const std::vector<std::pair<double, double>>& knots) {
  std::vector<double> x, y;
  for (const auto& [a, b] : knots) {
    if (!x.empty() && a <= x.back()) continue;
    x.push_back(a);
    y.push_back(b);
  }
  return MonotoneSpline(std::move(x), std::move(y));
}

double sup_distance(const MonotoneSpline& a, const MonotoneSpline& b) {
  const double lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  if (a.empty() || b.empty() || !(hi > lo)) return std::numeric_limits<double>::quiet_NaN();
  constexpr int kSamples = 400;
  double d = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = i == kSamples ? hi : lo + (hi - lo) * i / kSamples;
    d = std::max(d, std::abs(a(t) - b(t)));
  }
  return d;
}

}  // namespace

RescaledCloud rescale_near_axis(std::span<const Resonance> res, double E0, double eps, double kappa, int L,
                                const SpectralTable& table, std::uint64_t seed) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (L < 1) throw std::invalid_argument("L must be positive");
  const double n = table.n_at(E0), rho = table.rho_at(E0);
  check_reference(n, rho, E0);
  RescaledCloud c;
  c.scaling = RandomNearScaling{E0, L, n, rho};
  c.window = {E0 - eps, E0 + eps, -std::pow(static_cast<double>(L), kappa)};
  c.seed = seed;
  c.L = L;
  c.x_lo = -n * L * eps;
  c.x_hi = n * L * eps;
  c.y_min = -c.window.log_depth / (2.0 * rho * L);
  for (const auto& r : res) {
    if (r.cls != ResonanceClass::Resonance || !c.window.contains(r.z.real(), r.log_abs_im_z)) continue;
    c.points.push_back({n * L * (r.z.real() - E0), -r.log_abs_im_z / (2.0 * rho * L), r.z.real(), r.log_abs_im_z});
  }
  return c;
}

double default_ell(int L, double gamma) { return std::round(std::pow(static_cast<double>(L), gamma)); }

bool ell_guard(double ell, int L) { return L > 1 && ell / std::log10(L) >= 10.0 && ell / L <= 0.3; }

RescaledCloud rescale_covariant(std::span<const Resonance> res, double E0, double x0, double eps, double ell,
                                int L, const SpectralTable& table, std::uint64_t seed) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::invalid_argument("x0 must lie in [0, 1]");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!ell_guard(ell, L)) {
    throw std::invalid_argument("ell = " + std::to_string(ell) + " at L = " + std::to_string(L) +
                                " violates ell / log10(L) >= 10 and ell / L <= 0.3");
  }
  const double n = table.n_at(E0), rho = table.rho_at(E0);
  check_reference(n, rho, E0);
  RescaledCloud c;
  c.scaling = CovariantScaling{E0, x0, L, ell, n, rho};
  c.window = {E0 - 1.0 / (eps * ell), E0 + 1.0 / (eps * ell), -ell};
  c.seed = seed;
  c.L = L;
  c.x_lo = -n / eps;
  c.x_hi = n / eps;
  const double shift = 2.0 * rho * L * x0, scale = 2.0 * rho * ell;
  c.y_min = -(shift + c.window.log_depth) / scale;
  for (const auto& r : res) {
    if (r.cls != ResonanceClass::Resonance || !c.window.contains(r.z.real(), r.log_abs_im_z)) continue;
    c.points.push_back({n * ell * (r.z.real() - E0), -(shift + r.log_abs_im_z) / scale, r.z.real(), r.log_abs_im_z});
  }
  return c;
}

std::vector<std::pair<double, double>> unscale(const RescaledCloud& cloud) {
  std::vector<std::pair<double, double>> out;
  out.reserve(cloud.points.size());
  for (const auto& p : cloud.points) {
    if (const auto* s = std::get_if<RandomNearScaling>(&cloud.scaling)) {
      out.emplace_back(s->E0 + p.x / (s->n * s->L), -2.0 * s->rho * s->L * p.y);
    } else if (const auto* s = std::get_if<CovariantScaling>(&cloud.scaling)) {
      out.emplace_back(s->E0 + p.x / (s->n * s->ell), -2.0 * s->rho * (s->ell * p.y + s->L * s->x0));
    } else {
      const auto& ps = std::get<PeriodicScaling>(cloud.scaling);
      out.emplace_back(p.x, std::log(std::abs(p.y) / ps.L));
    }
  }
  return out;
}

void write_cloud_csv(std::ostream& os, std::span<const RescaledCloud> clouds) {
  os << "x,y,re_z,im_z,seed,L\n";
  char buf[256];
  for (const auto& c : clouds) {
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%llu,%d\n", p.x, p.y, p.re_z, -std::exp(p.log_abs_im_z),
                    static_cast<unsigned long long>(c.seed), c.L);
      os << buf;
    }
  }
}

void write_cloud_dat(std::ostream& os, std::span<const RescaledCloud> clouds) {
  os << "# x y\n";
  char buf[96];
  for (const auto& c : clouds) {
    os << "# seed " << c.seed << " L " << c.L << "\n";
    for (const auto& p : c.points) {
      std::snprintf(buf, sizeof buf, "%.10g %.10g\n", p.x, p.y);
      os << buf;
    }
    os << "\n\n";
  }
}

nlohmann::json scaling_to_json(const Scaling& s) {
  if (const auto* p = std::get_if<PeriodicScaling>(&s)) return {{"kind", "periodic"}, {"L", p->L}};
  if (const auto* p = std::get_if<RandomNearScaling>(&s)) {
    return {{"kind", "near_axis"}, {"E0", p->E0}, {"L", p->L}, {"n", p->n}, {"rho", p->rho}};
  }
  const auto& c = std::get<CovariantScaling>(s);
  return {{"kind", "covariant"}, {"E0", c.E0}, {"x0", c.x0}, {"L", c.L},
          {"ell", c.ell},        {"n", c.n},   {"rho", c.rho}};
}

MonotoneSpline::MonotoneSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw std::invalid_argument("spline: size mismatch");
  const std::size_t n = x_.size();
  m_.assign(n, 0.0);
  if (n < 2) return;
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) m_[k] = d[k - 1] * d[k] <= 0.0 ? 0.0 : 0.5 * (d[k - 1] + d[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (d[k] == 0.0) {
      m_[k] = m_[k + 1] = 0.0;
      continue;
    }
    const double a = m_[k] / d[k], b = m_[k + 1] / d[k];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[k] = t * a * d[k];
      m_[k + 1] = t * b * d[k];
    }
  }
}

double MonotoneSpline::operator()(double t) const {
  if (x_.empty()) throw std::logic_error("spline: empty");
  if (x_.size() == 1) return y_[0];
  if (t < x_.front() || t > x_.back()) throw std::out_of_range("spline: evaluation outside the covered interval");
  std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  k = std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
  const double h = x_[k + 1] - x_[k], s = (t - x_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[k] + (s3 - 2 * s2 + s) * h * m_[k] + (-2 * s3 + 3 * s2) * y_[k + 1] +
         (s3 - s2) * h * m_[k + 1];
}

CurveFit periodic_curve(const std::map<int, std::vector<Resonance>>& res_per_L, Interval I, double C,
                        const SpectralTable& table) {
  if (res_per_L.size() < 2) throw std::invalid_argument("periodic_curve: need at least two L values");
  if (res_per_L.rbegin()->first < 2 * res_per_L.begin()->first) {
    throw std::invalid_argument("periodic_curve: largest L must be at least twice the smallest");
  }
  if (!(I.length() > 0.0)) throw std::invalid_argument("periodic_curve: empty interval");
  CurveFit fit;
  std::vector<std::pair<double, double>> pooled;
  const double expected = table.N_at(I.hi) - table.N_at(I.lo);
  for (const auto& [L, res] : res_per_L) {
    CurveKnots k;
    k.L = L;
    const double log_depth = std::log(C / L);
    for (const auto& r : res) {
      if (r.cls != ResonanceClass::Resonance || !I.contains(r.z.real()) || r.log_abs_im_z > log_depth) continue;
      k.points.emplace_back(r.z.real(), L * r.z.imag());
    }
    k.n_in_strip = static_cast<int>(k.points.size());
    if (k.n_in_strip < 10) {
      throw std::runtime_error("periodic_curve: only " + std::to_string(k.n_in_strip) + " resonances in the strip at L = " +
                               std::to_string(L) + "; resolution insufficient");
    }
    std::sort(k.points.begin(), k.points.end());
    k.knots = bin_medians(k.points, I);
    k.curve = spline_of(k.knots);
    k.density = static_cast<double>(k.n_in_strip) / (L + 1);
    k.expected_density = expected;
    k.density_ok = std::abs(k.density - expected) <= 2.0 / std::sqrt(static_cast<double>(L));
    pooled.insert(pooled.end(), k.points.begin(), k.points.end());
    fit.per_L.push_back(std::move(k));
  }
  for (std::size_t i = 0; i + 1 < fit.per_L.size(); ++i) {
    fit.sup_distance.push_back(sup_distance(fit.per_L[i].curve, fit.per_L[i + 1].curve));
  }
  std::sort(pooled.begin(), pooled.end());
  fit.pooled = spline_of(bin_medians(pooled, I));
  return fit;
}

XiMatchReport match_xi_zeros(std::span<const Resonance> res, std::span<const XiZero> zeros, double C0, int L,
                             const SearchBox& box) {
  XiMatchReport rep;
  rep.L = L;
  rep.C0 = C0;
  std::vector<std::complex<double>> deep;
  for (const auto& r : res) {
    if (r.cls != ResonanceClass::Resonance) continue;
    const auto z = r.z;
    if (z.real() < box.re_lo || z.real() > box.re_hi || z.imag() < box.im_lo || z.imag() > box.im_hi) continue;
    if (z.imag() <= -C0 / L) deep.push_back(z);
  }
  rep.n_deep = static_cast<int>(deep.size());
  rep.n_zeros = static_cast<int>(zeros.size());
  rep.counts_equal = rep.n_deep == rep.n_zeros;
  struct Cand {
    double d;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < deep.size(); ++i) {
    for (std::size_t j = 0; j < zeros.size(); ++j) cands.push_back({std::abs(deep[i] - zeros[j].z), i, j});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
  std::vector<bool> used_i(deep.size()), used_j(zeros.size());
  for (const auto& c : cands) {
    if (used_i[c.i] || used_j[c.j]) continue;
    used_i[c.i] = used_j[c.j] = true;
    rep.matches.push_back({deep[c.i], zeros[c.j].z, c.d});
    rep.max_distance = std::max(rep.max_distance, c.d);
  }
  rep.scaled_distance = rep.max_distance * L;
  return rep;
}

std::vector<std::complex<double>> deep_resonances(std::span<const Resonance> res, int L, double alpha) {
  const double log_threshold = -std::pow(std::log(static_cast<double>(L)), alpha);
  std::vector<std::complex<double>> out;
  for (const auto& r : res) {
    if (r.cls == ResonanceClass::Resonance && r.log_abs_im_z >= log_threshold) out.push_back(r.z);
  }
  return out;
}

StabilityReport deep_resonance_stability(std::span<const Resonance> res_L, std::span<const Resonance> res_2L,
                                         int L, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  StabilityReport rep;
  rep.L = L;
  rep.alpha = alpha;
  rep.log_threshold = -std::pow(std::log(static_cast<double>(L)), alpha);
  rep.deep_L = deep_resonances(res_L, L, alpha);
  rep.deep_2L = deep_resonances(res_2L, L, alpha);
  rep.n_deep_L = static_cast<int>(rep.deep_L.size());
  rep.n_deep_2L = static_cast<int>(rep.deep_2L.size());
  rep.counts_equal = rep.n_deep_L == rep.n_deep_2L;
  for (const auto& z : rep.deep_L) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : rep.deep_2L) best = std::min(best, std::abs(z - w));
    rep.max_displacement = std::max(rep.max_displacement, best);
  }
  return rep;
}

StabilityReport deep_resonance_stability(UniformDist dist, std::uint64_t seed, int L, double alpha,
                                         mp::Bits bits) {
  const BoxSolution a = solve_box(sample_random_reversed(dist, L, seed), bits);
  const BoxSolution b = solve_box(sample_random_reversed(dist, 2 * L, seed), bits);
  return deep_resonance_stability(a.resonances, b.resonances, L, alpha);
}

}  // namespace reslab
