#include "reslab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "reslab/kernels/kernels.hpp"
#include "reslab/parallel.hpp"

namespace reslab {

namespace {

using cd = std::complex<double>;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kPi = std::numbers::pi;

/// s_j = (-1)^{p-j+1} for 1-based band j: sign of Delta / 2 at the band bottom.
double band_sign(int p, int j) { return ((p - j + 1) % 2 == 0) ? 1.0 : -1.0; }

struct BandMap {
  std::span<const double> cell;
  Interval band;
  double s;

  /// lambda in the band with Delta(lambda) = 2 s cos(theta).
  double energy(double theta) const {
    const double target = 2.0 * s * std::cos(theta);
    double lo = band.lo, hi = band.hi;
    // Delta - target is s-signed at lo and -s-signed at hi
    double x = band.lo + (band.hi - band.lo) * theta / kPi;
    for (int it = 0; it < 100; ++it) {
      const Discriminant d = discriminant(cell, cd(x, 0.0));
      const double f = d.value.real() - target;
      if (f == 0.0) return x;
      if ((f > 0.0) == (s > 0.0)) {
        lo = x;
      } else {
        hi = x;
      }
      double next = x - f / d.derivative.real();
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
      x = next;
    }
    return x;
  }

  /// Inverse map for lambda inside the band.
  double theta(double lambda) const {
    const double u = std::clamp(s * discriminant(cell, lambda) / 2.0, -1.0, 1.0);
    return std::acos(u);
  }
};

std::vector<BandMap> band_maps(std::span<const double> cell, const Bands& bands) {
  const int p = static_cast<int>(cell.size());
  std::vector<BandMap> maps;
  for (std::size_t j = 0; j < bands.intervals.size(); ++j) {
    maps.push_back({cell, bands.intervals[j], band_sign(p, static_cast<int>(j) + 1)});
  }
  return maps;
}

const std::vector<double>& periodic_cell(const SpectralTable& t) {
  const auto* ap = std::get_if<AnalyticPeriodic>(&t.provenance);
  if (!ap) throw std::invalid_argument("operation requires a periodic (analytic) spectral table");
  return ap->cell;
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double at, double below,
              double above) {
  if (x.empty()) return below;
  if (at < x.front()) return below;
  if (at > x.back()) return above;
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return y.front();
  const double t = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + t * (y[i] - y[i - 1]);
}

/// t log|t| - t, the antiderivative of log|t|.
double xlogx_minus_x(double t) { return t == 0.0 ? 0.0 : t * std::log(std::abs(t)) - t; }

}  // namespace

bool Bands::contains(double E) const { return band_of(E) >= 0; }

int Bands::band_of(double E) const {
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    if (intervals[j].contains(E)) return static_cast<int>(j);
  }
  return -1;
}

double SpectralTable::N_at(double E) const {
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&provenance)) return ids_periodic_point(ap->cell, bands, E).N;
  return interp(grid, N, E, 0.0, 1.0);
}

double SpectralTable::n_at(double E) const {
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&provenance)) return ids_periodic_point(ap->cell, bands, E).n;
  return interp(grid, n, E, 0.0, 0.0);
}

double SpectralTable::rho_at(double E) const {
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&provenance)) return lyapunov_periodic(ap->cell, E);
  if (grid.empty()) return 0.0;
  return interp(grid, rho, E, rho.front(), rho.back());
}

Discriminant discriminant(std::span<const double> cell, cd E) {
  if (cell.empty()) throw std::invalid_argument("discriminant: empty cell");
  // M = T_{p-1} ... T_0 and dM/dE, with dT/dE = [[1, 0], [0, 0]]
  cd m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  cd d00 = 0.0, d01 = 0.0, d10 = 0.0, d11 = 0.0;
  for (double v : cell) {
    const cd a = E - v;
    const cd n00 = a * m00 - m10, n01 = a * m01 - m11;
    const cd e00 = m00 + a * d00 - d10, e01 = m01 + a * d01 - d11;
    d10 = d00;
    d11 = d01;
    d00 = e00;
    d01 = e01;
    m10 = m00;
    m11 = m01;
    m00 = n00;
    m01 = n01;
  }
  return {m00 + m11, d00 + d11};
}

double discriminant(std::span<const double> cell, double E) { return discriminant(cell, cd(E, 0.0)).value.real(); }

Bands floquet_bands(std::span<const double> cell) {
  const Eigen::Index p = static_cast<Eigen::Index>(cell.size());
  if (p == 0) throw std::invalid_argument("floquet_bands: empty cell");
  std::vector<double> edges;
  for (double c : {1.0, -1.0}) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) H(i, i) = cell[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < p; ++i) H(i, i + 1) = H(i + 1, i) = 1.0;
    // Bloch condition u(n + p) = c u(n)
    H(p - 1, 0) += c;
    H(0, p - 1) += c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < p; ++i) edges.push_back(es.eigenvalues()[i]);
  }
  std::sort(edges.begin(), edges.end());
  Bands b;
  for (std::size_t k = 0; k + 1 < edges.size(); k += 2) b.intervals.push_back({edges[k], edges[k + 1]});
  for (std::size_t k = 1; k < b.intervals.size(); ++k) {
    const double gap = b.intervals[k].lo - b.intervals[k - 1].hi;
    if (gap <= 1e-12 * std::max(1.0, std::abs(b.intervals[k].lo))) b.closed_gaps.push_back(b.intervals[k].lo);
  }
  return b;
}

IdsPoint ids_periodic_point(std::span<const double> cell, const Bands& bands, double E) {
  const int p = static_cast<int>(cell.size());
  IdsPoint out;
  const auto& iv = bands.intervals;
  if (iv.empty() || E < iv.front().lo) return out;
  for (std::size_t j = 0; j < iv.size(); ++j) {
    if (E > iv[j].hi) {
      out.N = static_cast<double>(j + 1) / p;
      continue;
    }
    if (E < iv[j].lo) break;
    const double s = band_sign(p, static_cast<int>(j) + 1);
    const Discriminant d = discriminant(cell, cd(E, 0.0));
    const double half = d.value.real() / 2.0;
    const double u = std::clamp(s * half, -1.0, 1.0);
    out.N = (static_cast<double>(j) + std::acos(u) / kPi) / p;
    const double root = std::sqrt(std::max(0.0, 1.0 - half * half));
    out.n = root > 0.0 ? -s * d.derivative.real() / (2.0 * p * kPi * root)
                       : std::numeric_limits<double>::infinity();
    return out;
  }
  return out;
}

SpectralTable ids_periodic(std::span<const double> cell, std::span<const double> grid) {
  SpectralTable t;
  t.provenance = AnalyticPeriodic{std::vector<double>(cell.begin(), cell.end())};
  t.bands = floquet_bands(cell);
  for (double E : grid) {
    const IdsPoint pt = ids_periodic_point(cell, t.bands, E);
    t.grid.push_back(E);
    t.N.push_back(pt.N);
    t.n.push_back(pt.n);
    t.rho.push_back(lyapunov_periodic(cell, E));
  }
  return t;
}

double lyapunov_periodic(std::span<const double> cell, cd z) {
  const cd delta = discriminant(cell, z).value;
  const cd r = std::sqrt(delta * delta / 4.0 - 1.0);
  const cd mu1 = delta / 2.0 + r, mu2 = delta / 2.0 - r;
  const double m = std::max(std::abs(mu1), std::abs(mu2));
  return std::max(0.0, std::log(m) / static_cast<double>(cell.size()));
}

SampleFamily uniform_family(UniformDist dist, std::uint64_t stream) {
  return [dist, stream](int L, std::uint64_t sample) { return sample_random(dist, L, sample, stream); };
}

SpectralTable ids_empirical(const SampleFamily& family, std::span<const double> grid_in, int L_ref,
                            int n_samples, UniformDist dist, std::uint64_t seed) {
  if (L_ref < 1 || n_samples < 1) throw std::invalid_argument("ids_empirical: L_ref and n_samples must be positive");
  const double B = family(0, 0).bound();
  std::vector<double> grid;
  int dropped = 0;
  for (double E : grid_in) {
    if (E < -2.0 - B || E > 2.0 + B) {
      ++dropped;
      continue;
    }
    grid.push_back(E);
  }
  if (dropped > 0) {
    std::clog << "ids_empirical: dropped " << dropped << " grid points outside [" << -2.0 - B << ", " << 2.0 + B
              << "]\n";
  }
  if (grid.empty()) throw std::invalid_argument("ids_empirical: empty grid");
  std::sort(grid.begin(), grid.end());

  const double h = 4.0 / std::sqrt(static_cast<double>(L_ref));
  const double delta = h / 8.0;
  std::vector<double> fine;
  for (double E = grid.front() - 6.0 * h; E <= grid.back() + 6.0 * h + delta; E += delta) fine.push_back(E);

  const auto& kern = kernels::active();
  const std::size_t S = static_cast<std::size_t>(n_samples);
  std::vector<std::vector<std::int64_t>> counts(S), fine_counts(S);
  std::vector<std::vector<double>> growth(S);
  parallel_for(S, [&](std::size_t s) {
    const Potential v = family(L_ref, s);
    counts[s].assign(grid.size(), 0);
    fine_counts[s].assign(fine.size(), 0);
    growth[s].assign(grid.size(), 0.0);
    kern.sturm_count(v.values(), grid, counts[s]);
    kern.sturm_count(v.values(), fine, fine_counts[s]);
    kern.transfer_log_growth(v.values(), grid, growth[s]);
  });

  SpectralTable t;
  t.provenance = EmpiricalRandom{dist, L_ref, n_samples, h, seed};
  t.grid = grid;
  t.N.assign(grid.size(), 0.0);
  t.rho.assign(grid.size(), 0.0);
  std::vector<double> fineN(fine.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(L_ref + 1) * n_samples);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      t.N[i] += counts[s][i] * norm;
      t.rho[i] += growth[s][i] / (static_cast<double>(L_ref + 1) * n_samples);
    }
    for (std::size_t i = 0; i < fine.size(); ++i) fineN[i] += fine_counts[s][i] * norm;
  }
  // n = dN * phi_h, with dN lumped at fine-cell midpoints
  t.n.assign(grid.size(), 0.0);
  const double c = 1.0 / (h * std::sqrt(2.0 * kPi));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
      const double mass = fineN[k + 1] - fineN[k];
      if (mass == 0.0) continue;
      const double u = (grid[i] - 0.5 * (fine[k] + fine[k + 1])) / h;
      acc += mass * c * std::exp(-0.5 * u * u);
    }
    t.n[i] = acc;
  }
  return t;
}

double lyapunov(const SampleFamily& family, double E, int L, int n_samples) {
  const auto& kern = kernels::active();
  std::vector<double> g(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(g.size(), [&](std::size_t s) {
    const Potential v = family(L, s);
    kern.transfer_log_growth(v.values(), std::span<const double>(&E, 1), std::span<double>(&g[s], 1));
  });
  double acc = 0.0;
  for (double x : g) acc += x;
  return acc / (static_cast<double>(L + 1) * n_samples);
}

double lyapunov(const SampleFamily& family, cd E, int L, int n_samples) {
  if (E.imag() == 0.0) return lyapunov(family, E.real(), L, n_samples);
  std::vector<double> g(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(g.size(), [&](std::size_t s) {
    const Potential v = family(L, s);
    cd a = 1.0, b = 0.0;
    double log_scale = 0.0;
    for (double d : v.values()) {
      const cd next = (E - d) * a - b;
      b = a;
      a = next;
      const double m = std::max(std::abs(a), std::abs(b));
      if (m > 1e100 || m < 1e-100) {
        a /= m;
        b /= m;
        log_scale += std::log(m);
      }
    }
    g[s] = log_scale + std::log(std::hypot(std::abs(a), std::abs(b)));
  });
  double acc = 0.0;
  for (double x : g) acc += x;
  return acc / (static_cast<double>(L + 1) * n_samples);
}

double thouless_integral(const SpectralTable& table, double E) {
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&table.provenance)) {
    const int p = static_cast<int>(ap->cell.size());
    double acc = 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    for (const auto& bm : band_maps(ap->cell, table.bands)) {
      const auto f = [&](double th) {
        return std::log(std::max(std::abs(E - bm.energy(th)), 1e-300));
      };
      if (bm.band.lo < E && E < bm.band.hi) {
        const double te = bm.theta(E);
        acc += ts.integrate(f, 0.0, te) + ts.integrate(f, te, kPi);
      } else {
        acc += GK::integrate(f, 0.0, kPi, 20, 1e-12);
      }
    }
    return acc / (p * kPi);
  }
  // piecewise-uniform dN on the table grid
  const auto& g = table.grid;
  const auto& N = table.N;
  double acc = 0.0;
  if (!g.empty()) {
    acc += N.front() * std::log(std::max(std::abs(E - g.front()), 1e-300));
    acc += (1.0 - N.back()) * std::log(std::max(std::abs(E - g.back()), 1e-300));
  }
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double mass = N[i + 1] - N[i];
    if (mass == 0.0) continue;
    const double a = g[i], b = g[i + 1];
    acc += mass * (xlogx_minus_x(b - E) - xlogx_minus_x(a - E)) / (b - a);
  }
  return acc;
}

double thouless_check(const SpectralTable& table, std::span<const double> E_grid) {
  double worst = 0.0;
  for (double E : E_grid) worst = std::max(worst, std::abs(thouless_integral(table, E) - table.rho_at(E)));
  return worst;
}

double principal_value_S(const SpectralTable& table, double E) {
  const auto& cell = periodic_cell(table);
  const int p = static_cast<int>(cell.size());
  const int j = table.bands.band_of(E);
  if (j < 0) throw std::domain_error("principal_value_S: E is not inside a band");
  const Interval band = table.bands.intervals[static_cast<std::size_t>(j)];
  const double edge_dist = std::min(E - band.lo, band.hi - E);
  if (edge_dist < 1e-3) throw std::domain_error("principal_value_S: E within 1e-3 of a band edge");

  const auto maps = band_maps(cell, table.bands);
  const auto outside = [&](double eps) {
    double acc = 0.0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
      const auto& bm = maps[k];
      const auto f = [&](double th) { return 1.0 / (bm.energy(th) - E); };
      if (static_cast<int>(k) == j) {
        const double t1 = bm.theta(E - eps), t2 = bm.theta(E + eps);
        acc += GK::integrate(f, 0.0, t1, 20, 1e-13) + GK::integrate(f, t2, kPi, 20, 1e-13);
      } else {
        acc += GK::integrate(f, 0.0, kPi, 20, 1e-13);
      }
    }
    return acc / (p * kPi);
  };
  // local correction: p.v. over |t| <= eps of (n(E) + n'(E) t) / t = 2 eps n'(E)
  const auto S_eps = [&](double eps) {
    const double dd = eps / 4.0;
    const double dn = (table.n_at(E + dd) - table.n_at(E - dd)) / (2.0 * dd);
    return outside(eps) + 2.0 * eps * dn;
  };
  double eps = std::min(0.05, 0.25 * edge_dist);
  double prev = S_eps(eps);
  for (int it = 0; it < 30; ++it) {
    eps /= 2.0;
    const double cur = S_eps(eps);
    if (std::abs(cur - prev) < 1e-6) return cur;
    prev = cur;
  }
  return prev;
}

cd exp_minus_i_acos(cd z) {
  const cd r = std::sqrt(z * z - 4.0);
  const cd w1 = (z + r) / 2.0, w2 = (z - r) / 2.0;
  const double a1 = std::abs(w1), a2 = std::abs(w2);
  if (std::abs(a1 - a2) <= 1e-14 * std::max(a1, a2)) return w1.imag() >= 0.0 ? w1 : w2;
  return a1 < a2 ? w1 : w2;
}

cd xi(cd z, const SpectralTable& table) {
  if (z.imag() >= 0.0) throw std::domain_error("xi: requires Im z < 0");
  if (std::abs(z.imag()) < 1e-8) throw std::domain_error("xi: |Im z| < 1e-8, too close to the real axis");
  cd stieltjes = 0.0;
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&table.provenance)) {
    const int p = static_cast<int>(ap->cell.size());
    for (const auto& bm : band_maps(ap->cell, table.bands)) {
      const auto f = [&](double th) { return cd(1.0) / (bm.energy(th) - z); };
      stieltjes += GK::integrate(f, 0.0, kPi, 25, 1e-12);
    }
    stieltjes /= p * kPi;
  } else {
    const auto& g = table.grid;
    const auto& N = table.N;
    if (!g.empty()) {
      stieltjes += N.front() / (g.front() - z) + (1.0 - N.back()) / (g.back() - z);
    }
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double mass = N[i + 1] - N[i];
      if (mass == 0.0) continue;
      stieltjes += mass * (std::log(g[i + 1] - z) - std::log(g[i] - z)) / (g[i + 1] - g[i]);
    }
  }
  return stieltjes + exp_minus_i_acos(z);
}

cd xi_closed_form(cd z, std::span<const double> cell) {
  const Discriminant d = discriminant(cell, z);
  const cd r = std::sqrt(d.value * d.value / 4.0 - 1.0);
  cd mu = d.value / 2.0 + r;
  if (std::abs(mu) < 1.0) mu = d.value / 2.0 - r;
  const double p = static_cast<double>(cell.size());
  return -d.derivative / (p * (mu - 1.0 / mu)) + exp_minus_i_acos(z);
}

namespace {

/// Evaluates Xi in closed form for periodic tables and by quadrature otherwise.
struct ArgWalker {
  const SpectralTable& table;

  cd f(cd z) const {
    if (const auto* ap = std::get_if<AnalyticPeriodic>(&table.provenance)) return xi_closed_form(z, ap->cell);
    return xi(z, table);
  }

  double increment(cd z0, cd z1, cd f0, cd f1, int depth) const {
    const double d = std::arg(f1 / f0);
    if (depth >= 30 || (std::abs(d) < 0.25 && depth >= 2)) return d;
    const cd zm = 0.5 * (z0 + z1);
    const cd fm = f(zm);
    return increment(z0, zm, f0, fm, depth + 1) + increment(zm, z1, fm, f1, depth + 1);
  }

  int winding(const SearchBox& b) const {
    const cd corners[4] = {{b.re_lo, b.im_lo}, {b.re_hi, b.im_lo}, {b.re_hi, b.im_hi}, {b.re_lo, b.im_hi}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
      const cd a = corners[e], c = corners[(e + 1) % 4];
      const int segs = 8;
      cd za = a, fa = f(a);
      for (int s = 1; s <= segs; ++s) {
        const cd zb = a + (c - a) * (static_cast<double>(s) / segs);
        const cd fb = f(zb);
        total += increment(za, zb, fa, fb, 0);
        za = zb;
        fa = fb;
      }
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
};

bool newton_xi(const ArgWalker& w, cd& z) {
  for (int it = 0; it < 60; ++it) {
    const cd fz = w.f(z);
    const double h = 1e-7 * std::max(1.0, std::abs(z));
    const cd df = (w.f(z + h) - w.f(z - h)) / (2.0 * h);
    if (df == cd(0.0)) return false;
    const cd step = fz / df;
    z -= step;
    if (z.imag() >= -1e-8) return false;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(z))) return true;
  }
  return false;
}

void search(const ArgWalker& w, const SearchBox& b, int count, int depth, std::vector<cd>& found) {
  if (count <= 0) return;
  const double size = std::max(b.re_hi - b.re_lo, b.im_hi - b.im_lo);
  if (count == 1 && size < 0.1) {
    cd z{0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi)};
    if (newton_xi(w, z) && z.real() >= b.re_lo - size && z.real() <= b.re_hi + size &&
        z.imag() >= b.im_lo - size && z.imag() <= b.im_hi + size) {
      found.push_back(z);
      return;
    }
  }
  if (depth > 16) return;
  // split slightly off-centre so that zeros rarely sit on a new edge
  const double xm = b.re_lo + 0.5123 * (b.re_hi - b.re_lo);
  const double ym = b.im_lo + 0.4871 * (b.im_hi - b.im_lo);
  const SearchBox q[4] = {{b.re_lo, xm, b.im_lo, ym}, {xm, b.re_hi, b.im_lo, ym},
                          {b.re_lo, xm, ym, b.im_hi}, {xm, b.re_hi, ym, b.im_hi}};
  for (const auto& sub : q) search(w, sub, w.winding(sub), depth + 1, found);
}

}  // namespace

int xi_zero_count(const SpectralTable& table, const SearchBox& box) {
  if (box.im_hi >= 0.0) throw std::domain_error("xi_zero_count: box must lie in Im z < 0");
  return ArgWalker{table}.winding(box);
}

std::vector<XiZero> xi_zeros(const SpectralTable& table, const SearchBox& box) {
  const ArgWalker w{table};
  std::vector<cd> found;
  search(w, box, xi_zero_count(table, box), 0, found);
  std::sort(found.begin(), found.end(), [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  std::vector<XiZero> out;
  for (const cd z : found) {
    if (!out.empty() && std::abs(out.back().z - z) < 1e-8) continue;
    const SearchBox local{z.real() - 5e-4, z.real() + 5e-4, z.imag() - 5e-4, std::min(z.imag() + 5e-4, -1e-7)};
    out.push_back({z, w.winding(local)});
  }
  return out;
}

void write_spectral_table(std::ostream& os, const SpectralTable& table) {
  nlohmann::json prov;
  if (const auto* ap = std::get_if<AnalyticPeriodic>(&table.provenance)) {
    prov = {{"kind", "analytic-periodic"}, {"cell", ap->cell}};
  } else {
    const auto& er = std::get<EmpiricalRandom>(table.provenance);
    prov = {{"kind", "empirical-random"}, {"dist", {{"uniform_width", er.dist.width}}}, {"L_ref", er.L_ref},
            {"n_samples", er.n_samples}, {"bandwidth", er.bandwidth}, {"seed", er.seed}};
  }
  os << "# " << prov.dump() << "\n";
  os << "E,N,n,rho\n";
  char buf[128];
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", table.grid[i], table.N[i], table.n[i], table.rho[i]);
    os << buf;
  }
}

SpectralTable read_spectral_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("spectral table: missing provenance header");
  }
  const auto prov = nlohmann::json::parse(line.substr(2));
  SpectralTable t;
  if (prov.at("kind") == "analytic-periodic") {
    auto cell = prov.at("cell").get<std::vector<double>>();
    t.bands = floquet_bands(cell);
    t.provenance = AnalyticPeriodic{std::move(cell)};
  } else if (prov.at("kind") == "empirical-random") {
    EmpiricalRandom er;
    er.dist.width = prov.at("dist").at("uniform_width").get<double>();
    er.L_ref = prov.at("L_ref").get<int>();
    er.n_samples = prov.at("n_samples").get<int>();
    er.bandwidth = prov.at("bandwidth").get<double>();
    er.seed = prov.at("seed").get<std::uint64_t>();
    t.provenance = er;
  } else {
    throw std::runtime_error("spectral table: unknown provenance kind");
  }
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.rfind("E,", 0) == 0) continue;
    double e, N, n, r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &e, &N, &n, &r) != 4) {
      throw std::runtime_error("spectral table line " + std::to_string(line_no) + ": expected 4 numbers");
    }
    t.grid.push_back(e);
    t.N.push_back(N);
    t.n.push_back(n);
    t.rho.push_back(r);
  }
  return t;
}

}  // namespace reslab
