#include "reslab/resonances.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "reslab/kernels/kernels.hpp"

namespace reslab {

namespace {

long round_up64(long bits) { return (bits + 63) / 64 * 64; }

/// Number of Dirichlet eigenvalues below E, at multiprecision.
long mp_sturm_count(std::span<const double> diag, const mp::Real& E) {
  const mp::Bits bits = E.precision();
  mp::Real q(bits), t(bits);
  long count = 0;
  for (std::size_t n = 0; n < diag.size(); ++n) {
    // q_n = (d_n - E) - 1 / q_{n-1}
    mpfr_d_sub(t.get(), diag[n], E.get(), MPFR_RNDN);
    if (n > 0) {
      if (q.is_zero()) mpfr_set_d(q.get(), 1e-300, MPFR_RNDN);
      mpfr_ui_div(q.get(), 1, q.get(), MPFR_RNDN);
      mpfr_sub(q.get(), t.get(), q.get(), MPFR_RNDN);
    } else {
      q = t;
    }
    if (q.sign() < 0) ++count;
  }
  return count;
}

}  // namespace

std::string_view class_name(ResonanceClass c) {
  switch (c) {
    case ResonanceClass::Resonance: return "resonance";
    case ResonanceClass::Eigenvalue: return "eigenvalue";
    case ResonanceClass::Antibound: return "antibound";
    case ResonanceClass::AntiResonance: return "antiresonance";
    case ResonanceClass::Boundary: return "boundary";
  }
  return "boundary";
}

ResonanceClass parse_class(std::string_view name) {
  for (auto c : {ResonanceClass::Resonance, ResonanceClass::Eigenvalue, ResonanceClass::Antibound,
                 ResonanceClass::AntiResonance, ResonanceClass::Boundary}) {
    if (class_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown resonance class: " + std::string(name));
}

double sheet_tolerance(mp::Bits bits) { return std::ldexp(1.0, -static_cast<int>(bits / 8)); }

mp::Complex z_of_lambda(const mp::Complex& lambda) {
  const mp::Bits bits = lambda.precision();
  return lambda + mp::Complex(1.0, 0.0, bits) / lambda;
}

mp::Complex lambda_from_z(const mp::Complex& z, bool second_sheet) {
  const mp::Bits bits = z.precision();
  // lambda = (z +- sqrt(z^2 - 4)) / 2
  mp::Complex disc = z * z - mp::Complex(4.0, 0.0, bits);
  // principal complex square root
  mp::Real r = mp::abs(disc);
  mp::Real half(0.5, bits);
  mp::Real sr = mp::sqrt((r + disc.re()) * half);
  mp::Real si = mp::sqrt((r - disc.re()) * half);
  if (disc.im().sign() < 0) si = -si;
  mp::Complex s(sr, si);
  mp::Complex a = (z + s) * half, b = (z - s) * half;
  const bool a_outside = mp::norm(b) < mp::norm(a);
  return (a_outside == second_sheet) ? a : b;
}

std::vector<Resonance> classify(const RootSet& rs, mp::Bits bits) {
  const double floor_tol = std::ldexp(1.0, -static_cast<int>(bits) + 8);
  const mp::Real one(1.0, bits);
  std::vector<Resonance> out;
  out.reserve(rs.roots.size());
  for (const auto& root : rs.roots) {
    Resonance r;
    r.lambda = root.lambda;
    r.residual = root.residual;
    r.cluster = root.cluster;
    const mp::Real m2 = mp::norm(root.lambda);
    const mp::Real m = mp::sqrt(m2);
    // z = lambda + conj(lambda) / |lambda|^2
    const mp::Real inv = one / m2;
    const mp::Real re_z = root.lambda.re() * (one + inv);
    const mp::Real im_z = root.lambda.im() * (one - inv);
    r.z = {re_z.to_double(), im_z.to_double()};
    r.log_abs_im_z = mp::log_abs(im_z);

    // side tests are decided only when the inclusion disc does not straddle them
    const double tol = std::max(16.0 * root.radius, floor_tol);
    const double dm = std::abs((m - one).to_double());
    const double abs_im = std::abs(root.lambda.im().to_double());
    if (dm <= tol) {
      r.cls = ResonanceClass::Boundary;
    } else if (abs_im <= tol) {
      r.cls = m < one ? ResonanceClass::Eigenvalue : ResonanceClass::Antibound;
    } else if (m < one) {
      // nonreal root on the physical sheet: impossible for a self-adjoint box
      r.cls = ResonanceClass::Boundary;
    } else {
      r.cls = root.lambda.im().sign() < 0 ? ResonanceClass::Resonance : ResonanceClass::AntiResonance;
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
    return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
  });
  return out;
}

int count_lower_half(std::span<const Resonance> res) {
  return static_cast<int>(std::count_if(res.begin(), res.end(),
                                        [](const Resonance& r) { return r.cls == ResonanceClass::Resonance; }));
}

ClassCounts count_classes(std::span<const Resonance> res) {
  ClassCounts c;
  for (const auto& r : res) {
    switch (r.cls) {
      case ResonanceClass::Resonance: ++c.resonance; break;
      case ResonanceClass::AntiResonance: ++c.antiresonance; break;
      case ResonanceClass::Eigenvalue: ++c.eigenvalue; break;
      case ResonanceClass::Antibound: ++c.antibound; break;
      case ResonanceClass::Boundary: ++c.boundary; break;
    }
  }
  return c;
}

bool conjugate_pairing(std::span<const Resonance> res, double tol) {
  std::vector<std::complex<double>> lower, upper;
  for (const auto& r : res) {
    if (r.cls == ResonanceClass::Resonance) lower.push_back(r.lambda.to_cdouble());
    if (r.cls == ResonanceClass::AntiResonance) upper.push_back(r.lambda.to_cdouble());
  }
  if (lower.size() != upper.size()) return false;
  std::vector<char> used(upper.size(), 0);
  for (const auto& l : lower) {
    const auto target = std::conj(l);
    std::size_t best = upper.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < upper.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(upper[j] - target);
      if (best == upper.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == upper.size() || best_d > tol * std::max(1.0, std::abs(l))) return false;
    used[best] = 1;
  }
  return true;
}

Interval box_spectrum_bounds(const Potential& v) {
  const auto diag = v.values();
  const auto [mn, mx] = std::minmax_element(diag.begin(), diag.end());
  const auto& kern = kernels::active();
  const auto count_below = [&](double E) {
    std::int64_t c = 0;
    kern.sturm_count(diag, std::span<const double>(&E, 1), std::span<std::int64_t>(&c, 1));
    return c;
  };
  const std::int64_t n = static_cast<std::int64_t>(diag.size());
  double a = *mn - 2.5, b = *mx + 2.5;
  // smallest eigenvalue: first E with count >= 1
  double lo = a, hi = b;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) >= 1 ? hi : lo) = mid;
  }
  const double e_min = hi;
  lo = a;
  hi = b;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) >= n ? hi : lo) = mid;
  }
  return {e_min, lo};
}

long required_root_precision(const CharPoly& p, const Potential& v) {
  const Interval s = box_spectrum_bounds(v);
  const double B = std::max({2.0, std::abs(s.lo), std::abs(s.hi)});
  const double lambda_star = 0.5 * (B + std::sqrt(B * B - 4.0));
  const double cancel = (p.L + 1) * std::log2(lambda_star);
  return p.growth_bits() + static_cast<long>(std::ceil(cancel)) + kPrecisionGuardBits;
}

BoxSolution solve_box(const Potential& v, mp::Bits min_bits, const RootFindOptions& opts) {
  long bits = std::max<long>(min_bits, mp::kMinBits);
  BoxSolution sol;
  for (int attempt = 0;; ++attempt) {
    try {
      sol.poly = build_charpoly(v, {v.box_end(), bits});
    } catch (const PrecisionError& e) {
      if (attempt > 8) throw;
      bits = std::max(bits + 64, round_up64(e.required_bits()));
      continue;
    }
    const long need = required_root_precision(sol.poly, v);
    if (need <= bits) break;
    if (attempt > 8) throw PrecisionError("root precision requirement did not settle", need);
    bits = round_up64(need);
  }
  if (sol.poly.degree() >= 1) {
    sol.roots = find_roots(sol.poly, opts);
  } else {
    sol.roots.precision = bits;
  }
  sol.resonances = classify(sol.roots, bits);
  return sol;
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::NoResonanceO1: return "no-resonance-O(1)";
    case Regime::NoResonance1OverL: return "no-resonance-1/L";
    case Regime::UniqueExponential: return "unique-exponential";
    case Regime::InsideSpectrum: return "inside-spectrum";
  }
  return "inside-spectrum";
}

FreeRegionReport free_region(std::span<const Resonance> res, Interval I, int L, Regime regime) {
  FreeRegionReport rep;
  rep.I = I;
  rep.L = L;
  rep.regime = regime;
  for (const auto& r : res) {
    if (r.cls != ResonanceClass::Resonance || !I.contains(r.z.real())) continue;
    ++rep.n_in_strip;
    rep.log_min_gap = std::min(rep.log_min_gap, r.log_abs_im_z);
  }
  rep.min_gap = std::exp(rep.log_min_gap);
  return rep;
}

std::vector<FreeRegionReport> scan_free_region(const PotentialFamily& family, Interval I,
                                               std::span<const int> Ls, mp::Bits bits, Regime regime) {
  std::vector<FreeRegionReport> out;
  for (int L : Ls) {
    const BoxSolution sol = solve_box(family(L), bits);
    out.push_back(free_region(sol.resonances, I, L, regime));
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  LineFit f;
  f.n = static_cast<int>(x.size());
  if (f.n < 2) return f;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / f.n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / f.n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

LineFit fit_gap_exponent(std::span<const FreeRegionReport> reports) {
  std::vector<double> x, y;
  for (const auto& r : reports) {
    if (r.n_in_strip == 0) continue;
    x.push_back(std::log(static_cast<double>(r.L)));
    y.push_back(r.log_min_gap);
  }
  return fit_line(x, y);
}

std::vector<double> exponential_rates(std::span<const FreeRegionReport> reports) {
  std::vector<double> out;
  for (const auto& r : reports) out.push_back(-r.log_min_gap / (2.0 * r.L));
  return out;
}

EigenResonanceReport eigenvalue_resonance_pairs(const PotentialFamily& family, Interval I,
                                                std::span<const int> Ls, mp::Bits bits,
                                                double strip_depth) {
  EigenResonanceReport rep;
  if (Ls.empty()) return rep;
  const int l_max = *std::max_element(Ls.begin(), Ls.end());
  rep.ref_box = 8 * l_max;
  const Potential big = family(rep.ref_box);
  const auto d = big.values();
  const Eigen::Index N = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd diag(N), sub = Eigen::VectorXd::Ones(N - 1);
  for (Eigen::Index i = 0; i < N; ++i) diag[i] = d[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  // keep eigenvalues in I whose eigenvector lives at the left (Dirichlet) end;
  // right-end states are artifacts of the reference box
  std::vector<double> refs;
  for (Eigen::Index k = 0; k < N; ++k) {
    const double e = es.eigenvalues()[k];
    if (!I.contains(e)) continue;
    const auto vec = es.eigenvectors().col(k);
    const double left = vec.head(N / 2).squaredNorm();
    if (left > 0.99) refs.push_back(e);
  }
  if (refs.size() != 1) {
    std::ostringstream os;
    os << refs.size() << " left-localized reference eigenvalues in [" << I.lo << ", " << I.hi << "]";
    rep.diagnostic = os.str();
    if (refs.empty()) return rep;
  }
  rep.reference_found = true;

  // refine v_ref by multiprecision Sturm bisection on the reference box
  const mp::Bits ref_bits = 192;
  mp::Real lo(refs.front() - 1e-9, ref_bits), hi(refs.front() + 1e-9, ref_bits), mid(ref_bits);
  const long target = mp_sturm_count(d, lo) + 1;
  for (int it = 0; it < 150; ++it) {
    mid = (lo + hi) * mp::Real(0.5, ref_bits);
    (mp_sturm_count(d, mid) >= target ? hi : lo) = mid;
  }
  const mp::Real v_ref = (lo + hi) * mp::Real(0.5, ref_bits);
  rep.v_ref = v_ref.to_double();

  std::vector<double> xs, y_im, y_dist;
  for (int L : Ls) {
    const BoxSolution sol = solve_box(family(L), bits);
    EigenResonancePair pair;
    pair.L = L;
    const Resonance* best = nullptr;
    double best_d = 0.0;
    for (const auto& r : sol.resonances) {
      if (r.cls != ResonanceClass::Resonance || !I.contains(r.z.real()) || r.z.imag() < -strip_depth) continue;
      ++pair.n_in_strip;
      const double dd = std::abs(r.z - rep.v_ref);
      if (!best || dd < best_d) {
        best = &r;
        best_d = dd;
      }
    }
    pair.unique = pair.n_in_strip == 1;
    if (best) {
      const mp::Complex z = z_of_lambda(best->lambda);
      mp::Complex diff(z.re() - v_ref, z.im());
      pair.z = best->z;
      pair.log_dist = mp::log_abs(mp::abs(diff));
      pair.log_abs_im = best->log_abs_im_z;
      xs.push_back(L);
      y_im.push_back(pair.log_abs_im);
      y_dist.push_back(pair.log_dist);
    }
    if (!pair.unique) {
      std::ostringstream os;
      os << (rep.diagnostic.empty() ? "" : "; ") << "L=" << L << ": " << pair.n_in_strip
         << " resonances in strip";
      rep.diagnostic += os.str();
    }
    rep.per_L.push_back(pair);
  }
  rep.im_fit = fit_line(xs, y_im);
  rep.dist_fit = fit_line(xs, y_dist);
  const double s1 = rep.im_fit.slope, s2 = rep.dist_fit.slope;
  rep.slopes_match = xs.size() >= 2 && s1 < 0.0 && s2 < 0.0 &&
                     std::abs(s1 - s2) <= 0.2 * std::max(std::abs(s1), std::abs(s2));
  return rep;
}

void write_resonance_csv(std::ostream& os, std::span<const Resonance> res, int L, std::uint64_t seed,
                         bool header) {
  if (header) os << "L,seed,re_z,im_z,class,residual\n";
  char buf[160];
  for (const auto& r : res) {
    std::snprintf(buf, sizeof buf, "%d,%llu,%.17g,%.17g,%s,%.6g\n", L, static_cast<unsigned long long>(seed),
                  r.z.real(), r.z.imag(), std::string(class_name(r.cls)).c_str(), r.residual);
    os << buf;
  }
}

std::vector<ResonanceRow> read_resonance_csv(std::istream& is) {
  std::vector<ResonanceRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.rfind("L,", 0) == 0 || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw std::runtime_error("resonance csv line " + std::to_string(line_no) + ": expected 6 fields");
    ResonanceRow r;
    r.L = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.z = {std::stod(f[2]), std::stod(f[3])};
    r.cls = parse_class(f[4]);
    r.residual = std::stod(f[5]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace reslab
