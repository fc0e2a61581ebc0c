#include "reslab/rootfind.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "reslab/kernels/kernels.hpp"

namespace reslab {

namespace {

/// log2 of max(|re|, |im|) to within one bit; LONG_MIN for zero.
long magnitude_exp(const mp::Complex& z) {
  return std::max(z.re().exponent(), z.im().exponent());
}

struct HornerScratch {
  mp::Complex f, df;
  mp::Real t0, t1;
  explicit HornerScratch(mp::Bits b) : f(b), df(b), t0(b), t1(b) {}
};

void horner(const CharPoly& p, const mp::Complex& z, HornerScratch& s) {
  mpfr_set_zero(s.f.re().get(), 1);
  mpfr_set_zero(s.f.im().get(), 1);
  mpfr_set_zero(s.df.re().get(), 1);
  mpfr_set_zero(s.df.im().get(), 1);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    mp::raw::mul(s.df, s.df, z, s.t0, s.t1);
    s.df += s.f;
    mp::raw::mul(s.f, s.f, z, s.t0, s.t1);
    mpfr_add(s.f.re().get(), s.f.re().get(), it->get(), MPFR_RNDN);
  }
}

/// sum_k |c_k| |z|^k
mp::Real abs_poly(const CharPoly& p, const mp::Real& r) {
  mp::Real acc(p.precision), a(p.precision);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    mpfr_abs(a.get(), it->get(), MPFR_RNDN);
    mpfr_fma(acc.get(), acc.get(), r.get(), a.get(), MPFR_RNDN);
  }
  return acc;
}

double backward_error(const CharPoly& p, const mp::Complex& z, const mp::Complex& f) {
  mp::Real scale = abs_poly(p, mp::abs(z));
  if (scale.is_zero()) return 0.0;
  mp::Real ratio = mp::abs(f) / scale;
  return ratio.to_double();
}

std::vector<mp::Complex> newton_polygon_start(const CharPoly& p) {
  const int d = p.degree();
  std::vector<int> ks;
  std::vector<double> as;
  for (int k = 0; k <= d; ++k) {
    if (p.coeffs[static_cast<std::size_t>(k)].is_zero()) continue;
    const double a = mp::log_abs(p.coeffs[static_cast<std::size_t>(k)]);
    // upper convex hull (monotone chain)
    while (ks.size() >= 2) {
      const std::size_t m = ks.size();
      const double cross = (ks[m - 1] - ks[m - 2]) * (a - as[m - 2]) - (as[m - 1] - as[m - 2]) * (k - ks[m - 2]);
      if (cross >= 0.0) {
        ks.pop_back();
        as.pop_back();
      } else {
        break;
      }
    }
    ks.push_back(k);
    as.push_back(a);
  }
  std::vector<mp::Complex> z;
  z.reserve(static_cast<std::size_t>(d));
  constexpr double kSigma = 0.7;
  for (std::size_t s = 0; s + 1 < ks.size(); ++s) {
    const int m = ks[s + 1] - ks[s];
    const double log_r = std::clamp((as[s] - as[s + 1]) / m, -600.0, 600.0);
    const double r = std::exp(log_r);
    for (int j = 0; j < m; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / m + 2.0 * std::numbers::pi * s / d + kSigma;
      z.emplace_back(r * std::cos(theta), r * std::sin(theta), p.precision);
    }
  }
  return z;
}

bool lex_less(const mp::Complex& a, const mp::Complex& b) {
  const int c = mpfr_cmp(a.re().get(), b.re().get());
  if (c != 0) return c < 0;
  return mpfr_cmp(a.im().get(), b.im().get()) < 0;
}

}  // namespace

double RootSet::worst_residual() const {
  double w = 0.0;
  for (const auto& r : roots) w = std::max(w, r.residual);
  return w;
}

double residual_tolerance(mp::Bits bits) { return std::ldexp(1.0, -static_cast<int>(bits / 4)); }

double root_residual(const CharPoly& p, const mp::Complex& lambda) {
  HornerScratch s(p.precision);
  horner(p, lambda, s);
  return backward_error(p, lambda, s.f);
}

RootDiagnostics root_diagnostics(const CharPoly& p, const mp::Complex& lambda) {
  HornerScratch s(p.precision);
  horner(p, lambda, s);
  const mp::Real scale = abs_poly(p, mp::abs(lambda));
  RootDiagnostics d;
  if (scale.is_zero()) return d;
  const mp::Real f = mp::abs(s.f);
  d.residual = (f / scale).to_double();
  const mp::Real df = mp::abs(s.df);
  if (df.is_zero()) {
    d.radius = std::numeric_limits<double>::infinity();
    return d;
  }
  mp::Real rounding = scale;
  mpfr_mul_d(rounding.get(), rounding.get(), 4.0 * (p.degree() + 1), MPFR_RNDU);
  mpfr_mul_2si(rounding.get(), rounding.get(), -static_cast<long>(p.precision), MPFR_RNDU);
  d.radius = ((f + rounding) / df).to_double();
  return d;
}

RootSet find_roots(const CharPoly& p, const RootFindOptions& opts) {
  const int d = p.degree();
  if (d < 1) throw std::invalid_argument("find_roots requires degree >= 1");
  const mp::Bits bits = p.precision;
  const long step_bits = static_cast<long>(bits / 2);
  const auto& kern = kernels::active();
  const double floor_err = 8.0 * (d + 1) * std::ldexp(1.0, -static_cast<int>(bits));

  std::vector<mp::Complex> z = newton_polygon_start(p);
  const std::size_t n = z.size();
  std::vector<double> zr(n), zi(n);
  for (std::size_t i = 0; i < n; ++i) {
    zr[i] = z[i].re().to_double();
    zi[i] = z[i].im().to_double();
  }
  std::vector<char> active(n, 1);
  std::vector<long> last_step_exp(n, LONG_MAX);
  std::vector<std::uint32_t> idx;
  std::vector<double> s_re(n), s_im(n), min_d2(n);
  std::vector<mp::Complex> corr;
  corr.reserve(n);
  for (std::size_t i = 0; i < n; ++i) corr.emplace_back(bits);

  HornerScratch hs(bits);
  mp::Complex N(bits), S(bits), denom(bits), tmp(bits);
  mp::Real t0(bits), t1(bits), t2(bits);
  const mp::Complex one(1.0, 0.0, bits);

  int iter = 0;
  const int max_iter = std::max(opts.max_iterations, d);
  for (; iter < max_iter; ++iter) {
    idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i]) idx.push_back(static_cast<std::uint32_t>(i));
    }
    if (idx.empty()) break;
    kern.inverse_distance_sums(zr.data(), zi.data(), n, idx, s_re.data(), s_im.data(), min_d2.data());

    std::vector<char> done(idx.size(), 0);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      horner(p, z[i], hs);
      auto& w = corr[i];
      if (mpfr_zero_p(hs.f.re().get()) && mpfr_zero_p(hs.f.im().get())) {
        mpfr_set_zero(w.re().get(), 1);
        mpfr_set_zero(w.im().get(), 1);
        done[k] = 1;
        continue;
      }
      if (mpfr_zero_p(hs.df.re().get()) && mpfr_zero_p(hs.df.im().get())) {
        // stationary point: nudge off it
        mpfr_set_d(w.re().get(), std::ldexp(1.0, -static_cast<int>(bits / 4)), MPFR_RNDN);
        mpfr_set_d(w.im().get(), std::ldexp(1.0, -static_cast<int>(bits / 4)), MPFR_RNDN);
        continue;
      }
      mp::raw::div(N, hs.f, hs.df, t0, t1, t2);

      const double scale = std::max(1.0, std::hypot(zr[i], zi[i]));
      if (min_d2[k] < 1e-24 * scale * scale) {
        // near-coincident partner: exact sum at working precision
        mpfr_set_zero(S.re().get(), 1);
        mpfr_set_zero(S.im().get(), 1);
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          mpfr_sub(denom.re().get(), z[i].re().get(), z[j].re().get(), MPFR_RNDN);
          mpfr_sub(denom.im().get(), z[i].im().get(), z[j].im().get(), MPFR_RNDN);
          if (denom.re().is_zero() && denom.im().is_zero()) continue;
          mp::raw::div(tmp, one, denom, t0, t1, t2);
          S += tmp;
        }
      } else {
        mpfr_set_d(S.re().get(), s_re[k], MPFR_RNDN);
        mpfr_set_d(S.im().get(), s_im[k], MPFR_RNDN);
      }
      // w = N / (1 - N S)
      mp::raw::mul(tmp, N, S, t0, t1);
      mpfr_ui_sub(denom.re().get(), 1, tmp.re().get(), MPFR_RNDN);
      mpfr_neg(denom.im().get(), tmp.im().get(), MPFR_RNDN);
      if (denom.re().is_zero() && denom.im().is_zero()) {
        w = N;
      } else {
        mp::raw::div(w, N, denom, t0, t1, t2);
      }
      const long we = magnitude_exp(w), ze = std::max(magnitude_exp(z[i]), 1L);
      if (we < ze - step_bits) {
        done[k] = 1;
      } else if (backward_error(p, z[i], hs.f) <= floor_err) {
        // |p| is at the Horner rounding level: no further digit is meaningful
        done[k] = 1;
      }
      last_step_exp[i] = we;
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      z[i] -= corr[i];
      zr[i] = z[i].re().to_double();
      zi[i] = z[i].im().to_double();
      if (done[k]) active[i] = 0;
    }
  }

  RootSet out;
  out.iterations = iter;
  out.precision = bits;
  out.roots.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RootDiagnostics diag = root_diagnostics(p, z[i]);
    Root r{z[i], diag.residual, false, diag.radius};
    out.roots.push_back(std::move(r));
  }

  // cluster flags
  std::vector<std::uint32_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
  kern.inverse_distance_sums(zr.data(), zi.data(), n, all, s_re.data(), s_im.data(), min_d2.data());
  const long cluster_bits = static_cast<long>(bits / 8);
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max(1.0, std::hypot(zr[i], zi[i]));
    if (min_d2[i] > 1e-20 * scale * scale) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dd = std::hypot(zr[i] - zr[j], zi[i] - zi[j]);
      if (dd > 1e-10 * scale) continue;
      mp::Complex diff = z[i] - z[j];
      const long ze = std::max(magnitude_exp(z[i]), 1L);
      if (diff.re().is_zero() && diff.im().is_zero()) {
        out.roots[i].cluster = true;
      } else if (magnitude_exp(diff) < ze - cluster_bits) {
        out.roots[i].cluster = true;
      }
    }
  }

  std::sort(out.roots.begin(), out.roots.end(),
            [](const Root& a, const Root& b) { return lex_less(a.lambda, b.lambda); });

  const std::size_t unconverged = static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
  const double tol = residual_tolerance(bits);
  if (unconverged > 0 || out.worst_residual() > tol) {
    std::ostringstream os;
    os << "Aberth iteration did not converge after " << iter << " sweeps (" << unconverged
       << " roots still moving, worst residual " << out.worst_residual() << ", tolerance " << tol << ")";
    throw NonConvergenceError(os.str(), std::move(out));
  }
  return out;
}

mp::Complex polish_root(const CharPoly& p, const mp::Complex& lambda0) {
  const mp::Bits bits = p.precision;
  const long step_bits = static_cast<long>(bits / 2);
  HornerScratch hs(bits);
  mp::Complex z = lambda0;
  mp::Complex step(bits);
  mp::Real t0(bits), t1(bits), t2(bits);
  const double r0 = root_residual(p, lambda0);
  for (int it = 0; it < 100; ++it) {
    horner(p, z, hs);
    if (hs.f.re().is_zero() && hs.f.im().is_zero()) return z;
    if (hs.df.re().is_zero() && hs.df.im().is_zero()) throw PolishError("Newton polish hit a stationary point");
    mp::raw::div(step, hs.f, hs.df, t0, t1, t2);
    if (magnitude_exp(step) < std::max(magnitude_exp(z), 1L) - step_bits) return z;
    z -= step;
    if (it == 0 && root_residual(p, z) > r0) throw PolishError("Newton polish diverged on the first step");
  }
  throw PolishError("Newton polish did not converge in 100 steps");
}

std::vector<std::complex<double>> companion_roots(const CharPoly& p) {
  const int d = p.degree();
  if (d < 1) return {};
  Eigen::VectorXd c(d + 1);
  for (int k = 0; k <= d; ++k) c[k] = p.coeffs[static_cast<std::size_t>(k)].to_double();
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  solver.compute(c);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < solver.roots().size(); ++i) out.push_back(solver.roots()[i]);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

nlohmann::json to_json(const RootSet& rs) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& r : rs.roots) {
    roots.push_back({{"re", r.lambda.re().hex()},
                     {"im", r.lambda.im().hex()},
                     {"residual", r.residual},
                     {"cluster", r.cluster},
                     {"radius", r.radius}});
  }
  return {{"precision", rs.precision}, {"iterations", rs.iterations}, {"roots", std::move(roots)}};
}

RootSet rootset_from_json(const nlohmann::json& j) {
  RootSet rs;
  rs.precision = j.at("precision").get<mp::Bits>();
  rs.iterations = j.at("iterations").get<int>();
  for (const auto& r : j.at("roots")) {
    mp::Complex lambda(mp::Real::parse(r.at("re").get<std::string>(), rs.precision),
                       mp::Real::parse(r.at("im").get<std::string>(), rs.precision));
    rs.roots.push_back({std::move(lambda), r.at("residual").get<double>(), r.at("cluster").get<bool>(),
                        r.value("radius", 0.0)});
  }
  return rs;
}

}  // namespace reslab
