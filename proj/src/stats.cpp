#include "reslab/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "reslab/model.hpp"

namespace reslab {

namespace {

bool overlaps(const std::vector<Interval>& v) {
  std::vector<Interval> s = v;
  std::sort(s.begin(), s.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].lo < s[k - 1].hi) return true;
  }
  return false;
}

double poisson_pmf(int k, double mu) { return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0)); }

GofReport finish(std::string name, double stat, double p, int n) {
  GofReport r;
  r.test = std::move(name);
  r.statistic = stat;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.n_samples = n;
  r.pass = r.p_value > kSignificance;
  return r;
}

/// Category index of count k when every count >= top shares one category.
int category(int k, int top) { return std::min(k, top); }

}  // namespace

BoxSpec BoxSpec::defaults() {
  return {{{-2.0, -1.0}, {0.0, 1.0}, {2.0, 3.0}}, {{0.1, 0.4}, {0.5, 0.8}}};
}

void BoxSpec::validate() const {
  if (I.empty() || C.empty()) throw std::invalid_argument("box spec: no intervals");
  for (const auto& v : {I, C}) {
    for (const auto& i : v) {
      if (!(i.length() > 0.0)) {
        throw std::invalid_argument("box spec: degenerate interval [" + std::to_string(i.lo) + ", " +
                                    std::to_string(i.hi) + "]");
      }
    }
    if (overlaps(v)) throw std::invalid_argument("box spec: intervals overlap");
  }
}

nlohmann::json to_json(const GofReport& r) {
  return {{"test", r.test},           {"statistic", r.statistic}, {"p_value", r.p_value},
          {"n_samples", r.n_samples}, {"level", kSignificance},  {"decision", r.pass ? "pass" : "reject"},
          {"details", r.details}};
}

std::string summary_table(std::span<const GofReport> reports) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s %12s %12s %8s %8s\n", "test", "statistic", "p_value", "samples", "decision");
  os << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-28s %12.5g %12.5g %8d %8s\n", r.test.c_str(), r.statistic, r.p_value,
                  r.n_samples, r.pass ? "pass" : "reject");
    os << buf;
  }
  return os.str();
}

int box_count(const RescaledCloud& cloud, Interval x, Interval y) {
  int n = 0;
  for (const auto& p : cloud.points) {
    if (p.x >= x.lo && p.x < x.hi && p.y >= y.lo && p.y < y.hi) ++n;
  }
  return n;
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double kolmogorov_sf(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

GofReport ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  const double sn = std::sqrt(n);
  GofReport r = finish("ks", d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d), static_cast<int>(n));
  r.details = {{"mean", std::accumulate(sample.begin(), sample.end(), 0.0) / n}};
  return r;
}

GofReport ks_exponential(std::vector<double> sample, double rate, double cutoff) {
  if (!(rate > 0.0) || !(cutoff > 0.0)) throw std::invalid_argument("ks_exponential: rate and cutoff must be positive");
  const double norm = -std::expm1(-rate * cutoff);
  GofReport r = ks_test(std::move(sample), [&](double t) { return -std::expm1(-rate * std::min(t, cutoff)) / norm; });
  r.test = "ks_exponential";
  r.details["rate"] = rate;
  r.details["cutoff"] = cutoff;
  return r;
}

GofReport poisson_marginal_test(std::span<const int> counts, double mu) {
  if (counts.empty()) throw std::invalid_argument("poisson_marginal_test: no samples");
  if (!(mu > 0.0)) throw std::invalid_argument("poisson_marginal_test: mu must be positive");
  const double n = static_cast<double>(counts.size());
  // categories 0 .. top-1 and a tail {>= top}; grow top while both the next
  // cell and the remaining tail keep expected counts >= 5
  int top = 0;
  double cum = 0.0;
  while (true) {
    const double next = n * poisson_pmf(top, mu);
    const double tail_after = n * (1.0 - cum - poisson_pmf(top, mu));
    if (next < 5.0 || tail_after < 5.0) break;
    cum += poisson_pmf(top, mu);
    ++top;
  }
  const int cats = top + 1;
  std::vector<double> obs(static_cast<std::size_t>(cats), 0.0), exp(static_cast<std::size_t>(cats), 0.0);
  for (int k : counts) obs[static_cast<std::size_t>(category(k, top))] += 1.0;
  double acc = 0.0;
  for (int k = 0; k < top; ++k) {
    exp[static_cast<std::size_t>(k)] = n * poisson_pmf(k, mu);
    acc += exp[static_cast<std::size_t>(k)];
  }
  exp[static_cast<std::size_t>(top)] = n - acc;
  GofReport r;
  if (cats < 2) {
    r = finish("poisson_marginal", 0.0, 1.0, static_cast<int>(n));
  } else {
    double stat = 0.0;
    for (std::size_t k = 0; k < obs.size(); ++k) stat += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
    r = finish("poisson_marginal", stat, chi_square_sf(stat, cats - 1), static_cast<int>(n));
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
  r.details = {{"mu", mu}, {"mean_count", mean}, {"categories", cats}, {"observed", obs}, {"expected", exp}};
  return r;
}

GofReport joint_factorization_test(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("joint_factorization_test: size mismatch");
  const double n = static_cast<double>(a.size());
  int ta = std::max(1, *std::max_element(a.begin(), a.end()));
  int tb = std::max(1, *std::max_element(b.begin(), b.end()));
  auto marginal = [&](std::span<const int> v, int top) {
    std::vector<double> m(static_cast<std::size_t>(top) + 1, 0.0);
    for (int k : v) m[static_cast<std::size_t>(category(k, top))] += 1.0;
    return m;
  };
  std::vector<double> ma, mb;
  // shrink the larger-category side until the smallest expected cell is >= 5
  while (true) {
    ma = marginal(a, ta);
    mb = marginal(b, tb);
    const double min_a = *std::min_element(ma.begin(), ma.end());
    const double min_b = *std::min_element(mb.begin(), mb.end());
    if (min_a * min_b / n >= 5.0 || (ta <= 1 && tb <= 1)) break;
    if (ta > 1 && (min_a <= min_b || tb <= 1)) {
      --ta;
    } else {
      --tb;
    }
  }
  std::vector<std::vector<double>> obs(ma.size(), std::vector<double>(mb.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    obs[static_cast<std::size_t>(category(a[i], ta))][static_cast<std::size_t>(category(b[i], tb))] += 1.0;
  }
  double stat = 0.0;
  int used_rows = 0, used_cols = 0;
  for (double v : ma) used_rows += v > 0.0;
  for (double v : mb) used_cols += v > 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    for (std::size_t j = 0; j < mb.size(); ++j) {
      const double e = ma[i] * mb[j] / n;
      if (e > 0.0) stat += (obs[i][j] - e) * (obs[i][j] - e) / e;
    }
  }
  const int dof = (used_rows - 1) * (used_cols - 1);
  GofReport r = finish("joint_factorization", stat, dof > 0 ? chi_square_sf(stat, dof) : 1.0, static_cast<int>(n));
  r.details = {{"dof", dof}, {"rows", used_rows}, {"cols", used_cols}};
  return r;
}

GofReport poisson_counts_test(std::span<const RescaledCloud> clouds, const BoxSpec& boxes, int min_samples) {
  boxes.validate();
  if (static_cast<int>(clouds.size()) < min_samples) {
    throw std::invalid_argument("poisson_counts_test: " + std::to_string(clouds.size()) + " samples, need " +
                                std::to_string(min_samples));
  }
  std::string offending;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const Interval x = boxes.x_of(k), y = boxes.y_of(k);
    const auto& c0 = clouds.front();
    if (x.lo < c0.x_lo || x.hi > c0.x_hi || y.lo < c0.y_min) {
      char buf[128];
      std::snprintf(buf, sizeof buf, " [%g,%g]x[%g,%g]", x.lo, x.hi, y.lo, y.hi);
      offending += buf;
    }
  }
  if (!offending.empty()) throw std::invalid_argument("boxes outside the populated window:" + offending);
  std::vector<std::vector<int>> counts(boxes.size());
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    for (const auto& c : clouds) counts[k].push_back(box_count(c, boxes.x_of(k), boxes.y_of(k)));
  }
  std::vector<GofReport> parts;
  nlohmann::json marginals = nlohmann::json::array(), joints = nlohmann::json::array();
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    GofReport m = poisson_marginal_test(counts[k], boxes.measure(k));
    m.details["box"] = {boxes.x_of(k).lo, boxes.x_of(k).hi, boxes.y_of(k).lo, boxes.y_of(k).hi};
    marginals.push_back(to_json(m));
    parts.push_back(std::move(m));
  }
  const std::size_t nj = std::min<std::size_t>(3, boxes.size());
  for (std::size_t i = 0; i < nj; ++i) {
    for (std::size_t j = i + 1; j < nj; ++j) {
      GofReport f = joint_factorization_test(counts[i], counts[j]);
      f.details["boxes"] = {i, j};
      joints.push_back(to_json(f));
      parts.push_back(std::move(f));
    }
  }
  double p_min = 1.0, stat = 0.0;
  for (const auto& p : parts) {
    if (p.p_value < p_min) {
      p_min = p.p_value;
      stat = p.statistic;
    }
  }
  GofReport r = finish("poisson_counts", stat, std::min(1.0, p_min * static_cast<double>(parts.size())),
                       static_cast<int>(clouds.size()));
  r.details = {{"marginals", marginals}, {"joint", joints}, {"bonferroni_factor", parts.size()}};
  return r;
}

GofReport spacing_test(std::span<const RescaledCloud> clouds, Interval strip) {
  if (!(strip.length() > 0.0)) throw std::invalid_argument("spacing_test: degenerate strip");
  if (clouds.empty()) throw std::invalid_argument("spacing_test: no clouds");
  const double rate = strip.length();
  double cutoff = 5.0 / rate;
  for (const auto& c : clouds) cutoff = std::min(cutoff, 0.5 * (c.x_hi - c.x_lo));
  if (!(cutoff > 0.0)) throw std::invalid_argument("spacing_test: clouds have an empty x-window");
  std::vector<double> spacings;
  for (const auto& c : clouds) {
    std::vector<double> xs;
    for (const auto& p : c.points) {
      if (p.y >= strip.lo && p.y < strip.hi && p.x >= c.x_lo && p.x <= c.x_hi) xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    // forward gap from every point at least `cutoff` inside the right edge,
    // kept when it does not exceed the cutoff: exactly truncated Exp(rate)
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (xs[i] > c.x_hi - cutoff) break;
      const double g = xs[i + 1] - xs[i];
      if (g <= cutoff) spacings.push_back(g);
    }
  }
  if (spacings.size() < 100) {
    throw std::invalid_argument("spacing_test: " + std::to_string(spacings.size()) +
                                " pooled spacings, need at least 100");
  }
  const std::size_t n_spacings = spacings.size();
  GofReport r = ks_exponential(std::move(spacings), rate, cutoff);
  r.test = "spacing_ks";
  r.n_samples = static_cast<int>(clouds.size());
  r.details["n_spacings"] = n_spacings;
  r.details["strip"] = {strip.lo, strip.hi};
  return r;
}

Correlation pearson_fisher(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson_fisher: size mismatch");
  Correlation c;
  const std::size_t n = a.size();
  if (n < 4) return c;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return c;
  c.defined = true;
  c.r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  const double se = 1.0 / std::sqrt(static_cast<double>(n) - 3.0);
  constexpr double z99 = 2.5758293035489004;
  const double z = std::atanh(std::clamp(c.r, -1.0 + 1e-15, 1.0 - 1e-15));
  c.ci_lo = std::tanh(z - z99 * se);
  c.ci_hi = std::tanh(z + z99 * se);
  c.p_value = std::erfc(std::abs(z) / se / std::sqrt(2.0));
  return c;
}

GofReport independence_test(std::span<const RescaledCloud> a, std::span<const RescaledCloud> b, Interval x,
                            Interval y) {
  return independence_test(a, b, x, y, x, y);
}

GofReport independence_test(std::span<const RescaledCloud> a, std::span<const RescaledCloud> b, Interval x_a,
                            Interval y_a, Interval x_b, Interval y_b) {
  if (a.size() != b.size()) throw std::invalid_argument("independence_test: sample counts differ");
  std::vector<double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].seed != b[i].seed) {
      throw std::invalid_argument("independence_test: sample keys differ at index " + std::to_string(i));
    }
    ca.push_back(box_count(a[i], x_a, y_a));
    cb.push_back(box_count(b[i], x_b, y_b));
  }
  const Correlation c = pearson_fisher(ca, cb);
  GofReport r = finish("independence", c.r, c.defined ? c.p_value : 0.0, static_cast<int>(a.size()));
  r.pass = c.defined && c.ci_lo <= 0.0 && c.ci_hi >= 0.0;
  r.details = {{"correlation", c.r},
               {"ci99", {c.ci_lo, c.ci_hi}},
               {"defined", c.defined},
               {"threshold", 2.58 / std::sqrt(static_cast<double>(std::max<std::size_t>(a.size(), 1)))},
               {"mean_count_a", ca.empty() ? 0.0 : std::accumulate(ca.begin(), ca.end(), 0.0) / ca.size()},
               {"mean_count_b", cb.empty() ? 0.0 : std::accumulate(cb.begin(), cb.end(), 0.0) / cb.size()}};
  return r;
}

DensityCountReport density_count_check(const std::map<int, std::vector<std::vector<Resonance>>>& res_per_L,
                                       Interval I, double kappa, const SpectralTable& table) {
  DensityCountReport rep;
  rep.I = I;
  rep.kappa = kappa;
  rep.expected = table.N_at(I.hi) - table.N_at(I.lo);
  rep.pass = !res_per_L.empty();
  for (const auto& [L, samples] : res_per_L) {
    const double log_depth = -std::pow(static_cast<double>(L), kappa);
    auto& v = rep.normalized[L];
    for (const auto& res : samples) {
      int count = 0;
      for (const auto& r : res) {
        if (r.cls == ResonanceClass::Resonance && I.contains(r.z.real()) && r.log_abs_im_z <= log_depth) ++count;
      }
      v.push_back(static_cast<double>(count) / L);
    }
    const double n = static_cast<double>(v.size());
    const double mean = n > 0 ? std::accumulate(v.begin(), v.end(), 0.0) / n : 0.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double se = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    rep.mean[L] = mean;
    rep.stderr_[L] = se;
    const bool ok = std::abs(mean - rep.expected) <= 3.0 * se + 5.0 / L;
    rep.pass_per_L[L] = ok;
    rep.pass = rep.pass && ok;
  }
  return rep;
}

RescaledCloud synthetic_poisson_cloud(double x_lo, double x_hi, double y_lo, double y_hi, std::uint64_t seed,
                                      std::uint64_t stream) {
  RescaledCloud c;
  c.seed = seed;
  c.x_lo = x_lo;
  c.x_hi = x_hi;
  c.y_min = y_lo;
  CounterRng rng(seed, stream);
  const double h = y_hi - y_lo;
  // x-projection is a Poisson process of rate h
  double x = x_lo;
  while (true) {
    x += -std::log1p(-rng.next_uniform()) / h;
    if (x > x_hi) break;
    c.points.push_back({x, y_lo + h * rng.next_uniform(), 0.0, 0.0});
  }
  return c;
}

RescaledCloud synthetic_lattice_cloud(double x_lo, double x_hi, double y_lo, double y_hi, std::uint64_t seed,
                                      std::uint64_t stream) {
  RescaledCloud c;
  c.seed = seed;
  c.x_lo = x_lo;
  c.x_hi = x_hi;
  c.y_min = y_lo;
  CounterRng rng(seed, stream);
  const double u = rng.next_uniform(), v = rng.next_uniform();
  for (double y = y_lo + v; y < y_hi; y += 1.0) {
    for (double x = x_lo + u; x < x_hi; x += 1.0) c.points.push_back({x, y, 0.0, 0.0});
  }
  return c;
}

SelfCalibration self_calibrate(const BoxSpec& boxes, double x_lo, double x_hi, Interval strip, int n_samples,
                               int runs, std::uint64_t seed) {
  SelfCalibration cal;
  cal.counts.runs = cal.spacing.runs = cal.independence.runs = runs;
  const double y_hi = std::max(strip.hi, 1.0);
  const double y_lo = std::min(strip.lo, 0.0);
  int counts_pass = 0, counts_reject = 0, sp_pass = 0, sp_reject = 0, ind_pass = 0, ind_reject = 0;
  for (int run = 0; run < runs; ++run) {
    std::vector<RescaledCloud> pois, pois_b, lat;
    for (int s = 0; s < n_samples; ++s) {
      const std::uint64_t key = seed + static_cast<std::uint64_t>(run) * 1000003ULL + static_cast<std::uint64_t>(s);
      pois.push_back(synthetic_poisson_cloud(x_lo, x_hi, y_lo, y_hi, key, 1));
      pois_b.push_back(synthetic_poisson_cloud(x_lo, x_hi, y_lo, y_hi, key, 2));
      lat.push_back(synthetic_lattice_cloud(x_lo, x_hi, y_lo, y_hi, key, 3));
    }
    counts_pass += poisson_counts_test(pois, boxes, n_samples).pass;
    counts_reject += !poisson_counts_test(lat, boxes, n_samples).pass;
    sp_pass += spacing_test(pois, strip).pass;
    sp_reject += !spacing_test(lat, strip).pass;
    const Interval bx{-0.5, 0.5}, by{0.0, 1.0};
    ind_pass += independence_test(pois, pois_b, bx, by).pass;
    ind_reject += !independence_test(pois, pois, bx, by).pass;
  }
  auto fill = [runs](Calibration& c, int pass, int reject) {
    c.null_pass_rate = static_cast<double>(pass) / runs;
    c.lattice_reject_rate = static_cast<double>(reject) / runs;
    c.ok = c.null_pass_rate >= 0.95 && c.lattice_reject_rate >= 0.95;
  };
  fill(cal.counts, counts_pass, counts_reject);
  fill(cal.spacing, sp_pass, sp_reject);
  fill(cal.independence, ind_pass, ind_reject);
  return cal;
}

}  // namespace reslab
