/// Command-line driver: box resonances, spectral data, ensembles, point-process
/// statistics and the acceptance suites.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reslab/charpoly.hpp"
#include "reslab/pointprocess.hpp"
#include "reslab/resonances.hpp"
#include "reslab/runs.hpp"
#include "reslab/spectral.hpp"
#include "reslab/stats.hpp"
#include "reslab/verify.hpp"

namespace fs = std::filesystem;
using namespace reslab;

namespace {

/// Thrown for inconsistent flag combinations; reported as a usage error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse number '" + item + "' in '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

/// "uniform:0,W" -> uniform[0, W].
UniformDist parse_uniform(const std::string& text) {
  const std::string prefix = "uniform:";
  if (text.rfind(prefix, 0) != 0) throw UsageError("random model must look like uniform:0,W, got '" + text + "'");
  const auto ab = parse_list(text.substr(prefix.size()));
  if (ab.size() != 2 || ab[0] != 0.0 || !(ab[1] > 0.0)) {
    throw UsageError("only uniform:0,W with W > 0 is supported, got '" + text + "'");
  }
  return {ab[1]};
}

struct ModelOptions {
  std::string periodic;
  std::string random;
  std::string potential_file;
  bool free = false;
  bool reversed = false;
  std::uint64_t stream = 0;

  void add_to(CLI::App& app) {
    auto* p = app.add_option("--periodic", periodic, "Periodic cell, e.g. 2,0");
    auto* r = app.add_option("--random", random, "Random model uniform:0,W");
    auto* f = app.add_option("--potential", potential_file, "Potential JSON file")->check(CLI::ExistingFile);
    auto* z = app.add_flag("--free", free, "Free model V = 0");
    p->excludes(r)->excludes(f)->excludes(z);
    r->excludes(f)->excludes(z);
    f->excludes(z);
    app.add_flag("--reversed", reversed, "Random sequence stored reversed, omega_0 at the exit site");
    app.add_option("--stream", stream, "Random stream index");
  }

  bool is_random() const { return !random.empty(); }

  Potential make(int L, std::uint64_t seed) const {
    if (!periodic.empty()) return make_periodic(parse_list(periodic), L);
    if (is_random()) {
      const UniformDist d = parse_uniform(random);
      return reversed ? sample_random_reversed(d, L, seed, stream) : sample_random(d, L, seed, stream);
    }
    if (!potential_file.empty()) {
      std::ifstream is(potential_file);
      return potential_from_json(nlohmann::json::parse(is));
    }
    if (free) return make_free(L);
    throw UsageError("choose a model: --periodic, --random, --potential or --free");
  }

  nlohmann::json to_json() const {
    return {{"periodic", periodic}, {"random", random},     {"potential", potential_file},
            {"free", free},         {"reversed", reversed}, {"stream", stream}};
  }
};

std::ostream& out_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

RunManifest start_manifest(const std::string& command, nlohmann::json config, std::uint64_t seed, long bits) {
  RunManifest m;
  m.command = command;
  m.config = std::move(config);
  m.seed = seed;
  m.precision_bits = bits;
  m.started = utc_timestamp();
  return m;
}

/// Spectral table for a model: exact for periodic cells, empirical otherwise.
SpectralTable model_table(const ModelOptions& model, std::uint64_t seed, int L_ref = 10000, int samples = 16) {
  if (!model.periodic.empty()) return ids_periodic(parse_list(model.periodic), std::vector<double>{0.0});
  if (model.free) return ids_periodic(std::vector<double>{0.0}, std::vector<double>{0.0});
  if (!model.is_random()) throw UsageError("spectral data needs --periodic, --random or --free");
  const UniformDist d = parse_uniform(model.random);
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double E = -2.2 + 0.01 * k;
    if (E > 2.2 + d.width) break;
    grid.push_back(E);
  }
  return ids_empirical(uniform_family(d, model.stream + 7), grid, L_ref, samples, d, seed);
}

// --- resonances ----------------------------------------------------------------

struct ResonancesCmd {
  ModelOptions model;
  int L = 100;
  std::uint64_t seed = 0;
  long bits = 256;
  std::string out;
};

int run_resonances(const ResonancesCmd& c) {
  const Potential v = c.model.make(c.L, c.seed);
  const BoxSolution sol = solve_box(v, c.bits);
  std::ostringstream csv;
  write_resonance_csv(csv, sol.resonances, v.box_end(), c.seed);
  if (c.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  const fs::path dir = c.out;
  RunManifest m = start_manifest("resonances", {{"model", c.model.to_json()}, {"L", c.L}, {"seed", c.seed}, {"precision_bits", c.bits}}, c.seed,
                                 sol.roots.precision);
  write_text(dir / "potential.json", to_json(v).dump(1) + "\n");
  write_text(dir / "charpoly.hex", to_hex_dump(sol.poly));
  write_text(dir / "roots.json", to_json(sol.roots).dump() + "\n");
  write_text(dir / "resonances.csv", csv.str());
  m.outputs = {"potential.json", "charpoly.hex", "roots.json", "resonances.csv"};
  m.finished = utc_timestamp();
  write_manifest(m, dir);
  const ClassCounts k = count_classes(sol.resonances);
  std::cout << "L=" << v.box_end() << " bits=" << sol.roots.precision << " resonance=" << k.resonance
            << " antiresonance=" << k.antiresonance << " eigenvalue=" << k.eigenvalue << " antibound=" << k.antibound
            << " boundary=" << k.boundary << "\n";
  return 0;
}

// --- dos / lyapunov ------------------------------------------------------------

struct DosCmd {
  ModelOptions model;
  int L = 10000;
  int samples = 16;
  std::uint64_t seed = 0;
  double e_min = NAN, e_max = NAN, step = 0.01;
  std::string out;
};

int run_dos(const DosCmd& c) {
  const double B = c.model.is_random() ? parse_uniform(c.model.random).width : 0.0;
  const double lo = std::isnan(c.e_min) ? -2.2 : c.e_min;
  double hi = c.e_max;
  if (std::isnan(hi)) {
    hi = 2.2 + B;
    if (!c.model.periodic.empty()) {
      for (double x : parse_list(c.model.periodic)) hi = std::max(hi, 2.2 + std::abs(x));
    }
  }
  if (!(hi > lo) || !(c.step > 0.0)) throw UsageError("energy grid needs e-max > e-min and step > 0");
  std::vector<double> grid;
  for (int k = 0; lo + k * c.step <= hi + 1e-12; ++k) grid.push_back(lo + k * c.step);
  SpectralTable t;
  if (!c.model.periodic.empty()) {
    t = ids_periodic(parse_list(c.model.periodic), grid);
  } else if (c.model.free) {
    t = ids_periodic(std::vector<double>{0.0}, grid);
  } else if (c.model.is_random()) {
    const UniformDist d = parse_uniform(c.model.random);
    t = ids_empirical(uniform_family(d, c.model.stream), grid, c.L, c.samples, d, c.seed);
  } else {
    throw UsageError("dos needs --periodic, --random or --free");
  }
  std::ofstream file;
  write_spectral_table(out_or_stdout(c.out, file), t);
  return 0;
}

struct LyapunovCmd {
  ModelOptions model;
  double e0 = 0.0;
  double im = 0.0;
  int L = 10000;
  int samples = 16;
};

int run_lyapunov(const LyapunovCmd& c) {
  const std::complex<double> z(c.e0, c.im);
  double rho;
  if (!c.model.periodic.empty()) {
    rho = lyapunov_periodic(parse_list(c.model.periodic), z);
  } else if (c.model.free) {
    rho = lyapunov_periodic(std::vector<double>{0.0}, z);
  } else if (c.model.is_random()) {
    rho = lyapunov(uniform_family(parse_uniform(c.model.random), c.model.stream), z, c.L, c.samples);
  } else {
    throw UsageError("lyapunov needs --periodic, --random or --free");
  }
  std::cout << std::setprecision(12) << rho << "\n";
  return 0;
}

// --- xi-zeros --------------------------------------------------------------------

struct XiCmd {
  ModelOptions model;
  SearchBox box;
  std::string out;
};

nlohmann::json zeros_json(const std::vector<XiZero>& zs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& z : zs) a.push_back({{"re", z.z.real()}, {"im", z.z.imag()}, {"local_count", z.local_count}});
  return a;
}

int run_xi(const XiCmd& c) {
  const SpectralTable t = model_table(c.model, 0);
  const auto zs = xi_zeros(t, c.box);
  nlohmann::json j = {{"model", c.model.to_json()},
                      {"box", {c.box.re_lo, c.box.re_hi, c.box.im_lo, c.box.im_hi}},
                      {"count", xi_zero_count(t, c.box)},
                      {"zeros", zeros_json(zs)}};
  std::ofstream file;
  out_or_stdout(c.out, file) << j.dump(2) << "\n";
  return 0;
}

// --- periodic-verify -------------------------------------------------------------

struct PeriodicVerifyCmd {
  std::string cell;
  std::vector<int> Ls{64, 128, 256};
  double strip_lo = NAN, strip_hi = NAN;
  double c0 = 2.0;
  long bits = 256;
  std::string out = "runs/periodic";
};

int run_periodic_verify(const PeriodicVerifyCmd& c) {
  const auto cell = parse_list(c.cell);
  if (c.Ls.size() < 2) throw UsageError("periodic-verify needs at least two --L values");
  const SpectralTable t = ids_periodic(cell, std::vector<double>{0.0});
  Interval I{c.strip_lo, c.strip_hi};
  if (std::isnan(I.lo) || std::isnan(I.hi)) {
    // middle 60% of the first band inside (-2, 2)
    bool found = false;
    for (const auto& b : t.bands.intervals) {
      const Interval in{std::max(b.lo, -2.0), std::min(b.hi, 2.0)};
      if (in.length() <= 0.0) continue;
      I = {in.lo + 0.2 * in.length(), in.hi - 0.2 * in.length()};
      found = true;
      break;
    }
    if (!found) throw std::runtime_error("no band of the cell meets (-2, 2)");
  }
  const fs::path dir = c.out;
  RunManifest m = start_manifest("periodic-verify", {{"cell", cell}, {"L", c.Ls}, {"strip", {I.lo, I.hi}}, {"C0", c.c0}},
                                 0, c.bits);
  std::map<int, std::vector<Resonance>> per_L;
  std::vector<FreeRegionReport> gaps;
  for (int L : c.Ls) {
    std::cerr << "solving L=" << L << std::endl;
    const fs::path sub = dir / ("L" + std::to_string(L));
    per_L[L] = solve_box_cached(make_periodic(cell, L), c.bits, sub).resonances;
    gaps.push_back(free_region(per_L[L], I, L, Regime::NoResonance1OverL));
    for (const char* f : {"potential.json", "roots.json", "resonances.csv"}) {
      m.outputs.push_back("L" + std::to_string(L) + "/" + f);
    }
  }
  const LineFit fit = fit_gap_exponent(gaps);
  nlohmann::json report = {{"cell", cell}, {"strip", {I.lo, I.hi}}, {"gap_exponent", fit.slope}, {"gap_r2", fit.r2}};
  try {
    const CurveFit curve = periodic_curve(per_L, I, c.c0, t);
    report["curve_sup_distance"] = curve.sup_distance;
    std::ofstream dat(dir / "curve.dat");
    for (const auto& k : curve.per_L) {
      dat << "# L = " << k.L << "\n";
      for (const auto& [x, y] : k.points) dat << x << " " << y << "\n";
      dat << "\n\n";
      report["density"].push_back({{"L", k.L}, {"value", k.density}, {"expected", k.expected_density},
                                   {"ok", k.density_ok}});
    }
    m.outputs.push_back("curve.dat");
  } catch (const std::exception& e) {
    report["curve_error"] = e.what();
  }
  const auto zeros = xi_zeros(t, {});
  report["xi_zeros"] = zeros_json(zeros);
  for (const auto& [L, res] : per_L) {
    const XiMatchReport x = match_xi_zeros(res, zeros, c.c0, L);
    report["xi_match"].push_back({{"L", L}, {"n_deep", x.n_deep}, {"n_zeros", x.n_zeros},
                                  {"max_distance", x.max_distance}, {"scaled_distance", x.scaled_distance}});
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  m.outputs.push_back("report.json");
  m.finished = utc_timestamp();
  write_manifest(m, dir);
  std::cout << report.dump(2) << "\n";
  return 0;
}

// --- ensembles and statistics ----------------------------------------------------

struct CloudOptions {
  double e0 = 0.5;
  double kappa = 0.5;
  double eps = 0.2;
  double x0 = NAN;
  double ell_gamma = 0.7;

  void add_to(CLI::App& app) {
    app.add_option("--e0", e0, "Reference energy E0");
    app.add_option("--kappa", kappa, "Near-axis depth exponent, window Im z >= -exp(-L^kappa)")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--eps", eps, "Energy window half-width")->check(CLI::PositiveNumber);
    app.add_option("--x0", x0, "Covariant depth x0 in [0, 1]; selects the covariant scaling")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--ell-gamma", ell_gamma, "Covariant window ell = round(L^gamma)")->check(CLI::Range(0.0, 1.0));
  }

  bool covariant() const { return !std::isnan(x0); }

  RescaledCloud make(std::span<const Resonance> res, int L, const SpectralTable& t, std::uint64_t seed,
                     double E0) const {
    if (covariant()) return rescale_covariant(res, E0, x0, eps, default_ell(L, ell_gamma), L, t, seed);
    return rescale_near_axis(res, E0, eps, kappa, L, t, seed);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"e0", e0}, {"eps", eps}};
    if (covariant()) {
      j["x0"] = x0;
      j["ell_gamma"] = ell_gamma;
    } else {
      j["kappa"] = kappa;
    }
    return j;
  }
};

struct EnsembleCmd {
  std::string random = "uniform:0,1";
  bool reversed = false;
  std::uint64_t stream = 0;
  int L = 100;
  int samples = 200;
  std::uint64_t seed = 0;
  long bits = 512;
  std::string name;
  std::string root = "runs";
  CloudOptions cloud;
  bool no_stats = false;
};

EnsembleConfig ensemble_config(const EnsembleCmd& c) {
  EnsembleConfig cfg;
  cfg.dist = parse_uniform(c.random);
  cfg.name = c.name.empty() ? "uniform_W" + CLI::detail::to_string(cfg.dist.width) + "_L" + std::to_string(c.L)
                            : c.name;
  cfg.reversed = c.reversed;
  cfg.stream = c.stream;
  cfg.L = c.L;
  cfg.n_samples = c.samples;
  cfg.first_seed = c.seed;
  cfg.precision_bits = c.bits;
  cfg.root = c.root;
  return cfg;
}

/// Spectral table of an ensemble, cached as table.csv in its directory.
SpectralTable ensemble_table(const EnsembleConfig& cfg) {
  const fs::path path = cfg.dir() / "table.csv";
  if (std::ifstream is(path); is) return read_spectral_table(is);
  ModelOptions m;
  m.random = "uniform:0," + CLI::detail::to_string(cfg.dist.width);
  m.stream = cfg.stream;
  const SpectralTable t = model_table(m, 0);
  fs::create_directories(cfg.dir());
  std::ofstream os(path);
  write_spectral_table(os, t);
  return t;
}

std::vector<RescaledCloud> clouds_of(const EnsembleResult& r, const EnsembleConfig& cfg, const CloudOptions& o,
                                     const SpectralTable& t, double E0) {
  std::vector<RescaledCloud> out;
  for (const auto& s : r.seeds) {
    if (s.ok) out.push_back(o.make(s.resonances, cfg.L, t, s.seed, E0));
  }
  return out;
}

void write_clouds(const fs::path& stem, std::span<const RescaledCloud> clouds) {
  std::ofstream csv(stem.string() + ".csv"), dat(stem.string() + ".dat");
  write_cloud_csv(csv, clouds);
  write_cloud_dat(dat, clouds);
}

int run_ensemble_cmd(const EnsembleCmd& c) {
  const EnsembleConfig cfg = ensemble_config(c);
  const EnsembleResult r = run_ensemble(cfg, [](const SeedResult& s) {
    std::cerr << "seed " << s.seed << (s.ok ? (s.from_cache ? " cached" : " done") : " FAILED: " + s.error) << "\n";
  });
  std::cout << "ensemble " << cfg.name << ": " << r.computed << " computed, " << r.reused << " reused, " << r.failed
            << " failed\n";
  if (c.no_stats) return r.failed == 0 ? 0 : 1;
  const SpectralTable t = ensemble_table(cfg);
  const auto clouds = clouds_of(r, cfg, c.cloud, t, c.cloud.e0);
  for (const auto& cl : clouds) {
    std::ofstream os(cfg.dir() / std::to_string(cl.seed) / "cloud.csv");
    write_cloud_csv(os, std::span<const RescaledCloud>(&cl, 1));
  }
  write_clouds(cfg.dir() / "clouds", clouds);
  nlohmann::json reports = nlohmann::json::array();
  std::vector<GofReport> table;
  try {
    table.push_back(poisson_counts_test(clouds, BoxSpec::defaults(), std::min(200, c.samples)));
  } catch (const std::exception& e) {
    reports.push_back({{"test", "poisson_counts"}, {"error", e.what()}});
  }
  try {
    table.push_back(spacing_test(clouds, {0.1, 0.9}));
  } catch (const std::exception& e) {
    reports.push_back({{"test", "spacing"}, {"error", e.what()}});
  }
  for (const auto& g : table) reports.push_back(to_json(g));
  write_text(cfg.dir() / "poisson_report.json",
             nlohmann::json{{"cloud", c.cloud.to_json()}, {"reports", reports}}.dump(2) + "\n");
  std::cout << summary_table(table);
  return r.failed == 0 ? 0 : 1;
}

struct StatCmd {
  std::string name;
  std::string root = "runs";
  CloudOptions cloud;
  // poisson-test
  int calibration_runs = 0;
  double strip_lo = 0.1, strip_hi = 0.9;
  // independence-test
  double e0b = NAN;
  double x0b = NAN;
  std::vector<double> box_a{-0.5, 0.5, 0.1, 0.9};
  std::vector<double> box_b;
  std::string out;
};

std::pair<EnsembleConfig, EnsembleResult> load_ensemble(const StatCmd& c) {
  if (c.name.empty()) throw UsageError("--name of an existing ensemble is required");
  const fs::path dir = fs::path(c.root) / c.name;
  const RunManifest m = read_manifest(dir);
  const EnsembleConfig cfg = EnsembleConfig::from_json(m.config, c.root);
  return {cfg, run_ensemble(cfg)};
}

int run_poisson_test(const StatCmd& c) {
  const auto [cfg, r] = load_ensemble(c);
  const SpectralTable t = ensemble_table(cfg);
  const auto clouds = clouds_of(r, cfg, c.cloud, t, c.cloud.e0);
  const Interval strip{c.strip_lo, c.strip_hi};
  const BoxSpec boxes = BoxSpec::defaults();
  std::vector<GofReport> table{poisson_counts_test(clouds, boxes, std::min<int>(200, static_cast<int>(clouds.size()))),
                               spacing_test(clouds, strip)};
  nlohmann::json j = {{"ensemble", cfg.to_json()}, {"cloud", c.cloud.to_json()}};
  for (const auto& g : table) j["reports"].push_back(to_json(g));
  if (c.calibration_runs > 0) {
    const double x_half = std::min(-clouds.front().x_lo, clouds.front().x_hi);
    const SelfCalibration cal =
        self_calibrate(boxes, -x_half, x_half, strip, static_cast<int>(clouds.size()), c.calibration_runs, 20240);
    for (const auto& [name, k] : {std::pair{"counts", cal.counts}, std::pair{"spacing", cal.spacing}}) {
      j["calibration"][name] = {{"runs", k.runs}, {"null_pass_rate", k.null_pass_rate},
                                {"lattice_reject_rate", k.lattice_reject_rate}, {"ok", k.ok}};
    }
  }
  std::ofstream file;
  out_or_stdout(c.out.empty() ? (cfg.dir() / "poisson_report.json").string() : c.out, file) << j.dump(2) << "\n";
  std::cout << summary_table(table);
  return std::all_of(table.begin(), table.end(), [](const GofReport& g) { return g.pass; }) ? 0 : 1;
}

int run_independence_test(const StatCmd& c) {
  const auto [cfg, r] = load_ensemble(c);
  const SpectralTable t = ensemble_table(cfg);
  CloudOptions a = c.cloud, b = c.cloud;
  double E0b = c.cloud.e0;
  if (c.cloud.covariant()) {
    if (std::isnan(c.x0b)) throw UsageError("covariant independence needs --x0b");
    b.x0 = c.x0b;
    if (!std::isnan(c.e0b)) E0b = c.e0b;
  } else {
    if (std::isnan(c.e0b)) throw UsageError("near-axis independence needs --e0b");
    E0b = c.e0b;
  }
  const auto ca = clouds_of(r, cfg, a, t, c.cloud.e0);
  const auto cb = clouds_of(r, cfg, b, t, E0b);
  const auto& bb = c.box_b.empty() ? c.box_a : c.box_b;
  if (c.box_a.size() != 4 || bb.size() != 4) throw UsageError("boxes are x_lo,x_hi,y_lo,y_hi");
  const GofReport g =
      independence_test(ca, cb, {c.box_a[0], c.box_a[1]}, {c.box_a[2], c.box_a[3]}, {bb[0], bb[1]}, {bb[2], bb[3]});
  const nlohmann::json j = {{"ensemble", cfg.to_json()}, {"cloud_a", a.to_json()}, {"cloud_b", b.to_json()},
                            {"e0b", E0b}, {"report", to_json(g)}};
  std::ofstream file;
  out_or_stdout(c.out.empty() ? (cfg.dir() / "independence_report.json").string() : c.out, file) << j.dump(2) << "\n";
  const std::vector<GofReport> table{g};
  std::cout << summary_table(table);
  return g.pass ? 0 : 1;
}

// --- verify ----------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n{"charpoly", "count",  "companion",   "spectral",     "periodic-scaling",
                                          "periodic-curve", "xi-match", "random-depth", "poisson", "independence",
                                          "stability"};
  return n;
}

std::vector<int> resolve_suite(const std::string& name) {
  std::vector<int> ids;
  if (name == "all") {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    return ids;
  }
  for (int i = 1; i <= kCriterionCount; ++i) {
    if (name == suite_names()[static_cast<std::size_t>(i - 1)] || name == "C" + std::to_string(i)) return {i};
  }
  std::string known = "all";
  for (const auto& s : suite_names()) known += ", " + s;
  throw UsageError("unknown suite '" + name + "'; known: " + known + " (or C1..C11)");
}

struct VerifyCmd {
  std::vector<std::string> suites{"all"};
  std::string cache = "runs/verify";
  int samples = 200;
  std::string out;
};

int run_verify(const VerifyCmd& c) {
  std::vector<int> ids;
  for (const auto& s : c.suites) {
    for (int id : resolve_suite(s)) ids.push_back(id);
  }
  VerifyOptions o;
  o.cache_dir = c.cache;
  o.samples = c.samples;
  o.log = &std::cerr;
  nlohmann::json report = nlohmann::json::array();
  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = verify_criterion(id, o);
    std::cout << format_line(r) << std::endl;
    report.push_back(to_json(r));
    failed += !r.pass;
  }
  if (!c.out.empty()) write_text(c.out, report.dump(2) + "\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances of truncated discrete Schroedinger operators on the half-line"};
  app.set_config("--config", "", "TOML configuration file; flags override it");
  app.require_subcommand(1);

  ResonancesCmd res;
  auto* s_res = app.add_subcommand("resonances", "Classified roots of one box");
  res.model.add_to(*s_res);
  s_res->add_option("--L", res.L, "Box [0, L]")->check(CLI::NonNegativeNumber);
  s_res->add_option("--seed", res.seed, "Random seed");
  s_res->add_option("--precision-bits", res.bits, "Minimum working precision")->check(CLI::Range(64L, 1L << 20));
  s_res->add_option("--out", res.out, "Output directory (default: CSV on stdout)");

  DosCmd dos;
  auto* s_dos = app.add_subcommand("dos", "Integrated density of states, density and Lyapunov exponent table");
  dos.model.add_to(*s_dos);
  s_dos->add_option("--L", dos.L, "Reference box size for random models")->check(CLI::PositiveNumber);
  s_dos->add_option("--samples", dos.samples, "Random samples")->check(CLI::PositiveNumber);
  s_dos->add_option("--seed", dos.seed, "Recorded seed");
  s_dos->add_option("--e-min", dos.e_min, "Grid start");
  s_dos->add_option("--e-max", dos.e_max, "Grid end");
  s_dos->add_option("--step", dos.step, "Grid step");
  s_dos->add_option("--out", dos.out, "Output CSV (default stdout)");

  LyapunovCmd lyap;
  auto* s_lyap = app.add_subcommand("lyapunov", "Lyapunov exponent at E0 + i im");
  lyap.model.add_to(*s_lyap);
  s_lyap->add_option("--e0", lyap.e0, "Energy");
  s_lyap->add_option("--im", lyap.im, "Imaginary part of the energy");
  s_lyap->add_option("--L", lyap.L, "Transfer product length for random models")->check(CLI::PositiveNumber);
  s_lyap->add_option("--samples", lyap.samples, "Random samples")->check(CLI::PositiveNumber);

  XiCmd xi;
  auto* s_xi = app.add_subcommand("xi-zeros", "Zeros of Xi in the lower half-plane");
  xi.model.add_to(*s_xi);
  s_xi->add_option("--re-lo", xi.box.re_lo);
  s_xi->add_option("--re-hi", xi.box.re_hi);
  s_xi->add_option("--im-lo", xi.box.im_lo);
  s_xi->add_option("--im-hi", xi.box.im_hi);
  s_xi->add_option("--out", xi.out, "Output JSON (default stdout)");

  PeriodicVerifyCmd pv;
  auto* s_pv = app.add_subcommand("periodic-verify", "Resonance-free strip, curve collapse and Xi matching for a cell");
  s_pv->add_option("--periodic", pv.cell, "Periodic cell, e.g. 2,0")->required();
  s_pv->add_option("--L", pv.Ls, "Box sizes")->check(CLI::PositiveNumber);
  s_pv->add_option("--strip-lo", pv.strip_lo, "Strip start (default: inside the first band)");
  s_pv->add_option("--strip-hi", pv.strip_hi, "Strip end");
  s_pv->add_option("--c0", pv.c0, "Deep threshold Im z <= -C0 / L")->check(CLI::PositiveNumber);
  s_pv->add_option("--precision-bits", pv.bits, "Minimum working precision")->check(CLI::Range(64L, 1L << 20));
  s_pv->add_option("--out", pv.out, "Output directory");

  EnsembleCmd ens;
  auto* s_ens = app.add_subcommand("ensemble", "Resumable random ensemble with rescaled clouds and Poisson report");
  s_ens->add_option("--random", ens.random, "Random model uniform:0,W");
  s_ens->add_flag("--reversed", ens.reversed, "Reversed potentials");
  s_ens->add_option("--stream", ens.stream, "Random stream index");
  s_ens->add_option("--L", ens.L, "Box [0, L]")->check(CLI::PositiveNumber);
  s_ens->add_option("--samples", ens.samples, "Number of seeds")->check(CLI::PositiveNumber);
  s_ens->add_option("--seed", ens.seed, "First seed");
  s_ens->add_option("--precision-bits", ens.bits, "Working precision")->check(CLI::Range(64L, 1L << 20));
  s_ens->add_option("--name", ens.name, "Ensemble name (default from model and L)");
  s_ens->add_option("--out", ens.root, "Root directory, runs/<name>/<seed>/");
  s_ens->add_flag("--no-stats", ens.no_stats, "Only solve the boxes");
  ens.cloud.add_to(*s_ens);

  StatCmd pt;
  auto* s_pt = app.add_subcommand("poisson-test", "Box-count and spacing tests on an existing ensemble");
  s_pt->add_option("--name", pt.name, "Ensemble name")->required();
  s_pt->add_option("--root", pt.root, "Ensemble root directory");
  s_pt->add_option("--calibration-runs", pt.calibration_runs, "Synthetic self-calibration runs")
      ->check(CLI::NonNegativeNumber);
  s_pt->add_option("--strip-lo", pt.strip_lo, "Spacing strip y start");
  s_pt->add_option("--strip-hi", pt.strip_hi, "Spacing strip y end");
  s_pt->add_option("--out", pt.out, "Report JSON");
  pt.cloud.add_to(*s_pt);

  StatCmd it;
  auto* s_it = app.add_subcommand("independence-test", "Count correlation between two processes on the same seeds");
  s_it->add_option("--name", it.name, "Ensemble name")->required();
  s_it->add_option("--root", it.root, "Ensemble root directory");
  s_it->add_option("--e0b", it.e0b, "Second reference energy");
  s_it->add_option("--x0b", it.x0b, "Second covariant depth")->check(CLI::Range(0.0, 1.0));
  s_it->add_option("--box", it.box_a, "Box x_lo,x_hi,y_lo,y_hi for the first process")->delimiter(',');
  s_it->add_option("--box-b", it.box_b, "Box for the second process (default: same)")->delimiter(',');
  s_it->add_option("--out", it.out, "Report JSON");
  it.cloud.add_to(*s_it);

  VerifyCmd ver;
  auto* s_ver = app.add_subcommand("verify", "Run acceptance suites; exit 0 iff all pass");
  s_ver->add_option("suite", ver.suites, "all, C1..C11 or a suite name");
  s_ver->add_option("--cache", ver.cache, "Cache directory");
  s_ver->add_option("--samples", ver.samples, "Ensemble size")->check(CLI::PositiveNumber);
  s_ver->add_option("--out", ver.out, "Report JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s_res) return run_resonances(res);
    if (*s_dos) return run_dos(dos);
    if (*s_lyap) return run_lyapunov(lyap);
    if (*s_xi) return run_xi(xi);
    if (*s_pv) return run_periodic_verify(pv);
    if (*s_ens) return run_ensemble_cmd(ens);
    if (*s_pt) return run_poisson_test(pt);
    if (*s_it) return run_independence_test(it);
    if (*s_ver) return run_verify(ver);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigConflictError& e) {
    std::cerr << "configuration conflict: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
