#include "reslab/runs.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "reslab/parallel.hpp"

namespace reslab {

namespace fs = std::filesystem;

namespace {

/// Write to a temporary sibling and rename, so readers never see partial files.
void write_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<nlohmann::json> read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

CachedSolution solve_box_cached(const Potential& v, mp::Bits min_bits, const fs::path& dir) {
  const fs::path roots_path = dir / "roots.json";
  if (auto cached = read_json(roots_path)) {
    const auto& j = *cached;
    if (j.value("potential_hash", std::string()) != v.hash()) {
      throw ConfigConflictError("cached roots in " + dir.string() + " belong to a different potential");
    }
    if (j.value("requested_bits", mp::Bits{0}) != min_bits) {
      throw ConfigConflictError("cached roots in " + dir.string() + " were computed with --precision-bits " +
                                std::to_string(j.value("requested_bits", mp::Bits{0})) + ", config asks for " +
                                std::to_string(min_bits));
    }
    try {
      const RootSet rs = rootset_from_json(j.at("rootset"));
      return {classify(rs, rs.precision), rs.precision, true};
    } catch (const std::exception&) {
      // unreadable cache: recompute below
    }
  }
  BoxSolution sol = solve_box(v, min_bits);
  nlohmann::json j = {{"potential_hash", v.hash()},
                      {"requested_bits", min_bits},
                      {"code_version", kCodeVersion},
                      {"rootset", to_json(sol.roots)}};
  write_atomic(dir / "potential.json", to_json(v).dump(1) + "\n");
  std::ostringstream csv;
  const auto* rk = std::get_if<RandomKind>(&v.kind());
  write_resonance_csv(csv, sol.resonances, v.box_end(), rk ? rk->seed : 0);
  write_atomic(dir / "resonances.csv", csv.str());
  write_atomic(roots_path, j.dump() + "\n");
  return {std::move(sol.resonances), sol.roots.precision, false};
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config", m.config},
          {"seed", m.seed},
          {"code_version", m.code_version},
          {"precision_bits", m.precision_bits},
          {"started", m.started},
          {"finished", m.finished},
          {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.seed = j.value("seed", std::uint64_t{0});
  m.code_version = j.value("code_version", std::string());
  m.precision_bits = j.value("precision_bits", 0L);
  m.started = j.value("started", std::string());
  m.finished = j.value("finished", std::string());
  m.outputs = j.value("outputs", std::vector<std::string>{});
  return m;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
  write_atomic(dir / "manifest.json", to_json(m).dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& dir) {
  auto j = read_json(dir / "manifest.json");
  if (!j) throw std::runtime_error("no readable manifest in " + dir.string());
  return manifest_from_json(*j);
}

nlohmann::json EnsembleConfig::to_json() const {
  return {{"name", name},
          {"dist", {{"kind", "uniform"}, {"width", dist.width}}},
          {"stream", stream},
          {"reversed", reversed},
          {"L", L},
          {"precision_bits", precision_bits},
          {"first_seed", first_seed},
          {"n_samples", n_samples}};
}

EnsembleConfig EnsembleConfig::from_json(const nlohmann::json& j, fs::path root) {
  EnsembleConfig c;
  c.name = j.at("name").get<std::string>();
  c.dist.width = j.at("dist").at("width").get<double>();
  c.stream = j.value("stream", std::uint64_t{0});
  c.reversed = j.value("reversed", false);
  c.L = j.at("L").get<int>();
  c.precision_bits = j.at("precision_bits").get<mp::Bits>();
  c.first_seed = j.value("first_seed", std::uint64_t{0});
  c.n_samples = j.at("n_samples").get<int>();
  c.root = std::move(root);
  return c;
}

Potential EnsembleConfig::potential(std::uint64_t seed) const {
  return reversed ? sample_random_reversed(dist, L, seed, stream) : sample_random(dist, L, seed, stream);
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg, const std::function<void(const SeedResult&)>& progress) {
  if (cfg.n_samples < 1) throw std::invalid_argument("ensemble needs at least one sample");
  if (cfg.L < 0) throw std::invalid_argument("L must be non-negative");
  RunManifest manifest;
  manifest.command = "ensemble";
  manifest.config = cfg.to_json();
  manifest.seed = cfg.first_seed;
  manifest.precision_bits = cfg.precision_bits;
  manifest.started = utc_timestamp();
  if (auto old = read_json(cfg.dir() / "manifest.json")) {
    const long old_bits = old->value("precision_bits", 0L);
    if (old_bits != 0 && old_bits != cfg.precision_bits) {
      throw ConfigConflictError("ensemble " + cfg.name + " was started with --precision-bits " +
                                std::to_string(old_bits) + ", config asks for " +
                                std::to_string(cfg.precision_bits));
    }
  }

  EnsembleResult out;
  out.seeds.resize(static_cast<std::size_t>(cfg.n_samples));
  std::mutex progress_mutex;
  parallel_for(out.seeds.size(), [&](std::size_t i) {
    SeedResult& r = out.seeds[i];
    r.seed = cfg.first_seed + i;
    try {
      CachedSolution s = solve_box_cached(cfg.potential(r.seed), cfg.precision_bits, cfg.dir() / std::to_string(r.seed));
      r.resonances = std::move(s.resonances);
      r.from_cache = s.from_cache;
      r.ok = true;
    } catch (const ConfigConflictError&) {
      throw;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mutex);
      progress(r);
    }
  });
  for (const auto& r : out.seeds) {
    if (!r.ok) {
      ++out.failed;
      continue;
    }
    r.from_cache ? ++out.reused : ++out.computed;
    const std::string s = std::to_string(r.seed);
    for (const char* f : {"potential.json", "roots.json", "resonances.csv"}) manifest.outputs.push_back(s + "/" + f);
  }
  manifest.finished = utc_timestamp();
  write_manifest(manifest, cfg.dir());
  return out;
}

}  // namespace reslab
