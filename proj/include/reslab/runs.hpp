#pragma once

/// Persistent, resumable box solutions and ensembles.
/// Layout: <root>/<name>/<seed>/{potential.json, roots.json, resonances.csv}
/// plus <root>/<name>/manifest.json.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reslab/resonances.hpp"

namespace reslab {

inline constexpr const char* kCodeVersion = "reslab 0.1.0";

/// Resume found a cached result computed under a different configuration.
class ConfigConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CachedSolution {
  std::vector<Resonance> resonances;
  mp::Bits precision = 0;
  bool from_cache = false;
};

/// solve_box with a cache in dir: roots.json holds the RootSet, the requested
/// precision and the potential digest. A cache written for another potential
/// or another requested precision raises ConfigConflictError; an unreadable
/// cache is recomputed.
CachedSolution solve_box_cached(const Potential& v, mp::Bits min_bits, const std::filesystem::path& dir);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string code_version = kCodeVersion;
  long precision_bits = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
};
nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
std::string utc_timestamp();

/// Writes the manifest as <dir>/manifest.json.
void write_manifest(const RunManifest& m, const std::filesystem::path& dir);
RunManifest read_manifest(const std::filesystem::path& dir);

struct EnsembleConfig {
  std::string name = "ensemble";
  UniformDist dist;
  std::uint64_t stream = 0;
  bool reversed = false;
  int L = 100;
  mp::Bits precision_bits = 512;
  std::uint64_t first_seed = 0;
  int n_samples = 200;
  std::filesystem::path root = "runs";

  nlohmann::json to_json() const;
  /// Inverse of to_json; root is not part of the snapshot.
  static EnsembleConfig from_json(const nlohmann::json& j, std::filesystem::path root);
  std::filesystem::path dir() const { return root / name; }
  Potential potential(std::uint64_t seed) const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<Resonance> resonances;
  bool from_cache = false;
  bool ok = false;
  std::string error;
};

struct EnsembleResult {
  std::vector<SeedResult> seeds;
  int computed = 0;
  int reused = 0;
  int failed = 0;
};

/// Per-seed solutions on worker_count() threads; seeds with a valid cache are
/// skipped. Failures are isolated per seed. Results are ordered by seed.
/// A manifest listing every output is written at the end.
EnsembleResult run_ensemble(const EnsembleConfig& cfg,
                            const std::function<void(const SeedResult&)>& progress = {});

}  // namespace reslab
