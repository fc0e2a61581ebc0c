#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "reslab/parallel.hpp"
#include "reslab/runs.hpp"

using namespace reslab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("reslab_test_runs_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

EnsembleConfig small_config(const fs::path& root) {
  EnsembleConfig cfg;
  cfg.name = "small";
  cfg.dist = {2.0};
  cfg.L = 12;
  cfg.precision_bits = 128;
  cfg.n_samples = 10;
  cfg.root = root;
  return cfg;
}

}  // namespace

TEST_CASE("ensemble resume recomputes only missing seeds") {
  const fs::path root = fresh_dir("resume");
  const EnsembleConfig cfg = small_config(root);
  const EnsembleResult first = run_ensemble(cfg);
  CHECK(first.computed == 10);
  CHECK(first.failed == 0);
  const std::string csv5 = slurp(cfg.dir() / "5" / "resonances.csv");
  for (int s : {2, 5, 7}) fs::remove_all(cfg.dir() / std::to_string(s));
  const EnsembleResult second = run_ensemble(cfg);
  CHECK(second.computed == 3);
  CHECK(second.reused == 7);
  CHECK(slurp(cfg.dir() / "5" / "resonances.csv") == csv5);
  for (std::size_t i = 0; i < 10; ++i) {
    REQUIRE(first.seeds[i].resonances.size() == second.seeds[i].resonances.size());
    for (std::size_t k = 0; k < first.seeds[i].resonances.size(); ++k) {
      CHECK(first.seeds[i].resonances[k].z == second.seeds[i].resonances[k].z);
    }
  }
  const RunManifest m = read_manifest(cfg.dir());
  CHECK(m.command == "ensemble");
  CHECK(m.precision_bits == 128);
  CHECK(m.outputs.size() == 30);
  fs::remove_all(root);
}

TEST_CASE("conflicting precision on resume is an error") {
  const fs::path root = fresh_dir("conflict");
  EnsembleConfig cfg = small_config(root);
  cfg.n_samples = 2;
  run_ensemble(cfg);
  cfg.precision_bits = 256;
  CHECK_THROWS_AS(run_ensemble(cfg), ConfigConflictError);
  fs::remove(cfg.dir() / "manifest.json");
  CHECK_THROWS_AS(run_ensemble(cfg), ConfigConflictError);
  fs::remove_all(root);
}

TEST_CASE("cache for another potential is an error, a corrupt cache is recomputed") {
  const fs::path root = fresh_dir("cache");
  const Potential a = sample_random({2.0}, 8, 1), b = sample_random({2.0}, 8, 2);
  const CachedSolution s = solve_box_cached(a, 128, root);
  CHECK_FALSE(s.from_cache);
  CHECK(solve_box_cached(a, 128, root).from_cache);
  CHECK_THROWS_AS(solve_box_cached(b, 128, root), ConfigConflictError);
  std::ofstream(root / "roots.json") << "{ not json";
  const CachedSolution r = solve_box_cached(a, 128, root);
  CHECK_FALSE(r.from_cache);
  CHECK(r.resonances.size() == s.resonances.size());
  fs::remove_all(root);
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.command = "resonances";
  m.config = {{"L", 40}, {"kappa", 0.3}};
  m.seed = 17;
  m.precision_bits = 512;
  m.started = utc_timestamp();
  m.finished = m.started;
  m.outputs = {"a.csv", "b.json"};
  const RunManifest n = manifest_from_json(to_json(m));
  CHECK(n.command == m.command);
  CHECK(n.config == m.config);
  CHECK(n.seed == 17);
  CHECK(n.code_version == kCodeVersion);
  CHECK(n.precision_bits == 512);
  CHECK(n.outputs == m.outputs);
  CHECK(m.started.size() == 20);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK(worker_count() >= 1);
}
