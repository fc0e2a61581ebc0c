#pragma once

/// End-to-end acceptance checks. Each criterion returns a pass/fail verdict
/// with the numbers behind it; expensive box solutions are cached under
/// cache_dir so reruns only evaluate.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "reslab/spectral.hpp"

namespace reslab {

inline constexpr int kCriterionCount = 11;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// One-line numeric summary.
  std::string summary;
  nlohmann::json details;
  double seconds = 0.0;
};

nlohmann::json to_json(const CriterionResult& r);
/// "C<id> PASS|FAIL <title>: <summary> (<seconds> s)".
std::string format_line(const CriterionResult& r);

struct VerifyOptions {
  std::filesystem::path cache_dir = "runs/verify";
  /// Ensemble size for the random-case criteria.
  int samples = 200;
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;
};

/// Criterion titles, index id - 1.
const std::vector<std::string>& criterion_titles();

/// Runs criterion id in [1, kCriterionCount]. Errors inside a criterion are
/// reported as a failing result carrying the message.
CriterionResult verify_criterion(int id, const VerifyOptions& opts);

/// Empirical table for uniform[0, W] on a grid of step 0.01 covering the
/// spectrum; cached as CSV under cache_dir/tables.
SpectralTable uniform_table(double W, const VerifyOptions& opts);

}  // namespace reslab
