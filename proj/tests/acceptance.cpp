/// Prints one PASS/FAIL line per acceptance criterion and writes the full
/// report next to the cache. Exit status is non-zero when any criterion fails.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "reslab/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"reslab acceptance checks"};
  reslab::VerifyOptions opts;
  std::vector<int> only;
  bool quiet = false;
  app.add_option("--cache", opts.cache_dir, "Cache directory for box solutions");
  app.add_option("--samples", opts.samples, "Ensemble size for random-case criteria")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, reslab::kCriterionCount));
  app.add_flag("--quiet", quiet, "No progress messages");
  CLI11_PARSE(app, argc, argv);
  if (!quiet) opts.log = &std::clog;
  if (only.empty()) {
    for (int id = 1; id <= reslab::kCriterionCount; ++id) only.push_back(id);
  }

  nlohmann::json report = nlohmann::json::array();
  std::vector<std::string> lines;
  int failed = 0;
  for (int id : only) {
    if (!quiet) std::clog << "C" << id << ": " << reslab::criterion_titles()[static_cast<std::size_t>(id - 1)] << std::endl;
    const reslab::CriterionResult r = reslab::verify_criterion(id, opts);
    lines.push_back(reslab::format_line(r));
    std::cout << lines.back() << std::endl;
    report.push_back(reslab::to_json(r));
    failed += !r.pass;
  }
  std::filesystem::create_directories(opts.cache_dir);
  std::ofstream(opts.cache_dir / "acceptance.json") << report.dump(2) << "\n";
  std::cout << "\nsummary:\n";
  for (const auto& l : lines) std::cout << l << "\n";
  std::cout << (only.size() - static_cast<std::size_t>(failed)) << "/" << only.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
