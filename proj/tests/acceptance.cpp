// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <filesystem>
#include <iostream>

#include <bubble_lab/cli.hpp>

int main() {
  namespace fs = std::filesystem;
  bubble_lab::cli::Common common;
  common.out_dir = (fs::temp_directory_path() / "bubble_lab_acceptance").string();
  fs::create_directories(common.out_dir);
  auto results = bubble_lab::cli::run_report(common, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  fs::remove_all(common.out_dir);
  return failed == 0 ? 0 : 1;
}
