#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace cnldoc {

/// A generated project: a dump with exactly `facts` ingested facts, and a kb
/// file that documents its component structure.
struct SyntheticProject {
  std::string dump;
  std::string kb;  // refers to the dump as "project.dump"
  std::size_t classes = 0;
  std::size_t methods = 0;
  std::size_t components = 0;
  std::size_t facts = 0;
  std::string consistent_fact;  // new, violates nothing
  std::string violating_fact;   // new, violates "No method of Comp0 uses Comp1."
};

SyntheticProject synthesize_project(std::size_t facts, std::uint64_t seed = 7);

struct BenchResult {
  std::size_t classes = 0;
  std::size_t methods = 0;
  std::size_t facts = 0;
  double load = 0;    // seconds
  double add = 0;
  double check = 0;
  double detect = 0;
  bool consistent = false;  // the loaded base
  bool added = false;       // the consistent fact was accepted
  bool detected = false;    // the violating fact was rejected
};

/// Writes the project to `workdir` and times the four operations.
BenchResult run_bench(std::size_t facts, const std::filesystem::path& workdir, std::uint64_t seed = 7);

struct BenchBudget {
  double add = 2.0;
  double check = 10.0;
  double load = 120.0;
};

bool within_budget(const BenchResult& r, const BenchBudget& budget = {});

/// Header and one row in the columns of the classic benchmark table.
std::string format_bench_table(const BenchResult& r, const std::string& name);

}  // namespace cnldoc
