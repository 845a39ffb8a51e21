#include "cnldoc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "cnldoc/workbench.hpp"

namespace cnldoc {

namespace {

// Shape of a mid-sized code base: classes and methods per fact.
constexpr double kClassesPerFact = 148.0 / 23342.0;
constexpr double kMethodsPerFact = 1902.0 / 23342.0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

SyntheticProject synthesize_project(std::size_t facts, std::uint64_t seed) {
  if (facts < 200) throw Error("bench needs at least 200 facts");
  SyntheticProject p;
  std::mt19937_64 rng(seed);
  std::size_t classes = std::max<std::size_t>(4, std::lround(facts * kClassesPerFact));
  std::size_t methods = std::max<std::size_t>(2 * classes, std::lround(facts * kMethodsPerFact));
  std::size_t components = std::clamp<std::size_t>(classes / 20, 2, 8);

  std::vector<std::string> class_names(classes);
  std::vector<std::size_t> class_comp(classes);
  std::vector<std::string> method_names;
  std::vector<std::size_t> method_comp;
  std::string entities, relations;
  std::size_t count = 0;
  auto entity = [&](const char* kind, const std::string& name) {
    entities += std::string("E|") + kind + "|" + name + "\n";
    ++count;
  };
  auto relation = [&](const char* kind, const std::string& a, const std::string& b) {
    relations += std::string("R|") + kind + "|" + a + "|" + b + "\n";
    ++count;
  };
  for (std::size_t k = 0; k < components; ++k) entity("package", "Pkg" + std::to_string(k));
  std::vector<std::vector<std::size_t>> members(components);
  for (std::size_t i = 0; i < classes; ++i) {
    std::size_t k = i % components;
    class_comp[i] = k;
    class_names[i] = i < components ? "Root" + std::to_string(k) : "Comp" + std::to_string(k) + "Class" + std::to_string(i);
    entity("class", class_names[i]);
    relation("in-package", class_names[i], "Pkg" + std::to_string(k));
    if (!members[k].empty()) {
      // Parent among the earlier classes of the component: a tree under RootK.
      std::size_t parent = members[k][std::uniform_int_distribution<std::size_t>(0, members[k].size() - 1)(rng)];
      relation("direct-subclass-of", class_names[i], class_names[parent]);
    }
    members[k].push_back(i);
  }
  for (std::size_t m = 0; m < methods; ++m) {
    std::size_t c = m % classes;
    method_names.push_back(class_names[c] + "-m" + std::to_string(m));
    method_comp.push_back(class_comp[c]);
    entity("method", method_names.back());
    relation("defines", class_names[c], method_names.back());
  }
  if (count > facts) throw Error("bench: " + std::to_string(facts) + " facts are too few for the code shape");

  // Invocations fill the remainder; Comp0 never calls into Comp1.
  std::set<std::pair<std::size_t, std::size_t>> calls;
  auto allowed = [&](std::size_t a, std::size_t b) { return a != b && !(method_comp[a] == 0 && method_comp[b] == 1); };
  std::uniform_int_distribution<std::size_t> pick(0, methods - 1);
  while (count < facts) {
    std::size_t a = pick(rng), b = pick(rng);
    if (!allowed(a, b) || !calls.insert({a, b}).second) continue;
    relation("invokes", method_names[a], method_names[b]);
  }
  p.dump = entities + relations;
  p.classes = classes;
  p.methods = methods;
  p.components = components;
  p.facts = count;

  std::string kb = "@prelude\n@lexicon noun | component | components\n";
  for (std::size_t k = 0; k < components; ++k) kb += "@lexicon proper-name | Comp" + std::to_string(k) + "\n";
  kb += "@dump project.dump\n\n";
  for (std::size_t k = 0; k < components; ++k) {
    std::string comp = "Comp" + std::to_string(k);
    kb += comp + " is a component.\n";
    kb += "Root" + std::to_string(k) + " belongs to " + comp + ".\n";
    kb += "Every subclass of Root" + std::to_string(k) + " belongs to " + comp + ".\n";
  }
  kb += "Everything belongs to at most 1 component.\n";
  kb += "No method of Comp0 uses Comp1.\n";
  p.kb = kb;

  for (std::size_t a = 0; a < methods && p.consistent_fact.empty(); ++a) {
    for (std::size_t b = 0; b < methods; ++b) {
      if (method_comp[a] == 0 && method_comp[b] == 0 && a != b && !calls.count({a, b})) {
        p.consistent_fact = method_names[a] + " invokes " + method_names[b] + ".";
        break;
      }
    }
  }
  // Method 0 is in Comp0, method 1 in Comp1.
  p.violating_fact = method_names[0] + " invokes " + method_names[1] + ".";
  return p;
}

BenchResult run_bench(std::size_t facts, const std::filesystem::path& workdir, std::uint64_t seed) {
  SyntheticProject p = synthesize_project(facts, seed);
  std::filesystem::create_directories(workdir);
  write(workdir / "project.dump", p.dump);
  write(workdir / "project.cnl", p.kb);

  BenchResult r;
  r.classes = p.classes;
  r.methods = p.methods;
  r.facts = p.facts;

  auto t0 = std::chrono::steady_clock::now();
  Session session = Session::open_kb(workdir / "project.cnl");
  r.load = seconds_since(t0);
  r.consistent = session.startup().consistent();

  t0 = std::chrono::steady_clock::now();
  const KnowledgeBase& base = session.base();
  r.consistent = r.consistent && base.recheck().consistent();
  r.check = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.added = session.add(p.consistent_fact, false).status == AddOutcome::Status::Accepted;
  r.add = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  r.detected = session.add(p.violating_fact, false).status == AddOutcome::Status::Rejected;
  r.detect = seconds_since(t0);
  return r;
}

bool within_budget(const BenchResult& r, const BenchBudget& budget) {
  return r.add <= budget.add && r.check <= budget.check && r.load <= budget.load;
}

std::string format_bench_table(const BenchResult& r, const std::string& name) {
  char row[256];
  std::string out =
      "Software | #classes | #methods | #facts | load facts | add fact | check for consist. | detect inconsist.\n";
  std::snprintf(row, sizeof row, "%s | %zu | %zu | %zu | %.2f | %.3f | %.3f | %.3f\n", name.c_str(), r.classes,
                r.methods, r.facts, r.load, r.add, r.check, r.detect);
  out += row;
  out += "(the last four columns are seconds)\n";
  return out;
}

}  // namespace cnldoc
