#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cnldoc/engine.hpp"
#include "cnldoc/lexicon.hpp"
#include "cnldoc/logic.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(CNLDOC_FIXTURES); }

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Non-comment, non-blank lines.
inline std::vector<std::string> sentences(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(read_text(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("cnldoc-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  /// Copies a fixture directory's files into this directory.
  void copy_from(const fs::path& dir) const {
    for (const auto& e : fs::directory_iterator(dir)) {
      fs::copy(e.path(), path_ / e.path().filename(), fs::copy_options::recursive);
    }
  }

 private:
  fs::path path_;
};

// ----------------------------------------------------------- naive oracle
// Straightforward definitions used to cross-check the engine: whole-program
// iteration to a fixpoint and exhaustive enumeration of variable bindings.

using AtomSet = std::set<cnldoc::Atom>;
using Assignment = std::map<std::string, std::string>;

inline bool bind_term(const cnldoc::Term& t, const std::string& value, Assignment& a) {
  if (!t.is_variable()) return t.name == value;
  auto it = a.find(t.name);
  if (it == a.end()) {
    a[t.name] = value;
    return true;
  }
  return it->second == value;
}

using FactIndex = std::map<std::string, std::vector<cnldoc::Atom>>;

inline FactIndex index_by_predicate(const AtomSet& facts) {
  FactIndex out;
  for (const auto& f : facts) out[f.predicate].push_back(f);
  return out;
}

/// Every assignment that makes all of `body` true, by trying each fact of
/// the atom's predicate for each atom in turn.
inline void match_all(const std::vector<cnldoc::Atom>& body, std::size_t i, const FactIndex& facts, Assignment a,
                      std::vector<Assignment>& out) {
  if (i == body.size()) {
    out.push_back(a);
    return;
  }
  const cnldoc::Atom& pattern = body[i];
  auto it = facts.find(pattern.predicate);
  if (it == facts.end()) return;
  for (const cnldoc::Atom& f : it->second) {
    if (f.args.size() != pattern.args.size()) continue;
    Assignment b = a;
    bool ok = true;
    for (std::size_t k = 0; k < f.args.size() && ok; ++k) ok = bind_term(pattern.args[k], f.args[k].name, b);
    if (ok) match_all(body, i + 1, facts, b, out);
  }
}

inline cnldoc::Atom instantiate(const cnldoc::Atom& atom, const Assignment& a) {
  cnldoc::Atom out = atom;
  for (auto& t : out.args) {
    if (t.is_variable()) t = cnldoc::Term::constant(a.at(t.name));
  }
  return out;
}

/// Applies every rule to the whole set until nothing changes.
inline AtomSet naive_closure(const std::vector<cnldoc::Atom>& facts, const std::vector<cnldoc::Rule>& rules) {
  AtomSet all(facts.begin(), facts.end());
  bool changed = true;
  while (changed) {
    changed = false;
    FactIndex index = index_by_predicate(all);
    for (const auto& r : rules) {
      std::vector<Assignment> matches;
      match_all(r.body, 0, index, {}, matches);
      for (const auto& m : matches) changed |= all.insert(instantiate(r.head, m)).second;
    }
  }
  return all;
}

inline std::set<std::string> constants_of(const AtomSet& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms) {
    for (const auto& t : a.args) out.insert(t.name);
  }
  return out;
}

/// Answers by enumerating every assignment of constants to the query's
/// variables (not by joining).
inline std::vector<std::string> enumerate_answers(const AtomSet& closure, const cnldoc::Query& q) {
  std::set<std::string> domain = constants_of(closure);
  std::vector<std::string> vars;
  auto note = [&](const cnldoc::Term& t) {
    if (t.is_variable() && std::find(vars.begin(), vars.end(), t.name) == vars.end()) vars.push_back(t.name);
  };
  note(q.answer);
  for (const auto& a : q.body) {
    for (const auto& t : a.args) note(t);
  }
  std::vector<std::string> dom(domain.begin(), domain.end());
  std::set<std::string> answers;
  if (dom.empty()) return {};
  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = dom[idx[i]];
    bool ok = true;
    for (const auto& atom : q.body) {
      if (!closure.count(instantiate(atom, a))) {
        ok = false;
        break;
      }
    }
    if (ok && q.count) {
      const std::string& subject = a.at(q.answer.name);
      std::size_t n = 0;
      for (const auto& y : dom) {
        cnldoc::Atom rel{q.count->relation,
                         q.count->inverse
                             ? std::vector<cnldoc::Term>{cnldoc::Term::constant(y), cnldoc::Term::constant(subject)}
                             : std::vector<cnldoc::Term>{cnldoc::Term::constant(subject), cnldoc::Term::constant(y)}};
        bool filtered = q.count->filter.empty() ||
                        closure.count(cnldoc::Atom{q.count->filter, {cnldoc::Term::constant(y)}});
        if (closure.count(rel) && filtered) ++n;
      }
      ok = cnldoc::compare_count(q.count->comparator, n, q.count->bound);
    }
    if (ok) answers.insert(a.at(q.answer.name));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == dom.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return {answers.begin(), answers.end()};
}

// ------------------------------------------------------- random instances

struct RandomInstance {
  std::vector<cnldoc::Atom> facts;
  std::vector<cnldoc::Rule> rules;
  std::vector<std::pair<std::string, std::size_t>> predicates;  // name, arity
  std::vector<std::string> constants;
};

inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_constants = 30, std::size_t max_rules = 15,
                                      std::size_t max_facts = 80) {
  auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  RandomInstance inst;
  std::size_t n_const = uniform(3, max_constants);
  for (std::size_t i = 0; i < n_const; ++i) inst.constants.push_back("c" + std::to_string(i));
  std::size_t n_pred = uniform(2, 6);
  for (std::size_t i = 0; i < n_pred; ++i) inst.predicates.push_back({"p" + std::to_string(i), uniform(1, 2)});
  auto term_const = [&] { return cnldoc::Term::constant(inst.constants[uniform(0, n_const - 1)]); };
  auto random_pred = [&]() -> const std::pair<std::string, std::size_t>& { return inst.predicates[uniform(0, n_pred - 1)]; };

  std::set<cnldoc::Atom> facts;
  std::size_t capacity = 0;
  for (const auto& [name, arity] : inst.predicates) capacity += arity == 1 ? n_const : n_const * n_const;
  std::size_t n_facts = std::min(uniform(1, max_facts), capacity);
  while (facts.size() < n_facts) {
    const auto& [name, arity] = random_pred();
    cnldoc::Atom a{name, {}};
    for (std::size_t k = 0; k < arity; ++k) a.args.push_back(term_const());
    facts.insert(a);
  }
  inst.facts.assign(facts.begin(), facts.end());

  static const char* kVars[] = {"X", "Y", "Z"};
  std::size_t n_rules = uniform(0, max_rules);
  for (std::size_t r = 0; r < n_rules; ++r) {
    cnldoc::Rule rule;
    std::size_t body = uniform(1, 3);
    std::set<std::string> seen;
    for (std::size_t b = 0; b < body; ++b) {
      const auto& [name, arity] = random_pred();
      cnldoc::Atom a{name, {}};
      for (std::size_t k = 0; k < arity; ++k) {
        if (uniform(0, 9) == 0) {
          a.args.push_back(term_const());
        } else {
          std::string v = kVars[uniform(0, 2)];
          seen.insert(v);
          a.args.push_back(cnldoc::Term::variable(v));
        }
      }
      rule.body.push_back(a);
    }
    // Range-restricted head: its variables come from the body.
    std::vector<std::string> vars(seen.begin(), seen.end());
    const auto& [name, arity] = random_pred();
    rule.head.predicate = name;
    for (std::size_t k = 0; k < arity; ++k) {
      if (vars.empty() || uniform(0, 9) == 0) {
        rule.head.args.push_back(term_const());
      } else {
        rule.head.args.push_back(cnldoc::Term::variable(vars[uniform(0, vars.size() - 1)]));
      }
    }
    inst.rules.push_back(rule);
  }
  return inst;
}

inline cnldoc::Query random_query(std::mt19937_64& rng, const RandomInstance& inst, std::size_t atoms = 3) {
  auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  static const char* kVars[] = {"X", "Y", "Z"};
  cnldoc::Query q;
  q.answer = cnldoc::Term::variable("X");
  bool has_answer = false;
  for (std::size_t i = 0; i < atoms; ++i) {
    const auto& [name, arity] = inst.predicates[uniform(0, inst.predicates.size() - 1)];
    cnldoc::Atom a{name, {}};
    for (std::size_t k = 0; k < arity; ++k) {
      if (uniform(0, 7) == 0) {
        a.args.push_back(cnldoc::Term::constant(inst.constants[uniform(0, inst.constants.size() - 1)]));
      } else {
        std::string v = kVars[uniform(0, 2)];
        has_answer |= v == "X";
        a.args.push_back(cnldoc::Term::variable(v));
      }
    }
    q.body.push_back(a);
  }
  if (!has_answer) {
    // Make sure the answer variable occurs in the body.
    for (auto& a : q.body) {
      a.args[0] = cnldoc::Term::variable("X");
      break;
    }
  }
  return q;
}

inline std::vector<cnldoc::Statement> as_statements(const RandomInstance& inst) {
  std::vector<cnldoc::Statement> out;
  for (const auto& f : inst.facts) out.push_back({cnldoc::Fact{f}});
  for (const auto& r : inst.rules) out.push_back({r});
  return out;
}

/// One entry per statement, in order.
inline void load(cnldoc::KnowledgeBase& kb, const std::vector<cnldoc::Statement>& statements) {
  for (const auto& s : statements) kb.add({s}, cnldoc::serialize(s), cnldoc::Provenance::interactive());
}

}  // namespace testing_support
