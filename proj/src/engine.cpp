#include "cnldoc/engine.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace cnldoc {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kViolationCap = 1000;

struct GroundAtom {
  std::uint32_t pred;
  std::uint32_t a;
  std::uint32_t b;  // kNone for unary atoms
  bool operator==(const GroundAtom&) const = default;
};

struct GroundAtomHash {
  std::size_t operator()(const GroundAtom& g) const {
    std::uint64_t h = (std::uint64_t{g.pred} << 40) ^ (std::uint64_t{g.a} << 20) ^ g.b;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

struct Justification {
  EntryId asserted = kNone;
  std::uint32_t rule = kNone;
  std::vector<std::uint32_t> premises;
};

struct Relation {
  std::vector<std::uint32_t> all;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_first;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_second;
};

// A term after interning: either a variable slot or a constant id.
struct CTerm {
  bool var = false;
  std::uint32_t id = kNone;
};

struct CAtom {
  std::uint32_t pred = kNone;
  std::uint8_t arity = 1;
  CTerm args[2];
};

struct CBody {
  std::vector<CAtom> atoms;
  std::vector<std::string> var_names;
  bool satisfiable = true;  // false when a constant or predicate is unknown
};

struct CRule {
  EntryId entry;
  std::size_t stmt;
  CBody body;
  CAtom head;
};

struct CDenial {
  EntryId entry;
  std::size_t stmt;
  CBody body;
};

struct CCount {
  std::uint32_t relation = kNone;
  std::uint32_t filter = kNone;
  bool inverse = false;
  Comparator comparator = Comparator::AtMost;
  std::size_t bound = 0;
};

struct CCard {
  EntryId entry;
  std::size_t stmt;
  std::string subject_name;
  bool subject_is_constant = false;
  std::uint32_t subject_constant = kNone;
  CBody scope;  // subject is variable slot 0
  CCount count;
};

// Per body position: admissible atom-id range [lo, hi).
struct Range {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
};

int provenance_rank(Provenance::Kind k) { return static_cast<int>(k); }

}  // namespace

std::string_view Provenance::kind_name() const {
  switch (kind) {
    case Kind::Prelude: return "prelude";
    case Kind::Ingested: return "ingested";
    case Kind::Documented: return "documented";
    case Kind::Interactive: return "interactive";
  }
  return "?";
}

std::string Provenance::to_string() const {
  switch (kind) {
    case Kind::Prelude: return line ? file + ":" + std::to_string(line) : file;
    case Kind::Ingested: return "ingested " + file;
    case Kind::Documented: return file + ":" + std::to_string(line);
    case Kind::Interactive: return "interactive";
  }
  return "?";
}

std::string Violation::key() const {
  std::string k = std::to_string(entry) + "#" + std::to_string(statement);
  for (const auto& b : bindings) k += "|" + b.variable + "=" + b.value;
  return k;
}

struct KnowledgeBase::Impl {
  // Symbols.
  std::vector<std::string> constants;
  std::unordered_map<std::string, std::uint32_t> constant_ids;
  std::vector<std::string> predicates;
  std::vector<std::uint8_t> arities;
  std::unordered_map<std::string, std::uint32_t> predicate_ids;

  // Asserted statements.
  std::map<EntryId, Entry> entries;
  std::unordered_map<std::string, EntryId> by_normal_form;
  EntryId next_entry = 1;

  // Compiled statements.
  std::vector<CRule> rules;
  std::vector<CDenial> denials;
  std::vector<CCard> cards;

  // Closure.
  std::vector<GroundAtom> atoms;
  std::vector<Justification> just;
  std::unordered_map<GroundAtom, std::uint32_t, GroundAtomHash> atom_ids;
  std::vector<Relation> relations;  // by predicate id

  std::optional<ConsistencyReport> report;

  // ---------------------------------------------------------------- symbols

  std::uint32_t intern_constant(const std::string& name) {
    auto [it, inserted] = constant_ids.emplace(name, static_cast<std::uint32_t>(constants.size()));
    if (inserted) constants.push_back(name);
    return it->second;
  }

  std::uint32_t intern_predicate(const std::string& name, std::size_t arity) {
    auto [it, inserted] = predicate_ids.emplace(name, static_cast<std::uint32_t>(predicates.size()));
    if (inserted) {
      predicates.push_back(name);
      arities.push_back(static_cast<std::uint8_t>(arity));
      relations.emplace_back();
    } else if (arities[it->second] != arity) {
      throw Error("predicate '" + name + "' used with arity " + std::to_string(arity) + " and " +
                  std::to_string(arities[it->second]));
    }
    return it->second;
  }

  std::optional<std::uint32_t> find_constant(const std::string& name) const {
    auto it = constant_ids.find(name);
    if (it == constant_ids.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint32_t> find_predicate(const std::string& name) const {
    auto it = predicate_ids.find(name);
    if (it == predicate_ids.end()) return std::nullopt;
    return it->second;
  }

  // --------------------------------------------------------------- compiling

  // Symbol resolution for compiling: interning (statements being added) or
  // lookup only (queries, which must not touch the base).
  struct Symbols {
    Impl* writable = nullptr;
    const Impl* base = nullptr;

    std::optional<std::uint32_t> predicate(const std::string& name, std::size_t arity) const {
      if (writable) return writable->intern_predicate(name, arity);
      return base->find_predicate(name);
    }
    std::optional<std::uint32_t> constant(const std::string& name) const {
      if (writable) return writable->intern_constant(name);
      return base->find_constant(name);
    }
  };
  Symbols interning() { return {this, this}; }
  Symbols lookup() const { return {nullptr, this}; }

  // Unknown symbols (lookup only) make the atom unsatisfiable.
  static CAtom compile_atom(const Atom& a, std::vector<std::string>& vars, const Symbols& sym, bool& ok) {
    CAtom c;
    c.arity = static_cast<std::uint8_t>(a.args.size());
    if (auto p = sym.predicate(a.predicate, a.args.size())) {
      c.pred = *p;
    } else {
      ok = false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const Term& t = a.args[i];
      if (t.is_variable()) {
        auto it = std::find(vars.begin(), vars.end(), t.name);
        c.args[i] = {true, static_cast<std::uint32_t>(it - vars.begin())};
        if (it == vars.end()) vars.push_back(t.name);
      } else if (auto k = sym.constant(t.name)) {
        c.args[i] = {false, *k};
      } else {
        ok = false;
      }
    }
    return c;
  }

  static CBody compile_body(const std::vector<Atom>& atoms, std::vector<std::string> vars, const Symbols& sym) {
    CBody body;
    for (const auto& a : atoms) body.atoms.push_back(compile_atom(a, vars, sym, body.satisfiable));
    body.var_names = std::move(vars);
    return body;
  }

  static CCount compile_count(const Counting& c, const Symbols& sym) {
    CCount out;
    out.inverse = c.inverse;
    out.comparator = c.comparator;
    out.bound = c.bound;
    out.relation = sym.predicate(c.relation, 2).value_or(kNone);
    out.filter = sym.predicate(c.filter, 1).value_or(kNone);
    return out;
  }

  void compile_entry(const Entry& e, std::vector<std::pair<GroundAtom, EntryId>>& facts) {
    for (std::size_t i = 0; i < e.statements.size(); ++i) {
      const auto& body = e.statements[i].body;
      if (const auto* f = std::get_if<Fact>(&body)) {
        std::vector<std::string> none;
        bool ok = true;
        CAtom c = compile_atom(f->atom, none, interning(), ok);
        facts.push_back({{c.pred, c.args[0].id, c.arity == 2 ? c.args[1].id : kNone}, e.id});
      } else if (const auto* r = std::get_if<Rule>(&body)) {
        CRule cr{e.id, i, compile_body(r->body, {}, interning()), {}};
        bool ok = true;
        cr.head = compile_atom(r->head, cr.body.var_names, interning(), ok);
        rules.push_back(std::move(cr));
      } else if (const auto* d = std::get_if<Denial>(&body)) {
        denials.push_back({e.id, i, compile_body(d->body, {}, interning())});
      } else if (const auto* k = std::get_if<CardinalityCheck>(&body)) {
        CCard cc{e.id, i, k->subject.name, !k->subject.is_variable(), kNone, {}, compile_count(k->count, interning())};
        if (cc.subject_is_constant) {
          cc.subject_constant = intern_constant(k->subject.name);
        } else {
          cc.scope = compile_body(k->scope_atoms, {k->subject.name}, interning());
        }
        cards.push_back(std::move(cc));
      }
    }
  }

  // ----------------------------------------------------------------- closure

  std::uint32_t find_atom(const GroundAtom& g) const {
    auto it = atom_ids.find(g);
    return it == atom_ids.end() ? kNone : it->second;
  }

  // Returns true when the atom is new.
  bool insert_atom(const GroundAtom& g, Justification j) {
    auto [it, inserted] = atom_ids.emplace(g, static_cast<std::uint32_t>(atoms.size()));
    if (!inserted) return false;
    std::uint32_t id = it->second;
    atoms.push_back(g);
    just.push_back(std::move(j));
    Relation& rel = relations[g.pred];
    rel.all.push_back(id);
    rel.by_first[g.a].push_back(id);
    if (g.b != kNone) rel.by_second[g.b].push_back(id);
    return true;
  }

  void truncate_atoms(std::size_t size) {
    while (atoms.size() > size) {
      std::uint32_t id = static_cast<std::uint32_t>(atoms.size() - 1);
      const GroundAtom g = atoms.back();
      Relation& rel = relations[g.pred];
      rel.all.pop_back();
      auto pop = [&](auto& index, std::uint32_t key) {
        auto it = index.find(key);
        it->second.pop_back();
        if (it->second.empty()) index.erase(it);
      };
      pop(rel.by_first, g.a);
      if (g.b != kNone) pop(rel.by_second, g.b);
      atom_ids.erase(g);
      atoms.pop_back();
      just.pop_back();
      (void)id;
    }
  }

  void clear_closure() {
    atoms.clear();
    just.clear();
    atom_ids.clear();
    for (auto& r : relations) r = Relation{};
  }

  // Candidate atom ids for `a` under `bind`, restricted to `r`.
  std::pair<const std::uint32_t*, const std::uint32_t*> candidates(const CAtom& a,
                                                                  const std::vector<std::uint32_t>& bind,
                                                                  Range r) const {
    static const std::vector<std::uint32_t> empty;
    const Relation& rel = relations[a.pred];
    const std::vector<std::uint32_t>* list = &rel.all;
    auto value = [&](const CTerm& t) { return t.var ? bind[t.id] : t.id; };
    std::uint32_t first = value(a.args[0]);
    std::uint32_t second = a.arity == 2 ? value(a.args[1]) : kNone;
    if (first != kNone) {
      auto it = rel.by_first.find(first);
      list = it == rel.by_first.end() ? &empty : &it->second;
    } else if (second != kNone) {
      auto it = rel.by_second.find(second);
      list = it == rel.by_second.end() ? &empty : &it->second;
    }
    const std::uint32_t* b = std::lower_bound(list->data(), list->data() + list->size(), r.lo);
    const std::uint32_t* e = std::lower_bound(b, list->data() + list->size(), r.hi);
    return {b, e};
  }

  using JoinCallback = std::function<bool(const std::vector<std::uint32_t>& bind,
                                          const std::vector<std::uint32_t>& premises)>;

  // Backtracking join; each step picks the pending atom with the fewest
  // candidates. The callback returns false to stop.
  bool join(const CBody& body, const std::vector<Range>& ranges, std::vector<std::uint32_t>& bind,
            std::vector<std::uint32_t>& premises, std::vector<bool>& done, std::size_t remaining,
            const JoinCallback& cb) const {
    if (remaining == 0) return cb(bind, premises);
    std::size_t best = kNone;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < body.atoms.size(); ++i) {
      if (done[i]) continue;
      auto [b, e] = candidates(body.atoms[i], bind, ranges[i]);
      std::size_t n = static_cast<std::size_t>(e - b);
      if (n < best_size) {
        best_size = n;
        best = i;
      }
    }
    if (best_size == 0) return true;
    const CAtom& a = body.atoms[best];
    auto [b, e] = candidates(a, bind, ranges[best]);
    done[best] = true;
    for (const std::uint32_t* p = b; p != e; ++p) {
      const GroundAtom& g = atoms[*p];
      std::uint32_t vals[2] = {g.a, g.b};
      std::uint32_t bound_here[2];
      std::size_t nbound = 0;
      bool match = true;
      for (std::size_t k = 0; k < a.arity && match; ++k) {
        const CTerm& t = a.args[k];
        if (!t.var) {
          match = t.id == vals[k];
        } else if (bind[t.id] == kNone) {
          bind[t.id] = vals[k];
          bound_here[nbound++] = t.id;
        } else {
          match = bind[t.id] == vals[k];
        }
      }
      if (match) {
        premises[best] = *p;
        if (!join(body, ranges, bind, premises, done, remaining - 1, cb)) {
          for (std::size_t k = 0; k < nbound; ++k) bind[bound_here[k]] = kNone;
          done[best] = false;
          return false;
        }
      }
      for (std::size_t k = 0; k < nbound; ++k) bind[bound_here[k]] = kNone;
    }
    done[best] = false;
    return true;
  }

  void run_join(const CBody& body, const std::vector<Range>& ranges, const JoinCallback& cb,
                std::vector<std::uint32_t> bind = {}) const {
    if (!body.satisfiable) return;
    bind.resize(body.var_names.size(), kNone);
    std::vector<std::uint32_t> premises(body.atoms.size(), kNone);
    std::vector<bool> done(body.atoms.size(), false);
    join(body, ranges, bind, premises, done, body.atoms.size(), cb);
  }

  GroundAtom instantiate(const CAtom& a, const std::vector<std::uint32_t>& bind) const {
    auto value = [&](const CTerm& t) { return t.var ? bind[t.id] : t.id; };
    return {a.pred, value(a.args[0]), a.arity == 2 ? value(a.args[1]) : kNone};
  }

  void fire(std::uint32_t rule_index, const std::vector<Range>& ranges) {
    const CRule& rule = rules[rule_index];
    std::vector<std::pair<GroundAtom, std::vector<std::uint32_t>>> produced;
    run_join(rule.body, ranges, [&](const auto& bind, const auto& premises) {
      GroundAtom g = instantiate(rule.head, bind);
      if (find_atom(g) == kNone) produced.push_back({g, premises});
      return true;
    });
    for (auto& [g, premises] : produced) insert_atom(g, {kNone, rule_index, std::move(premises)});
  }

  // Semi-naive rounds starting from the atoms with ids >= delta_begin.
  void semi_naive(std::uint32_t delta_begin) {
    auto delta_end = static_cast<std::uint32_t>(atoms.size());
    while (delta_begin < delta_end) {
      for (std::uint32_t r = 0; r < rules.size(); ++r) {
        const CRule& rule = rules[r];
        std::size_t n = rule.body.atoms.size();
        for (std::size_t i = 0; i < n; ++i) {
          // Skip when the delta holds nothing of this predicate.
          const Relation& rel = relations[rule.body.atoms[i].pred];
          if (rel.all.empty() || rel.all.back() < delta_begin) continue;
          std::vector<Range> ranges(n);
          for (std::size_t j = 0; j < n; ++j) {
            if (j < i) ranges[j] = {0, delta_begin};
            else if (j == i) ranges[j] = {delta_begin, delta_end};
            else ranges[j] = {0, delta_end};
          }
          fire(r, ranges);
        }
      }
      delta_begin = delta_end;
      delta_end = static_cast<std::uint32_t>(atoms.size());
    }
  }

  // Adds facts and new rules, then saturates incrementally.
  void extend(const std::vector<std::pair<GroundAtom, EntryId>>& facts, std::size_t first_new_rule,
              std::vector<std::pair<std::uint32_t, Justification>>* flips) {
    auto mark = static_cast<std::uint32_t>(atoms.size());
    for (const auto& [g, entry] : facts) {
      std::uint32_t id = find_atom(g);
      if (id == kNone) {
        insert_atom(g, {entry, kNone, {}});
      } else if (just[id].asserted == kNone) {
        if (flips) flips->push_back({id, just[id]});
        just[id] = {entry, kNone, {}};
      }
    }
    // New rules see everything once; afterwards all rules see only deltas.
    for (std::size_t r = first_new_rule; r < rules.size(); ++r) {
      std::vector<Range> ranges(rules[r].body.atoms.size(), Range{0, static_cast<std::uint32_t>(atoms.size())});
      fire(static_cast<std::uint32_t>(r), ranges);
    }
    semi_naive(mark);
  }

  void rebuild() {
    rules.clear();
    denials.clear();
    cards.clear();
    clear_closure();
    std::vector<std::pair<GroundAtom, EntryId>> facts;
    for (const auto& [id, e] : entries) compile_entry(e, facts);
    extend(facts, rules.size(), nullptr);
    report.reset();
  }

  // ----------------------------------------------------------------- support

  void collect_support(std::uint32_t atom, std::set<EntryId>& out, std::unordered_set<std::uint32_t>& seen) const {
    std::vector<std::uint32_t> stack{atom};
    while (!stack.empty()) {
      std::uint32_t id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      const Justification& j = just[id];
      if (j.asserted != kNone) {
        out.insert(j.asserted);
        continue;
      }
      out.insert(rules[j.rule].entry);
      for (std::uint32_t p : j.premises) stack.push_back(p);
    }
  }

  std::vector<EntryId> support(EntryId self, const std::vector<std::uint32_t>& witness) const {
    std::set<EntryId> out{self};
    std::unordered_set<std::uint32_t> seen;
    for (std::uint32_t a : witness) collect_support(a, out, seen);
    std::vector<EntryId> v(out.begin(), out.end());
    sort_support(v);
    return v;
  }

  void sort_support(std::vector<EntryId>& v) const {
    std::stable_sort(v.begin(), v.end(), [&](EntryId a, EntryId b) {
      int ra = provenance_rank(entries.at(a).provenance.kind);
      int rb = provenance_rank(entries.at(b).provenance.kind);
      return ra != rb ? ra < rb : a < b;
    });
  }

  // ---------------------------------------------------------------- checking

  std::vector<Range> full_ranges(const CBody& body) const {
    return std::vector<Range>(body.atoms.size(), Range{0, static_cast<std::uint32_t>(atoms.size())});
  }

  std::vector<std::uint32_t> active_domain() const {
    std::vector<bool> seen(constants.size(), false);
    for (const auto& g : atoms) {
      seen[g.a] = true;
      if (g.b != kNone) seen[g.b] = true;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < seen.size(); ++i) {
      if (seen[i]) out.push_back(i);
    }
    return out;
  }

  // Distinct related constants satisfying the filter, with their atoms.
  std::size_t count_related(const CCount& c, std::uint32_t subject, std::vector<std::uint32_t>* related,
                            std::vector<std::uint32_t>* witness) const {
    if (c.relation == kNone || c.filter == kNone) return 0;
    const Relation& rel = relations[c.relation];
    const auto& index = c.inverse ? rel.by_second : rel.by_first;
    auto it = index.find(subject);
    if (it == index.end()) return 0;
    std::unordered_set<std::uint32_t> distinct;
    for (std::uint32_t id : it->second) {
      std::uint32_t other = c.inverse ? atoms[id].a : atoms[id].b;
      std::uint32_t f = find_atom({c.filter, other, kNone});
      if (f == kNone || !distinct.insert(other).second) continue;
      if (related) related->push_back(other);
      if (witness) {
        witness->push_back(id);
        witness->push_back(f);
      }
    }
    return distinct.size();
  }

  ConsistencyReport compute_report() const {
    ConsistencyReport out;
    for (const auto& d : denials) {
      std::size_t found = 0;
      run_join(d.body, full_ranges(d.body), [&](const auto& bind, const auto& premises) {
        Violation v;
        v.entry = d.entry;
        v.statement = d.stmt;
        for (std::size_t i = 0; i < bind.size(); ++i) v.bindings.push_back({d.body.var_names[i], constants[bind[i]]});
        v.support = support(d.entry, premises);
        out.violations.push_back(std::move(v));
        return ++found < kViolationCap;
      });
    }
    for (const auto& c : cards) {
      // Subjects in scope, each with the atoms that put it there.
      std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> subjects;
      if (c.subject_is_constant) {
        subjects.push_back({c.subject_constant, {}});
      } else if (c.scope.atoms.empty()) {
        for (std::uint32_t k : active_domain()) subjects.push_back({k, {}});
      } else {
        std::unordered_set<std::uint32_t> seen;
        run_join(c.scope, full_ranges(c.scope), [&](const auto& bind, const auto& premises) {
          if (seen.insert(bind[0]).second) subjects.push_back({bind[0], premises});
          return true;
        });
      }
      std::size_t found = 0;
      for (auto& [subject, scope_witness] : subjects) {
        std::vector<std::uint32_t> related, witness = scope_witness;
        std::size_t n = count_related(c.count, subject, &related, &witness);
        if (compare_count(c.count.comparator, n, c.count.bound)) continue;
        Violation v;
        v.entry = c.entry;
        v.statement = c.stmt;
        v.bindings.push_back({c.subject_name, constants[subject]});
        for (std::uint32_t r : related) v.counted.push_back(constants[r]);
        std::sort(v.counted.begin(), v.counted.end());
        v.count = n;
        v.support = support(c.entry, witness);
        out.violations.push_back(std::move(v));
        if (++found >= kViolationCap) break;
      }
    }
    return out;
  }

  const ConsistencyReport& current_report() {
    if (!report) report = compute_report();
    return *report;
  }

  // ------------------------------------------------------------------ entries

  static std::string normal_key(const Statement& s) { return serialize(s); }

  std::optional<EntryId> add_entry(const std::vector<Statement>& statements, std::string text, Provenance prov) {
    Entry e;
    std::unordered_set<std::string> keys;
    for (const auto& s : statements) {
      if (s.is_query()) throw Error("questions cannot be asserted");
      Statement n = normalize(s);
      std::string key = normal_key(n);
      if (by_normal_form.count(key) || !keys.insert(key).second) continue;
      e.statements.push_back(std::move(n));
    }
    if (e.statements.empty()) return std::nullopt;
    e.id = next_entry++;
    e.text = std::move(text);
    e.provenance = std::move(prov);
    for (const auto& s : e.statements) by_normal_form[normal_key(s)] = e.id;
    return entries.emplace(e.id, std::move(e)).first->first;
  }

  void remove_entry_keys(const Entry& e) {
    for (const auto& s : e.statements) by_normal_form.erase(normal_key(s));
  }
};

KnowledgeBase::KnowledgeBase() : impl_(std::make_unique<Impl>()) {}
KnowledgeBase::~KnowledgeBase() = default;
KnowledgeBase::KnowledgeBase(const KnowledgeBase& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
KnowledgeBase& KnowledgeBase::operator=(const KnowledgeBase& o) {
  if (this != &o) impl_ = std::make_unique<Impl>(*o.impl_);
  return *this;
}
KnowledgeBase::KnowledgeBase(KnowledgeBase&&) noexcept = default;
KnowledgeBase& KnowledgeBase::operator=(KnowledgeBase&&) noexcept = default;

std::optional<EntryId> KnowledgeBase::add(const std::vector<Statement>& statements, std::string text,
                                          Provenance provenance) {
  Impl& m = *impl_;
  auto id = m.add_entry(statements, std::move(text), std::move(provenance));
  if (!id) return id;
  std::size_t first_rule = m.rules.size();
  std::vector<std::pair<GroundAtom, EntryId>> facts;
  m.compile_entry(m.entries.at(*id), facts);
  m.extend(facts, first_rule, nullptr);
  m.report.reset();
  return id;
}

AssertResult KnowledgeBase::assert_statements(const std::vector<Statement>& statements, std::string text,
                                              Provenance provenance) {
  Impl& m = *impl_;
  AssertResult result;
  ConsistencyReport before = m.current_report();

  // Everything needed to undo a rejected assertion.
  std::size_t atom_mark = m.atoms.size();
  std::size_t constant_mark = m.constants.size();
  std::size_t predicate_mark = m.predicates.size();
  std::size_t rule_mark = m.rules.size(), denial_mark = m.denials.size(), card_mark = m.cards.size();

  auto id = m.add_entry(statements, std::move(text), std::move(provenance));
  if (!id) {
    result.accepted = true;
    result.duplicate = true;
    return result;
  }
  std::vector<std::pair<GroundAtom, EntryId>> facts;
  std::vector<std::pair<std::uint32_t, Justification>> flips;
  m.compile_entry(m.entries.at(*id), facts);
  m.extend(facts, rule_mark, &flips);
  m.report.reset();
  const ConsistencyReport& after = m.current_report();

  std::unordered_set<std::string> old_keys;
  for (const auto& v : before.violations) old_keys.insert(v.key());
  for (const auto& v : after.violations) {
    if (!old_keys.count(v.key())) result.report.violations.push_back(v);
  }
  if (result.report.consistent()) {
    result.accepted = true;
    result.entry = id;
    return result;
  }

  // Roll back.
  m.truncate_atoms(atom_mark);
  for (auto it = flips.rbegin(); it != flips.rend(); ++it) m.just[it->first] = std::move(it->second);
  m.rules.resize(rule_mark);
  m.denials.resize(denial_mark);
  m.cards.resize(card_mark);
  while (m.constants.size() > constant_mark) {
    m.constant_ids.erase(m.constants.back());
    m.constants.pop_back();
  }
  while (m.predicates.size() > predicate_mark) {
    m.predicate_ids.erase(m.predicates.back());
    m.predicates.pop_back();
    m.arities.pop_back();
    m.relations.pop_back();
  }
  result.rejected = m.entries.at(*id);
  m.remove_entry_keys(m.entries.at(*id));
  // The id is not reused, so reports about the refused entry stay unambiguous.
  m.entries.erase(*id);
  m.report = std::move(before);
  return result;
}

void KnowledgeBase::retract(const std::vector<Statement>& statements) {
  Impl& m = *impl_;
  std::vector<std::pair<EntryId, std::string>> targets;
  for (const auto& s : statements) {
    std::string key = Impl::normal_key(normalize(s));
    auto it = m.by_normal_form.find(key);
    if (it == m.by_normal_form.end()) throw NotPresentError("statement not present: " + key);
    targets.push_back({it->second, key});
  }
  for (const auto& [id, key] : targets) {
    Entry& e = m.entries.at(id);
    std::erase_if(e.statements, [&](const Statement& s) { return Impl::normal_key(s) == key; });
    m.by_normal_form.erase(key);
    if (e.statements.empty()) m.entries.erase(id);
  }
  m.rebuild();
}

void KnowledgeBase::retract_provenance(Provenance::Kind kind) {
  Impl& m = *impl_;
  std::erase_if(m.entries, [&](const auto& kv) {
    if (kv.second.provenance.kind != kind) return false;
    m.remove_entry_keys(kv.second);
    return true;
  });
  m.rebuild();
}

ConsistencyReport KnowledgeBase::check() { return impl_->current_report(); }

ConsistencyReport KnowledgeBase::check() const {
  return impl_->report ? *impl_->report : impl_->compute_report();
}

ConsistencyReport KnowledgeBase::recheck() const { return impl_->compute_report(); }

AnswerSet KnowledgeBase::ask(const Query& query) const {
  const Impl& m = *impl_;
  std::size_t violations = m.report ? m.report->violations.size() : m.compute_report().violations.size();
  if (violations) throw InconsistentBaseError(violations);
  // Unknown names simply have no answers.
  CBody body = Impl::compile_body(query.body, {query.answer.name}, m.lookup());
  std::optional<CCount> count;
  if (query.count) count = Impl::compile_count(*query.count, m.lookup());

  std::set<std::uint32_t> candidates;
  if (query.body.empty()) {
    for (std::uint32_t k : m.active_domain()) candidates.insert(k);
  } else {
    m.run_join(body, m.full_ranges(body), [&](const auto& bind, const auto&) {
      candidates.insert(bind[0]);
      return true;
    });
  }
  AnswerSet out;
  for (std::uint32_t c : candidates) {
    if (count && !compare_count(count->comparator, m.count_related(*count, c, nullptr, nullptr), count->bound)) {
      continue;
    }
    out.answers.push_back(m.constants[c]);
  }
  std::sort(out.answers.begin(), out.answers.end());
  return out;
}

std::vector<const Entry*> KnowledgeBase::explain(const Violation& violation, const Entry* rejected) const {
  std::vector<const Entry*> out;
  for (EntryId id : violation.support) {
    if (rejected && rejected->id == id) {
      out.push_back(rejected);
    } else if (const Entry* e = entry(id)) {
      out.push_back(e);
    }
  }
  return out;
}

const Entry* KnowledgeBase::entry(EntryId id) const {
  auto it = impl_->entries.find(id);
  return it == impl_->entries.end() ? nullptr : &it->second;
}

std::vector<const Entry*> KnowledgeBase::entries() const {
  std::vector<const Entry*> out;
  for (const auto& [id, e] : impl_->entries) out.push_back(&e);
  return out;
}

bool KnowledgeBase::contains(const Statement& statement) const {
  return impl_->by_normal_form.count(Impl::normal_key(normalize(statement))) > 0;
}

EngineStats KnowledgeBase::stats() const {
  const Impl& m = *impl_;
  EngineStats s;
  s.entries = m.entries.size();
  for (const auto& [id, e] : m.entries) {
    for (const auto& st : e.statements) {
      if (st.is_fact()) ++s.facts;
    }
  }
  s.rules = m.rules.size();
  s.checks = m.denials.size() + m.cards.size();
  s.closure = m.atoms.size();
  return s;
}

std::vector<Atom> KnowledgeBase::closure() const {
  const Impl& m = *impl_;
  std::vector<Atom> out;
  out.reserve(m.atoms.size());
  for (const auto& g : m.atoms) {
    Atom a{m.predicates[g.pred], {Term::constant(m.constants[g.a])}};
    if (g.b != kNone) a.args.push_back(Term::constant(m.constants[g.b]));
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Atom> saturate(const std::vector<Atom>& facts, const std::vector<Rule>& rules) {
  KnowledgeBase kb;
  for (const auto& r : rules) kb.add({Statement{r}}, "", Provenance::interactive());
  for (const auto& f : facts) kb.add({Statement{Fact{f}}}, "", Provenance::interactive());
  return kb.closure();
}

}  // namespace cnldoc
