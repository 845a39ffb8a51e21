#include "cnldoc/logic.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "text_util.hpp"

namespace cnldoc {

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::MoreThan: return "more-than";
    case Comparator::AtMost: return "at-most";
    case Comparator::AtLeast: return "at-least";
    case Comparator::Exactly: return "exactly";
  }
  return "?";
}

bool compare_count(Comparator c, std::size_t count, std::size_t bound) {
  switch (c) {
    case Comparator::MoreThan: return count > bound;
    case Comparator::AtMost: return count <= bound;
    case Comparator::AtLeast: return count >= bound;
    case Comparator::Exactly: return count == bound;
  }
  return false;
}

std::string_view Statement::kind_name() const {
  switch (body.index()) {
    case 0: return "fact";
    case 1: return "rule";
    case 2: return "denial";
    case 3: return "cardinality";
    default: return "query";
  }
}

namespace {

// ---------------------------------------------------------------------------
// Translation

struct NounPhrase {
  enum class Quant { Constant, Variable, Exists, Forall };
  Term term;
  std::vector<Atom> restriction;
  Quant quant = Quant::Constant;
};

struct VerbPhrase {
  std::vector<Atom> atoms;   // asserted of the subject (incl. existential objects)
  std::vector<Atom> guards;  // restrictions of universally quantified objects
};

class Translator {
 public:
  explicit Translator(const Lexicon& lexicon) : lexicon_(lexicon) {}

  std::vector<Statement> sentence(const ParseTree& tree) {
    const ParseNode& inner = tree.root.child(0);
    if (tree.kind == SentenceKind::Question) return {question(inner)};
    return declarative(inner);
  }

 private:
  Term fresh() { return Term::variable("v" + std::to_string(++next_var_)); }

  const LexEntry& entry_of(const ParseNode& leaf) const {
    static const std::map<std::string, std::pair<Category, FormSlot>> kinds = {
        {"#pn", {Category::ProperName, FormSlot::Name}},
        {"#noun", {Category::Noun, FormSlot::Singular}},
        {"#noun-pl", {Category::Noun, FormSlot::Plural}},
        {"#tv", {Category::TransitiveVerb, FormSlot::ThirdSingular}},
        {"#tv-pl", {Category::TransitiveVerb, FormSlot::PluralVerb}},
        {"#pp", {Category::TransitiveVerb, FormSlot::PastParticiple}},
        {"#of", {Category::OfConstruct, FormSlot::Singular}},
        {"#of-pl", {Category::OfConstruct, FormSlot::Plural}},
        {"#adj", {Category::AdjectivePreposition, FormSlot::Adjective}},
    };
    auto [cat, slot] = kinds.at(leaf.label);
    for (const Reading& r : leaf.token->readings) {
      if (r.slot == slot && lexicon_.entry(r.entry).category == cat) return lexicon_.entry(r.entry);
    }
    throw Error("internal: token '" + leaf.token->surface + "' has no " + leaf.label + " reading");
  }

  std::string predicate(const ParseNode& leaf) const { return entry_of(leaf).predicate(); }

  static const ParseNode* find(const ParseNode& node, std::initializer_list<std::string_view> labels) {
    for (const auto& c : node.children) {
      for (auto l : labels) {
        if (c.label == l) return &c;
      }
    }
    return nullptr;
  }

  static const ParseNode& need(const ParseNode& node, std::initializer_list<std::string_view> labels) {
    if (const ParseNode* n = find(node, labels)) return *n;
    throw Error("internal: malformed tree at " + node.tag);
  }

  static bool starts_with(const std::string& s, std::string_view p) { return text::starts_with(s, p); }

  static void flatten(const ParseNode& list, std::vector<const ParseNode*>& out) {
    if (list.tag == "list.first") {
      out.push_back(&list.child(0));
    } else {
      flatten(list.child(0), out);
      out.push_back(&list.child(2));
    }
  }

  Term leaf_term(const ParseNode& leaf) {
    if (leaf.label == "#var") return Term::variable(leaf.token->surface);
    return Term::constant(entry_of(leaf).name());
  }

  NounPhrase noun_phrase(const ParseNode& np) {
    NounPhrase out;
    const std::string& tag = np.tag;
    if (tag == "np.name") {
      out.term = leaf_term(np.child(0));
      out.quant = NounPhrase::Quant::Constant;
      return out;
    }
    if (tag == "np.var") {
      out.term = leaf_term(np.child(0));
      out.quant = NounPhrase::Quant::Variable;
      return out;
    }
    out.term = fresh();
    out.quant = starts_with(tag, "np.every") ? NounPhrase::Quant::Forall : NounPhrase::Quant::Exists;
    if (const ParseNode* noun = find(np, {"#noun"})) out.restriction.push_back({predicate(*noun), {out.term}});
    if (const ParseNode* of = find(np, {"#of"})) {
      NounPhrase inner = noun_phrase(np.children.back());
      out.restriction.push_back({predicate(*of), {out.term, inner.term}});
      append(out.restriction, inner.restriction);
    }
    if (tag.ends_with("-rc")) append(out.restriction, relative_clause(np.children.back(), out.term));
    return out;
  }

  static void append(std::vector<Atom>& to, const std::vector<Atom>& from) { to.insert(to.end(), from.begin(), from.end()); }

  std::vector<Atom> relative_clause(const ParseNode& rc, const Term& subject) {
    VerbPhrase vp = verb_phrase(rc.child(1), subject);
    append(vp.atoms, vp.guards);
    return vp.atoms;
  }

  // Adds the object's atoms: existentials conjoin, universals become guards.
  void object(VerbPhrase& vp, const NounPhrase& obj) {
    if (obj.quant == NounPhrase::Quant::Forall) {
      append(vp.guards, obj.restriction);
    } else {
      append(vp.atoms, obj.restriction);
    }
  }

  VerbPhrase verb_phrase(const ParseNode& node, const Term& subject) {
    VerbPhrase vp;
    const std::string& tag = node.tag;
    if (tag == "vp.cop-noun" || tag == "vp.cop-noun-rc") {
      vp.atoms.push_back({predicate(need(node, {"#noun", "#noun-pl"})), {subject}});
      if (tag == "vp.cop-noun-rc") append(vp.atoms, relative_clause(node.children.back(), subject));
      return vp;
    }
    NounPhrase obj = noun_phrase(node.children.back());
    if (tag == "vp.cop-of") {
      vp.atoms.push_back({predicate(need(node, {"#of", "#of-pl"})), {subject, obj.term}});
    } else if (tag == "vp.tv") {
      vp.atoms.push_back({predicate(need(node, {"#tv", "#tv-pl"})), {subject, obj.term}});
    } else if (tag == "vp.passive") {
      vp.atoms.push_back({predicate(need(node, {"#pp"})), {obj.term, subject}});
    } else if (tag == "vp.adj") {
      vp.atoms.push_back({predicate(need(node, {"#adj"})), {subject, obj.term}});
    } else {
      throw Error("internal: unknown verb phrase " + tag);
    }
    object(vp, obj);
    return vp;
  }

  Counting counting(const ParseNode& cvp) {
    Counting c;
    c.inverse = cvp.tag == "cvp.passive";
    c.relation = predicate(need(cvp, {"#tv", "#tv-pl", "#pp"}));
    const ParseNode& cmp = need(cvp, {"cmp"});
    if (cmp.tag == "cmp.more-than") c.comparator = Comparator::MoreThan;
    else if (cmp.tag == "cmp.at-most") c.comparator = Comparator::AtMost;
    else if (cmp.tag == "cmp.at-least") c.comparator = Comparator::AtLeast;
    else c.comparator = Comparator::Exactly;
    const ParseNode& qty = need(cvp, {"qty"});
    c.bound = static_cast<std::size_t>(qty.child(0).token->number);
    c.filter = predicate(qty.child(1));
    return c;
  }

  std::vector<Atom> nominal(const ParseNode& nom, const Term& subject) {
    std::vector<Atom> atoms;
    if (nom.tag == "nom.of") {
      NounPhrase inner = noun_phrase(nom.child(1));
      atoms.push_back({predicate(nom.child(0)), {subject, inner.term}});
      append(atoms, inner.restriction);
      return atoms;
    }
    atoms.push_back({predicate(nom.child(0)), {subject}});
    if (nom.tag == "nom.noun-rc") append(atoms, relative_clause(nom.child(1), subject));
    return atoms;
  }

  static std::set<std::string> variables(const std::vector<Atom>& atoms) {
    std::set<std::string> out;
    for (const auto& a : atoms) {
      for (const auto& t : a.args) {
        if (t.is_variable()) out.insert(t.name);
      }
    }
    return out;
  }

  // One rule per head atom; every head variable must be bound by the body.
  void rules(std::vector<Statement>& out, const std::vector<Atom>& body, const std::vector<Atom>& heads) {
    auto bound = variables(body);
    for (const Atom& head : heads) {
      for (const Term& t : head.args) {
        if (t.is_variable() && !bound.count(t.name)) {
          throw TranslationError(TranslationError::Kind::ExistentialHead,
                                 "statement would assert the existence of an unnamed individual (" + to_string(head) +
                                     "); only named individuals or universally quantified ones are supported");
        }
      }
      if (body.empty()) {
        out.push_back({Fact{head}});
      } else {
        out.push_back({Rule{body, head}});
      }
    }
  }

  static void require_connected(const std::vector<Atom>& body, const std::optional<Term>& anchor) {
    std::vector<std::string> vars;
    for (const auto& v : variables(body)) vars.push_back(v);
    if (anchor && anchor->is_variable() && std::find(vars.begin(), vars.end(), anchor->name) == vars.end() &&
        !body.empty()) {
      vars.push_back(anchor->name);
    }
    if (vars.size() <= 1) return;
    std::vector<std::size_t> parent(vars.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto index = [&](const std::string& n) {
      return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), n) - vars.begin());
    };
    std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
      return parent[i] == i ? i : parent[i] = root(parent[i]);
    };
    for (const auto& a : body) {
      std::optional<std::size_t> first;
      for (const auto& t : a.args) {
        if (!t.is_variable()) continue;
        std::size_t i = index(t.name);
        if (first) parent[root(i)] = root(*first);
        else first = i;
      }
    }
    for (std::size_t i = 1; i < vars.size(); ++i) {
      if (root(i) != root(0)) {
        throw TranslationError(TranslationError::Kind::UnconnectedBody,
                               "statement body is not connected: variable " + vars[i] + " is unrelated to " + vars[0]);
      }
    }
  }

  std::vector<Statement> declarative(const ParseNode& decl) {
    std::vector<Statement> out;
    const std::string& tag = decl.tag;
    if (tag == "decl.name" || tag == "decl.every") {
      Term subject;
      std::vector<Atom> scope;
      if (tag == "decl.name") {
        subject = leaf_term(decl.child(0));
      } else {
        subject = fresh();
        scope = nominal(decl.child(1), subject);
      }
      std::vector<const ParseNode*> parts;
      flatten(decl.children.back(), parts);
      for (const ParseNode* dvp : parts) {
        const ParseNode& inner = dvp->child(0);
        if (dvp->tag == "dvp.count") {
          out.push_back({CardinalityCheck{subject, scope, counting(inner)}});
          continue;
        }
        VerbPhrase vp = verb_phrase(inner, subject);
        std::vector<Atom> body = scope;
        append(body, vp.guards);
        rules(out, body, vp.atoms);
      }
      return out;
    }
    if (tag == "decl.of-fact") {
      const ParseNode& of = need(decl, {"#of"});
      Term owner = leaf_term(decl.child(2));
      Term value = leaf_term(decl.child(4));
      out.push_back({Fact{{predicate(of), {value, owner}}}});
      return out;
    }
    if (tag == "decl.no") {
      Term subject = fresh();
      std::vector<Atom> body = nominal(decl.child(1), subject);
      std::vector<const ParseNode*> parts;
      flatten(decl.child(2), parts);
      for (const ParseNode* p : parts) {
        VerbPhrase vp = verb_phrase(*p, subject);
        append(body, vp.atoms);
        append(body, vp.guards);
      }
      require_connected(body, subject);
      out.push_back({Denial{body}});
      return out;
    }
    if (tag == "decl.everything") {
      out.push_back({CardinalityCheck{fresh(), {}, counting(decl.child(1))}});
      return out;
    }
    if (tag == "decl.if") {
      std::vector<Atom> body = conditions(decl.child(1));
      std::vector<Atom> heads = conditions(decl.child(3));
      rules(out, body, heads);
      return out;
    }
    throw Error("internal: unknown declarative " + tag);
  }

  // Clauses joined by "and"; an elided subject is the nearest preceding one.
  std::vector<Atom> conditions(const ParseNode& list) {
    std::vector<Atom> atoms;
    Term subject;
    walk_conditions(list, atoms, subject);
    return atoms;
  }

  void walk_conditions(const ParseNode& list, std::vector<Atom>& atoms, Term& subject) {
    const ParseNode* clause = nullptr;
    if (list.tag == "conds.first") {
      clause = &list.child(0);
    } else {
      walk_conditions(list.child(0), atoms, subject);
      clause = &list.child(2);
    }
    const ParseNode* vp_node = clause;
    if (clause->tag == "clause") {
      const ParseNode& subj = clause->child(0);
      subject = subj.tag == "subj.something" ? fresh() : leaf_term(subj.child(0));
      vp_node = &clause->child(1);
    }
    VerbPhrase vp = verb_phrase(*vp_node, subject);
    append(atoms, vp.atoms);
    append(atoms, vp.guards);
  }

  Statement question(const ParseNode& quest) {
    Query q;
    q.answer = fresh();
    const ParseNode* qvps = &quest.children.back();
    if (quest.tag == "quest.which") q.body = nominal(quest.child(1), q.answer);
    if (qvps->tag == "qvps.count") {
      q.count = counting(qvps->child(0));
    } else {
      std::vector<const ParseNode*> parts;
      flatten(qvps->child(0), parts);
      for (const ParseNode* p : parts) {
        VerbPhrase vp = verb_phrase(*p, q.answer);
        append(q.body, vp.atoms);
        append(q.body, vp.guards);
      }
      if (qvps->tag == "qvps.count-last") q.count = counting(qvps->child(2));
    }
    require_connected(q.body, q.answer);
    return {q};
  }

  const Lexicon& lexicon_;
  int next_var_ = 0;
};

// ---------------------------------------------------------------------------
// Normalization

std::string shape_key(const Atom& a) {
  std::string key = a.predicate + "(";
  for (const auto& t : a.args) key += t.is_variable() ? "?," : "c:" + t.name + ",";
  return key + ")";
}

using Renaming = std::map<std::string, std::string>;

void visit(Renaming& r, const Term& t) {
  if (t.is_variable() && !r.count(t.name)) r[t.name] = "v" + std::to_string(r.size() + 1);
}
void visit(Renaming& r, const Atom& a) {
  for (const auto& t : a.args) visit(r, t);
}
Term rename(const Renaming& r, const Term& t) { return t.is_variable() ? Term::variable(r.at(t.name)) : t; }
Atom rename(const Renaming& r, const Atom& a) {
  Atom out{a.predicate, {}};
  for (const auto& t : a.args) out.args.push_back(rename(r, t));
  return out;
}

// Picks the body ordering (among those consistent with the shape sort) whose
// renamed serialization is smallest. `build` renames and serializes.
template <typename Build>
std::vector<Atom> canonical_order(std::vector<Atom> body, Build build) {
  std::stable_sort(body.begin(), body.end(),
                   [](const Atom& a, const Atom& b) { return shape_key(a) < shape_key(b); });
  // Tie groups.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < body.size();) {
    std::size_t j = i + 1;
    while (j < body.size() && shape_key(body[j]) == shape_key(body[i])) ++j;
    if (j - i > 1) groups.push_back({i, j});
    i = j;
  }
  std::size_t combos = 1;
  for (auto [b, e] : groups) {
    for (std::size_t k = 2; k <= e - b; ++k) combos *= k;
    if (combos > 5040) break;
  }
  if (groups.empty() || combos > 5040) return body;

  std::vector<Atom> best = body;
  std::string best_key = build(body);
  std::vector<Atom> current = body;
  // Odometer over per-group permutations.
  std::function<void(std::size_t)> rec = [&](std::size_t g) {
    if (g == groups.size()) {
      std::string key = build(current);
      if (key < best_key) {
        best_key = key;
        best = current;
      }
      return;
    }
    auto [b, e] = groups[g];
    std::vector<std::size_t> idx(e - b);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Atom> original(body.begin() + b, body.begin() + e);
    do {
      for (std::size_t k = 0; k < idx.size(); ++k) current[b + k] = original[idx[k]];
      rec(g + 1);
    } while (std::next_permutation(idx.begin(), idx.end()));
  };
  rec(0);
  return best;
}

std::vector<Atom> dedupe(std::vector<Atom> atoms) {
  std::vector<Atom> out;
  for (auto& a : atoms) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
  }
  return out;
}

std::string atoms_string(const std::vector<Atom>& atoms) {
  std::vector<std::string> parts;
  for (const auto& a : atoms) parts.push_back(to_string(a));
  return text::join(parts, ", ");
}

std::string counting_string(const Counting& c, const Term& subject) {
  std::string rel = c.inverse ? c.relation + "(*," + subject.name + ")" : c.relation + "(" + subject.name + ",*)";
  return "count=" + rel + " filter=" + c.filter + " " + std::string(to_string(c.comparator)) + " " +
         std::to_string(c.bound);
}

}  // namespace

std::string to_string(const Atom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ",";
    out += atom.args[i].name;
  }
  return out + ")";
}

std::vector<Statement> translate(const ParseTree& tree, const Lexicon& lexicon) {
  return Translator(lexicon).sentence(tree);
}

std::vector<Statement> translate_sentence(std::string_view sentence, const Lexicon& lexicon) {
  return translate(parse_sentence(sentence, lexicon), lexicon);
}

Statement normalize(const Statement& statement) {
  return std::visit(
      [](const auto& s) -> Statement {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Fact>) {
          return {s};
        } else if constexpr (std::is_same_v<T, Rule>) {
          auto build = [&](const std::vector<Atom>& body) {
            Renaming r;
            for (const auto& a : body) visit(r, a);
            visit(r, s.head);
            std::string key;
            for (const auto& a : body) key += to_string(rename(r, a)) + ";";
            return key + "->" + to_string(rename(r, s.head));
          };
          auto body = canonical_order(dedupe(s.body), build);
          Renaming r;
          for (const auto& a : body) visit(r, a);
          visit(r, s.head);
          Rule out;
          for (const auto& a : body) out.body.push_back(rename(r, a));
          out.head = rename(r, s.head);
          return {out};
        } else if constexpr (std::is_same_v<T, Denial>) {
          auto build = [](const std::vector<Atom>& body) {
            Renaming r;
            for (const auto& a : body) visit(r, a);
            std::string key;
            for (const auto& a : body) key += to_string(rename(r, a)) + ";";
            return key;
          };
          auto body = canonical_order(dedupe(s.body), build);
          Renaming r;
          for (const auto& a : body) visit(r, a);
          Denial out;
          for (const auto& a : body) out.body.push_back(rename(r, a));
          return {out};
        } else if constexpr (std::is_same_v<T, CardinalityCheck>) {
          auto build = [&](const std::vector<Atom>& body) {
            Renaming r;
            visit(r, s.subject);
            std::string key;
            for (const auto& a : body) key += to_string(rename(r, a)) + ";";
            return key;
          };
          auto scope = canonical_order(dedupe(s.scope_atoms), build);
          Renaming r;
          visit(r, s.subject);
          CardinalityCheck out{rename(r, s.subject), {}, s.count};
          for (const auto& a : scope) {
            visit(r, a);
            out.scope_atoms.push_back(rename(r, a));
          }
          return {out};
        } else {
          auto build = [&](const std::vector<Atom>& body) {
            Renaming r;
            visit(r, s.answer);
            std::string key;
            for (const auto& a : body) {
              visit(r, a);
              key += to_string(rename(r, a)) + ";";
            }
            return key;
          };
          auto body = canonical_order(dedupe(s.body), build);
          Renaming r;
          visit(r, s.answer);
          Query out{rename(r, s.answer), {}, s.count};
          for (const auto& a : body) {
            visit(r, a);
            out.body.push_back(rename(r, a));
          }
          return {out};
        }
      },
      statement.body);
}

std::string serialize(const Statement& statement) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Fact>) {
          return "FACT " + to_string(s.atom);
        } else if constexpr (std::is_same_v<T, Rule>) {
          return "RULE " + atoms_string(s.body) + " -> " + to_string(s.head);
        } else if constexpr (std::is_same_v<T, Denial>) {
          return "DENIAL " + atoms_string(s.body);
        } else if constexpr (std::is_same_v<T, CardinalityCheck>) {
          return "CARD subject=" + s.subject.name + " scope=[" + atoms_string(s.scope_atoms) + "] " +
                 counting_string(s.count, s.subject);
        } else {
          std::string out = "QUERY answer=" + s.answer.name + " body=[" + atoms_string(s.body) + "]";
          if (s.count) out += " " + counting_string(*s.count, s.answer);
          return out;
        }
      },
      statement.body);
}

}  // namespace cnldoc
