#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cnldoc/errors.hpp"
#include "cnldoc/lexicon.hpp"
#include "cnldoc/parser.hpp"

namespace cnldoc {

struct Term {
  enum class Kind : std::uint8_t { Constant, Variable };
  Kind kind = Kind::Constant;
  std::string name;

  static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
  static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
  bool is_variable() const { return kind == Kind::Variable; }
  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
};

/// Predicate applied to one (noun) or two (verb, of-construct,
/// adjective-preposition) terms.
struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;
};

struct Fact {
  Atom atom;
  bool operator==(const Fact&) const = default;
};

struct Rule {
  std::vector<Atom> body;
  Atom head;
  bool operator==(const Rule&) const = default;
};

struct Denial {
  std::vector<Atom> body;
  bool operator==(const Denial&) const = default;
};

enum class Comparator : std::uint8_t { MoreThan, AtMost, AtLeast, Exactly };
std::string_view to_string(Comparator c);
bool compare_count(Comparator c, std::size_t count, std::size_t bound);

/// Count of distinct y with relation(subject, y) (or relation(y, subject) when
/// `inverse`) and filter(y).
struct Counting {
  std::string relation;
  bool inverse = false;
  std::string filter;
  Comparator comparator = Comparator::AtMost;
  std::size_t bound = 0;
  bool operator==(const Counting&) const = default;
};

/// Closed-world count check. The scope is `subject` restricted by
/// `scope_atoms` (empty atoms with a variable subject means every constant).
struct CardinalityCheck {
  Term subject;
  std::vector<Atom> scope_atoms;
  Counting count;
  bool operator==(const CardinalityCheck&) const = default;
};

struct Query {
  Term answer;
  std::vector<Atom> body;
  std::optional<Counting> count;
  bool operator==(const Query&) const = default;
};

using StatementBody = std::variant<Fact, Rule, Denial, CardinalityCheck, Query>;

struct Statement {
  StatementBody body;

  bool is_fact() const { return std::holds_alternative<Fact>(body); }
  bool is_rule() const { return std::holds_alternative<Rule>(body); }
  bool is_denial() const { return std::holds_alternative<Denial>(body); }
  bool is_cardinality() const { return std::holds_alternative<CardinalityCheck>(body); }
  bool is_query() const { return std::holds_alternative<Query>(body); }
  std::string_view kind_name() const;

  bool operator==(const Statement&) const = default;
};

class TranslationError : public Error {
 public:
  enum class Kind { ExistentialHead, UnconnectedBody };
  TranslationError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Compositional translation. Conjoined declaratives yield one statement per
/// conjunct; everything else yields exactly one.
std::vector<Statement> translate(const ParseTree& tree, const Lexicon& lexicon);

/// Canonical variable names (v1, v2, ... left to right) and canonical body order.
Statement normalize(const Statement& statement);

/// One-line debug serialization, prefixed FACT/RULE/DENIAL/CARD/QUERY.
std::string serialize(const Statement& statement);
std::string to_string(const Atom& atom);

/// Convenience: tokenize + parse + translate.
std::vector<Statement> translate_sentence(std::string_view sentence, const Lexicon& lexicon);

}  // namespace cnldoc
