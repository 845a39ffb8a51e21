#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnldoc/errors.hpp"
#include "cnldoc/logic.hpp"

namespace cnldoc {

struct Provenance {
  enum class Kind : std::uint8_t { Prelude, Ingested, Documented, Interactive };
  Kind kind = Kind::Interactive;
  std::string file;  // prelude/ingested/documented
  std::size_t line = 0;

  static Provenance prelude(std::size_t line = 0) { return {Kind::Prelude, "prelude.cnl", line}; }
  static Provenance ingested(std::string dump) { return {Kind::Ingested, std::move(dump), 0}; }
  static Provenance documented(std::string file, std::size_t line) { return {Kind::Documented, std::move(file), line}; }
  static Provenance interactive() { return {}; }

  std::string_view kind_name() const;
  /// "prelude.cnl:3", "ingested mondrian.dump", "kb.cnl:12", "interactive".
  std::string to_string() const;
};

using EntryId = std::uint32_t;

/// One accepted sentence: its statements (normalized) and where it came from.
struct Entry {
  EntryId id = 0;
  std::string text;
  std::vector<Statement> statements;
  Provenance provenance;
};

struct Binding {
  std::string variable;
  std::string value;
  bool operator==(const Binding&) const = default;
};

struct Violation {
  EntryId entry = 0;        // the denial or cardinality check
  std::size_t statement = 0;  // index within the entry
  std::vector<Binding> bindings;
  std::vector<std::string> counted;  // cardinality: the distinct related constants
  std::size_t count = 0;
  std::vector<EntryId> support;  // includes `entry`
  /// Identity of the violation independent of support.
  std::string key() const;
};

struct ConsistencyReport {
  std::vector<Violation> violations;
  bool consistent() const { return violations.empty(); }
};

struct AnswerSet {
  std::vector<std::string> answers;  // lexicographic
  bool operator==(const AnswerSet&) const = default;
};

class InconsistentBaseError : public Error {
 public:
  explicit InconsistentBaseError(std::size_t violations)
      : Error("the knowledge base is inconsistent (" + std::to_string(violations) +
              " violations); resolve them before asking questions") {}
};

class NotPresentError : public Error {
 public:
  using Error::Error;
};

struct AssertResult {
  bool accepted = false;
  bool duplicate = false;  // every statement was already present
  std::optional<EntryId> entry;
  ConsistencyReport report;     // rejection: the new violations only
  std::optional<Entry> rejected;  // the refused entry, for explanations
};

struct EngineStats {
  std::size_t entries = 0;
  std::size_t facts = 0;   // asserted ground facts
  std::size_t rules = 0;
  std::size_t checks = 0;  // denials + cardinality checks
  std::size_t closure = 0; // atoms in the saturated closure
};

/// Forward-chaining knowledge base: asserted statements with provenance, the
/// saturated closure with one recorded derivation per atom, and constraint
/// checking. Not internally synchronized: one writer, or any number of
/// readers.
class KnowledgeBase {
 public:
  KnowledgeBase();
  ~KnowledgeBase();
  KnowledgeBase(const KnowledgeBase&);
  KnowledgeBase& operator=(const KnowledgeBase&);
  KnowledgeBase(KnowledgeBase&&) noexcept;
  KnowledgeBase& operator=(KnowledgeBase&&) noexcept;

  /// Adds statements without checking them against the constraints (bulk
  /// loading). Returns nothing when every statement was already present.
  std::optional<EntryId> add(const std::vector<Statement>& statements, std::string text, Provenance provenance);

  /// Adds the statements of one sentence atomically, rejecting them if they
  /// introduce a violation that the base did not already have.
  AssertResult assert_statements(const std::vector<Statement>& statements, std::string text,
                                 Provenance provenance);

  /// Removes statements (by normal form); the closure is rebuilt.
  void retract(const std::vector<Statement>& statements);
  /// Removes every entry with the given provenance kind (e.g. re-ingestion).
  void retract_provenance(Provenance::Kind kind);

  /// Violations of the current state. The non-const overload caches the
  /// report for later assertions; the const one never writes.
  ConsistencyReport check();
  ConsistencyReport check() const;
  /// Evaluates every constraint from scratch, ignoring the cache.
  ConsistencyReport recheck() const;
  AnswerSet ask(const Query& query) const;

  /// Support entries of a violation, prelude first, then ingested,
  /// documented, interactive; insertion order within each. `rejected` lets
  /// the listing include an entry refused by assert_statements.
  std::vector<const Entry*> explain(const Violation& violation, const Entry* rejected = nullptr) const;

  const Entry* entry(EntryId id) const;
  std::vector<const Entry*> entries() const;
  bool contains(const Statement& statement) const;
  EngineStats stats() const;

  /// Ground atoms of the closure, sorted.
  std::vector<Atom> closure() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Least fixpoint of `rules` over `facts` (no constraints involved).
std::vector<Atom> saturate(const std::vector<Atom>& facts, const std::vector<Rule>& rules);

}  // namespace cnldoc
