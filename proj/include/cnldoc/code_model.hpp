#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cnldoc/errors.hpp"
#include "cnldoc/lexicon.hpp"
#include "cnldoc/logic.hpp"

namespace cnldoc {

enum class EntityKind : std::uint8_t { Class, Method, Package, Interface };
enum class RelationKind : std::uint8_t { DirectSubclassOf, Defines, Invokes, Instantiates, InPackage, Implements };

std::string_view to_string(EntityKind k);
std::string_view to_string(RelationKind r);

struct CodeEntity {
  EntityKind kind = EntityKind::Class;
  std::string name;
  std::size_t line = 0;
};

struct CodeRelation {
  RelationKind relation = RelationKind::Defines;
  std::string from;
  std::string to;
  std::size_t line = 0;
};

class CodeModelError : public Error {
 public:
  enum class Kind { Format, DanglingReference, DuplicateEntity, KindMismatch };
  CodeModelError(Kind kind, const std::string& msg, std::size_t line = 0);
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Records of one dump file (`E|kind|name`, `R|relation|from|to`).
struct CodeModel {
  std::vector<CodeEntity> entities;
  std::vector<CodeRelation> relations;

  static CodeModel parse(std::istream& in);
  static CodeModel parse_string(std::string_view text);
  static CodeModel from_file(const std::string& path);
  std::string to_string() const;
};

/// A ground fact derived from the dump, with the sentence that states it.
struct IngestedFact {
  Statement statement;
  std::string sentence;
};

struct Ingestion {
  std::vector<IngestedFact> facts;
  std::vector<LexEntry> names;  // one proper name per entity
  std::map<std::string, EntityKind> kinds;  // every entity known after this dump
};

/// Validates the dump and converts it: one fact per entity, one per distinct
/// relation edge. `known` holds entities of dumps loaded earlier, so a delta
/// dump may refer to them (or repeat them with the same kind).
Ingestion ingest_model(const CodeModel& model, const std::map<std::string, EntityKind>& known = {});

/// Prelude sentences and the vocabulary they (and ingested facts) use.
std::string_view prelude_text();
std::string_view prelude_lexicon_text();
Lexicon prelude_lexicon();

struct PreludeStatement {
  std::string sentence;
  std::size_t line = 0;
  std::vector<Statement> statements;
};
std::vector<PreludeStatement> prelude();

struct DocComment {
  std::string sentence;
  std::string file;
  std::size_t line = 0;
};

class MalformedDocComment : public Error {
 public:
  MalformedDocComment(const std::string& file, std::size_t line, const std::string& text);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Comment lines (after one of `prefixes`) whose body starts with `@cnl:`.
std::vector<DocComment> extract_doc_comments(std::string_view source, const std::string& file,
                                             const std::vector<std::string>& prefixes);

}  // namespace cnldoc
