#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnldoc/code_model.hpp"
#include "cnldoc/engine.hpp"
#include "cnldoc/lexicon.hpp"
#include "cnldoc/parser.hpp"

namespace cnldoc {

/// `key = value` configuration. Relative paths resolve against the
/// directory of the config file.
struct SessionConfig {
  std::filesystem::path kb;
  std::vector<std::filesystem::path> sources;
  std::map<std::string, std::vector<std::string>> comment_prefixes;  // ".cpp" -> {"//"}
  int port = 8080;
  std::string host = "127.0.0.1";
  bool enforce_budgets = false;  // bench exits 1 when a budget is exceeded

  static SessionConfig defaults();
  static SessionConfig from_file(const std::filesystem::path& path);
  static SessionConfig parse(std::string_view text, const std::filesystem::path& base_dir);
};

class KbFileError : public Error {
 public:
  KbFileError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg), file_(file), line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// The knowledge base as controlled-English text with directives:
///   @prelude                   load the built-in source-code model
///   @lexicon <entry line>      add one lexicon entry
///   @lexicon-file <path>       add a lexicon file
///   @dump <path>               ingest a code-model dump
/// Every other non-comment line is a documentation sentence.
class KbFile {
 public:
  enum class Kind { Blank, Comment, Prelude, Lexicon, LexiconFile, Dump, Sentence };
  struct Line {
    Kind kind = Kind::Blank;
    std::string raw;    // exactly as written
    std::string value;  // directive argument or sentence
    std::size_t number = 0;  // line in the file as loaded; 0 for new lines
  };

  static KbFile load(const std::filesystem::path& path);
  static KbFile parse(std::string_view text, std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  const std::vector<Line>& lines() const { return lines_; }
  /// Resolves a path written in the file against the file's directory.
  std::filesystem::path resolve(const std::string& p) const;

  /// File text; `annotations` maps a line index to a quarantine reason,
  /// written as a "#! quarantined:" comment before that line. Such comments
  /// are dropped on parsing, so they never accumulate.
  std::string render(const std::map<std::size_t, std::string>& annotations = {}) const;
  void save(const std::map<std::size_t, std::string>& annotations = {}) const;

  void append_sentence(const std::string& sentence);
  /// Removes the first sentence line equal to `sentence`.
  bool remove_sentence(const std::string& sentence);
  /// Replaces every @dump line by one for `dump` (or adds it).
  void set_dump(const std::string& dump);
  void append_dump(const std::string& dump);

 private:
  std::filesystem::path path_;
  std::vector<Line> lines_;
};

/// A documentation line kept in the file but out of the base.
struct Quarantine {
  std::size_t index = 0;  // into KbFile::lines()
  std::size_t line = 0;
  std::string sentence;
  std::string reason;
  ConsistencyReport report;
  std::optional<Entry> rejected;
};

struct LoadReport {
  std::vector<Quarantine> quarantined;
  ConsistencyReport violations;  // of the active base after loading
  bool consistent() const { return quarantined.empty() && violations.consistent(); }
};

/// Everything that can go wrong between a sentence and the engine.
struct SentenceError {
  enum class Kind { UnknownWord, Syntax, Ambiguous, Translation, Lexicon, WrongKind };
  Kind kind = Kind::Syntax;
  std::string message;
  std::size_t position = 0;  // token index
  std::optional<CompletionSet> expected;
  std::vector<Category> suggestions;  // unknown word: categories that would fit
  std::string word;

  std::string_view kind_name() const;
};

struct AddOutcome {
  enum class Status { Accepted, Duplicate, Rejected, Invalid };
  Status status = Status::Invalid;
  std::optional<SentenceError> error;
  AssertResult result;
};

struct AskOutcome {
  std::optional<AnswerSet> answers;
  std::optional<SentenceError> error;
  std::optional<std::string> inconsistent;  // message when the base is inconsistent
};

struct RemoveOutcome {
  bool removed = false;
  std::optional<SentenceError> error;
  std::string message;
};

struct ExtractOutcome {
  std::size_t found = 0;
  std::size_t added = 0;
  std::size_t duplicates = 0;
  std::vector<std::pair<DocComment, AddOutcome>> failed;
};

/// One loaded knowledge base: lexicon, engine, startup report.
class Session {
 public:
  /// Builds the base from a kb file (or an empty base when `kb` is empty).
  static Session open(const SessionConfig& config);
  static Session open_kb(const std::filesystem::path& kb);

  const Lexicon& lexicon() const { return lexicon_; }
  KnowledgeBase& base() { return base_; }
  const KnowledgeBase& base() const { return base_; }
  const LoadReport& startup() const { return startup_; }
  const SessionConfig& config() const { return config_; }
  const std::optional<KbFile>& kb_file() const { return kb_file_; }

  /// Parses and translates a sentence under the session lexicon.
  std::vector<Statement> translate(const std::string& sentence, SentenceKind& kind) const;
  std::optional<SentenceError> classify(const std::exception& e) const;

  /// Asserts a sentence; `persist` appends it to the kb file when accepted.
  AddOutcome add(const std::string& sentence, bool persist, Provenance provenance = Provenance::interactive());
  RemoveOutcome remove(const std::string& sentence, bool persist);
  AskOutcome ask(const std::string& question) const;
  CompletionSet complete(const std::string& prefix) const;

  /// Adds a lexicon entry (e.g. from the console's new-word dialog).
  void add_lexicon_entry(const LexEntry& entry, bool persist);

  /// Re-points (or, with `append`, adds) the kb file's dump and reloads.
  void ingest(const std::filesystem::path& dump, bool append);
  ExtractOutcome extract(const std::filesystem::path& root, bool persist);

  /// Writes the kb file (sentences plus quarantine annotations).
  void save() const;

 private:
  Session() = default;
  void load();
  /// Writes the edited file, then reloads everything from it.
  void rewrite();

  SessionConfig config_;
  std::optional<KbFile> kb_file_;
  Lexicon lexicon_;
  KnowledgeBase base_;
  LoadReport startup_;
};

/// One line: the violated statement and its witness.
std::string summarize_violation(const KnowledgeBase& base, const Violation& v, const Entry* rejected = nullptr);
/// Several lines: statement, witness, and the supporting statements.
std::string describe_violation(const KnowledgeBase& base, const Violation& v, const Entry* rejected = nullptr);

}  // namespace cnldoc
