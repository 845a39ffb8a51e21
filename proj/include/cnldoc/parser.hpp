#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnldoc/grammar.hpp"
#include "cnldoc/lexicon.hpp"
#include "cnldoc/tokens.hpp"

namespace cnldoc {

enum class SentenceKind { Declarative, Question };

/// A constituent. Inner nodes carry the nonterminal label and the tag of the
/// production used; leaves carry their token.
struct ParseNode {
  std::string label;
  std::string tag;
  std::vector<ParseNode> children;
  std::optional<Token> token;

  bool is_leaf() const { return token.has_value(); }
  const ParseNode& child(std::size_t i) const { return children.at(i); }
  /// Structural equality: same labels, tags, and words (spans ignored).
  bool same_structure(const ParseNode& o) const;
  /// Bracketed rendering, e.g. (decl.name EventHandler (vp.tv ...)).
  std::string to_string() const;
};

struct ParseTree {
  SentenceKind kind = SentenceKind::Declarative;
  ParseNode root;

  bool same_structure(const ParseTree& o) const { return kind == o.kind && root.same_structure(o.root); }
  std::string to_string() const { return root.to_string(); }
};

struct Completion {
  std::string surface;
  std::string category;  // "function-word", "noun", ..., "variable", "number", "punctuation"
  bool operator==(const Completion&) const = default;
  auto operator<=>(const Completion&) const = default;
};

struct CompletionSet {
  std::vector<Completion> tokens;  // sorted, unique
  bool sentence_end = false;

  bool contains(std::string_view surface) const;
  std::vector<std::string> surfaces() const;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t position, CompletionSet expected);
  std::size_t position() const { return position_; }
  const CompletionSet& expected() const { return expected_; }

 private:
  std::size_t position_;
  CompletionSet expected_;
};

/// More than one tree: a defect of the grammar, never a user choice.
class AmbiguityError : public Error {
 public:
  explicit AmbiguityError(std::vector<ParseTree> parses);
  const std::vector<ParseTree>& parses() const { return parses_; }

 private:
  std::vector<ParseTree> parses_;
};

class DeadPrefixError : public Error {
 public:
  DeadPrefixError(std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Incremental Earley recognizer over the lexicon-restricted grammar.
class Recognizer {
 public:
  explicit Recognizer(const Lexicon& lexicon);

  /// Advances over one token. Returns false (and leaves the state unchanged)
  /// when the token cannot continue the prefix.
  bool feed(const Token& token);
  std::size_t position() const { return sets_.size() - 1; }

  /// Terminal classes that can follow the current prefix.
  std::vector<Terminal> expected() const;
  bool accepted() const;
  /// Fewest further tokens needed to reach a complete sentence.
  std::size_t min_remaining() const;

  /// Every tree for the fed tokens, up to `limit`. Requires accepted().
  std::vector<ParseTree> trees(std::size_t limit) const;

  const GrammarView& view() const { return view_; }

 private:
  struct Item {
    std::uint32_t production;
    std::uint32_t dot;
    std::uint32_t origin;
    bool operator==(const Item&) const = default;
  };
  using ItemSet = std::vector<Item>;

  void close(std::size_t k);
  bool add_item(std::size_t k, Item item);

  GrammarView view_;
  std::vector<ItemSet> sets_;
  std::vector<Token> tokens_;
};

ParseTree parse(std::span<const Token> tokens, const Lexicon& lexicon);
/// tokenize + parse.
ParseTree parse_sentence(std::string_view sentence, const Lexicon& lexicon);

CompletionSet complete(std::span<const Token> prefix, const Lexicon& lexicon);
CompletionSet complete_text(std::string_view prefix, const Lexicon& lexicon);

/// Expands terminal classes into concrete completions for a given position.
CompletionSet expand_terminals(const std::vector<Terminal>& terminals, const Lexicon& lexicon,
                               bool sentence_initial);

/// Lexical category a terminal class draws from, if any.
std::optional<Category> terminal_category(Terminal t);

}  // namespace cnldoc
