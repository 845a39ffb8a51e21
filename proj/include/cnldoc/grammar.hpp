#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cnldoc/lexicon.hpp"
#include "cnldoc/tokens.hpp"

namespace cnldoc {

/// Terminal classes of the grammar. Lexical classes are expanded against a
/// lexicon; function words match exactly one lower-case word or phrase.
enum class Terminal : std::uint8_t {
  Every, No, If, Then, And, That, Is, Are, A, An, By, Which, What, Everything, Something,
  MoreThan, AtMost, AtLeast, Exactly,
  ProperName, NounSg, NounPl, VerbSg, VerbPl, VerbPastPart, OfSg, OfPl, AdjPrep,
  Variable, NumberOne, Number, Period, QuestionMark,
};
inline constexpr std::size_t kTerminalCount = static_cast<std::size_t>(Terminal::QuestionMark) + 1;

std::string_view terminal_name(Terminal t);
/// The literal text of a function-word or punctuation terminal, empty otherwise.
std::string_view terminal_literal(Terminal t);
bool is_function_word_terminal(Terminal t);
/// Function-word terminal for a lower-case phrase, if any.
bool function_word_terminal(std::string_view word, Terminal& out);

/// Symbols are encoded as ints: nonterminals >= 0, terminals < 0.
using Symbol = int;
inline constexpr Symbol terminal_symbol(Terminal t) { return -1 - static_cast<int>(t); }
inline constexpr bool is_terminal(Symbol s) { return s < 0; }
inline constexpr Terminal symbol_terminal(Symbol s) { return static_cast<Terminal>(-1 - s); }

struct Production {
  int lhs = 0;
  std::vector<Symbol> rhs;
  std::string tag;
};

/// The controlled-English grammar. Immutable and shared.
class Grammar {
 public:
  static const Grammar& instance();

  const std::vector<Production>& productions() const { return productions_; }
  const std::vector<std::uint32_t>& productions_of(int nonterminal) const { return by_lhs_[nonterminal]; }
  const std::string& nonterminal_name(int nt) const { return names_[nt]; }
  std::size_t nonterminal_count() const { return names_.size(); }
  int start() const { return 0; }

  std::string symbol_name(Symbol s) const;

 private:
  Grammar();
  int nonterminal(const std::string& name);
  void add(const std::string& lhs, const std::vector<std::string>& rhs, std::string tag);

  std::vector<Production> productions_;
  std::vector<std::vector<std::uint32_t>> by_lhs_;
  std::vector<std::string> names_;
};

/// Does the token realize the terminal?
bool matches(Terminal t, const Token& token, const Lexicon& lexicon);

/// Grammar restricted to a lexicon: productions using a terminal class the
/// lexicon cannot realize (and, transitively, unproductive nonterminals) are
/// disabled, so every surviving item can be completed to a sentence.
class GrammarView {
 public:
  explicit GrammarView(const Lexicon& lexicon);

  const Grammar& grammar() const { return *grammar_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  bool enabled(std::uint32_t production) const { return enabled_[production]; }
  bool terminal_available(Terminal t) const { return terminal_ok_[static_cast<std::size_t>(t)]; }
  /// Fewest tokens a nonterminal can derive (max() if unproductive).
  std::size_t min_length(int nonterminal) const { return min_len_[nonterminal]; }
  std::size_t min_length(const Production& p, std::size_t from) const;

  static constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max() / 4;

 private:
  const Grammar* grammar_;
  const Lexicon* lexicon_;
  std::vector<bool> enabled_;
  std::vector<bool> terminal_ok_;
  std::vector<std::size_t> min_len_;
};

}  // namespace cnldoc
