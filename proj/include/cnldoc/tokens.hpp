#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cnldoc/errors.hpp"
#include "cnldoc/lexicon.hpp"

namespace cnldoc {

enum class TokenKind : std::uint8_t { FunctionWord, Lexical, Variable, Number, Period, QuestionMark };

std::string_view to_string(TokenKind k);

/// Half-open character range into the tokenized text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct Token {
  TokenKind kind = TokenKind::FunctionWord;
  // Function words are stored lower-case ("more than"); other tokens verbatim.
  std::string surface;
  std::vector<Reading> readings;
  Span span;
  std::uint64_t number = 0;

  /// Equality ignores spans: two tokens are the same word in the same role.
  bool same_word(const Token& o) const {
    return kind == o.kind && surface == o.surface && readings == o.readings && number == o.number;
  }
};

/// Raised for a word that matches nothing. `suggestions` lists the lexical
/// categories that would let the sentence continue at that point.
class UnknownWordError : public Error {
 public:
  UnknownWordError(std::string word, Span span, std::size_t token_index, std::vector<Category> suggestions);
  const std::string& word() const { return word_; }
  Span span() const { return span_; }
  std::size_t token_index() const { return token_index_; }
  const std::vector<Category>& suggestions() const { return suggestions_; }

 private:
  std::string word_;
  Span span_;
  std::size_t token_index_;
  std::vector<Category> suggestions_;
};

/// Longest-match tokenization. Multiword names and phrases become one token;
/// a trailing "." or "?" becomes its own token.
std::vector<Token> tokenize(std::string_view text, const Lexicon& lexicon);

/// Renders tokens back to sentence text.
std::string detokenize(const std::vector<Token>& tokens);

}  // namespace cnldoc
