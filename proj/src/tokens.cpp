#include "cnldoc/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "cnldoc/grammar.hpp"
#include "cnldoc/parser.hpp"
#include "text_util.hpp"

namespace cnldoc {

namespace {

struct Word {
  std::string text;
  Span span;
  bool punct = false;
};

std::vector<Word> split(std::string_view s) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !text::is_space(s[j])) ++j;
    std::string_view w = s.substr(i, j - i);
    char last = w.back();
    if ((last == '.' || last == '?') && w.size() > 1) {
      words.push_back({std::string(w.substr(0, w.size() - 1)), {i, j - 1}, false});
      words.push_back({std::string(1, last), {j - 1, j}, true});
    } else {
      words.push_back({std::string(w), {i, j}, last == '.' || last == '?'});
    }
    i = j;
  }
  return words;
}

bool all_digits(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<Category> suggestions_after(const std::vector<Token>& tokens, const Lexicon& lexicon) {
  Recognizer rec(lexicon);
  for (const auto& t : tokens) {
    if (!rec.feed(t)) return {};
  }
  std::vector<Category> out;
  for (Terminal t : rec.expected()) {
    if (auto c = terminal_category(t)) {
      if (std::find(out.begin(), out.end(), *c) == out.end()) out.push_back(*c);
    }
  }
  // Any unknown word could become a new proper name where names are expected;
  // keep the order stable by category.
  std::sort(out.begin(), out.end());
  return out;
}

std::string describe_suggestions(const std::vector<Category>& cats) {
  if (cats.empty()) return "";
  std::vector<std::string> names;
  for (Category c : cats) names.emplace_back(to_string(c));
  return " (could be added as: " + text::join(names, ", ") + ")";
}

}  // namespace

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::FunctionWord: return "function-word";
    case TokenKind::Lexical: return "lexical";
    case TokenKind::Variable: return "variable";
    case TokenKind::Number: return "number";
    case TokenKind::Period: return "period";
    case TokenKind::QuestionMark: return "question-mark";
  }
  return "?";
}

UnknownWordError::UnknownWordError(std::string word, Span span, std::size_t token_index,
                                   std::vector<Category> suggestions)
    : Error("unknown word '" + word + "' at column " + std::to_string(span.begin + 1) + describe_suggestions(suggestions)),
      word_(std::move(word)),
      span_(span),
      token_index_(token_index),
      suggestions_(std::move(suggestions)) {}

std::vector<Token> tokenize(std::string_view input, const Lexicon& lexicon) {
  std::vector<Word> words = split(input);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < words.size()) {
    const Word& w = words[i];
    const bool initial = tokens.empty();
    if (w.punct) {
      Token t;
      t.kind = w.text == "." ? TokenKind::Period : TokenKind::QuestionMark;
      t.surface = w.text;
      t.span = w.span;
      tokens.push_back(std::move(t));
      ++i;
      continue;
    }

    // Longest match over lexicon surfaces and function-word phrases.
    std::size_t max_n = std::max<std::size_t>(2, lexicon.max_words_starting_with(w.text));
    if (initial) max_n = std::max(max_n, lexicon.max_words_starting_with(text::flip_initial_case(w.text)));
    max_n = std::min(max_n, words.size() - i);
    bool matched = false;
    for (std::size_t n = max_n; n >= 1 && !matched; --n) {
      std::string phrase = w.text;
      bool crosses_punct = false;
      for (std::size_t k = 1; k < n; ++k) {
        if (words[i + k].punct) {
          crosses_punct = true;
          break;
        }
        phrase += " " + words[i + k].text;
      }
      if (crosses_punct) continue;

      Token t;
      t.span = {w.span.begin, words[i + n - 1].span.end};
      Terminal fw;
      std::string fw_key = initial ? text::to_lower(phrase) : phrase;
      if (function_word_terminal(fw_key, fw)) {
        t.kind = TokenKind::FunctionWord;
        t.surface = fw_key;
      } else {
        auto add = [&](const std::string& key) {
          if (const auto* rs = lexicon.lookup(key)) {
            for (const Reading& r : *rs) {
              if (std::find(t.readings.begin(), t.readings.end(), r) == t.readings.end()) t.readings.push_back(r);
            }
          }
        };
        add(phrase);
        if (initial) add(text::flip_initial_case(phrase));
        if (t.readings.empty()) continue;
        t.kind = TokenKind::Lexical;
        t.surface = phrase;
      }
      tokens.push_back(std::move(t));
      i += n;
      matched = true;
    }
    if (matched) continue;

    Token t;
    t.span = w.span;
    t.surface = w.text;
    if (is_variable_surface(w.text)) {
      t.kind = TokenKind::Variable;
    } else if (all_digits(w.text)) {
      t.kind = TokenKind::Number;
      auto [ptr, ec] = std::from_chars(w.text.data(), w.text.data() + w.text.size(), t.number);
      if (ec != std::errc()) {
        throw UnknownWordError(w.text, w.span, tokens.size(), {});
      }
    } else {
      throw UnknownWordError(w.text, w.span, tokens.size(), suggestions_after(tokens, lexicon));
    }
    tokens.push_back(std::move(t));
    ++i;
  }
  return tokens;
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == TokenKind::Period || t.kind == TokenKind::QuestionMark) {
      out += t.surface;
      continue;
    }
    if (i) out += ' ';
    out += i == 0 ? text::capitalize(t.surface) : t.surface;
  }
  return out;
}

}  // namespace cnldoc
