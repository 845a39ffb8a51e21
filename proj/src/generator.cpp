#include "cnldoc/generator.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace cnldoc {

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty() && w != "." && w != "?") out += ' ';
    out += w;
  }
  return out;
}

SentenceGenerator::SentenceGenerator(const Lexicon& lexicon, std::uint64_t seed, std::size_t max_tokens)
    : lexicon_(lexicon), view_(lexicon), rng_(seed), max_tokens_(max_tokens) {}

std::string SentenceGenerator::pick_number() {
  return std::to_string(std::uniform_int_distribution<int>(2, 120)(rng_));
}

std::string SentenceGenerator::realize(Terminal t, bool initial) {
  auto from = [&](Category c, FormSlot slot) {
    std::vector<std::string> forms;
    for (std::uint32_t id : lexicon_.of_category(c)) {
      const LexEntry& e = lexicon_.entry(id);
      if (auto s = e.surface(slot)) forms.push_back(initial && e.definite ? text::capitalize(*s) : *s);
    }
    if (forms.empty()) throw Error("internal: no form for terminal " + std::string(terminal_name(t)));
    return forms[std::uniform_int_distribution<std::size_t>(0, forms.size() - 1)(rng_)];
  };
  switch (t) {
    case Terminal::ProperName: return from(Category::ProperName, FormSlot::Name);
    case Terminal::NounSg: return from(Category::Noun, FormSlot::Singular);
    case Terminal::NounPl: return from(Category::Noun, FormSlot::Plural);
    case Terminal::VerbSg: return from(Category::TransitiveVerb, FormSlot::ThirdSingular);
    case Terminal::VerbPl: return from(Category::TransitiveVerb, FormSlot::PluralVerb);
    case Terminal::VerbPastPart: return from(Category::TransitiveVerb, FormSlot::PastParticiple);
    case Terminal::OfSg: return from(Category::OfConstruct, FormSlot::Singular);
    case Terminal::OfPl: return from(Category::OfConstruct, FormSlot::Plural);
    case Terminal::AdjPrep: return from(Category::AdjectivePreposition, FormSlot::Adjective);
    case Terminal::Variable: {
      static const char* vars[] = {"X", "Y", "Z"};
      return vars[std::uniform_int_distribution<int>(0, 2)(rng_)];
    }
    case Terminal::NumberOne: return "1";
    case Terminal::Number: return pick_number();
    default: {
      std::string w(terminal_literal(t));
      return initial ? text::capitalize(w) : w;
    }
  }
}

GeneratedSentence SentenceGenerator::derive() {
  const Grammar& g = view_.grammar();
  GeneratedSentence out;
  // Leftmost derivation; `pending` holds the unexpanded suffix, reversed.
  std::vector<Symbol> pending{g.start()};
  std::size_t pending_min = view_.min_length(g.start());
  while (!pending.empty()) {
    Symbol s = pending.back();
    pending.pop_back();
    if (is_terminal(s)) {
      out.words.push_back(realize(symbol_terminal(s), out.words.empty()));
      pending_min -= 1;
      continue;
    }
    std::size_t rest = pending_min - view_.min_length(s);
    std::size_t budget = max_tokens_ - out.words.size() - rest;
    std::vector<std::uint32_t> options;
    for (std::uint32_t id : g.productions_of(s)) {
      if (view_.enabled(id) && view_.min_length(g.productions()[id], 0) <= budget) options.push_back(id);
    }
    if (options.empty()) throw Error("internal: no production fits for " + g.nonterminal_name(s));
    const Production& p = g.productions()[options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_)]];
    pending_min = rest + view_.min_length(p, 0);
    for (auto it = p.rhs.rbegin(); it != p.rhs.rend(); ++it) pending.push_back(*it);
  }
  out.text = join_words(out.words);
  return out;
}

std::optional<GeneratedSentence> SentenceGenerator::picker_walk() {
  GeneratedSentence out;
  Recognizer rec(lexicon_);
  std::vector<Token> tokens;
  while (out.words.size() < max_tokens_) {
    CompletionSet cs = expand_terminals(rec.expected(), lexicon_, tokens.empty());
    std::vector<Completion> options = cs.tokens;
    std::shuffle(options.begin(), options.end(), rng_);
    bool advanced = false;
    for (const Completion& c : options) {
      std::string word = c.surface == "<number>" ? pick_number() : c.surface;
      std::vector<std::string> words = out.words;
      words.push_back(word);
      std::vector<Token> next;
      try {
        next = tokenize(join_words(words), lexicon_);
      } catch (const Error&) {
        continue;
      }
      // The pick must become exactly one new token.
      if (next.size() != tokens.size() + 1) continue;
      if (!std::equal(tokens.begin(), tokens.end(), next.begin(),
                      [](const Token& a, const Token& b) { return a.same_word(b); })) {
        continue;
      }
      Recognizer trial = rec;
      if (!trial.feed(next.back())) continue;
      const bool end = next.back().kind == TokenKind::Period || next.back().kind == TokenKind::QuestionMark;
      if (end) {
        if (!trial.accepted()) continue;
      } else if (next.size() + trial.min_remaining() > max_tokens_) {
        continue;
      }
      rec = std::move(trial);
      tokens = std::move(next);
      out.words = std::move(words);
      advanced = true;
      break;
    }
    if (!advanced) return std::nullopt;
    if (rec.accepted()) {
      out.text = join_words(out.words);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace cnldoc
