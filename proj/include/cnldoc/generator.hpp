#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cnldoc/lexicon.hpp"
#include "cnldoc/parser.hpp"

namespace cnldoc {

struct GeneratedSentence {
  std::vector<std::string> words;  // one entry per token, as written
  std::string text;
};

/// Random sentences for testing and benchmarks.
class SentenceGenerator {
 public:
  SentenceGenerator(const Lexicon& lexicon, std::uint64_t seed, std::size_t max_tokens = 25);

  /// Top-down derivation from the grammar, independent of the recognizer.
  GeneratedSentence derive();

  /// Picks uniformly from the completion set after every token, the way the
  /// console's picker does, avoiding picks that cannot finish within
  /// max_tokens. Returns nothing if the walk gets stuck.
  std::optional<GeneratedSentence> picker_walk();

 private:
  std::string realize(Terminal t, bool initial);
  std::string pick_number();

  const Lexicon& lexicon_;
  GrammarView view_;
  std::mt19937_64 rng_;
  std::size_t max_tokens_;
};

std::string join_words(const std::vector<std::string>& words);

}  // namespace cnldoc
