#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cnldoc/errors.hpp"

namespace cnldoc {

enum class Category : std::uint8_t {
  ProperName,
  Noun,
  TransitiveVerb,
  OfConstruct,
  AdjectivePreposition,
};

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// Which surface form of an entry a token realizes.
enum class FormSlot : std::uint8_t {
  Name,          // proper name
  Singular,      // noun / of-construct singular
  Plural,        // noun / of-construct plural
  ThirdSingular, // verb "maintains"
  PluralVerb,    // verb "maintain"
  PastParticiple,// verb "maintained"
  Adjective,     // "related to"
};

std::string_view to_string(FormSlot s);

/// One dictionary entry. Surfaces are stored fully assembled: an
/// of-construct's singular is "member of", an adjective-preposition is
/// "related to", a definite proper name is "the EventManager Tutorial".
struct LexEntry {
  Category category = Category::ProperName;
  // Forms exactly as written in the lexicon file (without "of"/"The").
  std::vector<std::string> forms;
  bool definite = false;
  bool passive_allowed = true;

  static LexEntry proper_name(std::string name);
  static LexEntry noun(std::string singular, std::string plural);
  static LexEntry verb(std::string third_singular, std::string plural,
                       std::optional<std::string> past_participle);
  static LexEntry of_construct(std::string singular, std::string plural);
  static LexEntry adjective_preposition(std::string adjective, std::string preposition);

  /// Surface text for a slot, or nullopt when the slot does not apply.
  /// Definite proper names render with a lower-case "the".
  std::optional<std::string> surface(FormSlot slot) const;
  std::vector<FormSlot> slots() const;

  /// Logical predicate name ("class", "belongs-to", "member-of", ...).
  /// Empty for proper names.
  std::string predicate() const;
  /// Constant name for proper names (surface without the article).
  const std::string& name() const { return forms.front(); }

  /// Canonical lexicon-file line for this entry.
  std::string to_line() const;

  bool operator==(const LexEntry&) const = default;
};

/// Parses one `category | form | form ...` line. Blank/comment lines yield nullopt.
std::optional<LexEntry> parse_lexicon_line(std::string_view line, std::size_t line_no = 0);

/// A reading of a surface: which entry and which slot.
struct Reading {
  std::uint32_t entry = 0;
  FormSlot slot = FormSlot::Name;
  bool operator==(const Reading&) const = default;
};

/// Immutable collection of entries with lookup indices. Updates return a new
/// value; copies share nothing mutable.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon from_stream(std::istream& in);
  static Lexicon from_file(const std::string& path);
  static Lexicon from_string(std::string_view text);

  /// Returns a lexicon extended by `entries`; throws LexiconError on any
  /// uniqueness violation. Proper names already present are skipped when
  /// `merge_names` is set (the same individual declared twice).
  Lexicon with(const std::vector<LexEntry>& entries, bool merge_names = false) const;

  const std::vector<LexEntry>& entries() const { return entries_; }
  const LexEntry& entry(std::uint32_t id) const { return entries_.at(id); }
  std::size_t size() const { return entries_.size(); }

  /// Readings whose surface is exactly `surface` (hyphenated spellings of
  /// multiword non-name surfaces are accepted too).
  const std::vector<Reading>* lookup(const std::string& surface) const;
  /// Maximum number of words in any surface starting with `first_word`.
  std::size_t max_words_starting_with(const std::string& first_word) const;

  std::optional<std::uint32_t> find_proper_name(const std::string& name) const;
  std::optional<std::uint32_t> find_predicate(const std::string& predicate) const;

  /// Ids of entries with a given category (in insertion order).
  std::vector<std::uint32_t> of_category(Category c) const;
  bool has_slot(FormSlot slot, bool require_passive = false) const;

 private:
  void index_entry(std::uint32_t id, bool merge_names);

  std::vector<LexEntry> entries_;
  std::unordered_map<std::string, std::vector<Reading>> by_surface_;
  std::unordered_map<std::string, std::size_t> first_word_span_;
  std::unordered_map<std::string, std::uint32_t> by_predicate_;
  std::unordered_map<std::string, std::uint32_t> by_name_;
};

/// Function words of the controlled language, lower-case, possibly multiword.
const std::vector<std::string>& function_words();
bool is_function_word(std::string_view word);  // case-insensitive
bool is_variable_surface(std::string_view s);

}  // namespace cnldoc
