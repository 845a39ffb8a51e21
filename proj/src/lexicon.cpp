#include "cnldoc/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace cnldoc {

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {
    "proper-name", "noun", "transitive-verb", "of-construct", "adjective-preposition"};

std::string hyphenate(std::string s) {
  std::replace(s.begin(), s.end(), ' ', '-');
  return s;
}

void check_form(const std::string& form, std::size_t line) {
  if (form.empty()) throw LexiconError("empty form", line);
  if (is_function_word(form)) throw LexiconError("'" + form + "' is a function word", line);
  if (is_variable_surface(form)) throw LexiconError("'" + form + "' is reserved for variables", line);
  if (std::all_of(form.begin(), form.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw LexiconError("'" + form + "' is a number", line);
  }
  char last = form.back();
  if (last == '.' || last == '?') throw LexiconError("'" + form + "' ends with punctuation", line);
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<Category> category_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<Category>(i);
  }
  if (s == "verb") return Category::TransitiveVerb;
  return std::nullopt;
}

std::string_view to_string(FormSlot s) {
  switch (s) {
    case FormSlot::Name: return "name";
    case FormSlot::Singular: return "singular";
    case FormSlot::Plural: return "plural";
    case FormSlot::ThirdSingular: return "third-singular";
    case FormSlot::PluralVerb: return "plural";
    case FormSlot::PastParticiple: return "past-participle";
    case FormSlot::Adjective: return "adjective";
  }
  return "?";
}

LexEntry LexEntry::proper_name(std::string name) {
  LexEntry e;
  e.category = Category::ProperName;
  name = text::collapse_spaces(name);
  if (name.size() > 4 && (name.rfind("The ", 0) == 0 || name.rfind("the ", 0) == 0)) {
    e.definite = true;
    name = name.substr(4);
  }
  e.forms = {std::move(name)};
  return e;
}

LexEntry LexEntry::noun(std::string singular, std::string plural) {
  LexEntry e;
  e.category = Category::Noun;
  e.forms = {text::collapse_spaces(singular), text::collapse_spaces(plural)};
  return e;
}

LexEntry LexEntry::verb(std::string third_singular, std::string plural,
                        std::optional<std::string> past_participle) {
  LexEntry e;
  e.category = Category::TransitiveVerb;
  e.forms = {text::collapse_spaces(third_singular), text::collapse_spaces(plural)};
  if (past_participle && *past_participle != "-") {
    e.forms.push_back(text::collapse_spaces(*past_participle));
  } else {
    e.passive_allowed = false;
  }
  return e;
}

LexEntry LexEntry::of_construct(std::string singular, std::string plural) {
  LexEntry e;
  e.category = Category::OfConstruct;
  e.forms = {text::collapse_spaces(singular), text::collapse_spaces(plural)};
  return e;
}

LexEntry LexEntry::adjective_preposition(std::string adjective, std::string preposition) {
  LexEntry e;
  e.category = Category::AdjectivePreposition;
  e.forms = {text::collapse_spaces(adjective), text::collapse_spaces(preposition)};
  return e;
}

std::vector<FormSlot> LexEntry::slots() const {
  switch (category) {
    case Category::ProperName: return {FormSlot::Name};
    case Category::Noun:
    case Category::OfConstruct: return {FormSlot::Singular, FormSlot::Plural};
    case Category::TransitiveVerb:
      if (passive_allowed) return {FormSlot::ThirdSingular, FormSlot::PluralVerb, FormSlot::PastParticiple};
      return {FormSlot::ThirdSingular, FormSlot::PluralVerb};
    case Category::AdjectivePreposition: return {FormSlot::Adjective};
  }
  return {};
}

std::optional<std::string> LexEntry::surface(FormSlot slot) const {
  switch (category) {
    case Category::ProperName:
      if (slot != FormSlot::Name) return std::nullopt;
      return definite ? "the " + forms[0] : forms[0];
    case Category::Noun:
      if (slot == FormSlot::Singular) return forms[0];
      if (slot == FormSlot::Plural) return forms[1];
      return std::nullopt;
    case Category::OfConstruct:
      if (slot == FormSlot::Singular) return forms[0] + " of";
      if (slot == FormSlot::Plural) return forms[1] + " of";
      return std::nullopt;
    case Category::TransitiveVerb:
      if (slot == FormSlot::ThirdSingular) return forms[0];
      if (slot == FormSlot::PluralVerb) return forms[1];
      if (slot == FormSlot::PastParticiple && passive_allowed) return forms[2];
      return std::nullopt;
    case Category::AdjectivePreposition:
      if (slot == FormSlot::Adjective) return forms[0] + " " + forms[1];
      return std::nullopt;
  }
  return std::nullopt;
}

std::string LexEntry::predicate() const {
  switch (category) {
    case Category::ProperName: return {};
    case Category::Noun: return hyphenate(forms[0]);
    case Category::TransitiveVerb: return hyphenate(forms[0]);
    case Category::OfConstruct: return hyphenate(forms[0]) + "-of";
    case Category::AdjectivePreposition: return hyphenate(forms[0]) + "-" + hyphenate(forms[1]);
  }
  return {};
}

std::string LexEntry::to_line() const {
  std::string out(to_string(category));
  if (category == Category::ProperName) {
    return out + " | " + (definite ? "The " : "") + forms[0];
  }
  for (const auto& f : forms) out += " | " + f;
  if (category == Category::TransitiveVerb && !passive_allowed) out += " | -";
  return out;
}

std::optional<LexEntry> parse_lexicon_line(std::string_view raw, std::size_t line_no) {
  std::string line = text::strip_comment(raw);
  line = text::trim(line);
  if (line.empty()) return std::nullopt;
  std::vector<std::string> parts = text::split_trimmed(line, '|');
  auto cat = category_from_string(parts[0]);
  if (!cat) throw LexiconError("unknown category '" + parts[0] + "'", line_no);
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) {
      throw LexiconError("wrong number of forms for " + parts[0], line_no);
    }
  };
  LexEntry e;
  switch (*cat) {
    case Category::ProperName:
      need(1, 1);
      e = LexEntry::proper_name(parts[1]);
      break;
    case Category::Noun:
      need(2, 2);
      e = LexEntry::noun(parts[1], parts[2]);
      break;
    case Category::TransitiveVerb:
      need(2, 3);
      e = LexEntry::verb(parts[1], parts[2],
                         parts.size() > 3 ? std::optional<std::string>(parts[3]) : std::nullopt);
      break;
    case Category::OfConstruct:
      need(2, 2);
      e = LexEntry::of_construct(parts[1], parts[2]);
      break;
    case Category::AdjectivePreposition:
      need(2, 2);
      e = LexEntry::adjective_preposition(parts[1], parts[2]);
      break;
  }
  for (const auto& f : e.forms) check_form(f, line_no);
  return e;
}

Lexicon Lexicon::from_stream(std::istream& in) {
  std::vector<LexEntry> entries;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto e = parse_lexicon_line(line, n)) entries.push_back(std::move(*e));
  }
  return Lexicon{}.with(entries);
}

Lexicon Lexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError("cannot open lexicon file " + path);
  try {
    return from_stream(in);
  } catch (const LexiconError& e) {
    throw LexiconError(path + ": " + e.what());
  }
}

Lexicon Lexicon::from_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return from_stream(in);
}

Lexicon Lexicon::with(const std::vector<LexEntry>& entries, bool merge_names) const {
  Lexicon out = *this;
  out.entries_.reserve(out.entries_.size() + entries.size());
  for (const auto& e : entries) {
    if (e.category == Category::ProperName && out.by_name_.count(e.name())) {
      if (merge_names || out.entries_[out.by_name_.at(e.name())] == e) continue;
      throw LexiconError("duplicate proper name '" + e.name() + "'");
    }
    if (e.category != Category::ProperName) {
      // Re-declaring an identical entry is harmless (layered lexicon files).
      auto it = out.by_predicate_.find(e.predicate());
      if (it != out.by_predicate_.end() && out.entries_[it->second] == e) continue;
    }
    for (const auto& f : e.forms) check_form(f, 0);
    out.entries_.push_back(e);
    out.index_entry(static_cast<std::uint32_t>(out.entries_.size() - 1), merge_names);
  }
  return out;
}

void Lexicon::index_entry(std::uint32_t id, bool /*merge_names*/) {
  const LexEntry& e = entries_[id];
  if (e.category == Category::ProperName) {
    by_name_.emplace(e.name(), id);
  } else {
    std::string pred = e.predicate();
    auto [it, inserted] = by_predicate_.emplace(pred, id);
    if (!inserted) {
      entries_.pop_back();
      throw LexiconError("predicate name '" + pred + "' already defined by another entry");
    }
  }

  std::vector<std::pair<std::string, Reading>> pending;
  for (FormSlot slot : e.slots()) {
    std::string s = *e.surface(slot);
    pending.push_back({s, Reading{id, slot}});
    if (e.category != Category::ProperName && s.find(' ') != std::string::npos) {
      pending.push_back({hyphenate(s), Reading{id, slot}});
    }
  }

  // Validate before mutating the surface index.
  for (const auto& [s, r] : pending) {
    auto it = by_surface_.find(s);
    if (it == by_surface_.end()) continue;
    for (const Reading& other : it->second) {
      const LexEntry& o = entries_[other.entry];
      if (other.entry == id) continue;
      bool clash = o.category == e.category ||
                   (o.category == Category::ProperName) != (e.category == Category::ProperName);
      if (clash) {
        entries_.pop_back();
        if (e.category == Category::ProperName) by_name_.erase(e.name());
        else by_predicate_.erase(e.predicate());
        throw LexiconError("surface '" + s + "' already used by " + std::string(to_string(o.category)) +
                           " entry '" + o.forms[0] + "'");
      }
    }
  }
  for (auto& [s, r] : pending) {
    auto& readings = by_surface_[s];
    if (std::find(readings.begin(), readings.end(), r) == readings.end()) readings.push_back(r);
    std::vector<std::string> words = text::split_words(s);
    auto& span = first_word_span_[words.front()];
    span = std::max(span, words.size());
  }
}

const std::vector<Reading>* Lexicon::lookup(const std::string& surface) const {
  auto it = by_surface_.find(surface);
  return it == by_surface_.end() ? nullptr : &it->second;
}

std::size_t Lexicon::max_words_starting_with(const std::string& first_word) const {
  auto it = first_word_span_.find(first_word);
  return it == first_word_span_.end() ? 0 : it->second;
}

std::optional<std::uint32_t> Lexicon::find_proper_name(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Lexicon::find_predicate(const std::string& predicate) const {
  auto it = by_predicate_.find(predicate);
  if (it == by_predicate_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Lexicon::of_category(Category c) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].category == c) out.push_back(i);
  }
  return out;
}

bool Lexicon::has_slot(FormSlot slot, bool require_passive) const {
  for (const auto& e : entries_) {
    if (require_passive && !e.passive_allowed) continue;
    auto slots = e.slots();
    if (std::find(slots.begin(), slots.end(), slot) != slots.end()) return true;
  }
  return false;
}

const std::vector<std::string>& function_words() {
  static const std::vector<std::string> words = {
      "every", "no",   "if",   "then", "and",        "that",      "is",
      "are",   "a",    "an",   "by",   "which",      "what",      "everything",
      "something", "more than", "at most", "at least", "exactly"};
  return words;
}

bool is_function_word(std::string_view word) {
  std::string lower = text::to_lower(word);
  const auto& fw = function_words();
  return std::find(fw.begin(), fw.end(), lower) != fw.end();
}

bool is_variable_surface(std::string_view s) { return s == "X" || s == "Y" || s == "Z"; }

}  // namespace cnldoc
