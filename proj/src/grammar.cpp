#include "cnldoc/grammar.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace cnldoc {

namespace {

struct TerminalInfo {
  std::string_view name;
  std::string_view literal;
};

constexpr std::array<TerminalInfo, kTerminalCount> kTerminals = {{
    {"'every'", "every"},
    {"'no'", "no"},
    {"'if'", "if"},
    {"'then'", "then"},
    {"'and'", "and"},
    {"'that'", "that"},
    {"'is'", "is"},
    {"'are'", "are"},
    {"'a'", "a"},
    {"'an'", "an"},
    {"'by'", "by"},
    {"'which'", "which"},
    {"'what'", "what"},
    {"'everything'", "everything"},
    {"'something'", "something"},
    {"'more than'", "more than"},
    {"'at most'", "at most"},
    {"'at least'", "at least"},
    {"'exactly'", "exactly"},
    {"#pn", ""},
    {"#noun", ""},
    {"#noun-pl", ""},
    {"#tv", ""},
    {"#tv-pl", ""},
    {"#pp", ""},
    {"#of", ""},
    {"#of-pl", ""},
    {"#adj", ""},
    {"#var", ""},
    {"#one", ""},
    {"#num", ""},
    {"'.'", "."},
    {"'?'", "?"},
}};

bool lookup_terminal(std::string_view name, Terminal& out) {
  for (std::size_t i = 0; i < kTerminals.size(); ++i) {
    if (kTerminals[i].name == name) {
      out = static_cast<Terminal>(i);
      return true;
    }
  }
  return false;
}

bool has_reading(const Token& token, const Lexicon& lexicon, Category c, FormSlot slot) {
  for (const Reading& r : token.readings) {
    if (r.slot == slot && lexicon.entry(r.entry).category == c) return true;
  }
  return false;
}

}  // namespace

std::string_view terminal_name(Terminal t) { return kTerminals[static_cast<std::size_t>(t)].name; }

std::string_view terminal_literal(Terminal t) { return kTerminals[static_cast<std::size_t>(t)].literal; }

bool is_function_word_terminal(Terminal t) { return t <= Terminal::Exactly; }

bool function_word_terminal(std::string_view word, Terminal& out) {
  for (std::size_t i = 0; i <= static_cast<std::size_t>(Terminal::Exactly); ++i) {
    if (kTerminals[i].literal == word) {
      out = static_cast<Terminal>(i);
      return true;
    }
  }
  return false;
}

bool matches(Terminal t, const Token& token, const Lexicon& lexicon) {
  switch (t) {
    case Terminal::ProperName:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::ProperName, FormSlot::Name);
    case Terminal::NounSg:
      return token.kind == TokenKind::Lexical && has_reading(token, lexicon, Category::Noun, FormSlot::Singular);
    case Terminal::NounPl:
      return token.kind == TokenKind::Lexical && has_reading(token, lexicon, Category::Noun, FormSlot::Plural);
    case Terminal::VerbSg:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::TransitiveVerb, FormSlot::ThirdSingular);
    case Terminal::VerbPl:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::TransitiveVerb, FormSlot::PluralVerb);
    case Terminal::VerbPastPart:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::TransitiveVerb, FormSlot::PastParticiple);
    case Terminal::OfSg:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::OfConstruct, FormSlot::Singular);
    case Terminal::OfPl:
      return token.kind == TokenKind::Lexical && has_reading(token, lexicon, Category::OfConstruct, FormSlot::Plural);
    case Terminal::AdjPrep:
      return token.kind == TokenKind::Lexical &&
             has_reading(token, lexicon, Category::AdjectivePreposition, FormSlot::Adjective);
    case Terminal::Variable: return token.kind == TokenKind::Variable;
    case Terminal::NumberOne: return token.kind == TokenKind::Number && token.number == 1;
    case Terminal::Number: return token.kind == TokenKind::Number && token.number != 1;
    case Terminal::Period: return token.kind == TokenKind::Period;
    case Terminal::QuestionMark: return token.kind == TokenKind::QuestionMark;
    default:
      return token.kind == TokenKind::FunctionWord && token.surface == terminal_literal(t);
  }
}

const Grammar& Grammar::instance() {
  static const Grammar g;
  return g;
}

int Grammar::nonterminal(const std::string& name) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return static_cast<int>(it - names_.begin());
  names_.push_back(name);
  by_lhs_.emplace_back();
  return static_cast<int>(names_.size() - 1);
}

void Grammar::add(const std::string& lhs, const std::vector<std::string>& rhs, std::string tag) {
  Production p;
  p.lhs = nonterminal(lhs);
  for (const auto& s : rhs) {
    Terminal t;
    if (lookup_terminal(s, t)) {
      p.rhs.push_back(terminal_symbol(t));
    } else {
      p.rhs.push_back(nonterminal(s));
    }
  }
  p.tag = std::move(tag);
  by_lhs_[p.lhs].push_back(static_cast<std::uint32_t>(productions_.size()));
  productions_.push_back(std::move(p));
}

std::string Grammar::symbol_name(Symbol s) const {
  if (is_terminal(s)) return std::string(terminal_name(symbol_terminal(s)));
  return names_[s];
}

// Contexts for verb and noun phrases:
//   b  plain (no variables, no universal objects)
//   v  inside "if ... then ..." (variables licensed)
//   e  main verb phrase of a declarative (objects may be "every N")
Grammar::Grammar() {
  nonterminal("sentence");

  add("sentence", {"decl", "'.'"}, "sentence.declarative");
  add("sentence", {"quest", "'?'"}, "sentence.question");

  add("decl", {"#pn", "dvps"}, "decl.name");
  add("decl", {"det", "#of", "#pn", "'is'", "#pn"}, "decl.of-fact");
  add("decl", {"'every'", "nom", "dvps"}, "decl.every");
  add("decl", {"'no'", "nom", "nvps"}, "decl.no");
  add("decl", {"'everything'", "cvp.sg"}, "decl.everything");
  add("decl", {"'if'", "conds", "'then'", "conseqs"}, "decl.if");

  add("det", {"'a'"}, "det");
  add("det", {"'an'"}, "det");

  add("nom", {"#noun"}, "nom.noun");
  add("nom", {"#noun", "rc.sg.b"}, "nom.noun-rc");
  add("nom", {"#of", "np.b"}, "nom.of");
  add("nom.pl", {"#noun-pl"}, "nom.noun");
  add("nom.pl", {"#noun-pl", "rc.pl.b"}, "nom.noun-rc");
  add("nom.pl", {"#of-pl", "np.b"}, "nom.of");

  add("dvps", {"dvp"}, "list.first");
  add("dvps", {"dvps", "'and'", "dvp"}, "list.next");
  add("dvp", {"vp.sg.e"}, "dvp.vp");
  add("dvp", {"cvp.sg"}, "dvp.count");
  add("nvps", {"vp.sg.b"}, "list.first");
  add("nvps", {"nvps", "'and'", "vp.sg.b"}, "list.next");

  add("conds", {"cond"}, "conds.first");
  add("conds", {"conds", "'and'", "cond"}, "conds.clause");
  add("conds", {"conds", "'and'", "vp.sg.v"}, "conds.ellipsis");
  add("cond", {"subj", "vp.sg.v"}, "clause");
  add("subj", {"#var"}, "subj.var");
  add("subj", {"'something'"}, "subj.something");
  add("subj", {"#pn"}, "subj.name");
  add("conseqs", {"conseq"}, "conds.first");
  add("conseqs", {"conseqs", "'and'", "conseq"}, "conds.clause");
  add("conseqs", {"conseqs", "'and'", "vp.sg.v"}, "conds.ellipsis");
  add("conseq", {"csubj", "vp.sg.v"}, "clause");
  add("csubj", {"#var"}, "subj.var");
  add("csubj", {"#pn"}, "subj.name");

  add("quest", {"'which'", "nom", "qvps.sg"}, "quest.which");
  add("quest", {"'which'", "nom.pl", "qvps.pl"}, "quest.which");
  add("quest", {"'what'", "qvps.sg"}, "quest.what");
  for (std::string n : {"sg", "pl"}) {
    add("qvps." + n, {"vpl." + n}, "qvps.plain");
    add("qvps." + n, {"vpl." + n, "'and'", "cvp." + n}, "qvps.count-last");
    add("qvps." + n, {"cvp." + n}, "qvps.count");
    add("vpl." + n, {"vp." + n + ".b"}, "list.first");
    add("vpl." + n, {"vpl." + n, "'and'", "vp." + n + ".b"}, "list.next");
  }

  for (std::string c : {"b", "v", "e"}) {
    const std::string inner = c == "e" ? "b" : c;
    const std::string vp = "vp.sg." + c;
    const std::string np = "np." + c;
    add(vp, {"'is'", "det", "#noun"}, "vp.cop-noun");
    add(vp, {"'is'", "det", "#noun", "rc.sg." + inner}, "vp.cop-noun-rc");
    add(vp, {"'is'", "det", "#of", np}, "vp.cop-of");
    add(vp, {"#tv", np}, "vp.tv");
    add(vp, {"'is'", "#pp", "'by'", np}, "vp.passive");
    add(vp, {"'is'", "#adj", np}, "vp.adj");

    add(np, {"#pn"}, "np.name");
    add(np, {"det", "#noun"}, "np.indef");
    add(np, {"det", "#noun", "rc.sg." + inner}, "np.indef-rc");
    add(np, {"det", "#of", "np." + inner}, "np.indef-of");
    add(np, {"'something'"}, "np.something");
    add(np, {"'something'", "rc.sg." + inner}, "np.something-rc");
    if (c == "v") add(np, {"#var"}, "np.var");
    if (c == "e") {
      add(np, {"'every'", "#noun"}, "np.every");
      add(np, {"'every'", "#noun", "rc.sg.b"}, "np.every-rc");
      add(np, {"'every'", "#of", "np.b"}, "np.every-of");
    }
  }
  add("rc.sg.b", {"'that'", "vp.sg.b"}, "rc");
  add("rc.sg.v", {"'that'", "vp.sg.v"}, "rc");
  add("rc.pl.b", {"'that'", "vp.pl.b"}, "rc");

  add("vp.pl.b", {"'are'", "#noun-pl"}, "vp.cop-noun");
  add("vp.pl.b", {"'are'", "#noun-pl", "rc.pl.b"}, "vp.cop-noun-rc");
  add("vp.pl.b", {"'are'", "#of-pl", "np.b"}, "vp.cop-of");
  add("vp.pl.b", {"#tv-pl", "np.b"}, "vp.tv");
  add("vp.pl.b", {"'are'", "#pp", "'by'", "np.b"}, "vp.passive");
  add("vp.pl.b", {"'are'", "#adj", "np.b"}, "vp.adj");

  add("cvp.sg", {"#tv", "cmp", "qty"}, "cvp.active");
  add("cvp.sg", {"'is'", "#pp", "'by'", "cmp", "qty"}, "cvp.passive");
  add("cvp.pl", {"#tv-pl", "cmp", "qty"}, "cvp.active");
  add("cvp.pl", {"'are'", "#pp", "'by'", "cmp", "qty"}, "cvp.passive");
  add("cmp", {"'more than'"}, "cmp.more-than");
  add("cmp", {"'at most'"}, "cmp.at-most");
  add("cmp", {"'at least'"}, "cmp.at-least");
  add("cmp", {"'exactly'"}, "cmp.exactly");
  add("qty", {"#one", "#noun"}, "qty");
  add("qty", {"#num", "#noun-pl"}, "qty");

  for (std::size_t nt = 0; nt < names_.size(); ++nt) {
    if (by_lhs_[nt].empty()) throw std::logic_error("grammar: nonterminal without productions: " + names_[nt]);
  }
}

GrammarView::GrammarView(const Lexicon& lexicon)
    : grammar_(&Grammar::instance()), lexicon_(&lexicon), terminal_ok_(kTerminalCount, true) {
  auto avail = [&](Terminal t, bool ok) { terminal_ok_[static_cast<std::size_t>(t)] = ok; };
  avail(Terminal::ProperName, !lexicon.of_category(Category::ProperName).empty());
  avail(Terminal::NounSg, !lexicon.of_category(Category::Noun).empty());
  avail(Terminal::NounPl, !lexicon.of_category(Category::Noun).empty());
  avail(Terminal::VerbSg, !lexicon.of_category(Category::TransitiveVerb).empty());
  avail(Terminal::VerbPl, !lexicon.of_category(Category::TransitiveVerb).empty());
  avail(Terminal::VerbPastPart, lexicon.has_slot(FormSlot::PastParticiple, true));
  avail(Terminal::OfSg, !lexicon.of_category(Category::OfConstruct).empty());
  avail(Terminal::OfPl, !lexicon.of_category(Category::OfConstruct).empty());
  avail(Terminal::AdjPrep, !lexicon.of_category(Category::AdjectivePreposition).empty());

  const auto& prods = grammar_->productions();
  min_len_.assign(grammar_->nonterminal_count(), kInfinite);
  // Bellman-style relaxation: min_len(A) = min over productions of sum of parts.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : prods) {
      std::size_t len = min_length(p, 0);
      if (len < min_len_[p.lhs]) {
        min_len_[p.lhs] = len;
        changed = true;
      }
    }
  }
  enabled_.resize(prods.size());
  for (std::size_t i = 0; i < prods.size(); ++i) enabled_[i] = min_length(prods[i], 0) < kInfinite;
}

std::size_t GrammarView::min_length(const Production& p, std::size_t from) const {
  std::size_t total = 0;
  for (std::size_t i = from; i < p.rhs.size(); ++i) {
    Symbol s = p.rhs[i];
    std::size_t part;
    if (is_terminal(s)) {
      part = terminal_available(symbol_terminal(s)) ? 1 : kInfinite;
    } else {
      part = min_len_[s];
    }
    if (part >= kInfinite) return kInfinite;
    total += part;
  }
  return total;
}

}  // namespace cnldoc
