#include "cnldoc/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "text_util.hpp"

namespace cnldoc {

namespace {

std::string expected_summary(const CompletionSet& cs) {
  std::vector<std::string> parts;
  std::set<std::string> seen;
  for (const auto& c : cs.tokens) {
    std::string label = c.category == "function-word" || c.category == "punctuation" ? "'" + c.surface + "'"
                                                                                    : "<" + c.category + ">";
    if (seen.insert(label).second) parts.push_back(label);
    if (parts.size() >= 12) {
      parts.push_back("...");
      break;
    }
  }
  return parts.empty() ? "nothing" : text::join(parts, ", ");
}

}  // namespace

// ---------------------------------------------------------------------------
// ParseNode

bool ParseNode::same_structure(const ParseNode& o) const {
  if (label != o.label || tag != o.tag || token.has_value() != o.token.has_value()) return false;
  if (token && !token->same_word(*o.token)) return false;
  if (children.size() != o.children.size()) return false;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (!children[i].same_structure(o.children[i])) return false;
  }
  return true;
}

std::string ParseNode::to_string() const {
  if (token) return token->surface;
  std::string out = "(" + tag;
  for (const auto& c : children) out += " " + c.to_string();
  return out + ")";
}

bool CompletionSet::contains(std::string_view surface) const {
  return std::any_of(tokens.begin(), tokens.end(), [&](const Completion& c) { return c.surface == surface; });
}

std::vector<std::string> CompletionSet::surfaces() const {
  std::vector<std::string> out;
  for (const auto& c : tokens) out.push_back(c.surface);
  return out;
}

SyntaxError::SyntaxError(const std::string& msg, std::size_t position, CompletionSet expected)
    : Error(msg), position_(position), expected_(std::move(expected)) {}

AmbiguityError::AmbiguityError(std::vector<ParseTree> parses)
    : Error("internal grammar error: sentence has " + std::to_string(parses.size()) + " parses"),
      parses_(std::move(parses)) {}

DeadPrefixError::DeadPrefixError(std::size_t position)
    : Error("prefix cannot be continued at token " + std::to_string(position)), position_(position) {}

std::optional<Category> terminal_category(Terminal t) {
  switch (t) {
    case Terminal::ProperName: return Category::ProperName;
    case Terminal::NounSg:
    case Terminal::NounPl: return Category::Noun;
    case Terminal::VerbSg:
    case Terminal::VerbPl:
    case Terminal::VerbPastPart: return Category::TransitiveVerb;
    case Terminal::OfSg:
    case Terminal::OfPl: return Category::OfConstruct;
    case Terminal::AdjPrep: return Category::AdjectivePreposition;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Recognizer

Recognizer::Recognizer(const Lexicon& lexicon) : view_(lexicon) {
  sets_.emplace_back();
  const Grammar& g = view_.grammar();
  for (std::uint32_t p : g.productions_of(g.start())) {
    if (view_.enabled(p)) add_item(0, Item{p, 0, 0});
  }
  close(0);
}

bool Recognizer::add_item(std::size_t k, Item item) {
  auto& set = sets_[k];
  if (std::find(set.begin(), set.end(), item) != set.end()) return false;
  set.push_back(item);
  return true;
}

// Prediction and completion to a fixpoint. No production derives the empty
// string, so the classic algorithm needs no nullable handling.
void Recognizer::close(std::size_t k) {
  const Grammar& g = view_.grammar();
  const auto& prods = g.productions();
  std::vector<bool> predicted(g.nonterminal_count(), false);
  for (std::size_t i = 0; i < sets_[k].size(); ++i) {
    Item item = sets_[k][i];
    const Production& p = prods[item.production];
    if (item.dot < p.rhs.size()) {
      Symbol next = p.rhs[item.dot];
      if (is_terminal(next) || predicted[next]) continue;
      predicted[next] = true;
      for (std::uint32_t q : g.productions_of(next)) {
        if (view_.enabled(q)) add_item(k, Item{q, 0, static_cast<std::uint32_t>(k)});
      }
    } else {
      // Completed: advance every item in the origin set waiting on p.lhs.
      // (origin < k here since productions are non-empty.)
      const auto& origin = sets_[item.origin];
      for (std::size_t j = 0; j < origin.size(); ++j) {
        Item parent = origin[j];
        const Production& pp = prods[parent.production];
        if (parent.dot < pp.rhs.size() && pp.rhs[parent.dot] == p.lhs) {
          add_item(k, Item{parent.production, parent.dot + 1, parent.origin});
        }
      }
    }
  }
}

bool Recognizer::feed(const Token& token) {
  const auto& prods = view_.grammar().productions();
  const std::size_t k = sets_.size() - 1;
  ItemSet next;
  for (const Item& item : sets_[k]) {
    const Production& p = prods[item.production];
    if (item.dot >= p.rhs.size() || !is_terminal(p.rhs[item.dot])) continue;
    if (matches(symbol_terminal(p.rhs[item.dot]), token, view_.lexicon())) {
      Item advanced{item.production, item.dot + 1, item.origin};
      if (std::find(next.begin(), next.end(), advanced) == next.end()) next.push_back(advanced);
    }
  }
  if (next.empty()) return false;
  sets_.push_back(std::move(next));
  tokens_.push_back(token);
  close(k + 1);
  return true;
}

std::vector<Terminal> Recognizer::expected() const {
  const auto& prods = view_.grammar().productions();
  std::vector<bool> seen(kTerminalCount, false);
  for (const Item& item : sets_.back()) {
    const Production& p = prods[item.production];
    if (item.dot < p.rhs.size() && is_terminal(p.rhs[item.dot])) seen[static_cast<std::size_t>(symbol_terminal(p.rhs[item.dot]))] = true;
  }
  std::vector<Terminal> out;
  for (std::size_t t = 0; t < kTerminalCount; ++t) {
    if (seen[t]) out.push_back(static_cast<Terminal>(t));
  }
  return out;
}

bool Recognizer::accepted() const {
  const auto& prods = view_.grammar().productions();
  const int start = view_.grammar().start();
  for (const Item& item : sets_.back()) {
    const Production& p = prods[item.production];
    if (p.lhs == start && item.origin == 0 && item.dot == p.rhs.size()) return true;
  }
  return false;
}

std::size_t Recognizer::min_remaining() const {
  const auto& prods = view_.grammar().productions();
  const std::size_t n_nt = view_.grammar().nonterminal_count();
  constexpr std::size_t inf = GrammarView::kInfinite;
  // up[k][A]: fewest tokens needed to finish the sentence once an A that
  // started at position k has been completed.
  std::vector<std::vector<std::size_t>> up(sets_.size(), std::vector<std::size_t>(n_nt, inf));
  up[0][view_.grammar().start()] = 0;
  for (std::size_t k = 0; k < sets_.size(); ++k) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Item& item : sets_[k]) {
        const Production& p = prods[item.production];
        if (item.dot >= p.rhs.size() || is_terminal(p.rhs[item.dot])) continue;
        std::size_t rest = view_.min_length(p, item.dot + 1);
        std::size_t above = up[item.origin][p.lhs];
        if (rest >= inf || above >= inf) continue;
        std::size_t cand = rest + above;
        auto& slot = up[k][p.rhs[item.dot]];
        if (cand < slot) {
          slot = cand;
          changed = true;
        }
      }
    }
  }
  std::size_t best = inf;
  for (const Item& item : sets_.back()) {
    const Production& p = prods[item.production];
    std::size_t rest = view_.min_length(p, item.dot);
    std::size_t above = up[item.origin][p.lhs];
    if (rest < inf && above < inf) best = std::min(best, rest + above);
  }
  return best;
}

namespace {

// Derivation extraction over the completed Earley items. Counts saturate at
// `cap` so ambiguous forests never blow up.
class ForestWalker {
 public:
  ForestWalker(const GrammarView& view, const std::vector<Token>& tokens,
               std::map<std::pair<int, std::size_t>, std::vector<std::pair<std::uint32_t, std::size_t>>> done)
      : view_(view), tokens_(tokens), done_(std::move(done)) {}

  std::vector<ParseNode> trees(int nt, std::size_t i, std::size_t j, std::size_t limit) {
    std::vector<ParseNode> out;
    auto it = done_.find({nt, i});
    if (it == done_.end()) return out;
    const auto& prods = view_.grammar().productions();
    for (auto [prod, end] : it->second) {
      if (end != j) continue;
      const Production& p = prods[prod];
      for (auto& kids : sequences(prod, 0, i, j, limit - out.size())) {
        ParseNode node;
        node.label = view_.grammar().nonterminal_name(nt);
        node.tag = p.tag;
        node.children = std::move(kids);
        out.push_back(std::move(node));
        if (out.size() >= limit) return out;
      }
    }
    return out;
  }

 private:
  std::size_t count(int nt, std::size_t i, std::size_t j) {
    auto key = std::make_tuple(nt, i, j);
    if (auto it = count_memo_.find(key); it != count_memo_.end()) return it->second;
    count_memo_[key] = 0;  // guards against cycles; the grammar has none
    std::size_t total = 0;
    auto it = done_.find({nt, i});
    if (it != done_.end()) {
      for (auto [prod, end] : it->second) {
        if (end == j) total = std::min<std::size_t>(2, total + seq_count(prod, 0, i, j));
      }
    }
    count_memo_[key] = total;
    return total;
  }

  std::size_t seq_count(std::uint32_t prod, std::size_t dot, std::size_t pos, std::size_t j) {
    const Production& p = view_.grammar().productions()[prod];
    if (dot == p.rhs.size()) return pos == j ? 1 : 0;
    auto key = std::make_tuple(prod, dot, pos, j);
    if (auto it = seq_memo_.find(key); it != seq_memo_.end()) return it->second;
    std::size_t total = 0;
    Symbol s = p.rhs[dot];
    if (is_terminal(s)) {
      if (pos < j && matches(symbol_terminal(s), tokens_[pos], view_.lexicon())) total = seq_count(prod, dot + 1, pos + 1, j);
    } else if (auto it = done_.find({s, pos}); it != done_.end()) {
      std::set<std::size_t> ends;
      for (auto [q, end] : it->second) {
        if (end <= j) ends.insert(end);
      }
      for (std::size_t m : ends) {
        std::size_t left = count(s, pos, m);
        if (!left) continue;
        std::size_t right = seq_count(prod, dot + 1, m, j);
        total = std::min<std::size_t>(2, total + left * right);
      }
    }
    seq_memo_[key] = total;
    return total;
  }

  std::vector<std::vector<ParseNode>> sequences(std::uint32_t prod, std::size_t dot, std::size_t pos, std::size_t j,
                                                std::size_t limit) {
    std::vector<std::vector<ParseNode>> out;
    if (limit == 0 || seq_count(prod, dot, pos, j) == 0) return out;
    const Production& p = view_.grammar().productions()[prod];
    if (dot == p.rhs.size()) {
      out.emplace_back();
      return out;
    }
    Symbol s = p.rhs[dot];
    if (is_terminal(s)) {
      ParseNode leaf;
      leaf.label = std::string(terminal_name(symbol_terminal(s)));
      leaf.token = tokens_[pos];
      for (auto& rest : sequences(prod, dot + 1, pos + 1, j, limit)) {
        rest.insert(rest.begin(), leaf);
        out.push_back(std::move(rest));
      }
      return out;
    }
    std::set<std::size_t> ends;
    for (auto [q, end] : done_.at({s, pos})) {
      if (end <= j) ends.insert(end);
    }
    for (std::size_t m : ends) {
      if (!count(s, pos, m) || !seq_count(prod, dot + 1, m, j)) continue;
      for (auto& head : trees(s, pos, m, limit - out.size())) {
        for (auto& rest : sequences(prod, dot + 1, m, j, limit - out.size())) {
          rest.insert(rest.begin(), head);
          out.push_back(std::move(rest));
          if (out.size() >= limit) return out;
        }
      }
    }
    return out;
  }

  const GrammarView& view_;
  const std::vector<Token>& tokens_;
  std::map<std::pair<int, std::size_t>, std::vector<std::pair<std::uint32_t, std::size_t>>> done_;
  std::map<std::tuple<int, std::size_t, std::size_t>, std::size_t> count_memo_;
  std::map<std::tuple<std::uint32_t, std::size_t, std::size_t, std::size_t>, std::size_t> seq_memo_;
};

}  // namespace

std::vector<ParseTree> Recognizer::trees(std::size_t limit) const {
  const auto& prods = view_.grammar().productions();
  std::map<std::pair<int, std::size_t>, std::vector<std::pair<std::uint32_t, std::size_t>>> done;
  for (std::size_t k = 0; k < sets_.size(); ++k) {
    for (const Item& item : sets_[k]) {
      const Production& p = prods[item.production];
      if (item.dot == p.rhs.size()) done[{p.lhs, item.origin}].push_back({item.production, k});
    }
  }
  ForestWalker walker(view_, tokens_, std::move(done));
  std::vector<ParseTree> out;
  for (auto& root : walker.trees(view_.grammar().start(), 0, tokens_.size(), limit)) {
    ParseTree tree;
    tree.kind = root.tag == "sentence.question" ? SentenceKind::Question : SentenceKind::Declarative;
    tree.root = std::move(root);
    out.push_back(std::move(tree));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry points

CompletionSet expand_terminals(const std::vector<Terminal>& terminals, const Lexicon& lexicon, bool sentence_initial) {
  std::set<Completion> out;
  CompletionSet cs;
  auto add_slot = [&](Category c, FormSlot slot) {
    for (std::uint32_t id : lexicon.of_category(c)) {
      const LexEntry& e = lexicon.entry(id);
      auto s = e.surface(slot);
      if (!s) continue;
      std::string surface = sentence_initial && e.definite ? text::capitalize(*s) : *s;
      out.insert({surface, std::string(to_string(c))});
    }
  };
  for (Terminal t : terminals) {
    switch (t) {
      case Terminal::ProperName: add_slot(Category::ProperName, FormSlot::Name); break;
      case Terminal::NounSg: add_slot(Category::Noun, FormSlot::Singular); break;
      case Terminal::NounPl: add_slot(Category::Noun, FormSlot::Plural); break;
      case Terminal::VerbSg: add_slot(Category::TransitiveVerb, FormSlot::ThirdSingular); break;
      case Terminal::VerbPl: add_slot(Category::TransitiveVerb, FormSlot::PluralVerb); break;
      case Terminal::VerbPastPart: add_slot(Category::TransitiveVerb, FormSlot::PastParticiple); break;
      case Terminal::OfSg: add_slot(Category::OfConstruct, FormSlot::Singular); break;
      case Terminal::OfPl: add_slot(Category::OfConstruct, FormSlot::Plural); break;
      case Terminal::AdjPrep: add_slot(Category::AdjectivePreposition, FormSlot::Adjective); break;
      case Terminal::Variable:
        for (const char* v : {"X", "Y", "Z"}) out.insert({v, "variable"});
        break;
      case Terminal::NumberOne: out.insert({"1", "number"}); break;
      case Terminal::Number: out.insert({"<number>", "number"}); break;
      case Terminal::Period:
      case Terminal::QuestionMark:
        out.insert({std::string(terminal_literal(t)), "punctuation"});
        cs.sentence_end = true;
        break;
      default: {
        std::string w(terminal_literal(t));
        out.insert({sentence_initial ? text::capitalize(w) : w, "function-word"});
      }
    }
  }
  cs.tokens.assign(out.begin(), out.end());
  return cs;
}

ParseTree parse(std::span<const Token> tokens, const Lexicon& lexicon) {
  Recognizer rec(lexicon);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!rec.feed(tokens[i])) {
      CompletionSet cs = expand_terminals(rec.expected(), lexicon, i == 0);
      std::string msg = "syntax error at token " + std::to_string(i + 1) + " '" + tokens[i].surface +
                        "': expected " + expected_summary(cs);
      throw SyntaxError(msg, i, std::move(cs));
    }
  }
  if (!rec.accepted()) {
    CompletionSet cs = expand_terminals(rec.expected(), lexicon, tokens.empty());
    std::string msg = "incomplete sentence: expected " + expected_summary(cs);
    throw SyntaxError(msg, tokens.size(), std::move(cs));
  }
  auto trees = rec.trees(16);
  if (trees.size() != 1) throw AmbiguityError(std::move(trees));
  return std::move(trees.front());
}

ParseTree parse_sentence(std::string_view sentence, const Lexicon& lexicon) {
  auto tokens = tokenize(sentence, lexicon);
  return parse(tokens, lexicon);
}

CompletionSet complete(std::span<const Token> prefix, const Lexicon& lexicon) {
  Recognizer rec(lexicon);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!rec.feed(prefix[i])) throw DeadPrefixError(i);
  }
  return expand_terminals(rec.expected(), lexicon, prefix.empty());
}

CompletionSet complete_text(std::string_view prefix, const Lexicon& lexicon) {
  auto tokens = tokenize(prefix, lexicon);
  return complete(tokens, lexicon);
}

}  // namespace cnldoc
