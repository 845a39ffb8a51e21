#include "cnldoc/code_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "text_util.hpp"

namespace cnldoc {

namespace embedded {
extern const std::string_view prelude_cnl;
extern const std::string_view prelude_lex;
}  // namespace embedded

namespace {

struct RelationInfo {
  RelationKind kind;
  std::string_view name;
  std::string_view predicate;
  EntityKind from;
  EntityKind to;
};

constexpr RelationInfo kRelations[] = {
    {RelationKind::DirectSubclassOf, "direct-subclass-of", "direct-subclass-of", EntityKind::Class, EntityKind::Class},
    {RelationKind::Defines, "defines", "defines", EntityKind::Class, EntityKind::Method},
    {RelationKind::Invokes, "invokes", "invokes", EntityKind::Method, EntityKind::Method},
    {RelationKind::Instantiates, "instantiates", "instantiates", EntityKind::Method, EntityKind::Class},
    {RelationKind::InPackage, "in-package", "contained-in", EntityKind::Class, EntityKind::Package},
    {RelationKind::Implements, "implements", "implements", EntityKind::Class, EntityKind::Interface},
};

const RelationInfo& info(RelationKind r) {
  for (const auto& i : kRelations) {
    if (i.kind == r) return i;
  }
  throw Error("internal: unknown relation");
}

constexpr std::pair<EntityKind, std::string_view> kKinds[] = {
    {EntityKind::Class, "class"},
    {EntityKind::Method, "method"},
    {EntityKind::Package, "package"},
    {EntityKind::Interface, "interface"},
};

std::string entity_sentence(const CodeEntity& e) {
  std::string_view noun = to_string(e.kind);
  std::string_view article = noun.front() == 'i' ? "an" : "a";
  return e.name + " is " + std::string(article) + " " + std::string(noun) + ".";
}

std::string relation_sentence(const CodeRelation& r) {
  switch (r.relation) {
    case RelationKind::DirectSubclassOf: return r.from + " is a direct subclass of " + r.to + ".";
    case RelationKind::InPackage: return r.from + " is contained in " + r.to + ".";
    default: return r.from + " " + std::string(to_string(r.relation)) + " " + r.to + ".";
  }
}

}  // namespace

std::string_view to_string(EntityKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "?";
}

std::string_view to_string(RelationKind r) { return info(r).name; }

CodeModelError::CodeModelError(Kind kind, const std::string& msg, std::size_t line)
    : Error(line ? "dump line " + std::to_string(line) + ": " + msg : msg), kind_(kind), line_(line) {}

CodeModel CodeModel::parse(std::istream& in) {
  CodeModel model;
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = text::split_trimmed(line, '|');
    if (f[0] == "E" && f.size() == 3) {
      CodeEntity e;
      bool known = false;
      for (const auto& [kind, name] : kKinds) {
        if (f[1] == name) {
          e.kind = kind;
          known = true;
        }
      }
      if (!known) throw CodeModelError(CodeModelError::Kind::Format, "unknown entity kind '" + f[1] + "'", n);
      if (f[2].empty()) throw CodeModelError(CodeModelError::Kind::Format, "empty entity name", n);
      e.name = f[2];
      e.line = n;
      model.entities.push_back(std::move(e));
    } else if (f[0] == "R" && f.size() == 4) {
      CodeRelation r;
      bool known = false;
      for (const auto& i : kRelations) {
        if (f[1] == i.name) {
          r.relation = i.kind;
          known = true;
        }
      }
      if (!known) throw CodeModelError(CodeModelError::Kind::Format, "unknown relation '" + f[1] + "'", n);
      r.from = f[2];
      r.to = f[3];
      r.line = n;
      model.relations.push_back(std::move(r));
    } else {
      throw CodeModelError(CodeModelError::Kind::Format, "malformed record '" + line + "'", n);
    }
  }
  return model;
}

CodeModel CodeModel::parse_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

CodeModel CodeModel::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CodeModelError(CodeModelError::Kind::Format, "cannot open dump " + path);
  try {
    return parse(in);
  } catch (const CodeModelError& e) {
    throw CodeModelError(e.kind(), path + ": " + e.what());
  }
}

std::string CodeModel::to_string() const {
  std::string out;
  for (const auto& e : entities) out += "E|" + std::string(cnldoc::to_string(e.kind)) + "|" + e.name + "\n";
  for (const auto& r : relations) {
    out += "R|" + std::string(cnldoc::to_string(r.relation)) + "|" + r.from + "|" + r.to + "\n";
  }
  return out;
}

Ingestion ingest_model(const CodeModel& model, const std::map<std::string, EntityKind>& known) {
  Ingestion out;
  std::map<std::string, EntityKind>& kinds = out.kinds;
  kinds = known;
  std::set<std::string> declared;
  for (const auto& e : model.entities) {
    if (!declared.insert(e.name).second) {
      throw CodeModelError(CodeModelError::Kind::DuplicateEntity, "entity '" + e.name + "' declared twice", e.line);
    }
    if (e.kind == EntityKind::Method && (e.name.find('-') == std::string::npos || e.name.front() == '-')) {
      throw CodeModelError(CodeModelError::Kind::Format,
                           "method name '" + e.name + "' must have the form Owner-selector", e.line);
    }
    if (auto it = kinds.find(e.name); it != kinds.end()) {
      if (it->second != e.kind) {
        throw CodeModelError(CodeModelError::Kind::KindMismatch,
                             "'" + e.name + "' was declared as a " + std::string(to_string(it->second)), e.line);
      }
      continue;  // repeated from an earlier dump
    }
    kinds.emplace(e.name, e.kind);
    out.names.push_back(LexEntry::proper_name(e.name));
    Atom atom{std::string(to_string(e.kind)), {Term::constant(e.name)}};
    out.facts.push_back({Statement{Fact{atom}}, entity_sentence(e)});
  }
  std::set<std::tuple<RelationKind, std::string, std::string>> seen;
  for (const auto& r : model.relations) {
    const RelationInfo& ri = info(r.relation);
    for (const auto* end : {&r.from, &r.to}) {
      auto it = kinds.find(*end);
      if (it == kinds.end()) {
        throw CodeModelError(CodeModelError::Kind::DanglingReference,
                             std::string(ri.name) + " refers to undeclared entity '" + *end + "'", r.line);
      }
      EntityKind want = end == &r.from ? ri.from : ri.to;
      if (it->second != want) {
        throw CodeModelError(CodeModelError::Kind::KindMismatch,
                             std::string(ri.name) + " expects " + std::string(to_string(want)) + " but '" + *end +
                                 "' is a " + std::string(to_string(it->second)),
                             r.line);
      }
    }
    if (!seen.insert({r.relation, r.from, r.to}).second) continue;
    Atom atom{std::string(ri.predicate), {Term::constant(r.from), Term::constant(r.to)}};
    out.facts.push_back({Statement{Fact{atom}}, relation_sentence(r)});
  }
  return out;
}

std::string_view prelude_text() { return embedded::prelude_cnl; }
std::string_view prelude_lexicon_text() { return embedded::prelude_lex; }

Lexicon prelude_lexicon() {
  static const Lexicon lexicon = Lexicon::from_string(prelude_lexicon_text());
  return lexicon;
}

std::vector<PreludeStatement> prelude() {
  std::vector<PreludeStatement> out;
  Lexicon lexicon = prelude_lexicon();
  std::istringstream in{std::string(prelude_text())};
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back({line, n, translate_sentence(line, lexicon)});
    } catch (const Error& e) {
      throw Error("prelude line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

MalformedDocComment::MalformedDocComment(const std::string& file, std::size_t line, const std::string& text)
    : Error(file + ":" + std::to_string(line) + ": tagged comment does not end with '.' or '?': " + text),
      file_(file),
      line_(line) {}

std::vector<DocComment> extract_doc_comments(std::string_view source, const std::string& file,
                                             const std::vector<std::string>& prefixes) {
  constexpr std::string_view kTag = "@cnl:";
  std::vector<DocComment> out;
  // Longest prefix first so "///" wins over "//".
  std::vector<std::string> ordered = prefixes;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::istringstream in{std::string(source)};
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string line = text::trim(raw);
    for (const auto& prefix : ordered) {
      if (prefix.empty() || !text::starts_with(line, prefix)) continue;
      std::string body = text::trim(std::string_view(line).substr(prefix.size()));
      if (!text::starts_with(body, kTag)) break;
      // Delimited comments such as Smalltalk's "...".
      if (body.size() > kTag.size() + prefix.size() && body.ends_with(prefix)) {
        body = text::trim(std::string_view(body).substr(0, body.size() - prefix.size()));
      }
      std::string sentence = text::collapse_spaces(std::string_view(body).substr(kTag.size()));
      if (sentence.empty() || (sentence.back() != '.' && sentence.back() != '?')) {
        throw MalformedDocComment(file, n, sentence);
      }
      out.push_back({sentence, file, n});
      break;
    }
  }
  return out;
}

}  // namespace cnldoc
