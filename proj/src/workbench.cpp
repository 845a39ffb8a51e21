#include "cnldoc/workbench.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace cnldoc {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kQuarantineMark = "#! quarantined:";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  for (auto& w : text::split_words(v)) {
    for (auto& part : text::split_trimmed(w, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------- config

SessionConfig SessionConfig::defaults() {
  SessionConfig c;
  for (const char* ext : {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp", ".java", ".js", ".ts", ".cs", ".go", ".rs"}) {
    c.comment_prefixes[ext] = {"///", "//"};
  }
  for (const char* ext : {".py", ".sh", ".rb", ".pl"}) c.comment_prefixes[ext] = {"#"};
  c.comment_prefixes[".st"] = {"\""};
  return c;
}

SessionConfig SessionConfig::parse(std::string_view text, const fs::path& base_dir) {
  SessionConfig c = defaults();
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t n = 0;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  while (std::getline(in, raw)) {
    ++n;
    std::string line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(n) + ": expected key = value");
    std::string key = text::trim(line.substr(0, eq));
    std::string value = text::trim(line.substr(eq + 1));
    if (key == "kb") {
      c.kb = resolve(value);
    } else if (key == "sources") {
      c.sources.clear();
      for (const auto& s : split_list(value)) c.sources.push_back(resolve(s));
    } else if (key == "port") {
      c.port = std::stoi(value);
    } else if (key == "host") {
      c.host = value;
    } else if (key == "budgets") {
      c.enforce_budgets = value == "on" || value == "true" || value == "1";
    } else if (text::starts_with(key, "comment.")) {
      std::string ext = key.substr(8);
      if (!ext.empty() && ext[0] != '.') ext = "." + ext;
      c.comment_prefixes[ext] = text::split_words(value);
    } else {
      throw Error("config line " + std::to_string(n) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

SessionConfig SessionConfig::from_file(const fs::path& path) {
  try {
    return parse(read_file(path), path.parent_path());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------------ kb file

KbFile KbFile::parse(std::string_view text, fs::path path) {
  KbFile f;
  f.path_ = std::move(path);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string line = text::trim(raw);
    if (text::starts_with(line, kQuarantineMark)) continue;
    Line l{Kind::Blank, raw, "", n};
    if (line.empty()) {
      l.kind = Kind::Blank;
    } else if (line[0] == '#') {
      l.kind = Kind::Comment;
    } else if (line[0] == '@') {
      auto space = line.find_first_of(" \t");
      std::string directive = line.substr(0, space);
      l.value = space == std::string::npos ? "" : text::trim(line.substr(space));
      if (directive == "@prelude") l.kind = Kind::Prelude;
      else if (directive == "@lexicon") l.kind = Kind::Lexicon;
      else if (directive == "@lexicon-file") l.kind = Kind::LexiconFile;
      else if (directive == "@dump") l.kind = Kind::Dump;
      else throw KbFileError(f.path_.string(), n, "unknown directive " + directive);
      if (l.kind != Kind::Prelude && l.value.empty()) {
        throw KbFileError(f.path_.string(), n, directive + " needs an argument");
      }
    } else {
      l.kind = Kind::Sentence;
      l.value = text::collapse_spaces(line);
    }
    f.lines_.push_back(std::move(l));
  }
  return f;
}

KbFile KbFile::load(const fs::path& path) { return parse(read_file(path), path); }

fs::path KbFile::resolve(const std::string& p) const {
  fs::path q(p);
  return q.is_absolute() ? q : path_.parent_path() / q;
}

std::string KbFile::render(const std::map<std::size_t, std::string>& annotations) const {
  std::string out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (auto it = annotations.find(i); it != annotations.end()) {
      out += std::string(kQuarantineMark) + " " + it->second + "\n";
    }
    out += lines_[i].raw + "\n";
  }
  return out;
}

void KbFile::save(const std::map<std::size_t, std::string>& annotations) const {
  std::string tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out << render(annotations);
  }
  fs::rename(tmp, path_);
}

void KbFile::append_sentence(const std::string& sentence) {
  lines_.push_back({Kind::Sentence, sentence, sentence, 0});
}

bool KbFile::remove_sentence(const std::string& sentence) {
  auto it = std::find_if(lines_.begin(), lines_.end(),
                         [&](const Line& l) { return l.kind == Kind::Sentence && l.value == sentence; });
  if (it == lines_.end()) return false;
  lines_.erase(it);
  return true;
}

void KbFile::set_dump(const std::string& dump) {
  auto first = std::find_if(lines_.begin(), lines_.end(), [](const Line& l) { return l.kind == Kind::Dump; });
  Line line{Kind::Dump, "@dump " + dump, dump, 0};
  if (first == lines_.end()) {
    // After the last directive, before the documentation.
    auto pos = std::find_if(lines_.begin(), lines_.end(), [](const Line& l) { return l.kind == Kind::Sentence; });
    lines_.insert(pos, line);
    return;
  }
  *first = line;
  lines_.erase(std::remove_if(first + 1, lines_.end(), [](const Line& l) { return l.kind == Kind::Dump; }),
               lines_.end());
}

void KbFile::append_dump(const std::string& dump) {
  auto last = std::find_if(lines_.rbegin(), lines_.rend(), [](const Line& l) { return l.kind == Kind::Dump; });
  Line line{Kind::Dump, "@dump " + dump, dump, 0};
  if (last == lines_.rend()) {
    set_dump(dump);
    return;
  }
  lines_.insert(last.base(), line);
}

// ------------------------------------------------------------------ session

std::string_view SentenceError::kind_name() const {
  switch (kind) {
    case Kind::UnknownWord: return "unknown-word";
    case Kind::Syntax: return "syntax";
    case Kind::Ambiguous: return "ambiguous";
    case Kind::Translation: return "translation";
    case Kind::Lexicon: return "lexicon";
    case Kind::WrongKind: return "wrong-kind";
  }
  return "?";
}

Session Session::open(const SessionConfig& config) {
  Session s;
  s.config_ = config;
  if (!config.kb.empty()) s.kb_file_ = KbFile::load(config.kb);
  s.load();
  return s;
}

Session Session::open_kb(const fs::path& kb) {
  SessionConfig c = SessionConfig::defaults();
  c.kb = kb;
  return open(c);
}

void Session::load() {
  lexicon_ = Lexicon{};
  base_ = KnowledgeBase{};
  startup_ = LoadReport{};
  if (!kb_file_) return;
  const KbFile& f = *kb_file_;
  const std::string file = f.path().string();
  const std::string file_name = f.path().filename().string();
  const auto& lines = f.lines();

  // Vocabulary first: every sentence is read under the complete lexicon.
  std::vector<LexEntry> entries;
  std::vector<LexEntry> names;
  std::vector<std::pair<std::string, Ingestion>> dumps;
  bool with_prelude = false;
  for (const auto& l : lines) {
    try {
      switch (l.kind) {
        case KbFile::Kind::Prelude: {
          with_prelude = true;
          const Lexicon pl = prelude_lexicon();
          const auto& pe = pl.entries();
          entries.insert(entries.end(), pe.begin(), pe.end());
          break;
        }
        case KbFile::Kind::Lexicon:
          if (auto e = parse_lexicon_line(l.value)) entries.push_back(*e);
          break;
        case KbFile::Kind::LexiconFile: {
          Lexicon extra = Lexicon::from_file(f.resolve(l.value).string());
          entries.insert(entries.end(), extra.entries().begin(), extra.entries().end());
          break;
        }
        case KbFile::Kind::Dump: {
          Ingestion ing = ingest_model(CodeModel::from_file(f.resolve(l.value).string()),
                                       dumps.empty() ? std::map<std::string, EntityKind>{} : dumps.back().second.kinds);
          names.insert(names.end(), ing.names.begin(), ing.names.end());
          dumps.push_back({l.value, std::move(ing)});
          break;
        }
        default:
          break;
      }
    } catch (const KbFileError&) {
      throw;
    } catch (const Error& e) {
      throw KbFileError(file, l.number, e.what());
    }
  }
  try {
    lexicon_ = Lexicon{}.with(entries).with(names, /*merge_names=*/true);
  } catch (const Error& e) {
    throw KbFileError(file, 0, std::string("lexicon: ") + e.what());
  }

  if (with_prelude) {
    for (const auto& p : prelude()) base_.add(p.statements, p.sentence, Provenance::prelude(p.line));
  }
  for (const auto& [dump, ing] : dumps) {
    for (const auto& fact : ing.facts) base_.add({fact.statement}, fact.sentence, Provenance::ingested(dump));
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.kind != KbFile::Kind::Sentence) continue;
    SentenceKind kind;
    std::vector<Statement> statements;
    try {
      statements = translate(l.value, kind);
    } catch (const Error& e) {
      throw KbFileError(file, l.number, e.what());
    }
    if (kind == SentenceKind::Question) throw KbFileError(file, l.number, "questions cannot be stored");
    AssertResult r = base_.assert_statements(statements, l.value, Provenance::documented(file_name, l.number));
    if (r.accepted) continue;
    Quarantine q;
    q.index = i;
    q.line = l.number;
    q.sentence = l.value;
    q.reason = summarize_violation(base_, r.report.violations.front(), r.rejected ? &*r.rejected : nullptr);
    if (r.report.violations.size() > 1) {
      q.reason += " and " + std::to_string(r.report.violations.size() - 1) + " more";
    }
    q.report = std::move(r.report);
    q.rejected = std::move(r.rejected);
    startup_.quarantined.push_back(std::move(q));
  }
  startup_.violations = base_.check();
}

std::vector<Statement> Session::translate(const std::string& sentence, SentenceKind& kind) const {
  ParseTree tree = parse_sentence(sentence, lexicon_);
  kind = tree.kind;
  return cnldoc::translate(tree, lexicon_);
}

std::optional<SentenceError> Session::classify(const std::exception& ex) const {
  SentenceError e;
  e.message = ex.what();
  if (const auto* u = dynamic_cast<const UnknownWordError*>(&ex)) {
    e.kind = SentenceError::Kind::UnknownWord;
    e.position = u->token_index();
    e.suggestions = u->suggestions();
    e.word = u->word();
  } else if (const auto* s = dynamic_cast<const SyntaxError*>(&ex)) {
    e.kind = SentenceError::Kind::Syntax;
    e.position = s->position();
    e.expected = s->expected();
  } else if (dynamic_cast<const AmbiguityError*>(&ex)) {
    e.kind = SentenceError::Kind::Ambiguous;
  } else if (dynamic_cast<const TranslationError*>(&ex)) {
    e.kind = SentenceError::Kind::Translation;
  } else if (const auto* d = dynamic_cast<const DeadPrefixError*>(&ex)) {
    e.kind = SentenceError::Kind::Syntax;
    e.position = d->position();
  } else if (dynamic_cast<const LexiconError*>(&ex)) {
    e.kind = SentenceError::Kind::Lexicon;
  } else {
    return std::nullopt;
  }
  return e;
}

AddOutcome Session::add(const std::string& raw, bool persist, Provenance provenance) {
  AddOutcome out;
  std::string sentence = text::collapse_spaces(raw);
  std::vector<Statement> statements;
  try {
    SentenceKind kind;
    statements = translate(sentence, kind);
    if (kind == SentenceKind::Question) {
      out.error = SentenceError{SentenceError::Kind::WrongKind, "questions cannot be added; use ask", 0, {}, {}, {}};
      return out;
    }
  } catch (const Error& e) {
    out.error = classify(e);
    if (!out.error) throw;
    return out;
  }
  out.result = base_.assert_statements(statements, sentence, std::move(provenance));
  if (!out.result.accepted) {
    out.status = AddOutcome::Status::Rejected;
    return out;
  }
  out.status = out.result.duplicate ? AddOutcome::Status::Duplicate : AddOutcome::Status::Accepted;
  if (persist && kb_file_ && !out.result.duplicate) {
    kb_file_->append_sentence(sentence);
    save();
  }
  return out;
}

RemoveOutcome Session::remove(const std::string& raw, bool persist) {
  RemoveOutcome out;
  std::string sentence = text::collapse_spaces(raw);
  std::vector<Statement> statements;
  try {
    SentenceKind kind;
    statements = translate(sentence, kind);
    if (kind == SentenceKind::Question) {
      out.error = SentenceError{SentenceError::Kind::WrongKind, "questions are not stored", 0, {}, {}, {}};
      return out;
    }
  } catch (const Error& e) {
    out.error = classify(e);
    if (!out.error) throw;
    return out;
  }
  try {
    base_.retract(statements);
  } catch (const NotPresentError& e) {
    out.message = e.what();
    return out;
  }
  out.removed = true;
  out.message = "removed";
  if (persist && kb_file_) {
    // The file may spell the sentence differently; match by meaning.
    auto key = [](std::vector<Statement> v) {
      std::vector<std::string> k;
      for (auto& s : v) k.push_back(serialize(normalize(s)));
      std::sort(k.begin(), k.end());
      return k;
    };
    auto want = key(statements);
    std::optional<std::string> match;
    for (const auto& l : kb_file_->lines()) {
      if (l.kind != KbFile::Kind::Sentence) continue;
      try {
        SentenceKind kind;
        if (key(translate(l.value, kind)) == want) {
          match = l.value;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (match) {
      kb_file_->remove_sentence(*match);
      // Quarantined lines may be acceptable now.
      rewrite();
    }
  }
  return out;
}

AskOutcome Session::ask(const std::string& raw) const {
  AskOutcome out;
  std::string question = text::collapse_spaces(raw);
  std::vector<Statement> statements;
  try {
    SentenceKind kind;
    statements = translate(question, kind);
    if (kind != SentenceKind::Question) {
      out.error = SentenceError{SentenceError::Kind::WrongKind, "not a question; use add", 0, {}, {}, {}};
      return out;
    }
  } catch (const Error& e) {
    out.error = classify(e);
    if (!out.error) throw;
    return out;
  }
  try {
    out.answers = base_.ask(std::get<Query>(statements.front().body));
  } catch (const InconsistentBaseError& e) {
    out.inconsistent = e.what();
  }
  return out;
}

CompletionSet Session::complete(const std::string& prefix) const { return complete_text(prefix, lexicon_); }

void Session::add_lexicon_entry(const LexEntry& entry, bool persist) {
  lexicon_ = lexicon_.with({entry});
  if (persist && kb_file_) {
    // Before the first sentence, with the other directives.
    KbFile::Line line{KbFile::Kind::Lexicon, "@lexicon " + entry.to_line(), entry.to_line(), 0};
    KbFile f = *kb_file_;
    std::string text;
    bool placed = false;
    for (const auto& l : f.lines()) {
      if (!placed && l.kind == KbFile::Kind::Sentence) {
        text += line.raw + "\n";
        placed = true;
      }
      text += l.raw + "\n";
    }
    if (!placed) text += line.raw + "\n";
    kb_file_ = KbFile::parse(text, f.path());
    rewrite();
  }
}

void Session::ingest(const fs::path& dump, bool append) {
  if (!kb_file_) throw Error("ingest needs a knowledge-base file");
  // Validate before touching the file.
  std::map<std::string, EntityKind> known;
  if (append) {
    for (const auto& l : kb_file_->lines()) {
      if (l.kind == KbFile::Kind::Dump) known = ingest_model(CodeModel::from_file(kb_file_->resolve(l.value).string()), known).kinds;
    }
  }
  ingest_model(CodeModel::from_file(dump.string()), known);
  fs::path kb_dir = fs::absolute(kb_file_->path()).parent_path();
  std::string written = fs::absolute(dump).lexically_relative(kb_dir).generic_string();
  if (written.empty()) written = fs::absolute(dump).generic_string();
  if (append) {
    kb_file_->append_dump(written);
  } else {
    kb_file_->set_dump(written);
  }
  rewrite();
}

void Session::rewrite() {
  kb_file_->save();
  kb_file_ = KbFile::load(kb_file_->path());
  load();
  save();
}

ExtractOutcome Session::extract(const fs::path& root, bool persist) {
  ExtractOutcome out;
  std::vector<fs::path> files;
  if (fs::is_regular_file(root)) {
    files.push_back(root);
  } else {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto it = config_.comment_prefixes.find(path.extension().string());
    if (it == config_.comment_prefixes.end()) continue;
    for (auto& doc : extract_doc_comments(read_file(path), path.string(), it->second)) {
      ++out.found;
      AddOutcome r = add(doc.sentence, persist, Provenance::documented(doc.file, doc.line));
      if (r.status == AddOutcome::Status::Accepted) ++out.added;
      else if (r.status == AddOutcome::Status::Duplicate) ++out.duplicates;
      else out.failed.push_back({std::move(doc), std::move(r)});
    }
  }
  return out;
}

void Session::save() const {
  if (!kb_file_) return;
  std::map<std::size_t, std::string> annotations;
  for (const auto& q : startup_.quarantined) annotations[q.index] = q.reason;
  kb_file_->save(annotations);
}

std::string summarize_violation(const KnowledgeBase& base, const Violation& v, const Entry* rejected) {
  const Entry* check = base.entry(v.entry);
  if (!check && rejected && rejected->id == v.entry) check = rejected;
  std::vector<std::string> parts;
  for (const auto& b : v.bindings) parts.push_back(b.variable + " = " + b.value);
  if (!v.counted.empty()) parts.push_back("counted " + text::join(v.counted, ", "));
  return "violates \"" + (check ? check->text : "?") + "\" (" + text::join(parts, "; ") + ")";
}

std::string describe_violation(const KnowledgeBase& base, const Violation& v, const Entry* rejected) {
  const Entry* check = base.entry(v.entry);
  if (!check && rejected && rejected->id == v.entry) check = rejected;
  std::string out = "violated: " + (check ? check->text : "?");
  if (check) out += " [" + check->provenance.to_string() + "]";
  out += "\n  witness:";
  for (std::size_t i = 0; i < v.bindings.size(); ++i) {
    out += (i ? ", " : " ") + v.bindings[i].variable + " = " + v.bindings[i].value;
  }
  const Statement* st = check && v.statement < check->statements.size() ? &check->statements[v.statement] : nullptr;
  if (st && st->is_cardinality()) {
    out += "; counted " + std::to_string(v.count);
    if (!v.counted.empty()) out += ": " + text::join(v.counted, ", ");
  }
  out += "\n  because:";
  for (const Entry* e : base.explain(v, rejected)) {
    out += "\n    [" + e->provenance.to_string() + "] " + e->text;
  }
  return out;
}

}  // namespace cnldoc
