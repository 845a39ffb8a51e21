#include "cnldoc/api.hpp"

#include <mutex>

namespace cnldoc {

namespace {

struct BadRequest {
  std::string message;
};

std::string string_field(const json& request, const char* name) {
  if (!request.is_object()) throw BadRequest{"request body must be a JSON object"};
  auto it = request.find(name);
  if (it == request.end() || !it->is_string()) {
    throw BadRequest{std::string("missing string field '") + name + "'"};
  }
  return it->get<std::string>();
}

ApiResponse bad_request(const std::string& message) {
  return {400, {{"error", "bad-request"}, {"message", message}}};
}

ApiResponse unprocessable(const SentenceError& e) { return {422, to_json(e)}; }

json provenance_json(const Provenance& p) {
  return {{"kind", p.kind_name()}, {"source", p.to_string()}};
}

json statements_json(const std::vector<Statement>& statements) {
  json out = json::array();
  for (const auto& s : statements) out.push_back(serialize(normalize(s)));
  return out;
}

template <typename F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const BadRequest& e) {
    return bad_request(e.message);
  }
}

}  // namespace

json to_json(const CompletionSet& completions) {
  json tokens = json::array();
  for (const auto& c : completions.tokens) tokens.push_back({{"surface", c.surface}, {"category", c.category}});
  return {{"tokens", tokens}, {"sentence_end", completions.sentence_end}};
}

json to_json(const SentenceError& e) {
  json out = {{"error", e.kind_name()}, {"message", e.message}, {"position", e.position}};
  if (e.expected) out["expected"] = to_json(*e.expected);
  if (e.kind == SentenceError::Kind::UnknownWord) {
    out["word"] = e.word;
    json cats = json::array();
    for (auto c : e.suggestions) cats.push_back(to_string(c));
    out["suggestions"] = cats;
  }
  return out;
}

json violation_json(const KnowledgeBase& base, const Violation& v, const Entry* rejected) {
  const Entry* check = base.entry(v.entry);
  if (!check && rejected && rejected->id == v.entry) check = rejected;
  json bindings = json::array();
  for (const auto& b : v.bindings) bindings.push_back({{"variable", b.variable}, {"value", b.value}});
  json support = json::array();
  for (const Entry* e : base.explain(v, rejected)) {
    support.push_back({{"text", e->text}, {"provenance", provenance_json(e->provenance)}});
  }
  json out = {{"statement", check ? check->text : ""},
              {"bindings", bindings},
              {"support", support},
              {"description", describe_violation(base, v, rejected)}};
  if (check) out["provenance"] = provenance_json(check->provenance);
  if (check && v.statement < check->statements.size() && check->statements[v.statement].is_cardinality()) {
    out["count"] = v.count;
    out["counted"] = v.counted;
  }
  return out;
}

Api::Api(Session& session, bool persist) : session_(session), persist_(persist) {}

ApiResponse Api::complete(const json& request) const {
  return guarded([&]() -> ApiResponse {
    std::string prefix = string_field(request, "prefix");
    std::shared_lock lock(mutex_);
    try {
      return {200, to_json(session_.complete(prefix))};
    } catch (const Error& e) {
      auto err = session_.classify(e);
      if (!err) throw;
      return unprocessable(*err);
    }
  });
}

ApiResponse Api::parse(const json& request) const {
  return guarded([&]() -> ApiResponse {
    std::string sentence = string_field(request, "sentence");
    std::shared_lock lock(mutex_);
    try {
      ParseTree tree = parse_sentence(sentence, session_.lexicon());
      std::vector<Statement> statements = translate(tree, session_.lexicon());
      return {200,
              {{"kind", tree.kind == SentenceKind::Question ? "question" : "statement"},
               {"tree", tree.to_string()},
               {"statements", statements_json(statements)}}};
    } catch (const Error& e) {
      auto err = session_.classify(e);
      if (!err) throw;
      return unprocessable(*err);
    }
  });
}

ApiResponse Api::assert_sentence(const json& request) {
  return guarded([&]() -> ApiResponse {
    std::string sentence = string_field(request, "sentence");
    std::unique_lock lock(mutex_);
    AddOutcome r = session_.add(sentence, persist_);
    switch (r.status) {
      case AddOutcome::Status::Invalid:
        return unprocessable(*r.error);
      case AddOutcome::Status::Rejected: {
        json violations = json::array();
        const Entry* rejected = r.result.rejected ? &*r.result.rejected : nullptr;
        for (const auto& v : r.result.report.violations) {
          violations.push_back(violation_json(session_.base(), v, rejected));
        }
        return {409, {{"status", "rejected"}, {"sentence", sentence}, {"violations", violations}}};
      }
      case AddOutcome::Status::Duplicate:
        return {200, {{"status", "duplicate"}, {"sentence", sentence}}};
      case AddOutcome::Status::Accepted:
        break;
    }
    return {200, {{"status", "accepted"}, {"sentence", sentence}, {"entry", *r.result.entry}}};
  });
}

ApiResponse Api::retract(const json& request) {
  return guarded([&]() -> ApiResponse {
    std::string sentence = string_field(request, "sentence");
    std::unique_lock lock(mutex_);
    RemoveOutcome r = session_.remove(sentence, persist_);
    if (r.error) return unprocessable(*r.error);
    if (!r.removed) return {404, {{"error", "not-present"}, {"message", r.message}}};
    return {200, {{"status", "removed"}, {"sentence", sentence}}};
  });
}

ApiResponse Api::ask(const json& request) const {
  return guarded([&]() -> ApiResponse {
    std::string question = string_field(request, "question");
    std::shared_lock lock(mutex_);
    AskOutcome r = session_.ask(question);
    if (r.error) return unprocessable(*r.error);
    if (r.inconsistent) return {409, {{"error", "inconsistent"}, {"message", *r.inconsistent}}};
    return {200, {{"question", question}, {"answers", r.answers->answers}}};
  });
}

ApiResponse Api::statements() const {
  std::shared_lock lock(mutex_);
  json out = json::array();
  for (const Entry* e : session_.base().entries()) {
    out.push_back({{"id", e->id},
                   {"text", e->text},
                   {"provenance", provenance_json(e->provenance)},
                   {"logic", statements_json(e->statements)}});
  }
  json quarantined = json::array();
  for (const auto& q : session_.startup().quarantined) {
    quarantined.push_back({{"text", q.sentence}, {"line", q.line}, {"reason", q.reason}});
  }
  return {200, {{"statements", out}, {"quarantined", quarantined}}};
}

ApiResponse Api::check() const {
  std::shared_lock lock(mutex_);
  const KnowledgeBase& base = session_.base();
  json violations = json::array();
  for (const auto& v : base.check().violations) violations.push_back(violation_json(base, v));
  json quarantined = json::array();
  for (const auto& q : session_.startup().quarantined) {
    json qv = json::array();
    for (const auto& v : q.report.violations) {
      qv.push_back(violation_json(base, v, q.rejected ? &*q.rejected : nullptr));
    }
    quarantined.push_back({{"text", q.sentence}, {"line", q.line}, {"reason", q.reason}, {"violations", qv}});
  }
  bool consistent = violations.empty() && quarantined.empty();
  return {200, {{"consistent", consistent}, {"violations", violations}, {"quarantined", quarantined}}};
}

ApiResponse Api::health() const {
  std::shared_lock lock(mutex_);
  EngineStats s = session_.base().stats();
  return {200,
          {{"status", "ok"},
           {"entries", s.entries},
           {"facts", s.facts},
           {"rules", s.rules},
           {"checks", s.checks},
           {"closure", s.closure}}};
}

ApiResponse Api::add_lexicon(const json& request) {
  return guarded([&]() -> ApiResponse {
    std::string line = string_field(request, "line");
    std::unique_lock lock(mutex_);
    try {
      auto entry = parse_lexicon_line(line);
      if (!entry) return bad_request("empty lexicon line");
      session_.add_lexicon_entry(*entry, persist_);
      return {200, {{"status", "added"}, {"line", entry->to_line()}}};
    } catch (const LexiconError& e) {
      return {422, {{"error", "lexicon"}, {"message", e.what()}}};
    }
  });
}

ApiResponse Api::handle(const std::string& method, const std::string& path, const std::string& body) {
  if (method == "GET") {
    if (path == "/health") return health();
    if (path == "/statements") return statements();
    if (path == "/check") return check();
    return {404, {{"error", "not-found"}, {"message", "no route " + method + " " + path}}};
  }
  if (method != "POST") return {405, {{"error", "method-not-allowed"}, {"message", method}}};
  json request = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded()) return bad_request("malformed JSON");
  if (path == "/complete") return complete(request);
  if (path == "/parse") return parse(request);
  if (path == "/assert") return assert_sentence(request);
  if (path == "/retract") return retract(request);
  if (path == "/ask") return ask(request);
  if (path == "/lexicon") return add_lexicon(request);
  return {404, {{"error", "not-found"}, {"message", "no route " + method + " " + path}}};
}

}  // namespace cnldoc
