#include <gtest/gtest.h>

#include <sstream>

#include "cnldoc/api.hpp"
#include "cnldoc/cli.hpp"
#include "cnldoc/server.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace cnldoc;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

const char* kReject = "No component is used by Core.";
const char* kBrian = "EmergencyHandler is maintained by Brian.";

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// A scratch copy of a fixture directory.
struct Scratch {
  ts::TempDir dir;
  fs::path kb;
  Scratch(const std::string& fixture, const std::string& kb_name) {
    dir.copy_from(ts::fixtures() / fixture);
    kb = dir.path() / kb_name;
  }
};

std::vector<std::string> answers(const AskOutcome& r) {
  EXPECT_TRUE(r.answers) << (r.error ? r.error->message : r.inconsistent.value_or(""));
  return r.answers ? r.answers->answers : std::vector<std::string>{};
}

}  // namespace

// --- config ----------------------------------------------------------------

TEST(Config, ParsesKeysAndResolvesPaths) {
  auto c = SessionConfig::parse(
      "# project\n"
      "kb = docs/kb.cnl\n"
      "sources = src, lib /abs/tools\n"
      "port = 9090\n"
      "host = 0.0.0.0\n"
      "budgets = on\n"
      "comment.lua = --\n",
      "/work");
  EXPECT_EQ(c.kb, fs::path("/work/docs/kb.cnl"));
  ASSERT_EQ(c.sources.size(), 3u);
  EXPECT_EQ(c.sources[1], fs::path("/work/lib"));
  EXPECT_EQ(c.sources[2], fs::path("/abs/tools"));
  EXPECT_EQ(c.port, 9090);
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_TRUE(c.enforce_budgets);
  EXPECT_EQ(c.comment_prefixes.at(".lua"), std::vector<std::string>{"--"});
  EXPECT_EQ(c.comment_prefixes.at(".st"), std::vector<std::string>{"\""});
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(SessionConfig::parse("colour = red\n", "/"), Error);
  EXPECT_THROW(SessionConfig::parse("just words\n", "/"), Error);
}

// --- kb file ---------------------------------------------------------------

TEST(KbFile, RendersWhatItParsed) {
  std::string text =
      "# notes\n"
      "@prelude\n"
      "@lexicon noun | component | components\n"
      "\n"
      "Core is a component.\n";
  KbFile f = KbFile::parse(text, "/x/kb.cnl");
  EXPECT_EQ(f.render(), text);
  ASSERT_EQ(f.lines().size(), 5u);
  EXPECT_EQ(f.lines()[1].kind, KbFile::Kind::Prelude);
  EXPECT_EQ(f.lines()[2].value, "noun | component | components");
  EXPECT_EQ(f.lines()[4].kind, KbFile::Kind::Sentence);
  EXPECT_EQ(f.lines()[4].number, 5u);
  EXPECT_EQ(f.resolve("a.dump"), fs::path("/x/a.dump"));
}

TEST(KbFile, QuarantineAnnotationsDoNotAccumulate) {
  KbFile f = KbFile::parse("A is a component.\nB is a component.\n", "kb.cnl");
  std::string once = f.render({{1, "violates \"x\" (v1 = B)"}});
  EXPECT_NE(once.find("#! quarantined: violates \"x\" (v1 = B)\nB is a component."), std::string::npos);
  KbFile again = KbFile::parse(once, "kb.cnl");
  EXPECT_EQ(again.render(), f.render());
  EXPECT_EQ(again.render({{1, "violates \"x\" (v1 = B)"}}), once);
}

TEST(KbFile, EditsSentencesAndDumps) {
  KbFile f = KbFile::parse("@dump a.dump\nA is a component.\n", "kb.cnl");
  f.append_sentence("B is a component.");
  EXPECT_TRUE(f.remove_sentence("A is a component."));
  EXPECT_FALSE(f.remove_sentence("A is a component."));
  f.set_dump("b.dump");
  f.append_dump("c.dump");
  EXPECT_EQ(f.render(), "@dump b.dump\n@dump c.dump\nB is a component.\n");
}

TEST(KbFile, UnknownDirectiveIsAnError) {
  EXPECT_THROW(KbFile::parse("@include x\n", "kb.cnl"), KbFileError);
}

// --- session ---------------------------------------------------------------

TEST(Session, EmptyKnowledgeBase) {
  Session s = Session::open(SessionConfig::defaults());
  EXPECT_TRUE(s.startup().consistent());
  EXPECT_EQ(s.base().stats().entries, 0u);
  EXPECT_FALSE(s.kb_file());
}

TEST(Session, MondrianQuestions) {
  Session s = Session::open_kb(ts::fixtures() / "mondrian" / "mondrian.cnl");
  EXPECT_TRUE(s.startup().consistent());
  EXPECT_EQ(answers(s.ask("Which component is used by Core?")),
            (std::vector<std::string>{"Easel", "Events", "Layouts", "Shapes", "Utils"}));
  EXPECT_EQ(answers(s.ask("Which class of Events is used by a class of Core?")),
            (std::vector<std::string>{"MOAnnouncer", "MOEvent"}));
  EXPECT_TRUE(answers(s.ask("Which method of Shapes uses Layouts?")).empty());
}

TEST(Session, AddClassifiesOutcomes) {
  Session s = Session::open_kb(ts::fixtures() / "mondrian" / "mondrian.cnl");
  EXPECT_EQ(s.add(kReject, false).status, AddOutcome::Status::Rejected);
  EXPECT_EQ(s.add("MOShape is a class.", false).status, AddOutcome::Status::Duplicate);
  auto q = s.add("Which class uses Core?", false);
  EXPECT_EQ(q.status, AddOutcome::Status::Invalid);
  ASSERT_TRUE(q.error);
  EXPECT_EQ(q.error->kind, SentenceError::Kind::WrongKind);
  auto u = s.add("Core frobnicates Shapes.", false);
  ASSERT_TRUE(u.error);
  EXPECT_EQ(u.error->kind, SentenceError::Kind::UnknownWord);
  EXPECT_EQ(u.error->word, "frobnicates");
  // Derived, not asserted, so asserting it is not a duplicate.
  EXPECT_EQ(s.add("MOEasel is a class of Easel.", false).status, AddOutcome::Status::Accepted);
  EXPECT_EQ(s.add("Morph uses Easel.", false).status, AddOutcome::Status::Accepted);
}

TEST(Session, RemoveThenAddRestoresAnswers) {
  Scratch m("mondrian", "mondrian.cnl");
  Session s = Session::open_kb(m.kb);
  auto before = answers(s.ask("Which class belongs to Shapes?"));
  ASSERT_FALSE(before.empty());
  EXPECT_TRUE(s.remove("Every subclass of MOShape belongs to Shapes.", true).removed);
  EXPECT_EQ(ts::read_text(m.kb).find("Every subclass of MOShape belongs to Shapes."), std::string::npos);
  EXPECT_NE(answers(s.ask("Which class belongs to Shapes?")), before);
  EXPECT_EQ(s.add("Every subclass of MOShape belongs to Shapes.", true).status, AddOutcome::Status::Accepted);
  EXPECT_EQ(answers(Session::open_kb(m.kb).ask("Which class belongs to Shapes?")), before);
  EXPECT_FALSE(s.remove("MOShape is a component.", true).removed);
}

TEST(Session, ReingestionAcceptsTheFormerlyRejectedSentence) {
  Scratch m("mondrian", "mondrian.cnl");
  Session s = Session::open_kb(m.kb);
  s.ingest(m.dir.path() / "v543.dump", false);
  EXPECT_TRUE(s.startup().consistent());
  EXPECT_EQ(s.add(kReject, true).status, AddOutcome::Status::Accepted);
  std::string text = ts::read_text(m.kb);
  EXPECT_NE(text.find("@dump v543.dump"), std::string::npos);
  EXPECT_EQ(text.find("@dump v511.dump"), std::string::npos);
}

TEST(Session, DriftQuarantinesTheDocumentedLine) {
  Scratch m("mondrian", "mondrian.cnl");
  Session s = Session::open_kb(m.kb);
  s.ingest(m.dir.path() / "v525_delta.dump", true);
  ASSERT_EQ(s.startup().quarantined.size(), 1u);
  const Quarantine& q = s.startup().quarantined.front();
  EXPECT_EQ(q.sentence, "No method of Shapes uses Layouts.");
  EXPECT_NE(q.reason.find("MOChildrenShape-display-on-"), std::string::npos);
  EXPECT_FALSE(s.startup().consistent());

  // The annotation is in the file and survives a reload unchanged.
  std::string text = ts::read_text(m.kb);
  EXPECT_NE(text.find("#! quarantined: " + q.reason + "\nNo method of Shapes uses Layouts."), std::string::npos);
  Session reloaded = Session::open_kb(m.kb);
  reloaded.save();
  EXPECT_EQ(ts::read_text(m.kb), text);
  ASSERT_EQ(reloaded.startup().quarantined.size(), 1u);
}

TEST(Session, ExtractIsIdempotent) {
  Scratch m("mondrian", "mondrian.cnl");
  Session s = Session::open_kb(m.kb);
  auto first = s.extract(m.dir.path() / "src", true);
  EXPECT_EQ(first.found, 4u);
  EXPECT_EQ(first.added, 2u);
  EXPECT_EQ(first.duplicates, 2u);
  EXPECT_TRUE(first.failed.empty());
  std::string text = ts::read_text(m.kb);

  Session again = Session::open_kb(m.kb);
  auto second = again.extract(m.dir.path() / "src", true);
  EXPECT_EQ(second.added, 0u);
  EXPECT_EQ(second.duplicates, 4u);
  EXPECT_EQ(ts::read_text(m.kb), text);
}

TEST(Session, HandlerScenarioIsRejectedWithEightStatements) {
  Session s = Session::open_kb(ts::fixtures() / "handlers" / "handlers.cnl");
  ASSERT_TRUE(s.startup().consistent());
  AddOutcome r = s.add(kBrian, false);
  ASSERT_EQ(r.status, AddOutcome::Status::Rejected);
  ASSERT_EQ(r.result.report.violations.size(), 1u);
  auto support = s.base().explain(r.result.report.violations[0], r.result.rejected ? &*r.result.rejected : nullptr);
  ASSERT_EQ(support.size(), 8u);
  EXPECT_EQ(support.back()->text, kBrian);
}

// --- command line ----------------------------------------------------------

TEST(Cli, CheckReportsConsistency) {
  Scratch m("mondrian", "mondrian.cnl");
  auto r = cli({"--kb", m.kb.string(), "check"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("consistent, 0 violations"), std::string::npos);

  auto d = cli({"--kb", m.kb.string(), "ingest", "--append", (m.dir.path() / "v525_delta.dump").string()});
  EXPECT_EQ(d.code, 1);
  auto c = cli({"--kb", m.kb.string(), "check"});
  EXPECT_EQ(c.code, 1);
  EXPECT_NE(c.out.find("MOChildrenShape-display-on-"), std::string::npos);
}

TEST(Cli, AskAndAdd) {
  Scratch m("mondrian", "mondrian.cnl");
  auto a = cli({"--kb", m.kb.string(), "ask", "Which component is used by Core?"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, "Easel\nEvents\nLayouts\nShapes\nUtils\n");

  std::string before = ts::read_text(m.kb);
  auto rej = cli({"--kb", m.kb.string(), "add", kReject});
  EXPECT_EQ(rej.code, 1);
  EXPECT_NE(rej.out.find("violated: No component is used by Core."), std::string::npos);
  EXPECT_EQ(ts::read_text(m.kb), before);

  auto dry = cli({"--kb", m.kb.string(), "add", "--dry-run", "Morph uses Easel."});
  EXPECT_EQ(dry.code, 0);
  EXPECT_EQ(ts::read_text(m.kb), before);
  auto ok = cli({"--kb", m.kb.string(), "add", "Morph uses Easel."});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ts::read_text(m.kb).find("Morph uses Easel."), std::string::npos);
}

TEST(Cli, ErrorsExitWithTwo) {
  Scratch m("mondrian", "mondrian.cnl");
  auto syntax = cli({"--kb", m.kb.string(), "add", "Every class is."});
  EXPECT_EQ(syntax.code, 2);
  EXPECT_NE(syntax.err.find("possible next words:"), std::string::npos);
  auto unknown = cli({"--kb", m.kb.string(), "add", "Core frobnicates Shapes."});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("'frobnicates' is not in the lexicon"), std::string::npos);
  EXPECT_EQ(cli({"--kb", (m.dir.path() / "missing.cnl").string(), "check"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
}

TEST(Cli, IngestCreatesKnowledgeBase) {
  ts::TempDir dir;
  fs::copy(ts::fixtures() / "mondrian" / "v511.dump", dir.path() / "v511.dump");
  fs::path kb = dir.path() / "kb.cnl";
  auto r = cli({"--kb", kb.string(), "ingest", (dir.path() / "v511.dump").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(ts::read_text(kb), "@prelude\n@dump v511.dump\n");
  auto a = cli({"--kb", kb.string(), "ask", "Which class is a subclass of MOGraphElement?"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, "MOEdge\nMONode\nMORoot\n");
}

TEST(Cli, ConfigFileSuppliesKnowledgeBase) {
  Scratch m("mondrian", "mondrian.cnl");
  ts::write_text(m.dir.path() / "cnldoc.conf", "kb = mondrian.cnl\nsources = src\n");
  auto r = cli({"--config", (m.dir.path() / "cnldoc.conf").string(), "extract", "--dry-run"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("4 tagged comments, 2 added"), std::string::npos);
  EXPECT_EQ(ts::read_text(m.kb), ts::read_text(ts::fixtures() / "mondrian" / "mondrian.cnl"));
}

TEST(Cli, LexiconCommandAddsWords) {
  Scratch m("mondrian", "mondrian.cnl");
  EXPECT_EQ(cli({"--kb", m.kb.string(), "add", "Core frobnicates Shapes."}).code, 2);
  EXPECT_EQ(cli({"--kb", m.kb.string(), "lexicon", "transitive-verb | frobnicates | frobnicate | frobnicated"}).code, 0);
  EXPECT_EQ(cli({"--kb", m.kb.string(), "add", "Core frobnicates Shapes."}).code, 0);
  EXPECT_EQ(cli({"--kb", m.kb.string(), "lexicon", "noun | class"}).code, 2);
}

// --- HTTP ------------------------------------------------------------------

class Http : public ::testing::Test {
 protected:
  void open(const fs::path& kb) {
    session_.emplace(Session::open_kb(kb));
    api_.emplace(*session_, false);
    server_.emplace(*api_);
    port_ = server_->bind("127.0.0.1", 0);
    server_->start();
    client_.emplace("127.0.0.1", port_);
    kb_ = kb;
  }
  void TearDown() override {
    if (server_) server_->stop();
  }
  json post(const std::string& path, const json& body, int expect) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }
  json get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }
  json cli_json(std::vector<std::string> args) {
    args.insert(args.begin(), {"--kb", kb_.string()});
    auto r = cli(args);
    return json::parse(r.out);
  }

  std::optional<Session> session_;
  std::optional<Api> api_;
  std::optional<Server> server_;
  std::optional<httplib::Client> client_;
  int port_ = 0;
  fs::path kb_;
};

TEST_F(Http, Health) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  json h = get("/health");
  EXPECT_EQ(h["status"], "ok");
  EXPECT_GT(h["facts"].get<int>(), 0);
}

TEST_F(Http, CompleteMatchesCli) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  json body = post("/complete", {{"prefix", "Every"}}, 200);
  EXPECT_EQ(body, cli_json({"complete", "--json", "Every"}));
  bool has_class = false;
  for (const auto& t : body["tokens"]) has_class |= t["surface"] == "class";
  EXPECT_TRUE(has_class);
  EXPECT_FALSE(body["sentence_end"].get<bool>());
}

TEST_F(Http, AskMatchesCli) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  json body = post("/ask", {{"question", "Which component is used by Core?"}}, 200);
  EXPECT_EQ(body, cli_json({"ask", "--json", "Which component is used by Core?"}));
  EXPECT_EQ(body["answers"], json({"Easel", "Events", "Layouts", "Shapes", "Utils"}));
}

TEST_F(Http, ParseMatchesCli) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  json body = post("/parse", {{"sentence", kReject}}, 200);
  EXPECT_EQ(body, cli_json({"parse", "--json", kReject}));
  EXPECT_EQ(body["kind"], "statement");
}

TEST_F(Http, RejectionCarriesSupport) {
  open(ts::fixtures() / "handlers" / "handlers.cnl");
  json body = post("/assert", {{"sentence", kBrian}}, 409);
  EXPECT_EQ(body["status"], "rejected");
  ASSERT_EQ(body["violations"].size(), 1u);
  const json& support = body["violations"][0]["support"];
  ASSERT_EQ(support.size(), 8u);
  EXPECT_EQ(support.back()["text"], kBrian);
  EXPECT_EQ(support.back()["provenance"]["kind"], "interactive");
  EXPECT_EQ(get("/health")["entries"], 7);
}

TEST_F(Http, AssertAndRetract) {
  Scratch m("mondrian", "mondrian.cnl");
  open(m.kb);
  EXPECT_EQ(post("/assert", {{"sentence", "Morph uses Easel."}}, 200)["status"], "accepted");
  EXPECT_EQ(post("/assert", {{"sentence", "Morph uses Easel."}}, 200)["status"], "duplicate");
  EXPECT_EQ(post("/ask", {{"question", "Which component is used by Morph?"}}, 200)["answers"], json({"Easel"}));
  EXPECT_EQ(post("/retract", {{"sentence", "Morph uses Easel."}}, 200)["status"], "removed");
  post("/retract", {{"sentence", "Morph uses Easel."}}, 404);
  // The API was opened without persistence.
  EXPECT_EQ(ts::read_text(m.kb), ts::read_text(ts::fixtures() / "mondrian" / "mondrian.cnl"));
}

TEST_F(Http, StatementsAndCheck) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  json st = get("/statements");
  EXPECT_FALSE(st["statements"].empty());
  EXPECT_TRUE(st["quarantined"].empty());
  json c = get("/check");
  EXPECT_TRUE(c["consistent"].get<bool>());
  EXPECT_EQ(c, cli_json({"check", "--json"}));
}

TEST_F(Http, ClientErrors) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  auto res = client_->Post("/assert", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  post("/assert", {{"text", "x"}}, 400);
  json e = post("/assert", {{"sentence", "Every class is."}}, 422);
  EXPECT_EQ(e["error"], "syntax");
  EXPECT_EQ(e["position"], 3);
  json u = post("/ask", {{"question", "Which class frobnicates Core?"}}, 422);
  EXPECT_EQ(u["error"], "unknown-word");
  EXPECT_EQ(u["word"], "frobnicates");
  get("/nowhere", 404);
  auto del = client_->Delete("/health");
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 405);
}

TEST_F(Http, LexiconEndpoint) {
  open(ts::fixtures() / "mondrian" / "mondrian.cnl");
  post("/lexicon", {{"line", "transitive-verb | frobnicates | frobnicate | frobnicated"}}, 200);
  EXPECT_EQ(post("/assert", {{"sentence", "Core frobnicates Shapes."}}, 200)["status"], "accepted");
  post("/lexicon", {{"line", "noun | class"}}, 422);
}
