#include <gtest/gtest.h>

#include "cnldoc/code_model.hpp"
#include "cnldoc/engine.hpp"
#include "support.hpp"

using namespace cnldoc;
using namespace testing_support;

namespace {

Atom atom(std::string p, std::vector<std::string> args) {
  Atom a{std::move(p), {}};
  for (auto& s : args) {
    bool var = !s.empty() && std::isupper(static_cast<unsigned char>(s[0])) && s.size() == 1;
    a.args.push_back(var ? Term::variable(s) : Term::constant(s));
  }
  return a;
}

AtomSet closure_of(const KnowledgeBase& kb) {
  auto c = kb.closure();
  return {c.begin(), c.end()};
}

Lexicon handler_lexicon() { return Lexicon::from_file((fixtures() / "handlers" / "handlers.lex").string()); }

std::vector<std::string> handler_sentences() {
  std::vector<std::string> out;
  for (auto& s : sentences(fixtures() / "handlers" / "handlers.cnl")) {
    if (s[0] != '@') out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Engine, TransitiveClosure) {
  std::vector<Atom> facts = {atom("e", {"a", "b"}), atom("e", {"b", "c"}), atom("e", {"c", "d"})};
  std::vector<Rule> rules = {{{atom("e", {"X", "Y"})}, atom("t", {"X", "Y"})},
                             {{atom("e", {"X", "Y"}), atom("t", {"Y", "Z"})}, atom("t", {"X", "Z"})}};
  auto got = saturate(facts, rules);
  AtomSet expect = naive_closure(facts, rules);
  EXPECT_EQ(AtomSet(got.begin(), got.end()), expect);
  EXPECT_EQ(expect.size(), 3u + 6u);
}

TEST(Engine, SemiNaiveMatchesNaiveOnRandomInstances) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 150; ++i) {
    RandomInstance inst = random_instance(rng);
    KnowledgeBase kb;
    load(kb, as_statements(inst));
    ASSERT_EQ(closure_of(kb), naive_closure(inst.facts, inst.rules)) << "instance " << i;
  }
}

TEST(Engine, QueriesMatchEnumeration) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 60; ++i) {
    RandomInstance inst = random_instance(rng, 12, 8, 40);
    KnowledgeBase kb;
    load(kb, as_statements(inst));
    AtomSet closure = naive_closure(inst.facts, inst.rules);
    for (int j = 0; j < 4; ++j) {
      Query q = random_query(rng, inst, 3);
      ASSERT_EQ(kb.ask(q).answers, enumerate_answers(closure, q)) << serialize({q});
    }
  }
}

TEST(Engine, InsertionOrderDoesNotMatter) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    RandomInstance inst = random_instance(rng);
    auto statements = as_statements(inst);
    KnowledgeBase a;
    load(a, statements);
    std::shuffle(statements.begin(), statements.end(), rng);
    KnowledgeBase b;
    load(b, statements);
    ASSERT_EQ(a.closure(), b.closure());
  }
}

TEST(Engine, RetractEqualsFreshBuild) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 60; ++i) {
    RandomInstance inst = random_instance(rng);
    // Distinct meanings only: a repeated rule is one statement.
    std::vector<Statement> statements;
    std::set<std::string> seen;
    for (const auto& s : as_statements(inst)) {
      if (seen.insert(serialize(normalize(s))).second) statements.push_back(s);
    }
    KnowledgeBase kb;
    load(kb, statements);
    std::vector<Statement> kept, removed;
    for (const auto& s : statements) (std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? removed : kept).push_back(s);
    for (const auto& s : removed) kb.retract({s});
    KnowledgeBase fresh;
    load(fresh, kept);
    ASSERT_EQ(kb.closure(), fresh.closure()) << "instance " << i;
  }
}

TEST(Engine, RetractUnknownStatementThrows) {
  KnowledgeBase kb;
  kb.add({{Fact{atom("p", {"a"})}}}, "p(a)", Provenance::interactive());
  EXPECT_THROW(kb.retract({{Fact{atom("p", {"b"})}}}), NotPresentError);
}

TEST(Engine, DenialViolationsMatchEnumeration) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 60; ++i) {
    RandomInstance inst = random_instance(rng, 10, 6, 30);
    KnowledgeBase kb;
    load(kb, as_statements(inst));
    Query probe = random_query(rng, inst, 2);
    kb.add({{Denial{probe.body}}}, "denial", Provenance::interactive());
    // The denial is violated exactly when its body has a satisfying binding.
    AtomSet closure = naive_closure(inst.facts, inst.rules);
    bool violated = !enumerate_answers(closure, probe).empty();
    EXPECT_EQ(!kb.check().consistent(), violated) << serialize({Denial{probe.body}});
  }
}

TEST(Engine, RejectedAssertionLeavesBaseUnchanged) {
  KnowledgeBase kb;
  kb.add({{Denial{{atom("p", {"X"}), atom("q", {"X"})}}}}, "no p is q", Provenance::interactive());
  kb.add({{Fact{atom("p", {"a"})}}}, "p(a)", Provenance::interactive());
  auto before = kb.closure();
  auto r = kb.assert_statements({{Fact{atom("q", {"a"})}}}, "q(a)", Provenance::interactive());
  EXPECT_FALSE(r.accepted);
  ASSERT_EQ(r.report.violations.size(), 1u);
  EXPECT_EQ(kb.closure(), before);
  EXPECT_TRUE(kb.check().consistent());
  EXPECT_TRUE(kb.assert_statements({{Fact{atom("q", {"b"})}}}, "q(b)", Provenance::interactive()).accepted);
}

TEST(Engine, DuplicateAssertionIsReported) {
  KnowledgeBase kb;
  EXPECT_FALSE(kb.assert_statements({{Fact{atom("p", {"a"})}}}, "p(a)", Provenance::interactive()).duplicate);
  auto r = kb.assert_statements({{Fact{atom("p", {"a"})}}}, "p(a) again", Provenance::interactive());
  EXPECT_TRUE(r.accepted);
  EXPECT_TRUE(r.duplicate);
  EXPECT_EQ(kb.stats().entries, 1u);
}

TEST(Engine, CardinalityCountsDistinctClosedWorld) {
  // Everything relates to at most 1 g-thing.
  CardinalityCheck card{Term::variable("v1"), {}, Counting{"r", false, "g", Comparator::AtMost, 1}};
  KnowledgeBase kb;
  kb.add({{card}}, "card", Provenance::interactive());
  kb.add({{Fact{atom("g", {"x"})}}, {Fact{atom("g", {"y"})}}}, "g", Provenance::interactive());
  EXPECT_TRUE(kb.assert_statements({{Fact{atom("r", {"a", "x"})}}}, "a-x", Provenance::interactive()).accepted);
  // Related to something that is not a g: not counted.
  EXPECT_TRUE(kb.assert_statements({{Fact{atom("r", {"a", "z"})}}}, "a-z", Provenance::interactive()).accepted);
  auto r = kb.assert_statements({{Fact{atom("r", {"a", "y"})}}}, "a-y", Provenance::interactive());
  ASSERT_FALSE(r.accepted);
  ASSERT_EQ(r.report.violations.size(), 1u);
  EXPECT_EQ(r.report.violations[0].count, 2u);
  EXPECT_EQ(r.report.violations[0].counted, (std::vector<std::string>{"x", "y"}));
}

TEST(Engine, AskRefusesInconsistentBase) {
  KnowledgeBase kb;
  kb.add({{Denial{{atom("p", {"X"})}}}}, "no p", Provenance::interactive());
  kb.add({{Fact{atom("p", {"a"})}}}, "p(a)", Provenance::interactive());
  Query q{Term::variable("X"), {atom("p", {"X"})}, std::nullopt};
  EXPECT_THROW(kb.ask(q), InconsistentBaseError);
}

TEST(Engine, HandlerScenarioSupportIsMinimal) {
  Lexicon lex = handler_lexicon();
  auto kb_sentences = handler_sentences();
  const std::string added = "EmergencyHandler is maintained by Brian.";
  auto build = [&](const std::vector<std::string>& ss) {
    KnowledgeBase kb;
    for (std::size_t i = 0; i < ss.size(); ++i) {
      kb.add(translate_sentence(ss[i], lex), ss[i], Provenance::documented("handlers.cnl", i + 1));
    }
    return kb;
  };
  KnowledgeBase kb = build(kb_sentences);
  auto r = kb.assert_statements(translate_sentence(added, lex), added, Provenance::interactive());
  ASSERT_FALSE(r.accepted);
  ASSERT_EQ(r.report.violations.size(), 1u);
  auto support = kb.explain(r.report.violations[0], &*r.rejected);
  ASSERT_EQ(support.size(), 8u);
  EXPECT_EQ(support.back()->text, added);
  // Dropping any one supporting statement makes the sentence acceptable.
  std::vector<std::string> all = kb_sentences;
  all.push_back(added);
  for (std::size_t drop = 0; drop < all.size(); ++drop) {
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i != drop) rest.push_back(all[i]);
    }
    KnowledgeBase partial = build(rest);
    EXPECT_TRUE(partial.check().consistent()) << "still inconsistent without: " << all[drop];
  }
}

TEST(Engine, SupportIsSufficientOnRandomDenials) {
  std::mt19937_64 rng(16);
  int checked = 0;
  for (int i = 0; i < 80; ++i) {
    RandomInstance inst = random_instance(rng, 10, 6, 30);
    auto statements = as_statements(inst);
    KnowledgeBase kb;
    load(kb, statements);
    Query probe = random_query(rng, inst, 2);
    kb.add({{Denial{probe.body}}}, "denial", Provenance::interactive());
    auto report = kb.check();
    if (report.consistent()) continue;
    ++checked;
    const Violation& v = report.violations.front();
    // Rebuild from the support alone: the same violation must appear.
    KnowledgeBase only;
    for (const Entry* e : kb.explain(v)) only.add(e->statements, e->text, e->provenance);
    bool found = false;
    for (const auto& w : only.check().violations) found |= w.bindings == v.bindings;
    EXPECT_TRUE(found) << "instance " << i;
  }
  EXPECT_GT(checked, 10);
}

TEST(Engine, SupportOrderedByProvenance) {
  KnowledgeBase kb;
  kb.add({{Denial{{atom("p", {"X"}), atom("q", {"X"})}}}}, "d", Provenance::documented("kb.cnl", 3));
  kb.add({{Rule{{atom("r", {"X"})}, atom("q", {"X"})}}}, "rule", Provenance::prelude(2));
  kb.add({{Fact{atom("r", {"a"})}}}, "r(a)", Provenance::ingested("x.dump"));
  auto res = kb.assert_statements({{Fact{atom("p", {"a"})}}}, "p(a)", Provenance::interactive());
  ASSERT_FALSE(res.accepted);
  auto support = kb.explain(res.report.violations.front(), &*res.rejected);
  std::vector<std::string> texts;
  for (auto* e : support) texts.push_back(e->text);
  EXPECT_EQ(texts, (std::vector<std::string>{"rule", "r(a)", "d", "p(a)"}));
}

TEST(Engine, PreludeIsConsistentAndDerivesUses) {
  KnowledgeBase kb;
  for (const auto& p : prelude()) kb.add(p.statements, p.sentence, Provenance::prelude(p.line));
  EXPECT_TRUE(kb.check().consistent());
  auto facts = ingest_model(CodeModel::parse_string("E|class|Ka\nE|class|Kb\nE|method|Ka-m\nE|method|Kb-n\n"
                                                    "R|defines|Ka|Ka-m\nR|defines|Kb|Kb-n\nR|invokes|Ka-m|Kb-n\n"));
  for (const auto& f : facts.facts) kb.add({f.statement}, f.sentence, Provenance::ingested("t.dump"));
  Query q{Term::variable("X"), {atom("uses", {"X", "Kb"})}, std::nullopt};
  EXPECT_EQ(kb.ask(q).answers, (std::vector<std::string>{"Ka", "Ka-m"}));
}
