#include <gtest/gtest.h>

#include "cnldoc/code_model.hpp"
#include "support.hpp"

using namespace cnldoc;
namespace ts = testing_support;

namespace {

constexpr std::string_view kSmall =
    "# two classes\n"
    "E|package|Core-Pkg\n"
    "E|class|Shape\n"
    "E|class|Box\n"
    "E|interface|Drawable\n"
    "E|method|Box-draw\n"
    "E|method|Shape-area\n"
    "R|direct-subclass-of|Box|Shape\n"
    "R|defines|Box|Box-draw\n"
    "R|defines|Shape|Shape-area\n"
    "R|invokes|Box-draw|Shape-area\n"
    "R|invokes|Box-draw|Shape-area\n"
    "R|instantiates|Box-draw|Shape\n"
    "R|in-package|Box|Core-Pkg\n"
    "R|implements|Shape|Drawable\n";

CodeModelError::Kind error_kind(std::string_view dump, const std::map<std::string, EntityKind>& known = {}) {
  try {
    ingest_model(CodeModel::parse_string(dump), known);
  } catch (const CodeModelError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << dump;
  return CodeModelError::Kind::Format;
}

}  // namespace

TEST(CodeModel, ParsesRecords) {
  CodeModel m = CodeModel::parse_string(kSmall);
  EXPECT_EQ(m.entities.size(), 6u);
  EXPECT_EQ(m.relations.size(), 8u);
  EXPECT_EQ(m.entities[0].line, 2u);
  EXPECT_EQ(CodeModel::parse_string(m.to_string()).to_string(), m.to_string());
}

TEST(CodeModel, OneFactPerEntityAndDistinctEdge) {
  Ingestion in = ingest_model(CodeModel::parse_string(kSmall));
  EXPECT_EQ(in.facts.size(), 6u + 7u);
  EXPECT_EQ(in.names.size(), 6u);
  EXPECT_EQ(in.kinds.at("Drawable"), EntityKind::Interface);
}

TEST(CodeModel, IngestedSentencesTranslateToTheirFacts) {
  Ingestion in = ingest_model(CodeModel::parse_string(kSmall));
  Lexicon lex = prelude_lexicon().with(in.names, true);
  for (const auto& f : in.facts) {
    auto st = translate_sentence(f.sentence, lex);
    ASSERT_EQ(st.size(), 1u) << f.sentence;
    EXPECT_EQ(st[0], f.statement) << f.sentence;
  }
}

TEST(CodeModel, InPackageIsContainment) {
  Ingestion in = ingest_model(CodeModel::parse_string(kSmall));
  bool found = false;
  for (const auto& f : in.facts) {
    if (f.sentence == "Box is contained in Core-Pkg.") {
      found = true;
      EXPECT_EQ(serialize(f.statement), "FACT contained-in(Box,Core-Pkg)");
    }
  }
  EXPECT_TRUE(found);
}

TEST(CodeModel, FormatErrors) {
  EXPECT_THROW(CodeModel::parse_string("X|class|A\n"), CodeModelError);
  EXPECT_THROW(CodeModel::parse_string("E|module|A\n"), CodeModelError);
  EXPECT_THROW(CodeModel::parse_string("R|calls|A|B\n"), CodeModelError);
  EXPECT_THROW(CodeModel::parse_string("E|class|\n"), CodeModelError);
  try {
    CodeModel::parse_string("E|class|A\n\nE|class\n");
    FAIL();
  } catch (const CodeModelError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(CodeModel, ValidationErrors) {
  EXPECT_EQ(error_kind("E|class|A\nE|class|A\n"), CodeModelError::Kind::DuplicateEntity);
  EXPECT_EQ(error_kind("E|class|A\nR|defines|A|A-m\n"), CodeModelError::Kind::DanglingReference);
  EXPECT_EQ(error_kind("E|class|A\nE|class|B\nR|defines|A|B\n"), CodeModelError::Kind::KindMismatch);
  EXPECT_EQ(error_kind("E|method|draw\n"), CodeModelError::Kind::Format);
  EXPECT_EQ(error_kind("E|method|-draw\n"), CodeModelError::Kind::Format);
}

TEST(CodeModel, DeltaDumpSeesEarlierEntities) {
  Ingestion base = ingest_model(CodeModel::parse_string(kSmall));
  Ingestion delta = ingest_model(CodeModel::parse_string("E|method|Box-resize\nE|class|Box\n"
                                                         "R|defines|Box|Box-resize\n"
                                                         "R|invokes|Box-resize|Shape-area\n"),
                                 base.kinds);
  EXPECT_EQ(delta.names.size(), 1u);
  EXPECT_EQ(delta.facts.size(), 3u);
  EXPECT_EQ(error_kind("E|class|Box-draw\n", base.kinds), CodeModelError::Kind::KindMismatch);
}

TEST(CodeModel, MondrianFixturesIngest) {
  auto dir = ts::fixtures() / "mondrian";
  Ingestion v511 = ingest_model(CodeModel::from_file((dir / "v511.dump").string()));
  EXPECT_NO_THROW(ingest_model(CodeModel::from_file((dir / "v525_delta.dump").string()), v511.kinds));
  EXPECT_NO_THROW(ingest_model(CodeModel::from_file((dir / "v543.dump").string())));
}

TEST(Prelude, EverySentenceTranslates) {
  auto p = prelude();
  EXPECT_FALSE(p.empty());
  for (const auto& s : p) EXPECT_FALSE(s.statements.empty()) << s.sentence;
}

TEST(DocComments, ExtractsTaggedLines) {
  std::string src =
      "int x;\n"
      "/// @cnl: Shape is a class.\n"
      "// @cnl:   Box   is a class.\n"
      "// an ordinary comment\n"
      "  //@cnl: Which class uses Box?\n";
  auto out = extract_doc_comments(src, "a.cpp", {"//", "///"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].sentence, "Shape is a class.");
  EXPECT_EQ(out[0].line, 2u);
  EXPECT_EQ(out[1].sentence, "Box is a class.");
  EXPECT_EQ(out[2].sentence, "Which class uses Box?");
  EXPECT_EQ(out[2].file, "a.cpp");
}

TEST(DocComments, StripsClosingDelimiter) {
  auto out = extract_doc_comments("\"@cnl: MOShape belongs to Core.\"\n", "a.st", {"\""});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].sentence, "MOShape belongs to Core.");
}

TEST(DocComments, UnterminatedSentenceIsAnError) {
  try {
    extract_doc_comments("x\n# @cnl: Shape is a class\n", "a.py", {"#"});
    FAIL();
  } catch (const MalformedDocComment& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.file(), "a.py");
  }
}
