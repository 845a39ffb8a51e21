#include "cnldoc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>

#include <unistd.h>

#include "CLI11.hpp"
#include "cnldoc/api.hpp"
#include "cnldoc/bench.hpp"
#include "cnldoc/server.hpp"
#include "cnldoc/workbench.hpp"

namespace cnldoc {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

int exit_code(int status) {
  switch (status) {
    case 200: return kOk;
    case 404:
    case 409: return kViolations;
    default: return kUsage;
  }
}

void print_sentence_error(const json& e, std::ostream& err) {
  err << "error: " << e.value("message", "") << "\n";
  if (e.contains("suggestions")) {
    std::vector<std::string> cats;
    for (const auto& c : e["suggestions"]) cats.push_back(c.get<std::string>());
    if (!cats.empty()) {
      err << "  '" << e["word"].get<std::string>() << "' is not in the lexicon; it would fit as a new "
          << CLI::detail::join(cats, " or ") << "\n";
    }
  }
  if (e.contains("expected")) {
    std::vector<std::string> words;
    for (const auto& t : e["expected"]["tokens"]) words.push_back(t["surface"].get<std::string>());
    constexpr std::size_t kShown = 30;
    std::string list = CLI::detail::join(std::vector<std::string>(words.begin(), words.begin() + std::min(kShown, words.size())), ", ");
    if (words.size() > kShown) list += ", ... (" + std::to_string(words.size() - kShown) + " more)";
    err << "  possible next words: " << list << "\n";
  }
}

void print_violations(const json& violations, std::ostream& out) {
  for (const auto& v : violations) out << v["description"].get<std::string>() << "\n";
}

struct Options {
  std::string config;
  std::string kb;
  bool json = false;
};

SessionConfig load_config(const Options& o) {
  SessionConfig cfg;
  if (!o.config.empty()) {
    cfg = SessionConfig::from_file(o.config);
  } else if (fs::exists("cnldoc.conf")) {
    cfg = SessionConfig::from_file("cnldoc.conf");
  } else {
    cfg = SessionConfig::defaults();
  }
  if (!o.kb.empty()) cfg.kb = o.kb;
  return cfg;
}

Session open_session(const SessionConfig& cfg) {
  if (!cfg.kb.empty() && !fs::exists(cfg.kb)) throw Error("knowledge base " + cfg.kb.string() + " does not exist");
  return Session::open(cfg);
}

int emit(const ApiResponse& r, const Options& o, std::ostream& out, std::ostream& err,
         const std::function<void(const json&)>& text) {
  if (o.json) {
    out << r.body.dump() << "\n";
  } else if (r.status == 200 || r.status == 409 || r.status == 404) {
    text(r.body);
  } else {
    print_sentence_error(r.body, err);
  }
  return exit_code(r.status);
}

int report_check(const Session& session, Api& api, const Options& o, std::ostream& out) {
  ApiResponse r = api.check();
  if (o.json) {
    out << r.body.dump() << "\n";
  } else {
    for (const auto& q : r.body["quarantined"]) {
      out << "quarantined line " << q["line"].get<std::size_t>() << ": " << q["text"].get<std::string>() << "\n";
      print_violations(q["violations"], out);
    }
    print_violations(r.body["violations"], out);
    std::size_t n = r.body["violations"].size();
    std::size_t nq = r.body["quarantined"].size();
    if (r.body["consistent"].get<bool>()) {
      out << "consistent, 0 violations\n";
    } else {
      out << "inconsistent, " << n << " violation" << (n == 1 ? "" : "s");
      if (nq) out << ", " << nq << " quarantined";
      out << "\n";
    }
  }
  (void)session;
  return r.body["consistent"].get<bool>() ? kOk : kViolations;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controlled-English documentation checked against source code", "cnldoc"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Configuration file (default ./cnldoc.conf when present)");
  app.add_option("--kb", o.kb, "Knowledge-base file (overrides the configuration)");

  std::string dump;
  bool append = false;
  auto* ingest = app.add_subcommand("ingest", "Point the knowledge base at a code-model dump and check");
  ingest->add_option("dump", dump)->required();
  ingest->add_flag("--append", append, "Add the dump instead of replacing the current one");

  auto* check = app.add_subcommand("check", "Report violations and quarantined lines");
  check->add_flag("--json", o.json);

  std::string sentence;
  bool dry_run = false;
  auto* add = app.add_subcommand("add", "Assert a sentence and save it");
  add->add_option("sentence", sentence)->required();
  add->add_flag("--dry-run", dry_run, "Do not write the knowledge-base file");
  add->add_flag("--json", o.json);

  auto* remove = app.add_subcommand("remove", "Retract a sentence and save");
  remove->add_option("sentence", sentence)->required();
  remove->add_flag("--dry-run", dry_run, "Do not write the knowledge-base file");
  remove->add_flag("--json", o.json);

  auto* ask = app.add_subcommand("ask", "Answer a question");
  ask->add_option("question", sentence)->required();
  ask->add_flag("--json", o.json);

  auto* complete = app.add_subcommand("complete", "List the possible next words");
  complete->add_option("prefix", sentence);
  complete->add_flag("--json", o.json);

  auto* parse = app.add_subcommand("parse", "Show the syntax tree and logical form");
  parse->add_option("sentence", sentence)->required();
  parse->add_flag("--json", o.json);

  std::vector<std::string> roots;
  auto* extract = app.add_subcommand("extract", "Assert the @cnl: comments found under source roots");
  extract->add_option("roots", roots, "Source roots (default: sources from the configuration)");
  extract->add_flag("--dry-run", dry_run, "Do not write the knowledge-base file");

  std::string host;
  int port = -1;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_flag("--dry-run", dry_run, "Do not write the knowledge-base file");

  std::size_t facts = 0;
  bool budget = false;
  std::uint64_t seed = 7;
  std::string workdir;
  auto* bench = app.add_subcommand("bench", "Time load, add, check and detection on a synthetic base");
  bench->add_option("facts", facts)->required()->check(CLI::Range(std::size_t{200}, std::size_t{10000000}));
  bench->add_flag("--budget", budget, "Exit 1 when a time budget is exceeded");
  bench->add_option("--seed", seed);
  bench->add_option("--workdir", workdir, "Where to write the synthetic project (default: a temporary directory)");

  auto* statements = app.add_subcommand("statements", "List the statements with their provenance");
  statements->add_flag("--json", o.json);

  std::string lexicon_line;
  auto* lexicon = app.add_subcommand("lexicon", "Add a lexicon entry, e.g. \"noun | component | components\"");
  lexicon->add_option("entry", lexicon_line)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    SessionConfig cfg = load_config(o);

    if (bench->parsed()) {
      fs::path dir = workdir.empty() ? fs::temp_directory_path() / ("cnldoc-bench-" + std::to_string(::getpid()))
                                     : fs::path(workdir);
      BenchResult r = run_bench(facts, dir, seed);
      if (workdir.empty()) fs::remove_all(dir);
      out << format_bench_table(r, "synthetic");
      bool ok = r.consistent && r.added && r.detected;
      if (!ok) err << "bench: the synthetic base did not behave as generated\n";
      if ((budget || cfg.enforce_budgets) && !within_budget(r)) {
        err << "bench: over budget (add <= 2 s, check <= 10 s, load <= 120 s)\n";
        ok = false;
      }
      return ok ? kOk : kViolations;
    }

    if (ingest->parsed()) {
      if (cfg.kb.empty()) throw Error("ingest needs a knowledge-base file (--kb or kb = in the configuration)");
      if (!fs::exists(cfg.kb)) {
        std::ofstream(cfg.kb) << "@prelude\n";
      }
      Session session = Session::open(cfg);
      session.ingest(dump, append);
      Api api(session, false);
      return report_check(session, api, o, out);
    }

    Session session = open_session(cfg);
    Api api(session, !dry_run);

    if (check->parsed()) return report_check(session, api, o, out);

    if (add->parsed()) {
      return emit(api.assert_sentence({{"sentence", sentence}}), o, out, err, [&](const json& b) {
        std::string status = b["status"].get<std::string>();
        if (status == "accepted") {
          out << "accepted\n";
        } else if (status == "duplicate") {
          out << "already present\n";
        } else {
          out << "rejected: " << b["sentence"].get<std::string>() << "\n";
          print_violations(b["violations"], out);
        }
      });
    }

    if (remove->parsed()) {
      return emit(api.retract({{"sentence", sentence}}), o, out, err, [&](const json& b) {
        if (b.contains("status")) {
          out << "removed\n";
        } else {
          out << b["message"].get<std::string>() << "\n";
        }
      });
    }

    if (ask->parsed()) {
      ApiResponse r = api.ask({{"question", sentence}});
      if (r.status == 409 && !o.json) {
        err << r.body["message"].get<std::string>() << "\n";
        return kViolations;
      }
      return emit(r, o, out, err, [&](const json& b) {
        if (b["answers"].empty()) out << "no answers\n";
        for (const auto& a : b["answers"]) out << a.get<std::string>() << "\n";
      });
    }

    if (complete->parsed()) {
      return emit(api.complete({{"prefix", sentence}}), o, out, err, [&](const json& b) {
        for (const auto& t : b["tokens"]) out << t["surface"].get<std::string>() << "\n";
      });
    }

    if (parse->parsed()) {
      return emit(api.parse({{"sentence", sentence}}), o, out, err, [&](const json& b) {
        out << b["kind"].get<std::string>() << ": " << b["tree"].get<std::string>() << "\n";
        for (const auto& s : b["statements"]) out << "  " << s.get<std::string>() << "\n";
      });
    }

    if (statements->parsed()) {
      ApiResponse r = api.statements();
      if (o.json) {
        out << r.body.dump() << "\n";
        return kOk;
      }
      for (const auto& s : r.body["statements"]) {
        out << "[" << s["provenance"]["source"].get<std::string>() << "] " << s["text"].get<std::string>() << "\n";
      }
      for (const auto& q : r.body["quarantined"]) {
        out << "[quarantined line " << q["line"].get<std::size_t>() << "] " << q["text"].get<std::string>() << "\n";
      }
      return kOk;
    }

    if (lexicon->parsed()) {
      ApiResponse r = api.add_lexicon({{"line", lexicon_line}});
      if (r.status != 200) {
        err << "error: " << r.body["message"].get<std::string>() << "\n";
        return kUsage;
      }
      out << "added " << r.body["line"].get<std::string>() << "\n";
      return kOk;
    }

    if (extract->parsed()) {
      std::vector<fs::path> paths(roots.begin(), roots.end());
      if (paths.empty()) paths = cfg.sources;
      if (paths.empty()) throw Error("extract needs source roots (arguments or sources = in the configuration)");
      int code = kOk;
      for (const auto& root : paths) {
        ExtractOutcome r = session.extract(root, !dry_run);
        out << root.string() << ": " << r.found << " tagged comments, " << r.added << " added, " << r.duplicates
            << " already present, " << r.failed.size() << " failed\n";
        for (const auto& [doc, outcome] : r.failed) {
          out << doc.file << ":" << doc.line << ": " << doc.sentence << "\n";
          if (outcome.error) {
            ApiResponse e{422, to_json(*outcome.error)};
            print_sentence_error(e.body, out);
            code = kUsage;
          } else {
            const Entry* rejected = outcome.result.rejected ? &*outcome.result.rejected : nullptr;
            for (const auto& v : outcome.result.report.violations) {
              out << describe_violation(session.base(), v, rejected) << "\n";
            }
            code = std::max(code, kViolations);
          }
        }
      }
      return code;
    }

    if (serve->parsed()) {
      Server server(api);
      std::string h = host.empty() ? cfg.host : host;
      int bound = server.bind(h, port < 0 ? cfg.port : port);
      out << "serving on http://" << h << ":" << bound << std::endl;
      server.run();
      return kOk;
    }
  } catch (const KbFileError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace cnldoc
