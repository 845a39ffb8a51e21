#pragma once

#include <shared_mutex>
#include <string>

#include "cnldoc/workbench.hpp"
#include "json.hpp"

namespace cnldoc {

using json = nlohmann::json;

struct ApiResponse {
  int status = 200;
  json body;
};

/// The JSON API shared by `serve` and the CLI's --json output. Reads take a
/// shared lock, mutations an exclusive one.
class Api {
 public:
  /// With `persist`, accepted mutations are written back to the kb file.
  Api(Session& session, bool persist);

  ApiResponse complete(const json& request) const;
  ApiResponse parse(const json& request) const;
  ApiResponse assert_sentence(const json& request);
  ApiResponse retract(const json& request);
  ApiResponse ask(const json& request) const;
  ApiResponse statements() const;
  ApiResponse check() const;
  ApiResponse health() const;
  /// {"line": "noun | component | components"}
  ApiResponse add_lexicon(const json& request);

  /// Routes a raw request; malformed JSON and unknown routes are answered
  /// here rather than thrown.
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  Session& session_;
  bool persist_;
  mutable std::shared_mutex mutex_;
};

json to_json(const CompletionSet& completions);
json to_json(const SentenceError& error);
json violation_json(const KnowledgeBase& base, const Violation& v, const Entry* rejected = nullptr);

}  // namespace cnldoc
