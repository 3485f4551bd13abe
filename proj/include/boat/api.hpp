#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "boat/errors.hpp"
#include "boat/store.hpp"

namespace boat {

/// Autocomplete lists for the annotation table.
struct VocabularyBundle {
  std::vector<std::string> upos;
  /// Universal relations plus every subtyped relation seen in the treebank.
  std::vector<std::string> deprel;
  /// Universal feature inventory merged with the values the treebank uses.
  std::map<std::string, std::vector<std::string>> feats;
};

/// Universal morphological features and their documented values.
const std::map<std::string, std::vector<std::string>>& universal_features();

VocabularyBundle vocabulary(const Store& store, std::string_view treebank_id);

/// HTTP status for an error code. Every code maps to exactly one status.
int http_status(ErrorCode code);

struct ApiConfig {
  /// Keys session token digests; sessions stay valid across restarts only
  /// when the secret does.
  std::string secret;
  std::chrono::seconds session_ttl{std::chrono::hours(12)};
};

/// The HTTP service. Routes (all but POST /auth/login need a
/// "Authorization: Bearer <token>" header):
///
///   POST /auth/login                          {annotator_id, password}
///   POST /auth/logout
///   GET  /treebanks
///   POST /treebanks                           {id, name, language, conllu}
///   GET  /treebanks/{id}/sentences            ?status=&page=&page_size=&annotator=
///   GET  /treebanks/{id}/sentences/{sid}      ?annotator=
///   PUT  /treebanks/{id}/sentences/{sid}      {sentence | conllu, status, note, expected_revision}
///   GET  /treebanks/{id}/sentences/{sid}/layout  ?mode=&annotator=
///   POST /treebanks/{id}/sentences/{sid}/split   {token_id, parts, expected_revision}
///   POST /treebanks/{id}/sentences/{sid}/join    {first_id, last_id, form, expected_revision}
///   GET  /treebanks/{id}/search               ?q=&page=&page_size=&annotator=&status=
///   GET  /treebanks/{id}/agreement            ?a=&b=&fields=
///   GET  /treebanks/{id}/agreement-matrix     ?fields=
///   GET  /treebanks/{id}/export               ?annotator=
///   GET  /treebanks/{id}/vocabulary
///
/// Failures answer with {code, message, details}.
class ApiService {
 public:
  ApiService(Store& store, ApiConfig config);
  ~ApiService();
  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the
  /// bound port. Throws InvalidArgument when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves requests until stop(); requires a prior bind().
  void run();
  /// Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace boat
