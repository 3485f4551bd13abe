#pragma once

// A real HTTP service on a loopback port, backed by a file database so it can
// be torn down and brought back mid-test.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "boat/api.hpp"
#include "boat/store.hpp"

namespace boat::testing {

struct Reply {
  int status = 0;
  nlohmann::json body;       // parsed when the response is JSON, null otherwise
  std::string raw;
  std::string content_type;
};

class LiveService {
 public:
  /// Creates a fresh database under the temp directory.
  explicit LiveService(std::string secret = "test-secret");
  ~LiveService();

  Store& store() { return *store_; }
  int port() const { return port_; }

  /// Stops the HTTP server, closes the database, reopens it and serves again
  /// on a new port. Session tokens survive because they live in the store.
  void restart();

  Reply get(const std::string& path, const std::string& token = {}) const;
  Reply post(const std::string& path, const nlohmann::json& body, const std::string& token = {}) const;
  Reply put(const std::string& path, const nlohmann::json& body, const std::string& token = {}) const;
  Reply post_raw(const std::string& path, const std::string& body, const std::string& token = {}) const;

  /// POST /auth/login and return the token, or "" when refused.
  std::string login(const std::string& annotator, const std::string& password) const;

 private:
  void open();
  void close();

  std::string dir_;
  std::string secret_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<ApiService> service_;
  int port_ = 0;
};

/// The seeded treebank every API scenario starts from.
std::string seed_conllu();

/// Imports seed_conllu() as "tb" and registers alice, bob and carol, each
/// with the password "<id>-pw".
void seed(Store& store);

/// Scripted two-session edit of one sentence. Returns one line per step with
/// the HTTP status and the fields that matter; calls `between` after the
/// first successful save (pass a restart to exercise persistence).
std::vector<std::string> status_scenario(LiveService& service, const std::function<void()>& between);

}  // namespace boat::testing
