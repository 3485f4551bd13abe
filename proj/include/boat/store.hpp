#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "boat/conllu.hpp"
#include "boat/search.hpp"
#include "boat/status.hpp"

namespace boat {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now();
std::string format_timestamp(Timestamp ts);

/// Pseudo-annotator naming the imported, read-only layer of a treebank.
inline constexpr std::string_view kBaseLayer = "base";

// ------------------------------------------------------------ storage rows

struct TreebankRow {
  std::string id;
  std::string name;
  std::string language;
  Timestamp created_at{};
  std::size_t sentence_count = 0;
};

struct BaseSentenceRow {
  std::size_t position = 0;
  std::string sent_id;
  std::string text;
  /// LF-normalized source block, terminated by its blank line.
  std::string conllu;
};

struct AnnotatorRow {
  std::string id;
  std::string display_name;
  std::string credential_hash;
  Timestamp created_at{};
};

struct RecordRow {
  std::string treebank_id;
  std::string sent_id;
  std::string annotator_id;
  std::string conllu;
  Status status = Status::New;
  std::string note;
  std::int64_t revision = 0;
  Timestamp updated_at{};
  std::size_t token_count = 0;
};

struct SessionRow {
  std::string token_digest;
  std::string annotator_id;
  Timestamp expires_at{};
};

/// Persistence interface of the store. Implementations must make every
/// method atomic; compare_and_put is the only write path for records.
class StorageBackend {
 public:
  virtual ~StorageBackend() = default;

  /// Throws DuplicateTreebank when the id is taken.
  virtual void insert_treebank(const TreebankRow& treebank,
                               const std::vector<BaseSentenceRow>& sentences) = 0;
  virtual std::optional<TreebankRow> find_treebank(std::string_view id) = 0;
  virtual std::vector<TreebankRow> list_treebanks() = 0;
  virtual std::vector<BaseSentenceRow> base_sentences(std::string_view treebank_id) = 0;
  virtual std::optional<BaseSentenceRow> base_sentence(std::string_view treebank_id,
                                                       std::string_view sent_id) = 0;

  /// Throws DuplicateAnnotator when the id is taken.
  virtual void insert_annotator(const AnnotatorRow& annotator) = 0;
  virtual std::optional<AnnotatorRow> find_annotator(std::string_view id) = 0;
  virtual std::vector<AnnotatorRow> list_annotators() = 0;

  virtual std::optional<RecordRow> find_record(std::string_view treebank_id,
                                               std::string_view sent_id,
                                               std::string_view annotator_id) = 0;
  /// Saved records of one annotator (any order).
  virtual std::vector<RecordRow> records(std::string_view treebank_id,
                                         std::string_view annotator_id) = 0;
  /// Writes `record` if the stored revision (0 when absent) equals
  /// `expected_revision`; returns the stored revision otherwise.
  virtual std::optional<std::int64_t> compare_and_put(const RecordRow& record,
                                                      std::int64_t expected_revision) = 0;

  virtual void put_session(const SessionRow& session) = 0;
  virtual std::optional<SessionRow> find_session(std::string_view token_digest) = 0;
  virtual void delete_session(std::string_view token_digest) = 0;
};

/// SQLite implementation. `path` may be ":memory:".
std::unique_ptr<StorageBackend> open_sqlite_backend(const std::string& path);

/// Resolves a BOAT_DB_URL value: "sqlite:///abs/path", "sqlite://rel/path",
/// "sqlite::memory:", ":memory:" or a plain file path.
std::unique_ptr<StorageBackend> open_backend(std::string_view url);

// ----------------------------------------------------------------- domain

struct Treebank {
  std::string id;
  std::string name;
  std::string language;
  Timestamp created_at{};
  std::size_t sentence_count = 0;
};

struct Annotator {
  std::string id;
  std::string display_name;
  Timestamp created_at{};
};

struct AnnotationRecord {
  std::string treebank_id;
  std::string sent_id;
  std::string annotator_id;
  Sentence sentence;
  Status status = Status::New;
  std::string note;
  std::int64_t revision = 0;
  std::optional<Timestamp> updated_at;  // nullopt while New
};

struct SentenceSummary {
  std::string sent_id;
  std::string text;
  Status status = Status::New;
  std::int64_t revision = 0;
  std::optional<Timestamp> updated_at;
};

struct SentencePage {
  std::vector<SentenceSummary> items;
  std::size_t total = 0;
  std::size_t page = 1;
  std::size_t page_size = 50;
};

inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 500;

/// Salted, iterated credential hash (PBKDF2-HMAC-SHA256).
std::string hash_credential(std::string_view password, int iterations = 100000);
bool verify_credential(std::string_view password, std::string_view stored_hash);

/// Multi-treebank, multi-annotator annotation store.
///
/// Annotator layers are copy-on-first-write: an annotator that never saved
/// a sentence sees the imported base version with status New. Writes use
/// optimistic concurrency on a per-record revision counter.
class Store {
 public:
  explicit Store(std::unique_ptr<StorageBackend> backend);

  static Store open(std::string_view url) { return Store(open_backend(url)); }

  Treebank import_treebank(std::string id, std::string name, std::string language,
                           std::string_view conllu_text);
  std::vector<Treebank> list_treebanks() const;
  Treebank treebank(std::string_view id) const;

  Annotator add_annotator(std::string id, std::string display_name, std::string_view password);
  std::vector<Annotator> annotators() const;
  /// Throws UnknownAnnotator.
  Annotator annotator(std::string_view id) const;
  /// nullopt when the id is unknown or the password does not match.
  std::optional<Annotator> authenticate(std::string_view id, std::string_view password) const;

  AnnotationRecord get_annotation(std::string_view treebank_id, std::string_view sent_id,
                                  std::string_view annotator_id) const;

  /// Saves a Draft or Complete version. Throws RevisionConflict when
  /// `expected_revision` is stale and CompleteWithErrors when a Complete
  /// sentence has error-severity validation issues.
  AnnotationRecord put_annotation(std::string_view treebank_id, std::string_view sent_id,
                                  std::string_view annotator_id, Sentence sentence,
                                  Status status, std::string note,
                                  std::int64_t expected_revision);

  /// Summaries in document order. `page` is 1-based.
  SentencePage list_sentences(std::string_view treebank_id, std::string_view annotator_id,
                              const std::optional<std::set<Status>>& status_filter,
                              std::size_t page, std::size_t page_size = kDefaultPageSize) const;

  std::string export_treebank(std::string_view treebank_id, std::string_view annotator_id) const;

  /// Every sentence of the annotator's layer in document order.
  std::vector<IndexedSentence> layer(std::string_view treebank_id,
                                     std::string_view annotator_id) const;

  /// Issues a session token (256 random bits, hex) for an annotator.
  std::string create_session(std::string_view annotator_id, std::chrono::seconds ttl,
                             std::string_view secret = {});
  /// Annotator id for a live token, nullopt for unknown or expired tokens.
  std::optional<std::string> resolve_session(std::string_view token,
                                             std::string_view secret = {}) const;
  void revoke_session(std::string_view token, std::string_view secret = {});

  StorageBackend& backend() const noexcept { return *backend_; }

 private:
  TreebankRow require_treebank(std::string_view id) const;
  void require_annotator(std::string_view id) const;

  std::unique_ptr<StorageBackend> backend_;
};

/// Runs a query against the requested layer of a treebank.
std::vector<Match> search(const Store& store, const SearchQuery& query);

}  // namespace boat
