#include <sqlite3.h>

#include <mutex>

#include "boat/errors.hpp"
#include "boat/store.hpp"

namespace boat {
namespace {

constexpr const char* kSchema = R"sql(
PRAGMA foreign_keys = ON;
CREATE TABLE IF NOT EXISTS treebanks (
  id TEXT PRIMARY KEY,
  name TEXT NOT NULL,
  language TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  sentence_count INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS base_sentences (
  treebank_id TEXT NOT NULL REFERENCES treebanks(id),
  position INTEGER NOT NULL,
  sent_id TEXT NOT NULL,
  text TEXT NOT NULL,
  conllu TEXT NOT NULL,
  PRIMARY KEY (treebank_id, position),
  UNIQUE (treebank_id, sent_id)
);
CREATE TABLE IF NOT EXISTS annotators (
  id TEXT PRIMARY KEY,
  display_name TEXT NOT NULL,
  credential_hash TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS annotations (
  treebank_id TEXT NOT NULL REFERENCES treebanks(id),
  sent_id TEXT NOT NULL,
  annotator_id TEXT NOT NULL REFERENCES annotators(id),
  conllu TEXT NOT NULL,
  status TEXT NOT NULL,
  note TEXT NOT NULL,
  revision INTEGER NOT NULL,
  updated_at INTEGER NOT NULL,
  token_count INTEGER NOT NULL,
  PRIMARY KEY (treebank_id, sent_id, annotator_id)
);
CREATE INDEX IF NOT EXISTS annotations_by_layer ON annotations (treebank_id, annotator_id);
CREATE TABLE IF NOT EXISTS sessions (
  token_digest TEXT PRIMARY KEY,
  annotator_id TEXT NOT NULL REFERENCES annotators(id),
  expires_at INTEGER NOT NULL
);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::StorageError, what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

std::int64_t to_millis(Timestamp ts) { return ts.time_since_epoch().count(); }
Timestamp from_millis(std::int64_t ms) { return Timestamp(std::chrono::milliseconds(ms)); }

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::string_view text) {
    if (sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()),
                          SQLITE_TRANSIENT) != SQLITE_OK) {
      fail(db_, "bind");
    }
    return *this;
  }
  Statement& bind(int index, std::int64_t value) {
    if (sqlite3_bind_int64(stmt_, index, value) != SQLITE_OK) fail(db_, "bind");
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step");
  }
  /// Runs a statement without result rows; returns the sqlite result code.
  int run() { return sqlite3_step(stmt_); }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
             : std::string();
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) { exec("BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec("COMMIT");
    done_ = true;
  }

 private:
  void exec(const char* sql) {
    if (sqlite3_exec(db_, sql, nullptr, nullptr, nullptr) != SQLITE_OK) fail(db_, sql);
  }
  sqlite3* db_;
  bool done_ = false;
};

RecordRow read_record(const Statement& s) {
  RecordRow r;
  r.treebank_id = s.text(0);
  r.sent_id = s.text(1);
  r.annotator_id = s.text(2);
  r.conllu = s.text(3);
  r.status = parse_status(s.text(4)).value_or(Status::Draft);
  r.note = s.text(5);
  r.revision = s.integer(6);
  r.updated_at = from_millis(s.integer(7));
  r.token_count = static_cast<std::size_t>(s.integer(8));
  return r;
}

constexpr const char* kRecordColumns =
    "treebank_id, sent_id, annotator_id, conllu, status, note, revision, updated_at, token_count";

class SqliteBackend final : public StorageBackend {
 public:
  explicit SqliteBackend(const std::string& path) {
    const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
      std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(ErrorCode::StorageError, "cannot open database '" + path + "': " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    if (path != ":memory:") {
      sqlite3_exec(db_, "PRAGMA journal_mode = WAL; PRAGMA synchronous = NORMAL;", nullptr,
                   nullptr, nullptr);
    }
    char* err = nullptr;
    if (sqlite3_exec(db_, kSchema, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string message = err ? err : "unknown error";
      sqlite3_free(err);
      sqlite3_close(db_);
      throw Error(ErrorCode::StorageError, "cannot create schema: " + message);
    }
  }

  ~SqliteBackend() override { sqlite3_close(db_); }

  void insert_treebank(const TreebankRow& tb,
                       const std::vector<BaseSentenceRow>& sentences) override {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    {
      Statement exists(db_, "SELECT 1 FROM treebanks WHERE id = ?");
      exists.bind(1, tb.id);
      if (exists.step()) {
        throw Error(ErrorCode::DuplicateTreebank, "treebank '" + tb.id + "' already exists");
      }
    }
    Statement insert(db_,
                     "INSERT INTO treebanks (id, name, language, created_at, sentence_count) "
                     "VALUES (?, ?, ?, ?, ?)");
    insert.bind(1, tb.id).bind(2, tb.name).bind(3, tb.language);
    insert.bind(4, to_millis(tb.created_at));
    insert.bind(5, static_cast<std::int64_t>(sentences.size()));
    if (insert.run() != SQLITE_DONE) fail(db_, "insert treebank");
    for (const auto& s : sentences) {
      Statement row(db_,
                    "INSERT INTO base_sentences (treebank_id, position, sent_id, text, conllu) "
                    "VALUES (?, ?, ?, ?, ?)");
      row.bind(1, tb.id).bind(2, static_cast<std::int64_t>(s.position));
      row.bind(3, s.sent_id).bind(4, s.text).bind(5, s.conllu);
      if (row.run() != SQLITE_DONE) fail(db_, "insert sentence '" + s.sent_id + "'");
    }
    tx.commit();
  }

  std::optional<TreebankRow> find_treebank(std::string_view id) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT id, name, language, created_at, sentence_count FROM treebanks WHERE id = ?");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return read_treebank(s);
  }

  std::vector<TreebankRow> list_treebanks() override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT id, name, language, created_at, sentence_count FROM treebanks ORDER BY id");
    std::vector<TreebankRow> out;
    while (s.step()) out.push_back(read_treebank(s));
    return out;
  }

  std::vector<BaseSentenceRow> base_sentences(std::string_view treebank_id) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT position, sent_id, text, conllu FROM base_sentences "
                "WHERE treebank_id = ? ORDER BY position");
    s.bind(1, treebank_id);
    std::vector<BaseSentenceRow> out;
    while (s.step()) out.push_back(read_base(s));
    return out;
  }

  std::optional<BaseSentenceRow> base_sentence(std::string_view treebank_id,
                                               std::string_view sent_id) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT position, sent_id, text, conllu FROM base_sentences "
                "WHERE treebank_id = ? AND sent_id = ?");
    s.bind(1, treebank_id).bind(2, sent_id);
    if (!s.step()) return std::nullopt;
    return read_base(s);
  }

  void insert_annotator(const AnnotatorRow& a) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "INSERT INTO annotators (id, display_name, credential_hash, created_at) "
                "VALUES (?, ?, ?, ?)");
    s.bind(1, a.id).bind(2, a.display_name).bind(3, a.credential_hash);
    s.bind(4, to_millis(a.created_at));
    const int rc = s.run();
    if (rc == SQLITE_CONSTRAINT) {
      throw Error(ErrorCode::DuplicateAnnotator, "annotator '" + a.id + "' already exists");
    }
    if (rc != SQLITE_DONE) fail(db_, "insert annotator");
  }

  std::optional<AnnotatorRow> find_annotator(std::string_view id) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT id, display_name, credential_hash, created_at FROM annotators WHERE id = ?");
    s.bind(1, id);
    if (!s.step()) return std::nullopt;
    return read_annotator(s);
  }

  std::vector<AnnotatorRow> list_annotators() override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT id, display_name, credential_hash, created_at FROM annotators ORDER BY id");
    std::vector<AnnotatorRow> out;
    while (s.step()) out.push_back(read_annotator(s));
    return out;
  }

  std::optional<RecordRow> find_record(std::string_view treebank_id, std::string_view sent_id,
                                       std::string_view annotator_id) override {
    std::lock_guard lock(mutex_);
    const std::string sql = std::string("SELECT ") + kRecordColumns +
                            " FROM annotations WHERE treebank_id = ? AND sent_id = ? AND "
                            "annotator_id = ?";
    Statement s(db_, sql.c_str());
    s.bind(1, treebank_id).bind(2, sent_id).bind(3, annotator_id);
    if (!s.step()) return std::nullopt;
    return read_record(s);
  }

  std::vector<RecordRow> records(std::string_view treebank_id,
                                 std::string_view annotator_id) override {
    std::lock_guard lock(mutex_);
    const std::string sql = std::string("SELECT ") + kRecordColumns +
                            " FROM annotations WHERE treebank_id = ? AND annotator_id = ?";
    Statement s(db_, sql.c_str());
    s.bind(1, treebank_id).bind(2, annotator_id);
    std::vector<RecordRow> out;
    while (s.step()) out.push_back(read_record(s));
    return out;
  }

  std::optional<std::int64_t> compare_and_put(const RecordRow& r,
                                              std::int64_t expected_revision) override {
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    std::int64_t current = 0;
    {
      Statement s(db_,
                  "SELECT revision FROM annotations WHERE treebank_id = ? AND sent_id = ? AND "
                  "annotator_id = ?");
      s.bind(1, r.treebank_id).bind(2, r.sent_id).bind(3, r.annotator_id);
      if (s.step()) current = s.integer(0);
    }
    if (current != expected_revision) return current;
    const std::string sql = std::string("INSERT OR REPLACE INTO annotations (") + kRecordColumns +
                            ") VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)";
    Statement s(db_, sql.c_str());
    s.bind(1, r.treebank_id).bind(2, r.sent_id).bind(3, r.annotator_id).bind(4, r.conllu);
    s.bind(5, status_name(r.status)).bind(6, r.note).bind(7, r.revision);
    s.bind(8, to_millis(r.updated_at)).bind(9, static_cast<std::int64_t>(r.token_count));
    if (s.run() != SQLITE_DONE) fail(db_, "write annotation");
    tx.commit();
    return std::nullopt;
  }

  void put_session(const SessionRow& session) override {
    std::lock_guard lock(mutex_);
    {
      Statement purge(db_, "DELETE FROM sessions WHERE expires_at < ?");
      purge.bind(1, to_millis(now()));
      purge.run();
    }
    Statement s(db_,
                "INSERT OR REPLACE INTO sessions (token_digest, annotator_id, expires_at) "
                "VALUES (?, ?, ?)");
    s.bind(1, session.token_digest).bind(2, session.annotator_id);
    s.bind(3, to_millis(session.expires_at));
    if (s.run() != SQLITE_DONE) fail(db_, "write session");
  }

  std::optional<SessionRow> find_session(std::string_view token_digest) override {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT token_digest, annotator_id, expires_at FROM sessions WHERE token_digest = ?");
    s.bind(1, token_digest);
    if (!s.step()) return std::nullopt;
    return SessionRow{s.text(0), s.text(1), from_millis(s.integer(2))};
  }

  void delete_session(std::string_view token_digest) override {
    std::lock_guard lock(mutex_);
    Statement s(db_, "DELETE FROM sessions WHERE token_digest = ?");
    s.bind(1, token_digest);
    s.run();
  }

 private:
  static TreebankRow read_treebank(const Statement& s) {
    return {s.text(0), s.text(1), s.text(2), from_millis(s.integer(3)),
            static_cast<std::size_t>(s.integer(4))};
  }
  static BaseSentenceRow read_base(const Statement& s) {
    return {static_cast<std::size_t>(s.integer(0)), s.text(1), s.text(2), s.text(3)};
  }
  static AnnotatorRow read_annotator(const Statement& s) {
    return {s.text(0), s.text(1), s.text(2), from_millis(s.integer(3))};
  }

  sqlite3* db_ = nullptr;
  std::mutex mutex_;
};

}  // namespace

std::unique_ptr<StorageBackend> open_sqlite_backend(const std::string& path) {
  return std::make_unique<SqliteBackend>(path);
}

std::unique_ptr<StorageBackend> open_backend(std::string_view url) {
  constexpr std::string_view kScheme = "sqlite://";
  if (url == "sqlite::memory:" || url == ":memory:") return open_sqlite_backend(":memory:");
  if (url.substr(0, kScheme.size()) == kScheme) {
    return open_sqlite_backend(std::string(url.substr(kScheme.size())));
  }
  if (url.find("://") != std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "unsupported database URL '" + std::string(url) + "' (expected sqlite://PATH)");
  }
  if (url.empty()) throw Error(ErrorCode::InvalidArgument, "empty database URL");
  return open_sqlite_backend(std::string(url));
}

}  // namespace boat
