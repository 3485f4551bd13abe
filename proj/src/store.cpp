#include "boat/store.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <ctime>
#include <unordered_map>

#include "boat/errors.hpp"
#include "boat/validation.hpp"

namespace boat {
namespace {

std::string to_hex(const unsigned char* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0x0f];
  }
  return out;
}

std::optional<std::vector<unsigned char>> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  const auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<unsigned char> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<unsigned char>(hi * 16 + lo);
  }
  return out;
}

std::vector<unsigned char> random_bytes(std::size_t n) {
  std::vector<unsigned char> out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw Error(ErrorCode::StorageError, "secure random generator unavailable");
  }
  return out;
}

std::vector<unsigned char> pbkdf2(std::string_view password, const std::vector<unsigned char>& salt,
                                  int iterations) {
  std::vector<unsigned char> out(32);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iterations, EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(ErrorCode::StorageError, "credential hashing failed");
  }
  return out;
}

std::string token_digest(std::string_view token, std::string_view secret) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
       reinterpret_cast<const unsigned char*>(token.data()), token.size(), digest, &length);
  return to_hex(digest, length);
}

bool valid_slug(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
}

Sentence parse_stored(const std::string& conllu, std::size_t position) {
  return parse_sentence(conllu, 1, std::to_string(position + 1));
}

Treebank to_treebank(const TreebankRow& row) {
  return {row.id, row.name, row.language, row.created_at, row.sentence_count};
}

Annotator to_annotator(const AnnotatorRow& row) {
  return {row.id, row.display_name, row.created_at};
}

}  // namespace

Timestamp now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp ts) {
  const auto ms = ts.time_since_epoch().count();
  const std::time_t seconds = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
  return out;
}

std::string hash_credential(std::string_view password, int iterations) {
  const auto salt = random_bytes(16);
  const auto hash = pbkdf2(password, salt, iterations);
  return "pbkdf2-sha256$" + std::to_string(iterations) + "$" + to_hex(salt.data(), salt.size()) +
         "$" + to_hex(hash.data(), hash.size());
}

bool verify_credential(std::string_view password, std::string_view stored) {
  constexpr std::string_view kPrefix = "pbkdf2-sha256$";
  if (stored.substr(0, kPrefix.size()) != kPrefix) return false;
  stored.remove_prefix(kPrefix.size());
  const auto d1 = stored.find('$');
  const auto d2 = stored.find('$', d1 == std::string_view::npos ? d1 : d1 + 1);
  if (d1 == std::string_view::npos || d2 == std::string_view::npos) return false;
  int iterations = 0;
  try {
    iterations = std::stoi(std::string(stored.substr(0, d1)));
  } catch (...) {
    return false;
  }
  const auto salt = from_hex(stored.substr(d1 + 1, d2 - d1 - 1));
  const auto expected = from_hex(stored.substr(d2 + 1));
  if (!salt || !expected || iterations <= 0 || expected->size() != 32) return false;
  const auto actual = pbkdf2(password, *salt, iterations);
  return CRYPTO_memcmp(actual.data(), expected->data(), actual.size()) == 0;
}

// -------------------------------------------------------------------- Store

Store::Store(std::unique_ptr<StorageBackend> backend) : backend_(std::move(backend)) {
  if (!backend_) throw Error(ErrorCode::InvalidArgument, "store needs a storage backend");
}

TreebankRow Store::require_treebank(std::string_view id) const {
  auto row = backend_->find_treebank(id);
  if (!row) throw Error(ErrorCode::UnknownTreebank, "no treebank '" + std::string(id) + "'");
  return *row;
}

void Store::require_annotator(std::string_view id) const {
  if (!backend_->find_annotator(id)) {
    throw Error(ErrorCode::UnknownAnnotator, "no annotator '" + std::string(id) + "'");
  }
}

Treebank Store::import_treebank(std::string id, std::string name, std::string language,
                                std::string_view conllu_text) {
  if (!valid_slug(id)) {
    throw Error(ErrorCode::InvalidArgument,
                "treebank id '" + id + "' must be a slug of letters, digits, '-', '_' or '.'");
  }
  if (backend_->find_treebank(id)) {
    throw Error(ErrorCode::DuplicateTreebank, "treebank '" + id + "' already exists");
  }
  std::vector<BaseSentenceRow> rows;
  std::unordered_map<std::string, std::size_t> first_line;
  for (auto& [block, line] : split_blocks(conllu_text)) {
    const auto position = rows.size();
    const auto sent = parse_sentence(block, line, std::to_string(position + 1));
    const auto [it, inserted] = first_line.emplace(sent.sent_id, line);
    if (!inserted) {
      throw ParseError(ErrorCode::DuplicateSentId, line,
                       "sent_id '" + sent.sent_id + "' already used at line " +
                           std::to_string(it->second));
    }
    rows.push_back({position, sent.sent_id, sent.text, std::move(block)});
  }
  TreebankRow row{std::move(id), std::move(name), std::move(language), now(), rows.size()};
  backend_->insert_treebank(row, rows);
  return to_treebank(row);
}

std::vector<Treebank> Store::list_treebanks() const {
  std::vector<Treebank> out;
  for (const auto& row : backend_->list_treebanks()) out.push_back(to_treebank(row));
  return out;
}

Treebank Store::treebank(std::string_view id) const { return to_treebank(require_treebank(id)); }

Annotator Store::add_annotator(std::string id, std::string display_name,
                               std::string_view password) {
  if (!valid_slug(id) || id == kBaseLayer) {
    throw Error(ErrorCode::InvalidArgument, "annotator id '" + id + "' is not allowed");
  }
  if (password.empty()) throw Error(ErrorCode::InvalidArgument, "password must not be empty");
  AnnotatorRow row{std::move(id), std::move(display_name), hash_credential(password), now()};
  backend_->insert_annotator(row);
  return to_annotator(row);
}

std::vector<Annotator> Store::annotators() const {
  std::vector<Annotator> out;
  for (const auto& row : backend_->list_annotators()) out.push_back(to_annotator(row));
  return out;
}

Annotator Store::annotator(std::string_view id) const {
  auto row = backend_->find_annotator(id);
  if (!row) throw Error(ErrorCode::UnknownAnnotator, "no annotator '" + std::string(id) + "'");
  return to_annotator(*row);
}

std::optional<Annotator> Store::authenticate(std::string_view id, std::string_view password) const {
  auto row = backend_->find_annotator(id);
  if (!row || !verify_credential(password, row->credential_hash)) return std::nullopt;
  return to_annotator(*row);
}

AnnotationRecord Store::get_annotation(std::string_view treebank_id, std::string_view sent_id,
                                       std::string_view annotator_id) const {
  require_treebank(treebank_id);
  const auto base = backend_->base_sentence(treebank_id, sent_id);
  if (!base) {
    throw Error(ErrorCode::NotFound, "no sentence '" + std::string(sent_id) + "' in treebank '" +
                                         std::string(treebank_id) + "'");
  }
  AnnotationRecord record;
  record.treebank_id = std::string(treebank_id);
  record.sent_id = std::string(sent_id);
  record.annotator_id = std::string(annotator_id);
  if (annotator_id != kBaseLayer) {
    require_annotator(annotator_id);
    if (auto row = backend_->find_record(treebank_id, sent_id, annotator_id)) {
      record.sentence = parse_stored(row->conllu, base->position);
      record.status = row->status;
      record.note = std::move(row->note);
      record.revision = row->revision;
      record.updated_at = row->updated_at;
      return record;
    }
  }
  record.sentence = parse_stored(base->conllu, base->position);
  return record;
}

AnnotationRecord Store::put_annotation(std::string_view treebank_id, std::string_view sent_id,
                                       std::string_view annotator_id, Sentence sentence,
                                       Status status, std::string note,
                                       std::int64_t expected_revision) {
  require_treebank(treebank_id);
  if (!backend_->base_sentence(treebank_id, sent_id)) {
    throw Error(ErrorCode::NotFound, "no sentence '" + std::string(sent_id) + "' in treebank '" +
                                         std::string(treebank_id) + "'");
  }
  if (annotator_id == kBaseLayer) {
    throw Error(ErrorCode::Forbidden, "the base layer of a treebank is read-only");
  }
  require_annotator(annotator_id);
  if (status == Status::New) {
    throw Error(ErrorCode::InvalidStatus, "a saved annotation must be Draft or Complete");
  }
  if (expected_revision < 0) {
    throw Error(ErrorCode::InvalidArgument, "expected_revision must be non-negative");
  }
  check_sentence(sentence);
  if (sentence.sent_id != sent_id) {
    throw Error(ErrorCode::InvalidSentence, "sentence carries sent_id '" + sentence.sent_id +
                                                "' but is saved as '" + std::string(sent_id) + "'");
  }
  if (status == Status::Complete) {
    auto blocking = blocking_issues(validate_sentence(sentence));
    if (!blocking.empty()) throw CompleteWithErrors(std::move(blocking));
  }

  RecordRow row;
  row.treebank_id = std::string(treebank_id);
  row.sent_id = std::string(sent_id);
  row.annotator_id = std::string(annotator_id);
  row.conllu = serialize_sentence(sentence);
  row.status = status;
  row.note = std::move(note);
  row.revision = expected_revision + 1;
  row.updated_at = now();
  row.token_count = sentence.size();
  if (const auto current = backend_->compare_and_put(row, expected_revision)) {
    throw RevisionConflict(expected_revision, *current);
  }
  return {row.treebank_id, row.sent_id,   row.annotator_id, std::move(sentence),
          row.status,      row.note,      row.revision,     row.updated_at};
}

SentencePage Store::list_sentences(std::string_view treebank_id, std::string_view annotator_id,
                                   const std::optional<std::set<Status>>& status_filter,
                                   std::size_t page, std::size_t page_size) const {
  require_treebank(treebank_id);
  if (page == 0) throw Error(ErrorCode::InvalidArgument, "pages are numbered from 1");
  if (page_size == 0) page_size = kDefaultPageSize;
  page_size = std::min(page_size, kMaxPageSize);

  std::unordered_map<std::string, RecordRow> saved;
  if (annotator_id != kBaseLayer) {
    require_annotator(annotator_id);
    for (auto& row : backend_->records(treebank_id, annotator_id)) {
      saved.emplace(row.sent_id, std::move(row));
    }
  }
  std::vector<SentenceSummary> matching;
  for (auto& base : backend_->base_sentences(treebank_id)) {
    SentenceSummary summary{base.sent_id, base.text, Status::New, 0, std::nullopt};
    if (const auto it = saved.find(base.sent_id); it != saved.end()) {
      summary.status = it->second.status;
      summary.revision = it->second.revision;
      summary.updated_at = it->second.updated_at;
      summary.text = parse_stored(it->second.conllu, base.position).text;
    }
    if (status_filter && !status_filter->contains(summary.status)) continue;
    matching.push_back(std::move(summary));
  }

  SentencePage out;
  out.total = matching.size();
  out.page = page;
  out.page_size = page_size;
  const auto begin = std::min(matching.size(), (page - 1) * page_size);
  const auto end = std::min(matching.size(), begin + page_size);
  out.items.assign(std::make_move_iterator(matching.begin() + static_cast<std::ptrdiff_t>(begin)),
                   std::make_move_iterator(matching.begin() + static_cast<std::ptrdiff_t>(end)));
  return out;
}

std::string Store::export_treebank(std::string_view treebank_id,
                                   std::string_view annotator_id) const {
  require_treebank(treebank_id);
  std::unordered_map<std::string, std::string> saved;
  if (annotator_id != kBaseLayer) {
    require_annotator(annotator_id);
    for (auto& row : backend_->records(treebank_id, annotator_id)) {
      saved.emplace(row.sent_id, std::move(row.conllu));
    }
  }
  std::string out;
  for (const auto& base : backend_->base_sentences(treebank_id)) {
    const auto it = saved.find(base.sent_id);
    out += it == saved.end() ? base.conllu : it->second;
  }
  return out;
}

std::vector<IndexedSentence> Store::layer(std::string_view treebank_id,
                                          std::string_view annotator_id) const {
  require_treebank(treebank_id);
  std::unordered_map<std::string, RecordRow> saved;
  if (annotator_id != kBaseLayer) {
    require_annotator(annotator_id);
    for (auto& row : backend_->records(treebank_id, annotator_id)) {
      saved.emplace(row.sent_id, std::move(row));
    }
  }
  std::vector<IndexedSentence> out;
  for (const auto& base : backend_->base_sentences(treebank_id)) {
    const auto it = saved.find(base.sent_id);
    if (it == saved.end()) {
      out.push_back({parse_stored(base.conllu, base.position), Status::New});
    } else {
      out.push_back({parse_stored(it->second.conllu, base.position), it->second.status});
    }
  }
  return out;
}

std::string Store::create_session(std::string_view annotator_id, std::chrono::seconds ttl,
                                  std::string_view secret) {
  require_annotator(annotator_id);
  const auto bytes = random_bytes(32);
  auto token = to_hex(bytes.data(), bytes.size());
  backend_->put_session({token_digest(token, secret), std::string(annotator_id),
                         now() + std::chrono::duration_cast<std::chrono::milliseconds>(ttl)});
  return token;
}

std::optional<std::string> Store::resolve_session(std::string_view token,
                                                  std::string_view secret) const {
  if (token.empty()) return std::nullopt;
  const auto session = backend_->find_session(token_digest(token, secret));
  if (!session || session->expires_at <= now()) return std::nullopt;
  if (!backend_->find_annotator(session->annotator_id)) return std::nullopt;
  return session->annotator_id;
}

void Store::revoke_session(std::string_view token, std::string_view secret) {
  backend_->delete_session(token_digest(token, secret));
}

std::vector<Match> search(const Store& store, const SearchQuery& query) {
  return build_index(store.layer(query.treebank_id, query.annotator)).execute(query);
}

}  // namespace boat
