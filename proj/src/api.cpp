#include "boat/api.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <set>
#include <shared_mutex>
#include <thread>

#include "boat/agreement.hpp"
#include "boat/json_io.hpp"
#include "boat/layout.hpp"
#include "boat/search.hpp"
#include "boat/validation.hpp"

namespace boat {

const std::map<std::string, std::vector<std::string>>& universal_features() {
  static const std::map<std::string, std::vector<std::string>> features = {
      {"Abbr", {"Yes"}},
      {"Animacy", {"Anim", "Hum", "Inan", "Nhum"}},
      {"Aspect", {"Hab", "Imp", "Iter", "Perf", "Prog", "Prosp"}},
      {"Case", {"Abe", "Abl", "Abs", "Acc", "Add", "Ade", "All", "Ben", "Cau", "Cmp", "Cns", "Com",
                "Dat", "Del", "Dis", "Ela", "Equ", "Erg", "Ess", "Gen", "Ill", "Ine", "Ins", "Lat",
                "Loc", "Nom", "Par", "Per", "Sbe", "Sbl", "Spl", "Sub", "Sup", "Tem", "Ter", "Tra",
                "Voc"}},
      {"Clusivity", {"Ex", "In"}},
      {"Definite", {"Com", "Cons", "Def", "Ind", "Spec"}},
      {"Degree", {"Abs", "Aug", "Cmp", "Dim", "Equ", "Pos", "Sup"}},
      {"Deixis", {"Abv", "Bel", "Even", "Med", "Nvis", "Prox", "Remt"}},
      {"DeixisRef", {"1", "2"}},
      {"Evident", {"Fh", "Nfh"}},
      {"ExtPos", {"ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "PRON", "PROPN", "SCONJ"}},
      {"Foreign", {"Yes"}},
      {"Gender", {"Com", "Fem", "Masc", "Neut"}},
      {"Mood", {"Adm", "Cnd", "Des", "Imp", "Ind", "Int", "Irr", "Jus", "Nec", "Opt", "Pot", "Prp",
                "Qot", "Sub"}},
      {"NumType", {"Card", "Dist", "Frac", "Mult", "Ord", "Range", "Sets"}},
      {"Number", {"Coll", "Count", "Dual", "Grpa", "Grpl", "Inv", "Pauc", "Plur", "Ptan", "Sing",
                  "Tri"}},
      {"Person", {"0", "1", "2", "3", "4"}},
      {"Polarity", {"Neg", "Pos"}},
      {"Polite", {"Elev", "Form", "Humb", "Infm"}},
      {"Poss", {"Yes"}},
      {"PronType", {"Art", "Dem", "Emp", "Exc", "Ind", "Int", "Neg", "Prs", "Rcp", "Rel", "Tot"}},
      {"Reflex", {"Yes"}},
      {"Tense", {"Fut", "Imp", "Past", "Pqp", "Pres"}},
      {"Typo", {"Yes"}},
      {"VerbForm", {"Conv", "Fin", "Gdv", "Ger", "Inf", "Part", "Sup", "Vnoun"}},
      {"Voice", {"Act", "Antip", "Bfoc", "Cau", "Dir", "Inv", "Lfoc", "Mid", "Pass", "Rcp"}},
  };
  return features;
}

VocabularyBundle vocabulary(const Store& store, std::string_view treebank_id) {
  store.treebank(treebank_id);
  std::set<std::string> deprels;
  std::map<std::string, std::set<std::string>> feats;
  for (auto rel : universal_deprels()) deprels.emplace(rel);
  for (const auto& [name, values] : universal_features()) feats[name].insert(values.begin(), values.end());

  const auto observe = [&](const Sentence& sent) {
    for (const auto& t : sent.tokens) {
      if (t.deprel && t.deprel->find(':') != std::string::npos) deprels.insert(*t.deprel);
      for (const auto& [name, value] : t.feats.entries()) {
        std::size_t start = 0;
        // Multi-valued features ("Case=Acc,Dat") contribute each value.
        while (start <= value.size()) {
          const auto comma = std::min(value.find(',', start), value.size());
          if (comma > start) feats[name].insert(value.substr(start, comma - start));
          start = comma + 1;
        }
      }
    }
  };
  for (const auto& indexed : store.layer(treebank_id, kBaseLayer)) observe(indexed.sentence);
  for (const auto& annotator : store.annotators()) {
    for (const auto& row : store.backend().records(treebank_id, annotator.id)) {
      observe(parse_sentence(row.conllu, 1, row.sent_id));
    }
  }

  VocabularyBundle bundle;
  for (auto tag : universal_upos()) bundle.upos.emplace_back(tag);
  bundle.deprel.assign(deprels.begin(), deprels.end());
  for (auto& [name, values] : feats) bundle.feats[name].assign(values.begin(), values.end());
  return bundle;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidStatus:
    case ErrorCode::QuerySyntaxError:
    case ErrorCode::BadRegex:
      return 400;
    case ErrorCode::Unauthorized:
      return 401;
    case ErrorCode::Forbidden:
      return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownTreebank:
    case ErrorCode::UnknownAnnotator:
      return 404;
    case ErrorCode::DuplicateTreebank:
    case ErrorCode::DuplicateAnnotator:
    case ErrorCode::RevisionConflict:
      return 409;
    case ErrorCode::MalformedLine:
    case ErrorCode::NonContiguousIds:
    case ErrorCode::DuplicateSentId:
    case ErrorCode::MalformedFeature:
    case ErrorCode::InvalidSentence:
    case ErrorCode::TokenNotFound:
    case ErrorCode::AlreadySplit:
    case ErrorCode::TooFewParts:
    case ErrorCode::InvalidRange:
    case ErrorCode::DanglingHeads:
    case ErrorCode::CompleteWithErrors:
    case ErrorCode::NoComparableSentences:
    case ErrorCode::CyclicGraph:
      return 422;
    case ErrorCode::StorageError:
      return 500;
  }
  return 500;
}

namespace {

using httplib::Request;
using httplib::Response;

constexpr const char* kJson = "application/json";

void send_json(Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(Response& res, const Error& error) {
  send_json(res, error_envelope(error), http_status(error.code()));
}

Error bad_request(const std::string& message) { return Error(ErrorCode::BadRequest, message); }

json body_of(const Request& req) {
  if (req.body.empty()) throw bad_request("request body is empty");
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw bad_request("request body is not a JSON object");
  return body;
}

std::optional<std::string> param(const Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto value = req.get_param_value(name);
  if (value.empty()) return std::nullopt;
  return value;
}

std::size_t size_param(const Request& req, const char* name, std::size_t fallback) {
  const auto text = param(req, name);
  if (!text) return fallback;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc() || ptr != text->data() + text->size()) {
    throw bad_request(std::string("parameter '") + name + "' must be a non-negative integer");
  }
  return value;
}

std::vector<std::string> comma_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    if (comma > start) out.emplace_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::optional<std::set<Status>> status_param(const Request& req) {
  const auto text = param(req, "status");
  if (!text) return std::nullopt;
  std::set<Status> statuses;
  for (const auto& name : comma_list(*text)) {
    const auto status = parse_status(name);
    if (!status) throw Error(ErrorCode::InvalidStatus, "unknown status '" + name + "'");
    statuses.insert(*status);
  }
  return statuses;
}

std::vector<AgreementField> fields_param(const Request& req) {
  const auto text = param(req, "fields");
  if (!text) return all_agreement_fields();
  std::vector<AgreementField> fields;
  for (const auto& name : comma_list(*text)) {
    const auto field = parse_agreement_field(name);
    if (!field) throw bad_request("unknown agreement field '" + name + "'");
    if (std::find(fields.begin(), fields.end(), *field) == fields.end()) fields.push_back(*field);
  }
  if (fields.empty()) throw bad_request("no agreement field requested");
  return fields;
}

template <typename T>
T required(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) throw bad_request(std::string("missing field '") + key + "'");
  return it->get<T>();
}

std::int64_t revision_or(const json& body, std::int64_t fallback) {
  const auto it = body.find("expected_revision");
  if (it == body.end() || it->is_null()) return fallback;
  return it->get<std::int64_t>();
}

}  // namespace

struct ApiService::Impl {
  using Caller = std::string;
  using Handler = std::function<void(const Request&, Response&, const Caller&)>;

  Impl(Store& s, ApiConfig c) : store(s), config(std::move(c)) { routes(); }

  Store& store;
  ApiConfig config;
  httplib::Server server;
  std::thread worker;
  bool bound = false;

  // Search indexes per (treebank, layer). `versions` counts saves so that an
  // index built from a snapshot older than a concurrent save is discarded.
  using LayerKey = std::pair<std::string, std::string>;
  std::shared_mutex cache_mutex;
  std::map<LayerKey, std::shared_ptr<SearchIndex>> indexes;
  std::map<LayerKey, std::uint64_t> versions;

  std::string authenticate(const Request& req) {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.size() <= kBearer.size() || header.compare(0, kBearer.size(), kBearer) != 0) {
      throw Error(ErrorCode::Unauthorized, "missing bearer token");
    }
    auto who = store.resolve_session(std::string_view(header).substr(kBearer.size()), config.secret);
    if (!who) throw Error(ErrorCode::Unauthorized, "session token is unknown or expired");
    return *who;
  }

  httplib::Server::Handler guarded(Handler handler, bool needs_session = true) {
    return [this, handler = std::move(handler), needs_session](const Request& req, Response& res) {
      try {
        const Caller caller = needs_session ? authenticate(req) : Caller();
        handler(req, res, caller);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_error(res, bad_request(std::string("malformed request body: ") + e.what()));
      } catch (const std::exception& e) {
        send_error(res, Error(ErrorCode::StorageError, std::string("internal error: ") + e.what()));
      }
    };
  }

  // ------------------------------------------------------------ search cache

  std::shared_ptr<SearchIndex> index_for(const std::string& treebank, const std::string& layer) {
    const LayerKey key{treebank, layer};
    for (;;) {
      std::uint64_t seen = 0;
      {
        std::shared_lock lock(cache_mutex);
        if (const auto it = indexes.find(key); it != indexes.end()) return it->second;
        if (const auto v = versions.find(key); v != versions.end()) seen = v->second;
      }
      auto built = std::make_shared<SearchIndex>(build_index(store.layer(treebank, layer)));
      std::unique_lock lock(cache_mutex);
      if (const auto it = indexes.find(key); it != indexes.end()) return it->second;
      const auto v = versions.find(key);
      if ((v == versions.end() ? 0 : v->second) == seen) {
        indexes.emplace(key, built);
        return built;
      }
    }
  }

  void record_saved(const AnnotationRecord& record) {
    const LayerKey key{record.treebank_id, record.annotator_id};
    std::unique_lock lock(cache_mutex);
    ++versions[key];
    if (const auto it = indexes.find(key); it != indexes.end()) {
      // Copy on write: readers holding the old index keep a consistent view.
      auto next = std::make_shared<SearchIndex>(*it->second);
      next->update(record.sentence, record.status);
      it->second = std::move(next);
    }
  }

  AnnotationRecord save(const std::string& treebank, const std::string& sid, const Caller& caller,
                        Sentence sentence, Status status, std::string note,
                        std::int64_t expected) {
    auto record = store.put_annotation(treebank, sid, caller, std::move(sentence), status,
                                       std::move(note), expected);
    record_saved(record);
    return record;
  }

  // ------------------------------------------------------------------ routes

  void routes() {
    server.Post("/auth/login", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto body = body_of(req);
      const auto id = required<std::string>(body, "annotator_id");
      const auto password = required<std::string>(body, "password");
      if (!store.authenticate(id, password)) {
        throw Error(ErrorCode::Unauthorized, "unknown annotator or wrong password");
      }
      const auto token = store.create_session(id, config.session_ttl, config.secret);
      const auto expires = std::chrono::time_point_cast<std::chrono::milliseconds>(
          now() + config.session_ttl);
      send_json(res, {{"token", token},
                      {"annotator_id", id},
                      {"expires_at", format_timestamp(expires)}});
    }, false));

    server.Post("/auth/logout", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto header = req.get_header_value("Authorization");
      store.revoke_session(std::string_view(header).substr(7), config.secret);
      send_json(res, {{"ok", true}});
    }));

    server.Get("/treebanks", guarded([this](const Request&, Response& res, const Caller&) {
      send_json(res, store.list_treebanks());
    }));

    server.Post("/treebanks", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto body = body_of(req);
      const auto treebank = store.import_treebank(
          required<std::string>(body, "id"), body.value("name", std::string()),
          body.value("language", std::string()), required<std::string>(body, "conllu"));
      send_json(res, treebank, 201);
    }));

    const std::string tb = R"(/treebanks/([^/]+))";
    const std::string sent = tb + R"(/sentences/([^/]+))";

    server.Get(tb + "/sentences", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto layer = param(req, "annotator").value_or(caller);
      send_json(res, store.list_sentences(req.matches[1].str(), layer, status_param(req),
                                          size_param(req, "page", 1),
                                          size_param(req, "page_size", kDefaultPageSize)));
    }));

    server.Get(sent, guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto layer = param(req, "annotator").value_or(caller);
      send_json(res, store.get_annotation(req.matches[1].str(), req.matches[2].str(), layer));
    }));

    server.Put(sent, guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto treebank = req.matches[1].str();
      const auto sid = req.matches[2].str();
      if (const auto layer = param(req, "annotator"); layer && *layer != caller) {
        throw Error(ErrorCode::Forbidden, "annotators may only write their own layer");
      }
      const auto body = body_of(req);
      Sentence sentence;
      if (body.contains("sentence")) {
        sentence = body.at("sentence").get<Sentence>();
      } else if (body.contains("conllu")) {
        const auto blocks = split_blocks(required<std::string>(body, "conllu"));
        if (blocks.size() != 1) throw bad_request("'conllu' must hold exactly one sentence");
        sentence = parse_sentence(blocks.front().first, blocks.front().second, sid);
      } else {
        throw bad_request("body needs 'sentence' or 'conllu'");
      }
      const auto status_text = required<std::string>(body, "status");
      const auto status = parse_status(status_text);
      if (!status) throw Error(ErrorCode::InvalidStatus, "unknown status '" + status_text + "'");
      std::string note;
      if (const auto it = body.find("note"); it != body.end() && !it->is_null()) {
        note = it->get<std::string>();
      } else {
        note = store.get_annotation(treebank, sid, caller).note;
      }
      send_json(res, save(treebank, sid, caller, std::move(sentence), *status, std::move(note),
                          required<std::int64_t>(body, "expected_revision")));
    }));

    server.Get(sent + "/layout", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto mode_name = param(req, "mode").value_or("compact_horizontal");
      const auto mode = parse_layout_mode(mode_name);
      if (!mode) throw bad_request("unknown layout mode '" + mode_name + "'");
      const auto layer = param(req, "annotator").value_or(caller);
      const auto record = store.get_annotation(req.matches[1].str(), req.matches[2].str(), layer);
      send_json(res, layout(record.sentence, *mode));
    }));

    // Structural edits always leave the sentence as Draft: a split or join
    // invalidates whatever review a Complete status recorded.
    server.Post(sent + "/split", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto treebank = req.matches[1].str();
      const auto sid = req.matches[2].str();
      const auto body = body_of(req);
      const auto parts = required<std::vector<std::string>>(body, "parts");
      auto current = store.get_annotation(treebank, sid, caller);
      auto edited = split_token(current.sentence, required<int>(body, "token_id"), parts);
      send_json(res, save(treebank, sid, caller, std::move(edited), Status::Draft, current.note,
                          revision_or(body, current.revision)));
    }));

    server.Post(sent + "/join", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto treebank = req.matches[1].str();
      const auto sid = req.matches[2].str();
      const auto body = body_of(req);
      std::optional<std::string> form;
      if (const auto it = body.find("form"); it != body.end() && !it->is_null()) {
        form = it->get<std::string>();
      }
      auto current = store.get_annotation(treebank, sid, caller);
      auto edited = join_tokens(current.sentence, required<int>(body, "first_id"),
                                required<int>(body, "last_id"), std::move(form));
      send_json(res, save(treebank, sid, caller, std::move(edited), Status::Draft, current.note,
                          revision_or(body, current.revision)));
    }));

    server.Get(tb + "/search", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto treebank = req.matches[1].str();
      const auto text = param(req, "q");
      if (!text) throw bad_request("missing query parameter 'q'");
      auto query = parse_query(*text);
      query.treebank_id = treebank;
      query.annotator = param(req, "annotator").value_or(caller);
      query.status_filter = status_param(req);
      const auto page = size_param(req, "page", 1);
      auto page_size = size_param(req, "page_size", kDefaultPageSize);
      if (page == 0) throw Error(ErrorCode::InvalidArgument, "pages are numbered from 1");
      page_size = std::min(page_size == 0 ? kDefaultPageSize : page_size, kMaxPageSize);

      store.treebank(treebank);
      if (query.annotator != kBaseLayer) store.annotator(query.annotator);
      const auto hits = index_for(treebank, query.annotator)->execute(query);
      const auto first = std::min(hits.size(), (page - 1) * page_size);
      const auto last = std::min(hits.size(), first + page_size);
      send_json(res, {{"items", std::vector<Match>(hits.begin() + static_cast<std::ptrdiff_t>(first),
                                                   hits.begin() + static_cast<std::ptrdiff_t>(last))},
                      {"total", hits.size()},
                      {"page", page},
                      {"page_size", page_size}});
    }));

    server.Get(tb + "/agreement", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto a = param(req, "a");
      const auto b = param(req, "b");
      if (!a || !b) throw bad_request("parameters 'a' and 'b' name the annotators to compare");
      const auto fields = fields_param(req);
      send_json(res, compute_agreement(store, req.matches[1].str(), *a, *b, fields));
    }));

    server.Get(tb + "/agreement-matrix", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto fields = fields_param(req);
      const auto matrix = agreement_matrix(store, req.matches[1].str(), fields);
      json ids = json::array();
      for (const auto& annotator : store.annotators()) ids.push_back(annotator.id);
      json pairs = json::array();
      for (const auto& [key, report] : matrix) pairs.push_back(report);
      send_json(res, {{"annotators", std::move(ids)}, {"pairs", std::move(pairs)}});
    }));

    server.Get(tb + "/export", guarded([this](const Request& req, Response& res, const Caller& caller) {
      const auto layer = param(req, "annotator").value_or(caller);
      res.set_content(store.export_treebank(req.matches[1].str(), layer), "text/plain; charset=utf-8");
    }));

    server.Get(tb + "/vocabulary", guarded([this](const Request& req, Response& res, const Caller&) {
      const auto bundle = vocabulary(store, req.matches[1].str());
      send_json(res, {{"upos", bundle.upos}, {"deprel", bundle.deprel}, {"feats", bundle.feats}});
    }));

    server.set_error_handler([](const Request& req, Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      const auto code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::BadRequest;
      const auto status = res.status;
      send_error(res, Error(code, "no route for " + req.method + " " + req.path));
      res.status = status;
      return httplib::Server::HandlerResponse::Handled;
    });
  }
};

ApiService::ApiService(Store& store, ApiConfig config)
    : impl_(std::make_unique<Impl>(store, std::move(config))) {}

ApiService::~ApiService() { stop(); }

int ApiService::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot listen on " + host + ":" + std::to_string(port) +
                    " (address already in use or not available)");
  }
  impl_->bound = true;
  return bound;
}

void ApiService::run() {
  if (!impl_->bound) throw Error(ErrorCode::InvalidArgument, "bind() must precede run()");
  impl_->server.listen_after_bind();
}

int ApiService::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace boat
