#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boat/agreement.hpp"
#include "boat/api.hpp"
#include "boat/conllu.hpp"
#include "boat/json_io.hpp"
#include "boat/layout.hpp"
#include "boat/search.hpp"
#include "boat/store.hpp"
#include "boat/validation.hpp"

namespace py = pybind11;

namespace {

// Structured values cross the boundary as the same JSON documents the HTTP
// API uses, so a sentence dict from Python is exactly a request body field.
// The json callables are deliberately leaked: releasing them from a C++
// static destructor would run after the interpreter has finalized.
py::object to_python(const boat::json& value) {
  static py::handle loads = py::module_::import("json").attr("loads").cast<py::object>().release();
  return loads(value.dump());
}

boat::json from_python(const py::handle& value) {
  static py::handle dumps = py::module_::import("json").attr("dumps").cast<py::object>().release();
  return boat::json::parse(dumps(value).cast<std::string>());
}

boat::Sentence sentence_from(const py::handle& value) {
  if (py::isinstance<py::str>(value)) return boat::parse_sentence(value.cast<std::string>());
  return from_python(value).get<boat::Sentence>();
}

std::vector<boat::AgreementField> fields_from(const std::optional<std::vector<std::string>>& names) {
  if (!names) return boat::all_agreement_fields();
  std::vector<boat::AgreementField> fields;
  for (const auto& name : *names) {
    const auto field = boat::parse_agreement_field(name);
    if (!field) throw boat::Error(boat::ErrorCode::InvalidArgument, "unknown agreement field '" + name + "'");
    fields.push_back(*field);
  }
  return fields;
}

boat::LayoutMode mode_from(const std::string& name) {
  const auto mode = boat::parse_layout_mode(name);
  if (!mode) throw boat::Error(boat::ErrorCode::InvalidArgument, "unknown layout mode '" + name + "'");
  return *mode;
}

boat::Status status_from(const std::string& name) {
  const auto status = boat::parse_status(name);
  if (!status) throw boat::Error(boat::ErrorCode::InvalidStatus, "unknown status '" + name + "'");
  return *status;
}

std::optional<std::set<boat::Status>> statuses_from(const std::optional<std::vector<std::string>>& names) {
  if (!names) return std::nullopt;
  std::set<boat::Status> out;
  for (const auto& name : *names) out.insert(status_from(name));
  return out;
}

class PyService {
 public:
  PyService(boat::Store& store, std::string secret)
      : service_(store, boat::ApiConfig{std::move(secret), std::chrono::hours(12)}) {}

  int start(const std::string& host, int port) {
    py::gil_scoped_release release;
    return service_.start(host, port);
  }
  void stop() {
    py::gil_scoped_release release;
    service_.stop();
  }

 private:
  boat::ApiService service_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CoNLL-U annotation core: parsing, validation, search, agreement, layout and storage.";

  // The type lives as long as the interpreter; holding a bare handle avoids
  // destroying a Python object during static teardown.
  static py::handle error_type = py::exception<boat::Error>(m, "BoatError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const boat::Error& e) {
      const auto details = boat::error_envelope(e).at("details");
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(
          std::string(boat::error_code_name(e.code())), e.what(), to_python(details));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def("parse", [](const std::string& text) {
    boat::json out = boat::parse_document(text).sentences;
    return to_python(out);
  }, py::arg("text"), "Parse CoNLL-U text into a list of sentence dicts.");

  m.def("serialize", [](const py::list& sentences) {
    boat::Document doc;
    for (const auto& s : sentences) doc.sentences.push_back(sentence_from(s));
    return boat::serialize_document(doc);
  }, py::arg("sentences"), "Write sentence dicts (or CoNLL-U blocks) back as CoNLL-U text.");

  m.def("validate", [](const py::object& sentence) {
    boat::json issues = boat::validate_sentence(sentence_from(sentence));
    return to_python(issues);
  }, py::arg("sentence"));

  m.def("split", [](const py::object& sentence, int token_id, const std::vector<std::string>& parts) {
    boat::json out = boat::split_token(sentence_from(sentence), token_id, parts);
    return to_python(out);
  }, py::arg("sentence"), py::arg("token_id"), py::arg("parts"));

  m.def("join", [](const py::object& sentence, int first_id, int last_id, std::optional<std::string> form) {
    boat::json out = boat::join_tokens(sentence_from(sentence), first_id, last_id, std::move(form));
    return to_python(out);
  }, py::arg("sentence"), py::arg("first_id"), py::arg("last_id"), py::arg("form") = py::none());

  m.def("search", [](const py::list& sentences, const std::string& query) {
    std::vector<boat::IndexedSentence> view;
    for (const auto& s : sentences) view.push_back({sentence_from(s), boat::Status::New});
    boat::json hits = boat::SearchIndex(std::move(view)).execute(boat::parse_query(query));
    return to_python(hits);
  }, py::arg("sentences"), py::arg("query"));

  m.def("cohen_kappa", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return boat::cohen_kappa(a, b);
  }, py::arg("a"), py::arg("b"));

  m.def("layout", [](const py::object& sentence, const std::string& mode) {
    boat::json out = boat::layout(sentence_from(sentence), mode_from(mode));
    return to_python(out);
  }, py::arg("sentence"), py::arg("mode") = "compact_horizontal");

  m.def("render_svg", [](const py::object& sentence, const std::string& mode) {
    return boat::render_svg(boat::layout(sentence_from(sentence), mode_from(mode)));
  }, py::arg("sentence"), py::arg("mode") = "compact_horizontal");

  py::class_<boat::Store>(m, "Store")
      .def(py::init([](const std::string& url) { return boat::Store::open(url); }),
           py::arg("url") = ":memory:")
      .def("import_treebank", [](boat::Store& s, std::string id, const std::string& conllu,
                                 std::string name, std::string language) {
        boat::json out = s.import_treebank(std::move(id), std::move(name), std::move(language), conllu);
        return to_python(out);
      }, py::arg("id"), py::arg("conllu"), py::arg("name") = "", py::arg("language") = "")
      .def("treebanks", [](const boat::Store& s) {
        boat::json out = s.list_treebanks();
        return to_python(out);
      })
      .def("add_annotator", [](boat::Store& s, std::string id, const std::string& password,
                               std::string display_name) {
        boat::json out = s.add_annotator(id, display_name.empty() ? id : std::move(display_name), password);
        return to_python(out);
      }, py::arg("id"), py::arg("password"), py::arg("display_name") = "")
      .def("authenticate", [](const boat::Store& s, const std::string& id, const std::string& password) {
        return s.authenticate(id, password).has_value();
      })
      .def("get_annotation", [](const boat::Store& s, const std::string& tb, const std::string& sid,
                                const std::string& annotator) {
        boat::json out = s.get_annotation(tb, sid, annotator);
        return to_python(out);
      }, py::arg("treebank"), py::arg("sent_id"), py::arg("annotator") = "base")
      .def("put_annotation", [](boat::Store& s, const std::string& tb, const std::string& sid,
                                const std::string& annotator, const py::object& sentence,
                                const std::string& status, std::string note, std::int64_t expected_revision) {
        boat::json out = s.put_annotation(tb, sid, annotator, sentence_from(sentence), status_from(status),
                                          std::move(note), expected_revision);
        return to_python(out);
      }, py::arg("treebank"), py::arg("sent_id"), py::arg("annotator"), py::arg("sentence"),
         py::arg("status"), py::arg("note") = "", py::arg("expected_revision"))
      .def("list_sentences", [](const boat::Store& s, const std::string& tb, const std::string& annotator,
                                const std::optional<std::vector<std::string>>& status, std::size_t page,
                                std::size_t page_size) {
        boat::json out = s.list_sentences(tb, annotator, statuses_from(status), page, page_size);
        return to_python(out);
      }, py::arg("treebank"), py::arg("annotator") = "base", py::arg("status") = py::none(),
         py::arg("page") = 1, py::arg("page_size") = boat::kDefaultPageSize)
      .def("export", [](const boat::Store& s, const std::string& tb, const std::string& annotator) {
        return s.export_treebank(tb, annotator);
      }, py::arg("treebank"), py::arg("annotator") = "base")
      .def("search", [](const boat::Store& s, const std::string& tb, const std::string& query,
                        const std::string& annotator, const std::optional<std::vector<std::string>>& status) {
        auto q = boat::parse_query(query);
        q.treebank_id = tb;
        q.annotator = annotator;
        q.status_filter = statuses_from(status);
        boat::json hits = boat::search(s, q);
        return to_python(hits);
      }, py::arg("treebank"), py::arg("query"), py::arg("annotator") = "base", py::arg("status") = py::none())
      .def("agreement", [](const boat::Store& s, const std::string& tb, const std::string& a,
                           const std::string& b, const std::optional<std::vector<std::string>>& fields) {
        const auto chosen = fields_from(fields);
        boat::json out = boat::compute_agreement(s, tb, a, b, chosen);
        return to_python(out);
      }, py::arg("treebank"), py::arg("a"), py::arg("b"), py::arg("fields") = py::none());

  py::class_<PyService>(m, "Service")
      .def(py::init<boat::Store&, std::string>(), py::arg("store"), py::arg("secret") = "",
           py::keep_alive<1, 2>())
      .def("start", &PyService::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0,
           "Serve the HTTP API on a background thread and return the bound port.")
      .def("stop", &PyService::stop);
}
