// Command-line front end: runs the HTTP service and exposes the library
// operations for scripting. Exit codes: 0 success, 1 domain error, 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "boat/agreement.hpp"
#include "boat/api.hpp"
#include "boat/json_io.hpp"
#include "boat/layout.hpp"
#include "boat/search.hpp"
#include "boat/store.hpp"
#include "boat/validation.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? std::string(value) : std::move(fallback);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw boat::Error(boat::ErrorCode::NotFound, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw boat::Error(boat::ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

std::string fixed(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *value);
  return buf;
}

void print_agreement(const boat::AgreementReport& r) {
  std::cout << r.annotator_a << " vs " << r.annotator_b << ": " << r.n_sentences_compared
            << " sentences compared, " << r.n_sentences_skipped_tokenization
            << " skipped for tokenization, " << r.n_tokens << " tokens\n";
  std::cout << "field\traw\tkappa\n";
  for (const auto& [field, stats] : r.per_field) {
    std::cout << boat::agreement_field_name(field) << '\t' << fixed(stats.raw_agreement) << '\t'
              << fixed(stats.kappa) << '\n';
  }
  std::cout << "UAS\t" << fixed(r.uas) << "\nLAS\t" << fixed(r.las) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boat: dependency treebank annotation service and tools"};
  app.require_subcommand(1);

  std::string db = env_or("BOAT_DB_URL", "boat.db");
  const auto add_db = [&](CLI::App* cmd) {
    cmd->add_option("--db", db, "Database URL or path (default: $BOAT_DB_URL or boat.db)");
  };

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  int port = std::atoi(env_or("BOAT_PORT", "8080").c_str());
  std::string host = "0.0.0.0";
  serve->add_option("--port", port, "Port (default: $BOAT_PORT or 8080)");
  serve->add_option("--host", host, "Listen address");
  add_db(serve);

  // import
  auto* import = app.add_subcommand("import", "Import a CoNLL-U file as a new treebank");
  std::string treebank_id, file, name, language;
  import->add_option("treebank", treebank_id, "Treebank id (slug)")->required();
  import->add_option("file", file, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  import->add_option("--name", name, "Display name");
  import->add_option("--language", language, "Language code");
  add_db(import);

  // export
  auto* exporter = app.add_subcommand("export", "Write a treebank layer as CoNLL-U");
  std::string annotator = std::string(boat::kBaseLayer);
  std::string output;
  exporter->add_option("treebank", treebank_id, "Treebank id")->required();
  exporter->add_option("--annotator", annotator, "Annotation layer (default: base)");
  exporter->add_option("-o,--output", output, "Output file (default: stdout)");
  add_db(exporter);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a CoNLL-U file");
  validate->add_option("file", file, "CoNLL-U file")->required()->check(CLI::ExistingFile);

  // search
  auto* search = app.add_subcommand("search", "Query a treebank layer");
  std::string query_text, statuses;
  search->add_option("treebank", treebank_id, "Treebank id")->required();
  search->add_option("query", query_text, "Query, e.g. 'upos=VERB feats.Tense=Past'")->required();
  search->add_option("--annotator", annotator, "Annotation layer (default: base)");
  search->add_option("--status", statuses, "Comma-separated statuses to keep");
  add_db(search);

  // agreement
  auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement table");
  std::string annotator_a, annotator_b, fields_text;
  bool as_json = false;
  agreement->add_option("treebank", treebank_id, "Treebank id")->required();
  agreement->add_option("a", annotator_a, "First annotator")->required();
  agreement->add_option("b", annotator_b, "Second annotator")->required();
  agreement->add_option("--fields", fields_text, "Comma-separated fields (default: all)");
  agreement->add_flag("--json", as_json, "Print the report as JSON instead of a table");
  add_db(agreement);

  // stats
  auto* stats = app.add_subcommand("stats", "Count sentences, tokens and multiword tokens");
  stats->add_option("file", file, "CoNLL-U file")->required()->check(CLI::ExistingFile);

  // render
  auto* render = app.add_subcommand("render", "Draw one sentence of a CoNLL-U file as SVG");
  std::string sent_id, mode_name = "compact_horizontal";
  render->add_option("file", file, "CoNLL-U file")->required()->check(CLI::ExistingFile);
  render->add_option("--sent-id", sent_id, "Sentence to draw (default: the first)");
  render->add_option("--mode", mode_name, "compact_horizontal, arcs_horizontal or tree_vertical")
      ->check(CLI::IsMember({"compact_horizontal", "arcs_horizontal", "tree_vertical"}));
  render->add_option("-o,--output", output, "Output file (default: stdout)");

  // adduser
  auto* adduser = app.add_subcommand("adduser", "Register an annotator");
  std::string user_id, display_name, password = env_or("BOAT_PASSWORD", "");
  adduser->add_option("id", user_id, "Annotator id")->required();
  adduser->add_option("--name", display_name, "Display name");
  adduser->add_option("--password", password, "Password (default: $BOAT_PASSWORD)");
  add_db(adduser);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*serve) {
      auto store = boat::Store::open(db);
      boat::ApiService service(store, {env_or("BOAT_SECRET", ""), std::chrono::hours(12)});
      const int bound = service.bind(host, port);
      std::cerr << "boat: serving on " << host << ":" << bound << "\n";
      service.run();
    } else if (*import) {
      auto store = boat::Store::open(db);
      const auto tb = store.import_treebank(treebank_id, name.empty() ? treebank_id : name,
                                            language, read_file(file));
      std::cout << "imported " << tb.id << ": " << tb.sentence_count << " sentences\n";
    } else if (*exporter) {
      const auto store = boat::Store::open(db);
      write_output(output, store.export_treebank(treebank_id, annotator));
    } else if (*validate) {
      const auto doc = boat::parse_document(read_file(file));
      bool errors = false;
      for (const auto& [sid, issues] : boat::validate_document(doc)) {
        for (const auto& issue : issues) {
          errors |= issue.severity == boat::Severity::Error;
          std::cout << sid << '\t'
                    << (issue.token_id ? std::to_string(*issue.token_id) : std::string("-")) << '\t'
                    << boat::severity_name(issue.severity) << '\t' << issue.code << '\t'
                    << issue.message << '\n';
        }
      }
      return errors ? 1 : 0;
    } else if (*search) {
      const auto store = boat::Store::open(db);
      auto query = boat::parse_query(query_text);
      query.treebank_id = treebank_id;
      query.annotator = annotator;
      if (!statuses.empty()) {
        std::set<boat::Status> keep;
        std::stringstream list(statuses);
        for (std::string item; std::getline(list, item, ',');) {
          const auto status = boat::parse_status(item);
          if (!status) throw boat::Error(boat::ErrorCode::InvalidStatus, "unknown status '" + item + "'");
          keep.insert(*status);
        }
        query.status_filter = keep;
      }
      for (const auto& m : boat::search(store, query)) {
        std::cout << m.sent_id << '\t' << (m.token_id ? std::to_string(*m.token_id) : "-") << '\t'
                  << m.snippet.substr(m.begin, m.end - m.begin) << '\t' << m.snippet << '\n';
      }
    } else if (*agreement) {
      const auto store = boat::Store::open(db);
      std::vector<boat::AgreementField> fields;
      std::stringstream list(fields_text);
      for (std::string item; std::getline(list, item, ',');) {
        const auto field = boat::parse_agreement_field(item);
        if (!field) throw boat::Error(boat::ErrorCode::InvalidArgument, "unknown field '" + item + "'");
        fields.push_back(*field);
      }
      if (fields.empty()) fields = boat::all_agreement_fields();
      const auto report = boat::compute_agreement(store, treebank_id, annotator_a, annotator_b, fields);
      if (as_json) {
        std::cout << boat::json(report).dump(2) << '\n';
      } else {
        print_agreement(report);
      }
    } else if (*stats) {
      const auto doc = boat::parse_document(read_file(file));
      std::size_t tokens = 0, mwts = 0;
      for (const auto& sent : doc.sentences) {
        tokens += sent.size();
        mwts += sent.mwts.size();
      }
      std::cout << "sentences\t" << doc.sentences.size() << "\ntokens\t" << tokens
                << "\nmultiword_tokens\t" << mwts << '\n';
    } else if (*render) {
      const auto doc = boat::parse_document(read_file(file));
      const boat::Sentence* chosen = nullptr;
      for (const auto& sent : doc.sentences) {
        if (sent_id.empty() || sent.sent_id == sent_id) {
          chosen = &sent;
          break;
        }
      }
      if (!chosen) throw boat::Error(boat::ErrorCode::NotFound, "no sentence '" + sent_id + "'");
      write_output(output, boat::render_svg(boat::layout(*chosen, *boat::parse_layout_mode(mode_name))));
    } else if (*adduser) {
      if (password.empty()) {
        std::cerr << "boat: a password is required (--password or $BOAT_PASSWORD)\n";
        return 2;
      }
      auto store = boat::Store::open(db);
      const auto a = store.add_annotator(user_id, display_name.empty() ? user_id : display_name, password);
      std::cout << "added annotator " << a.id << '\n';
    }
  } catch (const boat::Error& e) {
    std::cerr << "boat: " << boat::error_code_name(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "boat: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
