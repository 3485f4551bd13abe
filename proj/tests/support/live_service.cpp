#include "live_service.hpp"

#include <httplib.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>

namespace boat::testing {
namespace {

std::atomic<int> instance_counter{0};

Reply convert(const httplib::Result& result) {
  if (!result) throw std::runtime_error("HTTP request failed: " + httplib::to_string(result.error()));
  Reply reply;
  reply.status = result->status;
  reply.raw = result->body;
  reply.content_type = result->get_header_value("Content-Type");
  if (reply.content_type.rfind("application/json", 0) == 0) {
    reply.body = nlohmann::json::parse(result->body);
  }
  return reply;
}

httplib::Headers auth(const std::string& token) {
  if (token.empty()) return {};
  return {{"Authorization", "Bearer " + token}};
}

}  // namespace

LiveService::LiveService(std::string secret) : secret_(std::move(secret)) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("boat-live-" + std::to_string(::getpid()) + "-" + std::to_string(instance_counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  dir_ = dir.string();
  open();
}

LiveService::~LiveService() {
  close();
  std::error_code ignored;
  std::filesystem::remove_all(dir_, ignored);
}

void LiveService::open() {
  store_ = std::make_unique<Store>(Store::open(dir_ + "/boat.db"));
  service_ = std::make_unique<ApiService>(*store_, ApiConfig{secret_, std::chrono::hours(1)});
  port_ = service_->start("127.0.0.1", 0);
}

void LiveService::close() {
  if (service_) service_->stop();
  service_.reset();
  store_.reset();
}

void LiveService::restart() {
  close();
  open();
}

Reply LiveService::get(const std::string& path, const std::string& token) const {
  httplib::Client client("127.0.0.1", port_);
  return convert(client.Get(path, auth(token)));
}

Reply LiveService::post(const std::string& path, const nlohmann::json& body, const std::string& token) const {
  return post_raw(path, body.dump(), token);
}

Reply LiveService::post_raw(const std::string& path, const std::string& body, const std::string& token) const {
  httplib::Client client("127.0.0.1", port_);
  return convert(client.Post(path, auth(token), body, "application/json"));
}

Reply LiveService::put(const std::string& path, const nlohmann::json& body, const std::string& token) const {
  httplib::Client client("127.0.0.1", port_);
  return convert(client.Put(path, auth(token), body.dump(), "application/json"));
}

std::string LiveService::login(const std::string& annotator, const std::string& password) const {
  const auto reply = post("/auth/login", {{"annotator_id", annotator}, {"password", password}});
  return reply.status == 200 ? reply.body.at("token").get<std::string>() : std::string();
}

std::string seed_conllu() {
  return "# sent_id = s1\n"
         "# text = Sel sularında neler yoktu ki...\n"
         "1\tSel\tsel\tNOUN\t_\tCase=Nom|Number=Sing\t2\tnmod:poss\t_\t_\n"
         "2\tsularında\tsu\tNOUN\t_\tCase=Loc|Number=Plur|Number[psor]=Sing|Person[psor]=3\t4\tobl\t_\t_\n"
         "3\tneler\tne\tPRON\t_\tCase=Nom|Number=Plur|PronType=Int\t4\tnsubj\t_\t_\n"
         "4-5\tyoktu\t_\t_\t_\t_\t_\t_\t_\t_\n"
         "4\tyok\tyok\tADJ\t_\tPolarity=Neg\t0\troot\t_\t_\n"
         "5\ttu\ti\tAUX\t_\tMood=Ind|Tense=Past\t4\tcop\t_\t_\n"
         "6\tki\tki\tPART\t_\t_\t4\tdiscourse\t_\tSpaceAfter=No\n"
         "7\t...\t...\tPUNCT\t_\t_\t4\tpunct\t_\t_\n"
         "\n"
         "# sent_id = s2\n"
         "# text = Ev geldi.\n"
         "1\tEv\tev\tNOUN\t_\tCase=Nom\t2\tnsubj\t_\t_\n"
         "2\tgeldi\tgel\tVERB\t_\tTense=Past\t0\troot\t_\tSpaceAfter=No\n"
         "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
         "\n"
         "# sent_id = s3\n"
         "# text = Kuş uçtu\n"
         "1\tKuş\tkuş\tNOUN\t_\tCase=Nom\t2\tnsubj\t_\t_\n"
         "2\tuçtu\tuç\tVERB\t_\tTense=Past\t0\troot\t_\t_\n"
         "\n";
}

void seed(Store& store) {
  store.import_treebank("tb", "Seed", "tr", seed_conllu());
  for (const std::string id : {"alice", "bob", "carol"}) store.add_annotator(id, id, id + "-pw");
}

std::vector<std::string> status_scenario(LiveService& service, const std::function<void()>& between) {
  const std::string path = "/treebanks/tb/sentences/s2";
  std::vector<std::string> log;
  const auto record_line = [&](const std::string& step, const Reply& r) {
    std::string line = step + " " + std::to_string(r.status);
    if (r.status == 200) {
      line += " " + r.body.at("status").get<std::string>() + " rev" +
              std::to_string(r.body.at("revision").get<long long>());
    } else if (r.body.is_object()) {
      line += " " + r.body.at("code").get<std::string>();
      const auto& details = r.body.at("details");
      if (details.contains("current_revision")) {
        line += " current=" + std::to_string(details.at("current_revision").get<long long>());
      }
      if (details.contains("issues")) {
        for (const auto& issue : details.at("issues")) line += " " + issue.at("code").get<std::string>();
      }
    }
    log.push_back(line);
    return r;
  };

  // Two browser sessions of the same annotator racing on one sentence.
  const auto first = service.login("alice", "alice-pw");
  const auto second = service.login("alice", "alice-pw");
  auto mine = record_line("first:get", service.get(path, first)).body;
  auto theirs = record_line("second:get", service.get(path, second)).body;

  mine["sentence"]["tokens"][0]["upos"] = "PROPN";
  record_line("first:put-draft",
              service.put(path, {{"sentence", mine["sentence"]}, {"status", "Draft"}, {"expected_revision", 0}},
                          first));
  between();

  theirs["sentence"]["tokens"][0]["lemma"] = "EV";
  record_line("second:put-stale", service.put(path,
                                              {{"sentence", theirs["sentence"]},
                                               {"status", "Draft"},
                                               {"expected_revision", 0}},
                                              second));
  theirs = record_line("second:reload", service.get(path, second)).body;

  auto broken = theirs["sentence"];
  broken["tokens"][1]["head"] = 3;
  broken["tokens"][2]["head"] = 2;
  record_line("second:complete-cycle",
              service.put(path, {{"sentence", broken}, {"status", "Complete"}, {"expected_revision", 1}}, second));
  record_line("second:complete",
              service.put(path, {{"sentence", theirs["sentence"]}, {"status", "Complete"}, {"expected_revision", 1}},
                          second));

  const auto listing = service.get("/treebanks/tb/sentences?status=Complete", first);
  std::string ids = "list " + std::to_string(listing.status);
  for (const auto& item : listing.body.at("items")) ids += " " + item.at("sent_id").get<std::string>();
  log.push_back(ids);
  const auto exported = service.get("/treebanks/tb/export", first);
  log.push_back("export " + std::to_string(exported.status) + " " +
                (exported.raw.find("1\tEv\tev\tPROPN") != std::string::npos ? "edited" : "original"));
  return log;
}

}  // namespace boat::testing
