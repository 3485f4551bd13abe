#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is folded into the capture only when asked.
Run boat_cli(const std::string& args, bool with_stderr = false) {
  const std::string command = std::string(BOAT_CLI) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  Run run;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) run.out.append(buf, n);
  const int status = ::pclose(pipe);
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("boat-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    sample_ = boat::testing::data_path("tr_sample.conllu");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
    return path(name);
  }

  std::string db() const { return "--db " + path("boat.db"); }

  fs::path dir_;
  std::string sample_;
};

}  // namespace

TEST_F(CliTest, ValidateCleanFileIsSilent) {
  const auto run = boat_cli("validate " + sample_, true);
  EXPECT_EQ(run.exit_code, 0);
  EXPECT_EQ(run.out, "");
}

TEST_F(CliTest, ValidateReportsErrors) {
  const auto file = write("bad.conllu",
                          "# sent_id = b1\n1\tEv\tev\tNOUN\t_\t_\t2\tnsubj\t_\t_\n2\tgeldi\tgel\tVERB\t_\t_\t1\troot\t_\t_\n\n");
  const auto run = boat_cli("validate " + file);
  EXPECT_EQ(run.exit_code, 1);
  EXPECT_NE(run.out.find("b1\t-\terror\tROOT_COUNT"), std::string::npos) << run.out;
  EXPECT_NE(run.out.find("\tCYCLE\t"), std::string::npos) << run.out;

  const auto warn = write("warn.conllu", "# sent_id = w\n1\tEv\tev\tNOUN\t_\tNumber=Sing|Case=Nom\t0\troot\t_\t_\n\n");
  const auto warned = boat_cli("validate " + warn);
  EXPECT_EQ(warned.exit_code, 0);
  EXPECT_NE(warned.out.find("warning\tFEATS_ORDER"), std::string::npos);

  const auto broken = write("broken.conllu", "# sent_id = x\n1\tEv\n\n");
  const auto failed = boat_cli("validate " + broken, true);
  EXPECT_EQ(failed.exit_code, 1);
  EXPECT_NE(failed.out.find("MALFORMED_LINE"), std::string::npos);
}

TEST_F(CliTest, StatsCountsTheSample) {
  const auto text = boat::testing::read_text(sample_);
  std::size_t sentences = 0, tokens = 0, mwts = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# sent_id", 0) == 0) ++sentences;
    if (line.empty() || line[0] == '#') continue;
    const auto id = line.substr(0, line.find('\t'));
    (id.find('-') == std::string::npos ? tokens : mwts) += 1;
  }
  const auto run = boat_cli("stats " + sample_);
  EXPECT_EQ(run.exit_code, 0);
  EXPECT_EQ(run.out, "sentences\t" + std::to_string(sentences) + "\ntokens\t" + std::to_string(tokens) +
                         "\nmultiword_tokens\t" + std::to_string(mwts) + "\n");
}

TEST_F(CliTest, ImportExportIsByteIdentical) {
  ASSERT_EQ(boat_cli("import tr " + sample_ + " --name Sample --language tr " + db()).exit_code, 0);
  ASSERT_EQ(boat_cli("export tr -o " + path("out.conllu") + " " + db()).exit_code, 0);
  EXPECT_EQ(boat::testing::read_text(path("out.conllu")), boat::testing::read_text(sample_));
  EXPECT_EQ(boat_cli("import tr " + sample_ + " " + db()).exit_code, 1);  // duplicate
  EXPECT_EQ(boat_cli("export nope " + db()).exit_code, 1);
}

TEST_F(CliTest, SearchAgreementAndUsers) {
  ASSERT_EQ(boat_cli("import tr " + sample_ + " " + db()).exit_code, 0);
  const auto hits = boat_cli("search tr 'form=yoktu' " + db());
  EXPECT_EQ(hits.exit_code, 0);
  EXPECT_EQ(hits.out, "");  // multiword surface rows are not syntactic words
  const auto parts = boat_cli("search tr 'form=tu head_deprel=root' " + db());
  EXPECT_EQ(parts.exit_code, 0);
  EXPECT_EQ(parts.out.rfind("tr_sample-0001\t5\tyoktu\tSel sularında neler yoktu ki...\n", 0), 0u) << parts.out;

  const auto syntax = boat_cli("search tr 'bogus=x' " + db(), true);
  EXPECT_EQ(syntax.exit_code, 1);
  EXPECT_NE(syntax.out.find("QUERY_SYNTAX_ERROR"), std::string::npos);

  EXPECT_EQ(boat_cli("adduser ann --password pw " + db()).exit_code, 0);
  EXPECT_EQ(boat_cli("adduser ann --password pw " + db()).exit_code, 1);
  EXPECT_EQ(boat_cli("adduser ann2 " + db()).exit_code, 2);
  EXPECT_EQ(boat_cli("adduser bob --password pw " + db()).exit_code, 0);
  const auto none = boat_cli("agreement tr ann bob " + db(), true);
  EXPECT_EQ(none.exit_code, 1);
  EXPECT_NE(none.out.find("NO_COMPARABLE_SENTENCES"), std::string::npos);
}

TEST_F(CliTest, RenderWritesSvg) {
  const auto run = boat_cli("render " + sample_ + " --mode tree_vertical -o " + path("s.svg"));
  EXPECT_EQ(run.exit_code, 0);
  const auto svg = boat::testing::read_text(path("s.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("data-mode=\"tree_vertical\""), std::string::npos);
  EXPECT_NE(svg.find(">yok<"), std::string::npos);
  EXPECT_EQ(boat_cli("render " + sample_ + " --sent-id missing").exit_code, 1);
  EXPECT_EQ(boat_cli("render " + sample_ + " --mode radial").exit_code, 2);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(boat_cli("").exit_code, 2);
  EXPECT_EQ(boat_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(boat_cli("validate").exit_code, 2);
  EXPECT_EQ(boat_cli("validate /definitely/not/here.conllu").exit_code, 2);
  EXPECT_EQ(boat_cli("--help").exit_code, 0);
}

TEST_F(CliTest, ServeOnOccupiedPortFailsClearly) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  ASSERT_EQ(::listen(fd, 1), 0);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);

  const auto run = boat_cli("serve --host 127.0.0.1 --port " + std::to_string(port) + " " + db(), true);
  ::close(fd);
  EXPECT_EQ(run.exit_code, 1);
  EXPECT_NE(run.out.find("cannot listen on 127.0.0.1:" + std::to_string(port)), std::string::npos) << run.out;
}
