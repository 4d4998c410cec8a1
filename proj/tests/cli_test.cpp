#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "oidcsim/cli.hpp"
#include "oidcsim/trace.hpp"

namespace oidcsim {
namespace {

namespace fs = std::filesystem;

const fs::path kFleets = OIDCSIM_SOURCE_DIR "/fleets";

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "oidcscan");
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("oidcsim-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
             std::to_string(getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

TEST(Cli, HardenedScanIsClean) {
  TempDir tmp;
  const auto r = cli({"scan", "--manifest", (kFleets / "hardened.json").string(), "--out", tmp.path().string()});
  EXPECT_EQ(r.status, exit_code::kOk) << r.err;
  EXPECT_EQ(slurp(tmp.path() / "findings.jsonl"), "");
  EXPECT_TRUE(fs::exists(tmp.path() / "fleet_report.json"));
  EXPECT_TRUE(fs::exists(tmp.path() / "traces" / "code-hardened.login.jsonl"));
}

TEST(Cli, ReplicaScanExitsWithHighFindings) {
  TempDir tmp;
  const auto r = cli({"scan", "--manifest", (kFleets / "replica.json").string(), "--out", tmp.path().string(),
                      "--jobs", "4"});
  EXPECT_EQ(r.status, exit_code::kHighFinding) << r.err;
  EXPECT_NE(slurp(tmp.path() / "fleet_report.txt").find("Fleet: 103 RPs"), std::string::npos);
}

TEST(Cli, ScanOutputsAreByteIdentical) {
  TempDir a, b;
  const auto manifest = (kFleets / "replica.json").string();
  cli({"scan", "--manifest", manifest, "--out", a.path().string(), "--jobs", "1"});
  cli({"scan", "--manifest", manifest, "--out", b.path().string(), "--jobs", "8"});
  const auto ta = tree(a.path());
  EXPECT_GT(ta.size(), 400u);
  EXPECT_TRUE(ta == tree(b.path()));
}

TEST(Cli, SeedOverrideChangesTracesNotFindings) {
  TempDir a, b;
  const auto manifest = (kFleets / "replica.json").string();
  cli({"scan", "--manifest", manifest, "--out", a.path().string()});
  cli({"scan", "--manifest", manifest, "--out", b.path().string(), "--seed", "99"});
  EXPECT_NE(slurp(a.path() / "traces" / "h01.login.jsonl"), slurp(b.path() / "traces" / "h01.login.jsonl"));
  EXPECT_EQ(slurp(a.path() / "fleet_report.txt"), slurp(b.path() / "fleet_report.txt"));
}

TEST(Cli, MalformedManifestIsAnError) {
  TempDir tmp;
  write_file(tmp.path() / "bad.json", "{\"seed\": 1, \"rps\": [ {\"name\": \"x\"} ]}");
  const auto r = cli({"scan", "--manifest", (tmp.path() / "bad.json").string(), "--out", (tmp.path() / "o").string()});
  EXPECT_EQ(r.status, exit_code::kError);
  EXPECT_NE(r.err.find("InvalidManifest"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"scan"}).status, exit_code::kError);
  EXPECT_EQ(cli({"bogus-command"}).status, exit_code::kError);
}

TEST(Cli, FleetReportPrintsSummary) {
  const auto r = cli({"fleet-report", "--manifest", (kFleets / "replica.json").string()});
  EXPECT_EQ(r.status, exit_code::kHighFinding);
  EXPECT_NE(r.out.find("Fleet: 103 RPs"), std::string::npos);
  const auto j = cli({"fleet-report", "--manifest", (kFleets / "hardened.json").string(), "--format", "records"});
  EXPECT_EQ(j.status, exit_code::kOk);
  EXPECT_EQ(j.out.front(), '{');
}

TEST(Cli, AnalyzeExportedTrace) {
  TempDir tmp;
  cli({"scan", "--manifest", (kFleets / "replica.json").string(), "--out", tmp.path().string()});
  const auto r = cli({"analyze-trace", (tmp.path() / "traces" / "h20.login.jsonl").string()});
  EXPECT_EQ(r.status, exit_code::kOk) << r.err;
  EXPECT_NE(r.out.find("flow: Hybrid"), std::string::npos) << r.out;
}

TEST(Cli, AnalyzeHandBuiltTrace) {
  Trace t;
  t.meta = {"rp-x", "", 0, "capture"};
  BrowserRelayedMessage auth;
  auth.seq = 1;
  auth.from = "b";
  auth.to = "https://accounts.op.example";
  auth.method = "GET";
  auth.url = "https://accounts.op.example/o/auth?client_id=rp-x";
  auth.status = 200;
  auth.response_kind = "postmessage-html";
  auth.response_fields = {{"code", "c"}, {"access_token", "tok"}, {"id_token", "x.y.z"}};
  BrowserRelayedMessage submit;
  submit.seq = 2;
  submit.from = "b";
  submit.to = "http://rp-x.example";
  submit.method = "GET";
  submit.url = "http://rp-x.example/signin/google?access_token=tok&state=abcdefghijklmnopqrstuv";
  submit.channel = ChannelSecurity::Http;
  submit.status = 302;
  submit.response_kind = "redirect";
  t.messages = {auth, submit};

  TempDir tmp;
  write_file(tmp.path() / "t.jsonl", trace_to_string(t));
  const auto r = cli({"analyze-trace", (tmp.path() / "t.jsonl").string(), "--format", "records"});
  EXPECT_EQ(r.status, exit_code::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["flow"], "Hybrid");
  std::set<std::string> classes;
  for (const auto& f : j["findings"]) classes.insert(f["class"].get<std::string>());
  EXPECT_EQ(classes, (std::set<std::string>{"token-sniffable", "privacy-leak", "unverified-token-auth"}));
}

TEST(Cli, AnalyzeRejectsBadInput) {
  TempDir tmp;
  write_file(tmp.path() / "empty.jsonl", "");
  EXPECT_EQ(cli({"analyze-trace", (tmp.path() / "empty.jsonl").string()}).status, exit_code::kError);
  write_file(tmp.path() / "junk.jsonl", "not json\n");
  EXPECT_EQ(cli({"analyze-trace", (tmp.path() / "junk.jsonl").string()}).status, exit_code::kError);
  EXPECT_EQ(cli({"analyze-trace", (tmp.path() / "missing.jsonl").string()}).status, exit_code::kError);
}

TEST(Cli, Demo) {
  const auto swap = cli({"demo", "session-swap"});
  EXPECT_EQ(swap.status, exit_code::kOk) << swap.err;
  EXPECT_NE(swap.out.find("result: SUCCESS"), std::string::npos) << swap.out;

  const auto xss = cli({"demo", "xss-token-theft", "--patched-browser"});
  EXPECT_EQ(xss.status, exit_code::kOk);
  EXPECT_NE(xss.out.find("result: FAILURE"), std::string::npos) << xss.out;

  const auto hardened = cli({"demo", "google-id-impersonation", "--hardened"});
  EXPECT_NE(hardened.out.find("result: FAILURE"), std::string::npos) << hardened.out;

  const auto unknown = cli({"demo", "teleport"});
  EXPECT_EQ(unknown.status, exit_code::kError);
  EXPECT_NE(unknown.err.find("forced-login"), std::string::npos) << unknown.err;
}

TEST(Cli, DemoIsDeterministic) {
  EXPECT_EQ(cli({"demo", "forced-login", "--seed", "3"}).out, cli({"demo", "forced-login", "--seed", "3"}).out);
}

}  // namespace
}  // namespace oidcsim
