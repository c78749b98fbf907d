#include "vdepth/cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "support/zlib_oracle.hpp"

namespace {

using namespace vdepth;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = oracle::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

TEST_F(CliTest, GenWritesHeaderAndFrames) {
  const auto r = run({"gen", "--frames", "300", "--change", "0.1", "--seed", "1", "--out",
                      path("a.d16")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto bytes = oracle::read_file(path("a.d16"));
  ASSERT_EQ(bytes.size(), 18u + 300u * 184320u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "VD16");
  EXPECT_EQ(bytes[10] | (bytes[11] << 8), 300);
}

TEST_F(CliTest, GenIsDeterministic) {
  ASSERT_EQ(run({"gen", "--frames", "20", "--seed", "5", "--noise", "--out", path("a.d16")}).code, 0);
  ASSERT_EQ(run({"gen", "--frames", "20", "--seed", "5", "--noise", "--out", path("b.d16")}).code, 0);
  EXPECT_EQ(oracle::read_file(path("a.d16")), oracle::read_file(path("b.d16")));
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({"gen", "--change", "1.5", "--out", path("a.d16")}).code, cli::kUsageError);
  EXPECT_EQ(run({"gen"}).code, cli::kUsageError);
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"transcode"}).code, cli::kUsageError);
  EXPECT_EQ(run({"encode", "--in", "x", "--out", "y", "--keyframe-interval", "0"}).code,
            cli::kUsageError);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, EncodeDecodeRoundTripIsBitIdentical) {
  ASSERT_EQ(run({"gen", "--frames", "300", "--seed", "2", "--noise", "--out", path("in.d16")}).code, 0);
  const auto enc = run({"encode", "--in", path("in.d16"), "--out", path("s.vds")});
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_NE(enc.out.find("10 keyframes"), std::string::npos);
  // A 10 s stream at 10% change fits the 1.9 Mbps budget.
  EXPECT_LT(std::filesystem::file_size(path("s.vds")), 2'375'000u);
  ASSERT_EQ(run({"decode", "--in", path("s.vds"), "--out", path("out.d16")}).code, 0);
  EXPECT_EQ(oracle::read_file(path("in.d16")), oracle::read_file(path("out.d16")));
}

TEST_F(CliTest, FormatErrorsExitTwo) {
  ASSERT_EQ(run({"gen", "--frames", "5", "--out", path("in.d16")}).code, 0);
  ASSERT_EQ(run({"encode", "--in", path("in.d16"), "--out", path("s.vds")}).code, 0);
  auto bytes = oracle::read_file(path("s.vds"));
  bytes.resize(bytes.size() - 3);
  {
    std::ofstream f(path("cut.vds"), std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const auto r = run({"decode", "--in", path("cut.vds"), "--out", path("x.d16")});
  EXPECT_EQ(r.code, cli::kFormatError);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_EQ(run({"encode", "--in", path("missing.d16"), "--out", path("y.vds")}).code,
            cli::kFormatError);
  // Decoding with the wrong geometry is a dimension mismatch.
  EXPECT_EQ(run({"decode", "--in", path("s.vds"), "--out", path("x.d16"), "--width", "640"}).code,
            cli::kFormatError);
}

TEST_F(CliTest, SimulateDeliversAllFrames) {
  const auto r = run({"simulate", "--report", path("r.json"), "--trace", path("t.ndjson"),
                      "--csv", path("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(oracle::read_file(path("r.json")));
  EXPECT_EQ(report["sender"]["depth_messages"], 300);
  EXPECT_EQ(report["receivers"][0]["depth_frames_decoded"], 300);
  EXPECT_EQ(report["queue_growth"], false);
  EXPECT_GT(std::filesystem::file_size(path("t.ndjson")), 0u);

  const auto stats = run({"stats", "--in", path("t.ndjson"), "--channel", "color"});
  ASSERT_EQ(stats.code, 0) << stats.err;
  const auto s = nlohmann::json::parse(stats.out);
  EXPECT_NEAR(s["max_window_bps"].get<double>(), 1.9e6, 1.9e4);
}

TEST_F(CliTest, SimulateIsDeterministic) {
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"simulate", "--duration", "3", "--seed", "11",
                   "--trace", path(std::string(name) + ".ndjson"),
                   "--report", path(std::string(name) + ".json")}).code, 0);
  }
  EXPECT_EQ(oracle::read_file(path("a.ndjson")), oracle::read_file(path("b.ndjson")));
  EXPECT_EQ(oracle::read_file(path("a.json")), oracle::read_file(path("b.json")));
}

TEST_F(CliTest, OverloadedLinkFlagsQueueGrowth) {
  {
    std::ofstream f(path("slow.json"));
    f << R"({
      "duration_s": 5,
      "links": [{"name": "wan", "bandwidth_bps": 1000000, "latency_ms": 10},
                {"name": "lan", "bandwidth_bps": 100000000, "latency_ms": 1}],
      "nodes": [
        {"name": "cam", "role": "CAMERA_COMPUTER", "link": "wan"},
        {"name": "trainee", "role": "LOCAL_TRAINEE_HMD", "link": "lan"},
        {"name": "hmd", "role": "REMOTE_INSTRUCTOR_HMD", "link": "lan"},
        {"name": "pc", "role": "REMOTE_COMPUTER", "link": "lan"}
      ]
    })";
  }
  const auto r = run({"simulate", "--session", path("slow.json"), "--report", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(oracle::read_file(path("r.json")));
  EXPECT_EQ(report["queue_growth"], true);
  EXPECT_EQ(report["links"]["wan"]["queue_growth"], true);
  EXPECT_EQ(report["links"]["lan"]["queue_growth"], false);
}

TEST_F(CliTest, BadSessionFiles) {
  {
    std::ofstream f(path("broken.json"));
    f << "{ not json";
  }
  EXPECT_EQ(run({"simulate", "--session", path("broken.json")}).code, cli::kFormatError);
  {
    std::ofstream f(path("two.json"));
    f << R"({"links": [{"name": "l"}], "nodes": [
      {"role": "CAMERA_COMPUTER", "link": "l"}, {"role": "CAMERA_COMPUTER", "link": "l"},
      {"role": "LOCAL_TRAINEE_HMD", "link": "l"}, {"role": "REMOTE_INSTRUCTOR_HMD", "link": "l"},
      {"role": "REMOTE_COMPUTER", "link": "l"}]})";
  }
  EXPECT_EQ(run({"simulate", "--session", path("two.json")}).code, cli::kSimulationError);
}

TEST_F(CliTest, BenchAndStatsReport) {
  const auto b = run({"bench", "--frames", "30", "--report", path("b.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto bench = nlohmann::json::parse(oracle::read_file(path("b.json")));
  EXPECT_EQ(bench["frames"], 30);
  EXPECT_GT(bench["mean_total_us"].get<double>(), 0.0);

  ASSERT_EQ(run({"gen", "--frames", "60", "--out", path("in.d16")}).code, 0);
  ASSERT_EQ(run({"encode", "--in", path("in.d16"), "--out", path("s.vds")}).code, 0);
  const auto s = run({"stats", "--in", path("s.vds"), "--csv", path("w.csv")});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto j = nlohmann::json::parse(s.out);
  EXPECT_EQ(j["samples"], 60);
  EXPECT_EQ(j["total_bytes"].get<std::uint64_t>(), std::filesystem::file_size(path("s.vds")));
  EXPECT_LT(j["max_window_bps"].get<double>(), 1.9e6);
}

}  // namespace
