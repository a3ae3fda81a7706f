#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctlscape/cli.hpp"

using namespace ctlscape;
using namespace ctlscape::cli;
namespace fs = std::filesystem;

namespace {

const char* kQubit = R"({
  "system": {"family": "quantum", "drift": [[1, 0], [0, -1]], "coupling": [[0, 1], [1, 0]], "horizon": 2},
  "goal": {"gate": [[0, [0, 1]], [[0, 1], 0]]},
  "intervals": 16,
  "survey": {"starts": 3},
  "check": {"samples": 4},
  "seed": 5
})";

const char* kCommuting = R"({
  "system": {"family": "quantum", "drift": [[1, 0], [0, -1]], "coupling": [[1, 0], [0, -1]], "horizon": 1},
  "goal": {"gate": [[0, 1], [1, 0]]},
  "intervals": 8,
  "survey": {"starts": 3},
  "check": {"samples": 4}
})";

const char* kIntegrator = R"({
  "system": {"family": "lti", "a": [[0, 1], [0, 0]], "b": [0, 1], "x0": [1, 0], "horizon": 1},
  "goal": {"state": [0, 0]},
  "objective": "quadratic_cost",
  "intervals": 8
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ctlscape_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string descriptor(const std::string& name, const std::string& text) {
    const auto path = (dir_ / (name + ".json")).string();
    std::ofstream(path) << text;
    return path;
  }

  std::string prefix(const std::string& name) const { return (dir_ / name).string(); }

  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  static std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Descriptor, DefaultsAndDigest) {
  const auto d = parse_descriptor(kQubit);
  EXPECT_EQ(d.digest, sha256_hex(kQubit));
  EXPECT_EQ(d.intervals, 16);
  EXPECT_EQ(d.starts, 3);
  EXPECT_EQ(d.seed, 5U);
  ASSERT_EQ(d.sweep.size(), 1U);
  EXPECT_FALSE(d.sweep[0].fluence_bound);
}

TEST(Descriptor, QuantumDefaultIntervals) {
  const auto d = parse_descriptor(R"({"system": {"sampler": "quantum", "levels": 3, "seed": 1},
                                      "goal": {"random_gate": 2}})");
  EXPECT_EQ(d.intervals, 18);
  EXPECT_DOUBLE_EQ(horizon_of(*d.system), 18.0);
}

TEST(Descriptor, SweepIsACartesianProduct) {
  const auto d = parse_descriptor(R"({"system": {"sampler": "lti", "dimension": 2, "seed": 1},
                                      "goal": {"state": [0, 0]},
                                      "fluence_sweep": [1, 2, null], "epsilon_sweep": [0, 0.1]})");
  ASSERT_EQ(d.sweep.size(), 6U);
  EXPECT_FALSE(d.sweep[4].fluence_bound);
  EXPECT_EQ(*d.sweep[1].epsilon, 0.1);
  EXPECT_TRUE(std::holds_alternative<NonlinearControlSystem>(system_for(d, d.sweep[1])));
}

TEST(Descriptor, RejectsMalformedInput) {
  EXPECT_THROW(parse_descriptor("{"), UsageError);
  EXPECT_THROW(parse_descriptor(R"({"bogus": 1})"), UsageError);
  EXPECT_THROW(parse_descriptor(R"({"system": {"sampler": "lti", "dimension": 2}})"), UsageError);
  EXPECT_THROW(parse_descriptor(R"({"system": {"sampler": "lti", "dimension": 2},
                                    "goal": {"gate": [[1, 0], [0, 1]]}})"),
               UsageError);
  EXPECT_THROW(parse_descriptor(R"({"system": {"family": "quantum", "drift": [[1, 0], [0, -1]],
                                    "coupling": [[0, 1], [1, 0]]}, "goal": {"gate": [[1, 0], [0, 2]]}})"),
               UsageError);
  EXPECT_THROW(parse_descriptor(R"({"system": {"sampler": "quantum", "levels": 2},
                                    "goal": {"random_gate": 1}, "epsilon_sweep": [0.1]})"),
               UsageError);
}

TEST_F(CliTest, CheckControllableQubit) {
  const auto d = descriptor("q", kQubit);
  EXPECT_EQ(run_cli({"check", d, "--out", prefix("q")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("q") + ".check.json"));
  EXPECT_EQ(j["assumption1"]["evidence"], 3);
  EXPECT_EQ(j["descriptor_digest"], sha256_hex(slurp(d)));
}

TEST_F(CliTest, CheckCommutingFails) {
  EXPECT_EQ(run_cli({"check", descriptor("c", kCommuting), "--out", prefix("c")}), kAssumptionFailure);
}

TEST_F(CliTest, CheckDoubleIntegrator) {
  EXPECT_EQ(run_cli({"check", descriptor("i", kIntegrator), "--out", prefix("i")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("i") + ".check.json"));
  EXPECT_EQ(j["assumption1"]["method"], "kalman");
  EXPECT_EQ(j["assumption1"]["evidence"], 2);
}

TEST_F(CliTest, ClimbIntegratorReachesTarget) {
  EXPECT_EQ(run_cli({"climb", descriptor("i", kIntegrator), "--out", prefix("i")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("i") + ".climbs.jsonl"));
  EXPECT_GT(j["climb"]["final_value"].get<double>(), -1e-10);
  EXPECT_TRUE(j["converged"].get<bool>());
}

TEST_F(CliTest, ClimbCommutingIsFlat) {
  EXPECT_EQ(run_cli({"climb", descriptor("c", kCommuting), "--out", prefix("c")}), kObjectiveNotMet);
  const Json j = Json::parse(slurp(prefix("c") + ".climbs.jsonl"));
  for (const auto& v : j["climb"]["trace"]) EXPECT_EQ(v, j["climb"]["trace"][0]);
  EXPECT_FALSE(j["converged"].get<bool>());
}

TEST_F(CliTest, ClimbIsByteReproducible) {
  const auto d = descriptor("q", kQubit);
  run_cli({"climb", d, "--out", prefix("a")});
  run_cli({"climb", d, "--out", prefix("b")});
  EXPECT_EQ(slurp(prefix("a") + ".climbs.jsonl"), slurp(prefix("b") + ".climbs.jsonl"));
}

TEST_F(CliTest, SingleStartSurveyEqualsClimb) {
  const auto d = descriptor("q", kQubit);
  run_cli({"climb", d, "--out", prefix("climb")});
  const auto one = descriptor("one", std::string(kQubit).replace(std::string(kQubit).find("\"starts\": 3"),
                                                                 11, "\"starts\": 1"));
  run_cli({"survey", one, "--out", prefix("survey")});
  Json a = Json::parse(slurp(prefix("climb") + ".climbs.jsonl"));
  Json b = Json::parse(slurp(prefix("survey") + ".climbs.jsonl"));
  a.erase("descriptor_digest");
  b.erase("descriptor_digest");
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, SurveyFluenceSweep) {
  const std::string text = R"({
    "system": {"family": "quantum", "drift": [[1, 0], [0, -1]], "coupling": [[0, 1], [1, 0]], "horizon": 2},
    "goal": {"gate": [[0, [0, 1]], [[0, 1], 0]]},
    "intervals": 8, "survey": {"starts": 2}, "fluence_sweep": [0.5, 4, null]})";
  EXPECT_EQ(run_cli({"survey", descriptor("s", text), "--out", prefix("s")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("s") + ".survey.json"));
  ASSERT_EQ(j["runs"].size(), 3U);
  EXPECT_EQ(j["runs"][0]["fluence_bound"], 0.5);
  EXPECT_TRUE(j["runs"][2]["fluence_bound"].is_null());
  std::istringstream lines(slurp(prefix("s") + ".climbs.jsonl"));
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  EXPECT_EQ(count, 6);
}

TEST_F(CliTest, SurveyCommutingReportsTraps) {
  EXPECT_EQ(run_cli({"survey", descriptor("c", kCommuting), "--out", prefix("c")}), kObjectiveNotMet);
  const Json j = Json::parse(slurp(prefix("c") + ".survey.json"));
  EXPECT_EQ(j["runs"][0]["converged_fraction"], 0.0);
}

TEST_F(CliTest, SliceSinglePoint) {
  const std::string text = R"({
    "system": {"family": "quantum", "drift": [[1, 0], [0, -1]], "coupling": [[0, 1], [1, 0]], "horizon": 2},
    "goal": {"gate": [[0, 1], [1, 0]]}, "intervals": 4, "slice": {"grid_points": 1}})";
  EXPECT_EQ(run_cli({"slice", descriptor("s", text), "--out", prefix("s")}), kSuccess);
  std::istringstream csv(slurp(prefix("s") + ".slice.csv"));
  std::vector<std::string> data;
  for (std::string line; std::getline(csv, line);) {
    if (!line.empty() && line[0] != '#') data.push_back(line);
  }
  ASSERT_EQ(data.size(), 2U);
  EXPECT_EQ(data[0], "a,b,objective");
  EXPECT_EQ(data[1].rfind("0,0,", 0), 0U);
}

TEST_F(CliTest, MeasureFromFlags) {
  EXPECT_EQ(run_cli({"measure", "--family", "lti", "--dimension", "3", "--trials", "20", "--out",
                     prefix("m")}),
            kSuccess);
  const Json j = Json::parse(slurp(prefix("m") + ".measure.json"));
  EXPECT_EQ(j["fraction_controllable"], 1.0);
  EXPECT_EQ(j["trials"], 20);
}

TEST_F(CliTest, MeasureRejectsZeroTrials) {
  EXPECT_EQ(run_cli({"measure", "--family", "lti", "--dimension", "3", "--trials", "0", "--out",
                     prefix("m")}),
            kUsage);
}

TEST_F(CliTest, LtiVerifyRandomSystem) {
  const auto d = descriptor("v", R"({"system": {"sampler": "lti", "dimension": 4, "seed": 3},
                                     "goal": {"state": [0, 0, 0, 0]}, "lti_verify": {"cases": 3}})");
  EXPECT_EQ(run_cli({"lti-verify", d, "--out", prefix("v")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("v") + ".lti_verify.json"));
  EXPECT_EQ(j["vandermonde"]["status"], "passed");
}

TEST_F(CliTest, LtiVerifyZeroDrift) {
  const auto d = descriptor("z", R"({"system": {"family": "lti", "a": [[0, 0], [0, 0]], "b": [1, 1],
                                     "x0": [0, 0], "horizon": 1}, "goal": {"state": [0, 0]}})");
  EXPECT_EQ(run_cli({"lti-verify", d, "--out", prefix("z")}), kSuccess);
  const Json j = Json::parse(slurp(prefix("z") + ".lti_verify.json"));
  EXPECT_EQ(j["vandermonde"]["status"], "not-applicable");
}

TEST_F(CliTest, EveryOutputCarriesTheDigestAndManifestHashes) {
  const auto d = descriptor("q", kQubit);
  const std::string digest = sha256_hex(slurp(d));
  for (const std::string cmd : {"check", "climb", "survey", "slice"}) {
    run_cli({cmd, d, "--out", prefix(cmd)});
    const Json manifest = Json::parse(slurp(prefix(cmd) + ".manifest.json"));
    EXPECT_EQ(manifest["descriptor_digest"], digest);
    EXPECT_EQ(manifest["command"], cmd);
    ASSERT_FALSE(manifest["outputs"].empty()) << cmd;
    for (const auto& o : manifest["outputs"]) {
      const std::string content = slurp(o["path"].get<std::string>());
      EXPECT_EQ(o["sha256"], sha256_hex(content));
      EXPECT_NE(content.find(digest), std::string::npos) << o["path"];
    }
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}), kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}), kUsage);
  EXPECT_EQ(run_cli({"climb"}), kUsage);
  EXPECT_EQ(run_cli({"climb", descriptor("bad", R"({"system": 1})")}), kUsage);
  EXPECT_EQ(run_cli({"climb", (dir_ / "missing.json").string()}), kUsage);
  EXPECT_EQ(run_cli({"--workers", "0", "climb", descriptor("q", kQubit)}), kUsage);
}

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(run_cli({"--version"}), kSuccess);
  EXPECT_NE(out_.str().find(kToolVersion), std::string::npos);
  EXPECT_EQ(run_cli({"--help"}), kSuccess);
}
