#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ratio_rmt/cli.hpp"

using namespace ratio_rmt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(std::move(args), out, err, {RATIO_RMT_FIXTURES});
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ratio_rmt_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"simulate", "--beta", "3", "--k", "0.5", "--n", "10"}).code, cli::kUsage);
  EXPECT_EQ(run({"simulate", "--beta", "1", "--k", "1.5", "--n", "10", "--format", "xml"}).code, cli::kUsage);
  EXPECT_EQ(run({"simulate", "--beta", "1", "--k", "1.5", "--n", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"simulate", "--beta", "1", "--k", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"pdf", "--beta", "1", "--k", "1.5"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, SimulateIsByteDeterministic) {
  const auto a = run({"simulate", "--beta", "1", "--k", "1", "--n", "1000", "--seed", "7"});
  const auto b = run({"simulate", "--beta", "1", "--k", "1", "--n", "1000", "--seed", "7", "--threads", "4"});
  ASSERT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  EXPECT_EQ(read_ratio_file(in).sample.size(), 1000u);
  const auto c = run({"simulate", "--beta", "1", "--k", "1", "--n", "1000", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, SimulateBeyondAnalyticRange) {
  const auto r = run({"simulate", "--beta", "1", "--k", "1.2", "--n", "50", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "ratios");
  EXPECT_EQ(j["outside_fit_regime"], "true");
  EXPECT_EQ(j["ratios"].size(), 50u);
  EXPECT_NE(r.err.find("outside"), std::string::npos);
}

TEST_F(CliTest, SimulatedSampleMatchesDecoupledLaw) {
  const auto out = path("s.csv");
  ASSERT_EQ(run({"simulate", "--beta", "2", "--k", "0", "--n", "100000", "--seed", "3", "--out", out}).code, cli::kOk);
  std::ifstream in(out);
  const auto f = read_ratio_file(in);
  const DensityCache c(SymmetryClass::Unitary, 0.0);
  EXPECT_LT(ks_statistic(f.sample.ratios, c), 1.63 / std::sqrt(1e5));
}

TEST_F(CliTest, PdfTable) {
  auto r = run({"pdf", "--beta", "2", "--k", "0", "--r-min", "0", "--r-max", "2", "--points", "3"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("\nr,pdf\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n1,0.34377467707849"), std::string::npos);
  EXPECT_NE(r.out.find("# normalization: "), std::string::npos);

  r = run({"pdf", "--beta", "1", "--k", "1", "--r-min", "1", "--r-max", "1", "--points", "1", "--format", "json"});
  ASSERT_EQ(r.code, cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "pdf_table");
  ASSERT_EQ(j["pdf"].size(), 1u);
  EXPECT_NEAR(j["pdf"][0].get<double>(), 0.433013, 5e-7);
  EXPECT_NEAR(j["normalization"].get<double>(), 1.0, 1e-6);

  EXPECT_EQ(run({"pdf", "--beta", "2", "--k", "0.5", "--points", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"pdf", "--beta", "2", "--k", "0.5", "--grid", "log"}).code, cli::kUsage);
}

TEST_F(CliTest, FitRecoversCoupling) {
  const auto data = path("r.csv");
  ASSERT_EQ(run({"simulate", "--beta", "2", "--k", "0.5", "--n", "50000", "--seed", "2024", "--out", data}).code, cli::kOk);
  const auto r = run({"fit", data, "--beta", "2", "--bootstrap", "50"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "fit_result");
  EXPECT_GE(j["k_hat"].get<double>(), 0.47);
  EXPECT_LE(j["k_hat"].get<double>(), 0.53);
  EXPECT_LE(j["ci_low"].get<double>(), j["k_hat"].get<double>());
  EXPECT_EQ(j["small_sample_warning"], false);
}

TEST_F(CliTest, FitSmallAndEmptyInputs) {
  const auto small = path("small.csv");
  ASSERT_EQ(run({"simulate", "--beta", "2", "--k", "0.5", "--n", "10", "--out", small}).code, cli::kOk);
  const auto r = run({"fit", small, "--beta", "2", "--bootstrap", "20", "--format", "csv"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("small_sample_warning,true"), std::string::npos);
  EXPECT_NE(r.err.find("warning"), std::string::npos);

  EXPECT_EQ(run({"fit", write("empty.csv", ""), "--beta", "2"}).code, cli::kUsage);
  EXPECT_EQ(run({"fit", path("missing.csv"), "--beta", "2"}).code, cli::kUsage);
  EXPECT_EQ(run({"fit", write("bad.csv", "1.0\nfoo\n"), "--beta", "2"}).code, cli::kUsage);
}

TEST_F(CliTest, IngestLevels) {
  const auto lv = write("l.csv", "energy,localized\n0,0\n1,1\n3,0\n4,0\n");
  auto r = run({"ingest", lv});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(r.out);
  const auto f = read_ratio_file(in);
  EXPECT_EQ(f.sample.ratios, (std::vector<double>{2.0, 0.5}));
  EXPECT_EQ(f.header.at("mode"), "all-adjacent");

  const auto ent = write("e.csv", "energy,entropy\n0,6\n1,5.0\n3,6.2\n4,6.1\n");
  r = run({"ingest", ent, "--entropy-threshold", "5.5", "--mode", "centered"});
  ASSERT_EQ(r.code, cli::kOk);
  std::istringstream in2(r.out);
  const auto g = read_ratio_file(in2);
  EXPECT_EQ(g.sample.ratios, (std::vector<double>{2.0}));
  EXPECT_EQ(g.header.at("entropy_threshold"), "5.5");

  r = run({"ingest", ent, "--entropy-threshold", "1.0"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::istringstream in3(r.out);
  EXPECT_TRUE(read_ratio_file(in3).sample.empty());

  EXPECT_EQ(run({"ingest", ent}).code, cli::kUsage);
  EXPECT_EQ(run({"ingest", write("x.csv", "energy\n1\n1\n")}).code, cli::kUsage);
}

TEST_F(CliTest, ValidateQuickPasses) {
  const auto r = run({"validate", "--suite", "quick"});
  EXPECT_EQ(r.code, cli::kOk) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["kind"], "validation_report");
  EXPECT_EQ(j["passed"], true);
}

TEST_F(CliTest, ValidateDetectsTamperedFixture) {
  std::string text = slurp(RATIO_RMT_FIXTURES);
  const std::string needle = "0.54132397793982867";
  const auto pos = text.find(needle);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, needle.size(), "0.54232397793982867");
  const auto r = run({"validate", "--fixtures", write("t.csv", text), "--format", "csv"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_NE(r.out.find("fixtures_beta2_closed_form,false"), std::string::npos);

  EXPECT_EQ(run({"validate", "--fixtures", write("g.csv", "garbage\n")}).code, cli::kFailure);
  EXPECT_EQ(run({"validate", "--fixtures", path("none.csv")}).code, cli::kUsage);
}
