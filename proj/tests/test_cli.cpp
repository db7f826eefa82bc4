#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdc/cli.hpp"
#include "hdc/io.hpp"
#include "hdc/synthdata.hpp"

using namespace hdc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hdc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::string> lines_of(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_F(Cli, GenDataWritesRequestedTask) {
  const Outcome r = call({"gen-data", "--task", "image", "--samples", "64", "--seed", "3", "--out", path("img.hdcd")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Dataset ds = read_dataset(path("img.hdcd"));
  EXPECT_EQ(ds.size(), 64u);
  EXPECT_EQ(ds.feature_count(), 256u);
  EXPECT_EQ(ds.features, gen_image_task(64, Seed{3}).features);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, cli::kUsage);
  EXPECT_EQ(call({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(call({"gen-data", "--task", "audio", "--samples", "64", "--out", path("x")}).code, cli::kUsage);
  EXPECT_EQ(call({"gen-data", "--task", "image", "--samples", "3", "--out", path("x")}).code, cli::kUsage);
  EXPECT_EQ(call({"train", "--data", path("none.hdcd"), "--encoder", "rp", "--dim", "0", "--model-out", path("m"), "--metrics-out", path("t.json")}).code,
            cli::kUsage);
  EXPECT_EQ(call({"train", "--data", path("none.hdcd"), "--encoder", "rbf", "--dim", "10", "--model-out", path("m"), "--metrics-out", path("t.json")}).code,
            cli::kUsage);
}

TEST_F(Cli, MissingDataIsDataError) {
  const Outcome r = call({"train", "--data", path("none.hdcd"), "--encoder", "rp", "--dim", "100", "--model-out", path("m"),
                          "--metrics-out", path("t.json")});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, TrainThenEvalRoundTrip) {
  ASSERT_EQ(call({"gen-data", "--task", "image", "--samples", "160", "--seed", "1", "--out", path("d.hdcd")}).code, 0);
  const Outcome t = call({"train", "--data", path("d.hdcd"), "--encoder", "rp", "--dim", "200", "--sigma", "0.5",
                          "--epochs", "5", "--model-out", path("m.hdcm"), "--metrics-out", path("train.json")});
  ASSERT_EQ(t.code, cli::kOk) << t.err;
  const auto train_doc = nlohmann::json::parse(lines_of(path("train.json")).at(0));
  EXPECT_GE(train_doc["accuracy"].get<double>(), 0.0);
  EXPECT_EQ(train_doc["config"]["dim"], 200);
  EXPECT_GT(train_doc["energy_j"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("m.hdcm")));

  const Outcome e = call({"eval", "--model", path("m.hdcm"), "--data", path("d.hdcd"), "--metrics-out", path("eval.json")});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  const auto eval_doc = nlohmann::json::parse(lines_of(path("eval.json")).at(0));
  EXPECT_GE(eval_doc["accuracy"].get<double>(), 0.85);
  EXPECT_EQ(eval_doc["ops"]["infer"]["mul_add"], 160u * (256 * 200 + 8 * 200));

  ASSERT_EQ(call({"gen-data", "--task", "signal", "--samples", "30", "--out", path("s.hdcd")}).code, 0);
  const Outcome bad = call({"eval", "--model", path("m.hdcm"), "--data", path("s.hdcd"), "--metrics-out", path("e.json")});
  EXPECT_EQ(bad.code, cli::kDataError);
  EXPECT_NE(bad.err.find("J=900"), std::string::npos) << bad.err;
}

TEST_F(Cli, CorruptModelIsDataError) {
  std::ofstream(path("bad.hdcm")) << "not a model";
  ASSERT_EQ(call({"gen-data", "--task", "image", "--samples", "32", "--out", path("d.hdcd")}).code, 0);
  EXPECT_EQ(call({"eval", "--model", path("bad.hdcm"), "--data", path("d.hdcd"), "--metrics-out", path("e.json")}).code, cli::kDataError);
}

TEST_F(Cli, BenchCountsMatch) {
  const Outcome r = call({"bench", "--dims", "100,400", "--task", "image", "--samples", "64", "--out", path("b.csv")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = lines_of(path("b.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "dim,kind,t_infer_ms,t_train_s,energy_j,ops_measured,ops_analytic,match");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NE(rows[i].find(",PASS"), std::string::npos) << rows[i];
}

TEST_F(Cli, TuneWritesLogAndSummary) {
  ASSERT_EQ(call({"gen-data", "--task", "image", "--samples", "64", "--out", path("d.hdcd")}).code, 0);
  const Outcome r = call({"tune", "--data", path("d.hdcd"), "--episodes", "3", "--acc-min", "0.1", "--infer-max-ms",
                          "1000", "--out", path("t.jsonl")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto log = lines_of(path("t.jsonl"));
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(nlohmann::json::parse(log[2])["index"], 2);

  const Outcome resumed = call({"tune", "--data", path("d.hdcd"), "--episodes", "4", "--acc-min", "0.1", "--infer-max-ms",
                                "1000", "--out", path("t.jsonl"), "--resume"});
  ASSERT_EQ(resumed.code, cli::kOk) << resumed.err;
  EXPECT_EQ(lines_of(path("t.jsonl")).size(), 4u);

  const Outcome none =
      call({"tune", "--data", path("d.hdcd"), "--episodes", "2", "--acc-min", "1.01", "--out", path("n.jsonl")});
  EXPECT_EQ(none.code, cli::kInfeasible);
  std::istringstream printed(none.out);
  std::string last;
  for (std::string line; std::getline(printed, line);) last = line;
  const auto summary = nlohmann::json::parse(last);
  EXPECT_EQ(summary["feasible"], 0);
  EXPECT_TRUE(summary["front"].empty());
}
