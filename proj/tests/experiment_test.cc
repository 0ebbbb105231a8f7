/*
 * Copyright 2026 The sisa_rl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sisa_rl/experiment.h"

#include <filesystem>
#include <fstream>
#include <gtest/gtest.h>
#include <sstream>

#include "oracles.h"
#include "report_util.h"

namespace sisa_rl {
namespace {

namespace fs = std::filesystem;

ExperimentConfig TinyConfig() {
  ExperimentConfig c;
  c.synth.n_per_class = 40;
  c.synth.dim = 6;
  c.synth.noise_dims = 2;
  c.synth.class_separation = 3.0;
  c.k_folds = 3;
  c.num_shards = 2;
  c.forget_fraction = 0.1;
  c.agent.total_steps = 150;
  c.agent.batch_size = 8;
  c.agent.epsilon_decay_steps = 100;
  c.agent.target_update_interval = 25;
  c.seed = 7;
  return c;
}

const ExperimentReport& TinyReport() {
  static const ExperimentReport* r =
      new ExperimentReport(RunExperiment(TinyConfig()));
  return *r;
}

TEST(ConfigTest, DefaultsValidate) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.k_folds, 5);
  EXPECT_EQ(c.num_shards, 5);
  EXPECT_EQ(c.forget_fraction, 0.05);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.threads, 1);
  EXPECT_EQ(c.algorithms.size(), 2u);
}

TEST(ConfigTest, ParsesKeysCommentsAndBlankLines) {
  const ExperimentConfig c = ParseConfig(
      "# comment\n"
      "\n"
      "k_folds = 4   # trailing\n"
      "algorithms = ddqn\n"
      "gamma=0.25\n"
      "synth_separation = 2.5\n"
      "forget_fraction = 0\n"
      "seed = 9\n");
  EXPECT_EQ(c.k_folds, 4);
  EXPECT_EQ(c.algorithms, std::vector<Algorithm>{Algorithm::kDdqn});
  EXPECT_EQ(c.agent.gamma, 0.25);
  EXPECT_EQ(c.synth.class_separation, 2.5);
  EXPECT_EQ(c.forget_fraction, 0.0);
  EXPECT_EQ(c.seed, 9u);
}

TEST(ConfigTest, RejectsBadInput) {
  EXPECT_THROW(ParseConfig("no_such_key = 1\n"), ConfigError);
  EXPECT_THROW(ParseConfig("k_folds\n"), ConfigError);
  EXPECT_THROW(ParseConfig("k_folds = five\n"), ConfigError);
  EXPECT_THROW(ParseConfig("k_folds = 1\n").Validate(), ConfigError);
  EXPECT_THROW(ParseConfig("forget_fraction = 1\n").Validate(), ConfigError);
  EXPECT_THROW(ParseConfig("unlearn_shard = 5\n").Validate(), ConfigError);
  EXPECT_THROW(ParseConfig("gamma = 1.5\n").Validate(), ConfigError);
  EXPECT_THROW(ParseConfig("algorithms = PPO\n"), ConfigError);
  EXPECT_THROW(LoadConfigFile("/nonexistent/sisa_rl.cfg"), ConfigError);
}

TEST(ConfigTest, FormatParseRoundTrip) {
  ExperimentConfig c = TinyConfig();
  c.agent.learning_rate = 0.1 + 0.2;  // not exactly representable as typed
  c.output_dir = "out dir";
  const std::string text = FormatConfig(c);
  const ExperimentConfig back = ParseConfig(text);
  EXPECT_EQ(FormatConfig(back), text);
  EXPECT_EQ(back.agent.learning_rate, c.agent.learning_rate);
  EXPECT_EQ(ToConfigEntries(FromConfigEntries(ToConfigEntries(c))),
            ToConfigEntries(c));
  ASSERT_EQ(ToConfigEntries(c).size(), ConfigKeys().size());
  for (size_t i = 0; i < ConfigKeys().size(); ++i) {
    EXPECT_EQ(ToConfigEntries(c)[i].first, ConfigKeys()[i]);
  }
}

TEST(ExperimentTest, InvariantsHold) {
  const ExperimentReport& r = TinyReport();
  ASSERT_EQ(r.results.size(), 2u);
  const auto bad = testing_util::CheckReportInvariants(r, 80, 3, 2, 0.1);
  for (const auto& b : bad) ADD_FAILURE() << b;
  EXPECT_EQ(r.tool_version, ToolVersion());
  EXPECT_EQ(r.config, ToConfigEntries(TinyConfig()));
}

TEST(ExperimentTest, SummaryMatchesIndependentAggregation) {
  for (const AlgorithmResult& res : TinyReport().results) {
    double worst = 1.0;
    double delta = 0.0;
    for (const FoldRecord& f : res.folds) {
      worst = std::min(worst, f.baseline_f1);
      delta += f.delta_f1 / res.folds.size();
    }
    EXPECT_EQ(res.summary.worst_fold_f1, worst);
    EXPECT_NEAR(res.summary.mean_delta_f1, delta, 1e-15);
    EXPECT_NEAR(res.summary.oof_auc,
                oracle::BruteForceAuc(res.oof.qscores, res.oof.labels), 1e-12);
    EXPECT_EQ(res.summary.oof_confusion,
              oracle::CountConfusion(res.oof.labels, res.oof.predictions));
    EXPECT_TRUE(Summarize(res.summary.algorithm, res.folds, res.oof) ==
                res.summary);
  }
}

TEST(ExperimentTest, MetricsAreReproducible) {
  const ExperimentReport again = RunExperiment(TinyConfig());
  EXPECT_TRUE(testing_util::StripTimings(again) ==
              testing_util::StripTimings(TinyReport()));
  ExperimentConfig other = TinyConfig();
  other.seed = 8;
  const ExperimentReport changed = RunExperiment(other);
  EXPECT_FALSE(testing_util::StripTimings(changed) ==
               testing_util::StripTimings(TinyReport()));
  EXPECT_TRUE(
      testing_util::CheckReportInvariants(changed, 80, 3, 2, 0.1).empty());
}

TEST(ExperimentTest, EchoedConfigReplaysRun) {
  const ExperimentConfig replay = FromConfigEntries(TinyReport().config);
  const ExperimentReport again = RunExperiment(replay);
  EXPECT_TRUE(testing_util::StripTimings(again) ==
              testing_util::StripTimings(TinyReport()));
}

TEST(ExperimentTest, ThreadsDoNotChangeMetrics) {
  ExperimentConfig c = TinyConfig();
  c.threads = 2;
  c.algorithms = {Algorithm::kDqn};
  ExperimentReport r = RunExperiment(c);
  ExperimentReport base = TinyReport();
  base.results.resize(1);
  r.config = base.config;
  EXPECT_TRUE(testing_util::StripTimings(r) ==
              testing_util::StripTimings(base));
}

TEST(ExperimentTest, SingleShardWithoutForgettingHasZeroDelta) {
  ExperimentConfig c = TinyConfig();
  c.num_shards = 1;
  c.forget_fraction = 0.0;
  c.algorithms = {Algorithm::kDdqn};
  const ExperimentReport r = RunExperiment(c);
  for (const FoldRecord& f : r.results[0].folds) {
    EXPECT_EQ(f.delta_f1, 0.0);
    EXPECT_EQ(f.forgotten_count, 0u);
    EXPECT_EQ(f.sisa_f1_before, f.sisa_f1_after);
  }
}

class ReportFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "sisa_rl_report_test";
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string FirstLine(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::string line;
    std::getline(in, line);
    return line;
  }

  fs::path dir_;
};

TEST_F(ReportFileTest, EmitLoadRoundTrip) {
  EmitReport(TinyReport(), dir_);
  const ExperimentReport back = LoadReport(dir_);
  EXPECT_TRUE(back == TinyReport());
  EXPECT_TRUE(LoadReport(dir_ / "report.jsonl") == TinyReport());
}

TEST_F(ReportFileTest, TablesHaveExpectedHeaders) {
  EmitReport(TinyReport(), dir_);
  EXPECT_EQ(FirstLine("table3.csv"),
            "model,id_f1_mean,id_f1_std,worst_fold_f1,oof_auc,train_time_s,"
            "inference_time_s");
  EXPECT_EQ(FirstLine("table4.csv"), "model,f1_before,f1_after,delta_f1");
  EXPECT_EQ(FirstLine("table5.csv"),
            "model,baseline_train_s,sisa_full_train_s,one_shard_unlearn_s");
  EXPECT_EQ(FirstLine("roc_points.csv"), "model,fpr,tpr");
  EXPECT_EQ(FirstLine("confusion.csv"), "model,tn,fp,fn,tp");
  EXPECT_EQ(FirstLine("runtime_per_fold.csv"),
            "model,fold,baseline_train_s,sisa_full_train_s,"
            "one_shard_unlearn_s,baseline_inference_s");
  std::ifstream in(dir_ / "table3.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST_F(ReportFileTest, RejectsTamperedAggregate) {
  EmitReport(TinyReport(), dir_);
  std::ifstream in(dir_ / "report.jsonl");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const std::string key = "\"f1_mean\":";
  const size_t at = text.find(key);
  ASSERT_NE(at, std::string::npos);
  const size_t end = text.find(',', at);
  text.replace(at, end - at, key + "0.123");
  std::ofstream(dir_ / "report.jsonl") << text;
  EXPECT_ANY_THROW(LoadReport(dir_));
}

TEST_F(ReportFileTest, PrintTablesMentionsBothModels) {
  std::ostringstream out;
  PrintTables(TinyReport(), out);
  EXPECT_NE(out.str().find("DQN"), std::string::npos);
  EXPECT_NE(out.str().find("DDQN"), std::string::npos);
}

}  // namespace
}  // namespace sisa_rl
