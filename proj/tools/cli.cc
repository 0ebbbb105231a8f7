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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sisa_rl/byte_io.h"
#include "sisa_rl/data.h"
#include "sisa_rl/experiment.h"
#include "sisa_rl/rl_agent.h"
#include "sisa_rl/sisa.h"

namespace sisa_rl::cli {
namespace {

std::vector<size_t> ParseIndexList(const std::string& text) {
  std::vector<size_t> out;
  size_t start = 0;
  while (start < text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (!item.empty()) {
      size_t v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw std::invalid_argument("bad index '" + item + "'");
      }
      out.push_back(v);
    }
    start = comma + 1;
  }
  return out;
}

std::string DashAlias(const std::string& key) {
  std::string dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  return dashed;
}

struct RunArgs {
  std::string config_file;
  std::map<std::string, std::string> overrides;
  bool quiet = false;
};

int DoRun(const RunArgs& args, std::ostream& out) {
  ExperimentConfig config = args.config_file.empty()
                                ? ExperimentConfig{}
                                : LoadConfigFile(args.config_file);
  for (const std::string& key : ConfigKeys()) {
    if (auto it = args.overrides.find(key); it != args.overrides.end()) {
      SetConfigValue(config, key, it->second);
    }
  }
  config.Validate();
  const ExperimentReport report =
      RunExperiment(config, args.quiet ? nullptr : &out);
  EmitReport(report, config.output_dir);
  out << "\n";
  PrintTables(report, out);
  out << "\nwrote " << config.output_dir << "/report.jsonl and tables\n";
  return 0;
}

struct SynthArgs {
  SynthSpec spec;
  std::string out;
};

int DoSynth(const SynthArgs& args, std::ostream& out) {
  const Dataset ds = GenerateSynthetic(args.spec);
  SaveDataset(ds, args.out);
  out << "wrote " << ds.size() << " rows x " << ds.dim() << " features to "
      << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string out;
  int shards = 5;
  std::string algorithm = "DQN";
  uint64_t seed = 0;
  uint64_t partition_seed = 0;
  int threads = 1;
  AgentConfig agent;
};

int DoTrain(TrainArgs args, std::ostream& out) {
  const Dataset ds = LoadDataset(args.data);
  args.agent.algorithm = ParseAlgorithm(args.algorithm);
  args.agent.seed = args.seed;
  const ShardAssignment assignment =
      Partition(ds.labels, args.shards, args.partition_seed);
  const ShardEnsemble ens = TrainEnsemble(ds.features, ds.labels, assignment,
                                          args.agent, args.threads);
  SaveEnsemble(ens, args.out);
  out << "trained " << args.shards << " shard agents ("
      << AlgorithmName(args.agent.algorithm) << ") in "
      << ens.training_seconds << " s; ensemble saved to " << args.out << "\n";
  return 0;
}

struct UnlearnArgs {
  std::string ensemble;
  std::string data;
  std::string test;
  std::string out;
  int shard = 0;
  double forget_fraction = 0.05;
  std::optional<std::string> forget_indices;
  uint64_t forget_seed = 0;
};

int DoUnlearn(const UnlearnArgs& args, std::ostream& out) {
  const ShardEnsemble ens = LoadEnsemble(args.ensemble);
  const Dataset train = LoadDataset(args.data);
  const Dataset test = LoadDataset(args.test);
  if (args.shard < 0 || args.shard >= ens.assignment.num_shards) {
    throw std::invalid_argument("--shard out of range");
  }

  UnlearnRequest request;
  request.shard_index = args.shard;
  if (args.forget_indices) {
    request.forget_indices = ParseIndexList(*args.forget_indices);
  } else if (args.forget_fraction > 0.0) {
    request.forget_indices =
        SelectForgetSet(ens.assignment.shards[args.shard],
                        args.forget_fraction, args.forget_seed);
  }
  const UnlearnOutcome outcome = Unlearn(ens, request, train.features,
                                         train.labels, test.features,
                                         test.labels);
  SaveEnsemble(outcome.ensemble, args.out);
  const nlohmann::json summary = {
      {"shard", args.shard},
      {"forgotten_count", outcome.forgotten_count},
      {"forget_indices", request.forget_indices},
      {"retrain_seconds", outcome.retrain_seconds},
      {"f1_before", outcome.f1_before},
      {"f1_after", outcome.f1_after},
      {"delta_f1", outcome.delta_f1},
  };
  WriteFileBytes(std::filesystem::path(args.out) / "outcome.json",
                 summary.dump(2) + "\n");
  out << "forgot " << outcome.forgotten_count << " samples from shard "
      << args.shard << "; retrained in " << outcome.retrain_seconds
      << " s\nF1 before " << outcome.f1_before << ", after "
      << outcome.f1_after << ", delta " << outcome.delta_f1 << "\n";
  return 0;
}

struct ReportArgs {
  std::string input;
  std::string out;
};

int DoReport(const ReportArgs& args, std::ostream& out) {
  const ExperimentReport report = LoadReport(args.input);
  if (!args.out.empty()) WriteTables(report, args.out);
  PrintTables(report, out);
  return 0;
}

void AddAgentOptions(CLI::App* cmd, AgentConfig& agent) {
  cmd->add_option("--gamma", agent.gamma, "Discount factor");
  cmd->add_option("--learning-rate", agent.learning_rate, "Adam step size");
  cmd->add_option("--batch-size", agent.batch_size, "Mini-batch size");
  cmd->add_option("--total-steps", agent.total_steps, "Training steps per agent");
  cmd->add_option("--target-update-interval", agent.target_update_interval,
                  "Steps between target-network syncs");
  cmd->add_option("--epsilon-start", agent.epsilon_start);
  cmd->add_option("--epsilon-end", agent.epsilon_end);
  cmd->add_option("--epsilon-decay-steps", agent.epsilon_decay_steps);
  cmd->add_option("--buffer-capacity", agent.buffer_capacity);
}

}  // namespace

int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"SISA-sharded DQN/DDQN training and exact unlearning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ToolVersion()));

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Cross-validated baseline + SISA unlearning experiment");
  run->add_option("--config", run_args.config_file,
                  "Flat key = value config file")
      ->check(CLI::ExistingFile);
  run->add_flag("--quiet", run_args.quiet, "No per-fold progress lines");
  for (const std::string& key : ConfigKeys()) {
    std::string names = "--" + key;
    if (DashAlias(key) != key) names += ",--" + DashAlias(key);
    run->add_option_function<std::string>(
        names,
        [&run_args, key](const std::string& v) { run_args.overrides[key] = v; },
        "Override config key '" + key + "'");
  }

  SynthArgs synth_args;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic labeled dataset (CSV)");
  synth->add_option("--n-per-class", synth_args.spec.n_per_class,
                    "Samples per class");
  synth->add_option("--dim", synth_args.spec.dim, "Feature dimension");
  synth->add_option("--separation", synth_args.spec.class_separation,
                    "Per-dimension class mean gap, in std units");
  synth->add_option("--noise-dims", synth_args.spec.noise_dims,
                    "Uninformative features");
  synth->add_option("--seed", synth_args.spec.seed, "Generator seed");
  synth->add_option("--out", synth_args.out, "Output CSV")->required();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Train a SISA ensemble on a CSV dataset and save it");
  train->add_option("--data", train_args.data, "Training CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--out", train_args.out, "Ensemble directory")->required();
  train->add_option("--shards", train_args.shards, "Number of shards");
  train->add_option("--algorithm", train_args.algorithm, "DQN or DDQN");
  train->add_option("--seed", train_args.seed, "Base agent seed");
  train->add_option("--partition-seed", train_args.partition_seed,
                    "Shard assignment seed");
  train->add_option("--threads", train_args.threads, "Concurrent shard workers");
  AddAgentOptions(train, train_args.agent);

  UnlearnArgs unlearn_args;
  CLI::App* unlearn = app.add_subcommand(
      "unlearn", "Forget samples from one shard of a saved ensemble");
  unlearn->add_option("--ensemble", unlearn_args.ensemble, "Ensemble directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  unlearn->add_option("--data", unlearn_args.data,
                      "Training CSV the ensemble was built from")
      ->required()
      ->check(CLI::ExistingFile);
  unlearn->add_option("--test", unlearn_args.test, "Evaluation CSV")
      ->required()
      ->check(CLI::ExistingFile);
  unlearn->add_option("--out", unlearn_args.out, "Updated ensemble directory")
      ->required();
  unlearn->add_option("--shard", unlearn_args.shard, "Shard to forget from");
  unlearn->add_option("--forget-fraction", unlearn_args.forget_fraction,
                      "Fraction of the shard to forget (0 = nothing)");
  unlearn->add_option("--forget-indices", unlearn_args.forget_indices,
                      "Comma-separated sample indices (overrides fraction)");
  unlearn->add_option("--forget-seed", unlearn_args.forget_seed,
                      "Seed for the forget-set draw");

  ReportArgs report_args;
  CLI::App* report =
      app.add_subcommand("report", "Re-render tables from a stored report");
  report->add_option("--input", report_args.input,
                     "report.jsonl or the directory holding it")
      ->required()
      ->check(CLI::ExistingPath);
  report->add_option("--out", report_args.out, "Write CSV tables here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (run->parsed()) return DoRun(run_args, out);
    if (synth->parsed()) return DoSynth(synth_args, out);
    if (train->parsed()) return DoTrain(train_args, out);
    if (unlearn->parsed()) return DoUnlearn(unlearn_args, out);
    if (report->parsed()) return DoReport(report_args, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sisa_rl::cli
