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

#include "sisa_rl/sisa.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "json.hpp"
#include "json_util.h"
#include "sisa_rl/byte_io.h"
#include "sisa_rl/data.h"
#include "sisa_rl/metrics.h"

namespace sisa_rl {
namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;
constexpr const char* kManifestName = "manifest.json";

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string CheckpointName(int shard) {
  return "shard_" + std::to_string(shard) + ".ckpt";
}

}  // namespace

ShardAssignment Partition(std::span<const int> labels, int num_shards,
                          uint64_t seed) {
  if (num_shards <= 0) {
    throw std::invalid_argument("number of shards must be positive, got " +
                                std::to_string(num_shards));
  }
  ShardAssignment a;
  a.num_shards = num_shards;
  a.shards = StratifiedDeal(labels, num_shards, seed);
  a.shard_of.assign(labels.size(), kUnassigned);
  for (int m = 0; m < num_shards; ++m) {
    for (size_t i : a.shards[m]) a.shard_of[i] = m;
  }
  return a;
}

uint64_t DeriveShardSeed(uint64_t base_seed, int shard) {
  return MixSeed(base_seed, static_cast<uint64_t>(shard));
}

TrainedAgent TrainShard(const Eigen::MatrixXd& features,
                        std::span<const int> labels,
                        std::span<const size_t> shard_rows,
                        const AgentConfig& base_config, uint64_t shard_seed) {
  AgentConfig config = base_config;
  config.seed = shard_seed;
  const Eigen::MatrixXd rows = SelectRows(features, shard_rows);
  const std::vector<int> row_labels = SelectLabels(labels, shard_rows);
  return TrainAgent(rows, row_labels, config);
}

ShardEnsemble TrainEnsemble(const Eigen::MatrixXd& features,
                            std::span<const int> labels,
                            const ShardAssignment& assignment,
                            const AgentConfig& base_config, int threads) {
  const int m_count = assignment.num_shards;
  if (m_count < 1 || static_cast<int>(assignment.shards.size()) != m_count) {
    throw std::invalid_argument("TrainEnsemble: malformed shard assignment");
  }
  if (assignment.num_samples() != static_cast<size_t>(features.rows()) ||
      labels.size() != static_cast<size_t>(features.rows())) {
    throw std::invalid_argument(
        "TrainEnsemble: assignment does not match the data size");
  }

  ShardEnsemble ens;
  ens.assignment = assignment;
  ens.base_config = base_config;
  ens.models.resize(m_count);
  for (int m = 0; m < m_count; ++m) {
    ens.shard_seeds.push_back(DeriveShardSeed(base_config.seed, m));
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::exception_ptr> errors(m_count);
  auto train_one = [&](int m) {
    try {
      ens.models[m] = TrainShard(features, labels, assignment.shards[m],
                                 base_config, ens.shard_seeds[m]);
    } catch (...) {
      errors[m] = std::current_exception();
    }
  };

  const int workers = std::clamp(threads, 1, m_count);
  if (workers == 1) {
    for (int m = 0; m < m_count; ++m) train_one(m);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int m = next++; m < m_count; m = next++) train_one(m);
      });
    }
  }
  ens.training_seconds = SecondsSince(start);

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ens;
}

std::vector<int> ShardPredict(const ShardEnsemble& ensemble,
                              const Eigen::VectorXd& state) {
  std::vector<int> votes;
  votes.reserve(ensemble.models.size());
  for (const TrainedAgent& agent : ensemble.models) {
    votes.push_back(Predict(agent.network, state));
  }
  return votes;
}

int MajorityVote(std::span<const int> votes) {
  if (votes.empty()) throw std::invalid_argument("MajorityVote: no votes");
  int64_t positive = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) throw std::invalid_argument("votes must be 0 or 1");
    positive += v;
  }
  // mean >= 0.5  <=>  2 * positive >= M, without rounding.
  return 2 * positive >= static_cast<int64_t>(votes.size()) ? 1 : 0;
}

std::vector<int> EnsemblePredict(const ShardEnsemble& ensemble,
                                 const Eigen::MatrixXd& features) {
  std::vector<int> out(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out[i] = MajorityVote(ShardPredict(ensemble, features.row(i).transpose()));
  }
  return out;
}

std::vector<size_t> SelectForgetSet(std::span<const size_t> shard_indices,
                                    double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("forget fraction must be in (0, 1)");
  }
  const double raw = fraction * static_cast<double>(shard_indices.size());
  // Guard against products like 0.07 * 100 = 7.000000000000001.
  const size_t count = static_cast<size_t>(std::ceil(raw - 1e-9));
  if (shard_indices.size() < count + 2) {
    throw std::invalid_argument(
        "forgetting " + std::to_string(count) + " of " +
        std::to_string(shard_indices.size()) +
        " samples would leave fewer than 2 rows in the shard");
  }
  std::vector<size_t> pool(shard_indices.begin(), shard_indices.end());
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + static_cast<size_t>(rng.Below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

UnlearnOutcome Unlearn(const ShardEnsemble& ensemble,
                       const UnlearnRequest& request,
                       const Eigen::MatrixXd& features,
                       std::span<const int> labels,
                       const Eigen::MatrixXd& test_features,
                       std::span<const int> test_labels) {
  const ShardAssignment& a = ensemble.assignment;
  const int m = request.shard_index;
  if (m < 0 || m >= a.num_shards) {
    throw std::invalid_argument("unlearn: shard index " + std::to_string(m) +
                                " out of range");
  }
  if (a.num_samples() != static_cast<size_t>(features.rows())) {
    throw std::invalid_argument("unlearn: data does not match the ensemble");
  }
  std::vector<size_t> forget = request.forget_indices;
  std::sort(forget.begin(), forget.end());
  if (std::adjacent_find(forget.begin(), forget.end()) != forget.end()) {
    throw std::invalid_argument("unlearn: duplicate forget index");
  }
  for (size_t i : forget) {
    if (i >= a.num_samples() || a.shard_of[i] != m) {
      throw std::invalid_argument("unlearn: sample " + std::to_string(i) +
                                  " is not in shard " + std::to_string(m));
    }
  }
  std::vector<size_t> retained;
  std::set_difference(a.shards[m].begin(), a.shards[m].end(), forget.begin(),
                      forget.end(), std::back_inserter(retained));
  if (retained.size() < 2) {
    throw std::invalid_argument(
        "unlearn: shard would keep fewer than 2 samples");
  }

  UnlearnOutcome out;
  out.f1_before =
      F1(Confusion(test_labels, EnsemblePredict(ensemble, test_features)));

  out.ensemble = ensemble;
  ShardAssignment& na = out.ensemble.assignment;
  na.shards[m] = retained;
  for (size_t i : forget) na.shard_of[i] = kUnassigned;
  std::vector<size_t> merged;
  std::merge(ensemble.forgotten.begin(), ensemble.forgotten.end(),
             forget.begin(), forget.end(), std::back_inserter(merged));
  out.ensemble.forgotten = std::move(merged);

  const auto start = std::chrono::steady_clock::now();
  out.ensemble.models[m] = TrainShard(features, labels, retained,
                                      ensemble.base_config,
                                      ensemble.shard_seeds[m]);
  out.retrain_seconds = SecondsSince(start);

  out.f1_after = F1(
      Confusion(test_labels, EnsemblePredict(out.ensemble, test_features)));
  out.delta_f1 = DeltaF1(out.f1_before, out.f1_after);
  out.forgotten_count = forget.size();
  return out;
}

void SaveEnsemble(const ShardEnsemble& ensemble,
                  const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  json manifest;
  manifest["format"] = "sisa_rl.ensemble";
  manifest["version"] = kManifestVersion;
  manifest["num_shards"] = ensemble.assignment.num_shards;
  manifest["num_samples"] = ensemble.assignment.num_samples();
  manifest["base_config"] = internal::AgentConfigToJson(ensemble.base_config);
  manifest["training_seconds"] = ensemble.training_seconds;
  manifest["forgotten"] = ensemble.forgotten;
  json shards = json::array();
  for (int m = 0; m < ensemble.assignment.num_shards; ++m) {
    const std::string bytes = SerializeAgent(ensemble.models[m]);
    WriteFileBytes(directory / CheckpointName(m), bytes);
    shards.push_back({
        {"index", m},
        {"seed", ensemble.shard_seeds[m]},
        {"rows", ensemble.assignment.shards[m]},
        {"checkpoint", CheckpointName(m)},
        {"fnv1a64", internal::Hex64(Fnv1a64(bytes))},
        {"training_seconds", ensemble.models[m].training_seconds},
    });
  }
  manifest["shards"] = std::move(shards);
  WriteFileBytes(directory / kManifestName, manifest.dump(2) + "\n");
}

ShardEnsemble LoadEnsemble(const std::filesystem::path& directory) {
  json manifest;
  try {
    manifest = json::parse(ReadFileBytes(directory / kManifestName));
  } catch (const json::exception& e) {
    throw FormatError("bad ensemble manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "sisa_rl.ensemble" ||
      manifest.value("version", 0) != kManifestVersion) {
    throw FormatError("unsupported ensemble manifest in " + directory.string());
  }
  try {
    ShardEnsemble ens;
    const int m_count = manifest.at("num_shards").get<int>();
    const size_t n = manifest.at("num_samples").get<size_t>();
    ens.base_config = internal::AgentConfigFromJson(manifest.at("base_config"));
    ens.training_seconds = manifest.value("training_seconds", 0.0);
    ens.forgotten = manifest.at("forgotten").get<std::vector<size_t>>();
    const json& shards = manifest.at("shards");
    if (m_count < 1 || shards.size() != static_cast<size_t>(m_count)) {
      throw FormatError("manifest shard count mismatch");
    }
    ens.assignment.num_shards = m_count;
    ens.assignment.shard_of.assign(n, kUnassigned);
    for (int m = 0; m < m_count; ++m) {
      const json& s = shards[m];
      auto rows = s.at("rows").get<std::vector<size_t>>();
      for (size_t i : rows) {
        if (i >= n || ens.assignment.shard_of[i] != kUnassigned) {
          throw FormatError("manifest rows overlap or are out of range");
        }
        ens.assignment.shard_of[i] = m;
      }
      ens.assignment.shards.push_back(std::move(rows));
      ens.shard_seeds.push_back(s.at("seed").get<uint64_t>());

      const std::string bytes =
          ReadFileBytes(directory / s.at("checkpoint").get<std::string>());
      if (internal::Hex64(Fnv1a64(bytes)) != s.at("fnv1a64").get<std::string>()) {
        throw FormatError("checksum mismatch for shard " + std::to_string(m));
      }
      TrainedAgent agent = DeserializeAgent(bytes);
      agent.training_seconds = s.value("training_seconds", 0.0);
      ens.models.push_back(std::move(agent));
    }
    return ens;
  } catch (const json::exception& e) {
    throw FormatError("bad ensemble manifest: " + std::string(e.what()));
  }
}

}  // namespace sisa_rl
