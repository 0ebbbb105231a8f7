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

#ifndef SISA_RL_SISA_H_
#define SISA_RL_SISA_H_

// Sharded ensembles of isolated RL agents and exact one-shard unlearning.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sisa_rl/rl_agent.h"

namespace sisa_rl {

inline constexpr int kUnassigned = -1;

struct ShardAssignment {
  int num_shards = 0;
  std::vector<std::vector<size_t>> shards;  // ascending, pairwise disjoint
  std::vector<int> shard_of;  // sample index -> shard, or kUnassigned

  size_t num_samples() const { return shard_of.size(); }
  bool operator==(const ShardAssignment&) const = default;
};

// Stratified round-robin deal of 0..labels.size()-1 into num_shards shards
// after a seeded per-class shuffle.
ShardAssignment Partition(std::span<const int> labels, int num_shards,
                          uint64_t seed);

// Seed for shard m; a function of (base_seed, m) only.
uint64_t DeriveShardSeed(uint64_t base_seed, int shard);

struct ShardEnsemble {
  ShardAssignment assignment;
  std::vector<TrainedAgent> models;
  std::vector<uint64_t> shard_seeds;
  AgentConfig base_config;
  // Samples removed by earlier unlearning requests, ascending.
  std::vector<size_t> forgotten;
  // Wall-clock around the whole ensemble training call.
  double training_seconds = 0.0;
};

// Trains shard m's agent on exactly the rows listed in assignment.shards[m]
// (in that order) with seed DeriveShardSeed(base_config.seed, m). With
// threads > 1 shards train concurrently; the result does not depend on the
// schedule.
ShardEnsemble TrainEnsemble(const Eigen::MatrixXd& features,
                            std::span<const int> labels,
                            const ShardAssignment& assignment,
                            const AgentConfig& base_config, int threads = 1);

// Agent for a single shard, as TrainEnsemble and Unlearn build it.
TrainedAgent TrainShard(const Eigen::MatrixXd& features,
                        std::span<const int> labels,
                        std::span<const size_t> shard_rows,
                        const AgentConfig& base_config, uint64_t shard_seed);

std::vector<int> ShardPredict(const ShardEnsemble& ensemble,
                              const Eigen::VectorXd& state);

// 1 iff mean(votes) >= 0.5, so an even split votes ransomware.
int MajorityVote(std::span<const int> votes);

// Majority-vote prediction for every row of an n x d matrix.
std::vector<int> EnsemblePredict(const ShardEnsemble& ensemble,
                                 const Eigen::MatrixXd& features);

struct UnlearnRequest {
  int shard_index = 0;
  std::vector<size_t> forget_indices;
};

struct UnlearnOutcome {
  ShardEnsemble ensemble;
  double retrain_seconds = 0.0;
  double f1_before = 0.0;
  double f1_after = 0.0;
  double delta_f1 = 0.0;
  size_t forgotten_count = 0;
};

// Uniform sample without replacement of ceil(fraction * |shard|) members of
// shard_indices, returned ascending. Requires 0 < fraction < 1 and at least
// two rows left over.
std::vector<size_t> SelectForgetSet(std::span<const size_t> shard_indices,
                                    double fraction, uint64_t seed);

// Removes the request's samples from its shard and retrains that shard from
// a fresh initialization with its original seed on the retained rows. Every
// other shard model is carried over unchanged. F1 before/after is measured by
// majority vote on the test rows.
UnlearnOutcome Unlearn(const ShardEnsemble& ensemble,
                       const UnlearnRequest& request,
                       const Eigen::MatrixXd& features,
                       std::span<const int> labels,
                       const Eigen::MatrixXd& test_features,
                       std::span<const int> test_labels);

// Ensemble directory layout: manifest.json plus shard_<m>.ckpt per shard.
// The manifest records the assignment, seeds, forgotten samples and an
// FNV-1a checksum per checkpoint (verified on load).
void SaveEnsemble(const ShardEnsemble& ensemble,
                  const std::filesystem::path& directory);
ShardEnsemble LoadEnsemble(const std::filesystem::path& directory);

}  // namespace sisa_rl

#endif  // SISA_RL_SISA_H_
