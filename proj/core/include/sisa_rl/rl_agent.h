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

#ifndef SISA_RL_RL_AGENT_H_
#define SISA_RL_RL_AGENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sisa_rl/nn_core.h"
#include "sisa_rl/random.h"

namespace sisa_rl {

enum class Algorithm : uint8_t { kDqn = 0, kDdqn = 1 };

std::string_view AlgorithmName(Algorithm algorithm);  // "DQN" / "DDQN"
Algorithm ParseAlgorithm(std::string_view name);      // case-insensitive

// Label / action encoding: 0 = benign, 1 = ransomware.
inline constexpr int kBenign = 0;
inline constexpr int kRansomware = 1;

struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

// Bounded FIFO of transitions. Index 0 is the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void Push(Transition transition);
  const Transition& at(size_t index) const;

  size_t size() const { return size_; }
  size_t capacity() const { return capacity_; }
  bool full() const { return size_ == capacity_; }

 private:
  size_t capacity_;
  size_t head_ = 0;  // position of the oldest entry once full
  size_t size_ = 0;
  std::vector<Transition> storage_;
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::kDqn;
  double gamma = 0.1;
  double learning_rate = 0.001;
  int64_t batch_size = 64;
  int64_t total_steps = 10'000;
  int64_t target_update_interval = 500;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int64_t epsilon_decay_steps = 5'000;
  int64_t buffer_capacity = 50'000;
  uint64_t seed = 0;

  // Throws std::invalid_argument when an invariant is violated.
  void Validate() const;
  bool operator==(const AgentConfig&) const = default;
};

struct TrainedAgent {
  QNetwork network;
  AgentConfig config;
  double training_seconds = 0.0;  // not serialized
};

// Cost-sensitive reward: +1 when correct, -2 for a missed ransomware sample,
// -0.5 for a false alarm.
double Reward(int label, int action);

// Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps.
double EpsilonAt(int64_t step, const AgentConfig& config);

// argmax with ties going to action 0 (benign).
int GreedyAction(const ActionValues& q);

int SelectAction(const QNetwork& net, const Eigen::VectorXd& state,
                 double epsilon, Rng& rng);

double TdTargetDqn(double reward, const Eigen::VectorXd& next_state,
                   const QNetwork& target_net, double gamma);

// Online network picks the next action, target network scores it.
double TdTargetDdqn(double reward, const Eigen::VectorXd& next_state,
                    const QNetwork& online_net, const QNetwork& target_net,
                    double gamma);

// Streams over the rows cyclically for config.total_steps steps:
// s = row t mod n, s' = row (t+1) mod n, epsilon-greedy action, reward from
// the row's label, push to replay, then (once the buffer holds a batch) one
// Adam step on the mean Huber TD loss of a uniformly sampled mini-batch.
// The target network starts as a copy of the online one and is re-synced
// every target_update_interval steps.
//
// A single Rng seeded with config.seed is consumed in this order: network
// initialization, then per step the exploration draws followed by the batch
// indices. The result is a pure function of (features, labels, config).
TrainedAgent TrainAgent(const Eigen::MatrixXd& features,
                        std::span<const int> labels, const AgentConfig& config);

int Predict(const QNetwork& net, const Eigen::VectorXd& state);

// Q(s, ransomware) - Q(s, benign).
double QScore(const QNetwork& net, const Eigen::VectorXd& state);

// Row-wise Predict / QScore over an n x d feature matrix.
std::vector<int> PredictRows(const QNetwork& net,
                             const Eigen::MatrixXd& features);
std::vector<double> QScoreRows(const QNetwork& net,
                               const Eigen::MatrixXd& features);

// Agent checkpoint: config block followed by the network checkpoint.
// Training wall-clock is not part of the format.
inline constexpr uint32_t kAgentFormatVersion = 1;
std::string SerializeAgent(const TrainedAgent& agent);
TrainedAgent DeserializeAgent(std::string_view bytes);

}  // namespace sisa_rl

#endif  // SISA_RL_RL_AGENT_H_
