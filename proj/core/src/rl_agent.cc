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

#include "sisa_rl/rl_agent.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sisa_rl/byte_io.h"

namespace sisa_rl {
namespace {

constexpr std::string_view kAgentMagic = "SQAG";

void CheckBinary(int v, const char* what) {
  if (v != 0 && v != 1) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1, got " +
                                std::to_string(v));
  }
}

// Bootstrapped next-state value for one column of action values.
double NextStateValue(Algorithm algorithm, const ActionValues& target_q,
                      const ActionValues& online_q) {
  if (algorithm == Algorithm::kDdqn) return target_q(GreedyAction(online_q));
  return std::max(target_q(0), target_q(1));
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDqn:
      return "DQN";
    case Algorithm::kDdqn:
      return "DDQN";
  }
  return "?";
}

Algorithm ParseAlgorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "dqn") return Algorithm::kDqn;
  if (lower == "ddqn") return Algorithm::kDdqn;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected DQN or DDQN)");
}

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("replay buffer capacity must be positive");
  }
}

void ReplayBuffer::Push(Transition transition) {
  if (size_ < capacity_) {
    storage_.push_back(std::move(transition));
    ++size_;
    return;
  }
  storage_[head_] = std::move(transition);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(size_t index) const {
  if (index >= size_) throw std::out_of_range("ReplayBuffer::at");
  return storage_[(head_ + index) % capacity_];
}

void AgentConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("invalid agent config: " + msg);
  };
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must be in (0, 1)");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size < 1) fail("batch_size must be positive");
  if (total_steps < 0) fail("total_steps must be non-negative");
  if (target_update_interval < 1) fail("target_update_interval must be positive");
  if (!(epsilon_end > 0.0 && epsilon_end <= epsilon_start &&
        epsilon_start <= 1.0)) {
    fail("need 0 < epsilon_end <= epsilon_start <= 1");
  }
  if (epsilon_decay_steps < 1) fail("epsilon_decay_steps must be positive");
  if (buffer_capacity < 1) fail("buffer_capacity must be positive");
}

double Reward(int label, int action) {
  CheckBinary(label, "label");
  CheckBinary(action, "action");
  if (action == label) return 1.0;
  return label == kRansomware ? -2.0 : -0.5;
}

double EpsilonAt(int64_t step, const AgentConfig& config) {
  if (step >= config.epsilon_decay_steps) return config.epsilon_end;
  if (step <= 0) return config.epsilon_start;
  const double frac = static_cast<double>(step) /
                      static_cast<double>(config.epsilon_decay_steps);
  return config.epsilon_start +
         frac * (config.epsilon_end - config.epsilon_start);
}

int GreedyAction(const ActionValues& q) { return q(1) > q(0) ? 1 : 0; }

int SelectAction(const QNetwork& net, const Eigen::VectorXd& state,
                 double epsilon, Rng& rng) {
  if (rng.Uniform() < epsilon) return static_cast<int>(rng.Below(kNumActions));
  return GreedyAction(Forward(net, state));
}

double TdTargetDqn(double reward, const Eigen::VectorXd& next_state,
                   const QNetwork& target_net, double gamma) {
  const ActionValues q = Forward(target_net, next_state);
  return reward + gamma * NextStateValue(Algorithm::kDqn, q, q);
}

double TdTargetDdqn(double reward, const Eigen::VectorXd& next_state,
                    const QNetwork& online_net, const QNetwork& target_net,
                    double gamma) {
  return reward + gamma * NextStateValue(Algorithm::kDdqn,
                                         Forward(target_net, next_state),
                                         Forward(online_net, next_state));
}

TrainedAgent TrainAgent(const Eigen::MatrixXd& features,
                        std::span<const int> labels,
                        const AgentConfig& config) {
  config.Validate();
  const Eigen::Index n = features.rows();
  if (n < 2) {
    throw std::invalid_argument("TrainAgent needs at least 2 rows, got " +
                                std::to_string(n));
  }
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("TrainAgent: label count != row count");
  }
  for (int y : labels) CheckBinary(y, "label");
  const int dim = static_cast<int>(features.cols());

  const auto start = std::chrono::steady_clock::now();

  Rng rng(config.seed);
  TrainedAgent agent{InitNetwork(dim, rng), config, 0.0};
  QNetwork& online = agent.network;
  QNetwork target = online;
  AdamState adam = MakeAdamState(dim, config.learning_rate);
  ReplayBuffer buffer(static_cast<size_t>(config.buffer_capacity));

  const Eigen::Index batch = config.batch_size;
  Eigen::MatrixXd states(dim, batch);
  Eigen::MatrixXd next_states(dim, batch);
  std::vector<int> actions(batch);
  std::vector<double> rewards(batch);
  std::vector<double> td_targets(batch);

  for (int64_t t = 0; t < config.total_steps; ++t) {
    const Eigen::Index row = t % n;
    Transition tr;
    tr.state = features.row(row).transpose();
    tr.next_state = features.row((t + 1) % n).transpose();
    tr.action = SelectAction(online, tr.state, EpsilonAt(t, config), rng);
    tr.reward = Reward(labels[row], tr.action);
    buffer.Push(std::move(tr));

    if (static_cast<int64_t>(buffer.size()) >= config.batch_size) {
      for (Eigen::Index b = 0; b < batch; ++b) {
        const Transition& s = buffer.at(rng.Below(buffer.size()));
        states.col(b) = s.state;
        next_states.col(b) = s.next_state;
        actions[b] = s.action;
        rewards[b] = s.reward;
      }
      const Eigen::MatrixXd target_q = ForwardBatch(target, next_states);
      Eigen::MatrixXd online_q;
      if (config.algorithm == Algorithm::kDdqn) {
        online_q = ForwardBatch(online, next_states);
      }
      for (Eigen::Index b = 0; b < batch; ++b) {
        const ActionValues tq = target_q.col(b);
        const ActionValues oq =
            config.algorithm == Algorithm::kDdqn ? ActionValues(online_q.col(b))
                                                 : tq;
        td_targets[b] = rewards[b] + config.gamma *
                                         NextStateValue(config.algorithm, tq, oq);
      }
      const Gradients grads =
          BackwardBatch(online, states, actions, td_targets);
      AdamStep(online, grads, adam);
    }
    if ((t + 1) % config.target_update_interval == 0) target = online;
  }

  if (!online.AllFinite()) {
    throw std::runtime_error("training diverged: non-finite network weights");
  }
  agent.training_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return agent;
}

int Predict(const QNetwork& net, const Eigen::VectorXd& state) {
  return GreedyAction(Forward(net, state));
}

double QScore(const QNetwork& net, const Eigen::VectorXd& state) {
  const ActionValues q = Forward(net, state);
  return q(1) - q(0);
}

std::vector<int> PredictRows(const QNetwork& net,
                             const Eigen::MatrixXd& features) {
  std::vector<int> out(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out[i] = Predict(net, features.row(i).transpose());
  }
  return out;
}

std::vector<double> QScoreRows(const QNetwork& net,
                               const Eigen::MatrixXd& features) {
  std::vector<double> out(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out[i] = QScore(net, features.row(i).transpose());
  }
  return out;
}

std::string SerializeAgent(const TrainedAgent& agent) {
  const AgentConfig& c = agent.config;
  ByteWriter w;
  w.PutBytes(kAgentMagic);
  w.PutU32(kAgentFormatVersion);
  w.PutU8(static_cast<uint8_t>(c.algorithm));
  w.PutF64(c.gamma);
  w.PutF64(c.learning_rate);
  w.PutU64(static_cast<uint64_t>(c.batch_size));
  w.PutU64(static_cast<uint64_t>(c.total_steps));
  w.PutU64(static_cast<uint64_t>(c.target_update_interval));
  w.PutF64(c.epsilon_start);
  w.PutF64(c.epsilon_end);
  w.PutU64(static_cast<uint64_t>(c.epsilon_decay_steps));
  w.PutU64(static_cast<uint64_t>(c.buffer_capacity));
  w.PutU64(c.seed);
  const std::string net = SerializeNetwork(agent.network);
  w.PutU64(net.size());
  w.PutBytes(net);
  return w.Release();
}

TrainedAgent DeserializeAgent(std::string_view bytes) {
  ByteReader rd(bytes);
  if (rd.GetBytes(kAgentMagic.size()) != kAgentMagic) {
    throw FormatError("not an agent checkpoint (bad magic)");
  }
  const uint32_t version = rd.GetU32();
  if (version != kAgentFormatVersion) {
    throw FormatError("unsupported agent format version " +
                      std::to_string(version));
  }
  TrainedAgent agent;
  AgentConfig& c = agent.config;
  const uint8_t algo = rd.GetU8();
  if (algo > 1) throw FormatError("bad algorithm tag");
  c.algorithm = static_cast<Algorithm>(algo);
  c.gamma = rd.GetF64();
  c.learning_rate = rd.GetF64();
  c.batch_size = static_cast<int64_t>(rd.GetU64());
  c.total_steps = static_cast<int64_t>(rd.GetU64());
  c.target_update_interval = static_cast<int64_t>(rd.GetU64());
  c.epsilon_start = rd.GetF64();
  c.epsilon_end = rd.GetF64();
  c.epsilon_decay_steps = static_cast<int64_t>(rd.GetU64());
  c.buffer_capacity = static_cast<int64_t>(rd.GetU64());
  c.seed = rd.GetU64();
  const uint64_t net_len = rd.GetU64();
  NetworkCheckpoint net = DeserializeNetwork(rd.GetBytes(net_len));
  if (rd.remaining() != 0) throw FormatError("trailing bytes after agent");
  agent.network = std::move(net.network);
  return agent;
}

}  // namespace sisa_rl
