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

#ifndef SISA_RL_NN_CORE_H_
#define SISA_RL_NN_CORE_H_

// Fixed-architecture Q-network: input -> 128 ReLU -> 128 ReLU -> 2 action
// values. Everything is float64 and a pure function of its inputs, so
// identically seeded training runs produce byte-identical checkpoints.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "sisa_rl/random.h"

namespace sisa_rl {

inline constexpr int kHiddenUnits = 128;
inline constexpr int kNumActions = 2;

// The six parameter tensors of the network, shared by the parameter and
// gradient types so that elementwise operations can walk them uniformly.
struct NetworkTensors {
  Eigen::MatrixXd layer1_weights;  // kHiddenUnits x input_dim
  Eigen::VectorXd layer1_bias;     // kHiddenUnits
  Eigen::MatrixXd layer2_weights;  // kHiddenUnits x kHiddenUnits
  Eigen::VectorXd layer2_bias;     // kHiddenUnits
  Eigen::MatrixXd output_weights;  // kNumActions x kHiddenUnits
  Eigen::VectorXd output_bias;     // kNumActions

  int input_dim() const { return static_cast<int>(layer1_weights.cols()); }
  bool AllFinite() const;
  bool SameShape(const NetworkTensors& other) const;
  // Exact (bitwise-value) comparison of every entry.
  bool operator==(const NetworkTensors& other) const;
};

// Applies fn(a_tensor, b_tensor) to each corresponding pair of tensors.
template <typename A, typename B, typename Fn>
void ForEachTensorPair(A& a, B& b, Fn&& fn) {
  fn(a.layer1_weights, b.layer1_weights);
  fn(a.layer1_bias, b.layer1_bias);
  fn(a.layer2_weights, b.layer2_weights);
  fn(a.layer2_bias, b.layer2_bias);
  fn(a.output_weights, b.output_weights);
  fn(a.output_bias, b.output_bias);
}

struct QNetwork : NetworkTensors {};
struct Gradients : NetworkTensors {};

using ActionValues = Eigen::Vector2d;

QNetwork ZeroNetwork(int input_dim);
Gradients ZeroGradients(int input_dim);

// He-style uniform initialization: weights ~ U(-sqrt(6/fan_in),
// +sqrt(6/fan_in)), drawn layer by layer in row-major order; biases zero.
QNetwork InitNetwork(int input_dim, uint64_t seed);
// Same draws as InitNetwork(input_dim, seed) when rng was constructed with
// `seed`; lets a caller keep consuming the stream afterwards.
QNetwork InitNetwork(int input_dim, Rng& rng);

ActionValues Forward(const QNetwork& net, const Eigen::VectorXd& state);

// Column-per-sample batch forward: states is input_dim x B, result 2 x B.
Eigen::MatrixXd ForwardBatch(const QNetwork& net, const Eigen::MatrixXd& states);

struct HuberResult {
  double loss;
  double gradient;  // d loss / d prediction
};

// Smooth L1 with delta = 1.
HuberResult HuberLoss(double prediction, double target);

// Gradient of huber(Q(state, action), td_target) w.r.t. every parameter.
// td_target is treated as a constant.
Gradients Backward(const QNetwork& net, const Eigen::VectorXd& state,
                   int action, double td_target);

// Gradient of the batch-mean Huber loss. states is input_dim x B; actions and
// td_targets have length B. If mean_loss is non-null it receives the loss.
Gradients BackwardBatch(const QNetwork& net, const Eigen::MatrixXd& states,
                        std::span<const int> actions,
                        std::span<const double> td_targets,
                        double* mean_loss = nullptr);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  int64_t step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState MakeAdamState(int input_dim, double learning_rate = 1e-3);

// One bias-corrected Adam update, in place.
void AdamStep(QNetwork& params, const Gradients& grads, AdamState& state);

// Versioned flat checkpoint: header (magic, version, input_dim, layer
// widths, adam flag) then each tensor row-major as little-endian float64.
inline constexpr uint32_t kNetworkFormatVersion = 1;

std::string SerializeNetwork(const QNetwork& net,
                             const AdamState* adam = nullptr);

struct NetworkCheckpoint {
  QNetwork network;
  std::optional<AdamState> adam;
};

NetworkCheckpoint DeserializeNetwork(std::string_view bytes);

}  // namespace sisa_rl

#endif  // SISA_RL_NN_CORE_H_
