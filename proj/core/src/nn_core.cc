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

#include "sisa_rl/nn_core.h"

#include <cmath>
#include <stdexcept>

#include "sisa_rl/byte_io.h"

namespace sisa_rl {
namespace {

constexpr std::string_view kNetworkMagic = "SQNW";

void CheckInputDim(int input_dim) {
  if (input_dim < 1) {
    throw std::invalid_argument("input_dim must be >= 1, got " +
                                std::to_string(input_dim));
  }
}

void CheckState(const QNetwork& net, Eigen::Index rows) {
  if (rows != net.input_dim()) {
    throw std::invalid_argument(
        "state dimension " + std::to_string(rows) +
        " does not match network input_dim " + std::to_string(net.input_dim()));
  }
}

template <typename T>
void ResizeZero(T& tensors, int input_dim) {
  tensors.layer1_weights = Eigen::MatrixXd::Zero(kHiddenUnits, input_dim);
  tensors.layer1_bias = Eigen::VectorXd::Zero(kHiddenUnits);
  tensors.layer2_weights = Eigen::MatrixXd::Zero(kHiddenUnits, kHiddenUnits);
  tensors.layer2_bias = Eigen::VectorXd::Zero(kHiddenUnits);
  tensors.output_weights = Eigen::MatrixXd::Zero(kNumActions, kHiddenUnits);
  tensors.output_bias = Eigen::VectorXd::Zero(kNumActions);
}

void FillUniform(Eigen::MatrixXd& weights, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(weights.cols()));
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      weights(r, c) = rng.Uniform(-bound, bound);
    }
  }
}

void PutTensor(ByteWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.PutF64(m(r, c));
  }
}

void PutTensor(ByteWriter& w, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) w.PutF64(v(i));
}

void GetTensor(ByteReader& rd, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rd.GetF64();
  }
}

void GetTensor(ByteReader& rd, Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rd.GetF64();
}

template <typename T>
void PutAll(ByteWriter& w, const T& tensors) {
  // ForEachTensorPair needs two arguments; the second is ignored.
  ForEachTensorPair(tensors, tensors,
                    [&](const auto& t, const auto&) { PutTensor(w, t); });
}

template <typename T>
void GetAll(ByteReader& rd, T& tensors) {
  ForEachTensorPair(tensors, tensors,
                    [&](auto& t, auto&) { GetTensor(rd, t); });
}

}  // namespace

bool NetworkTensors::AllFinite() const {
  bool finite = true;
  ForEachTensorPair(*this, *this, [&](const auto& t, const auto&) {
    finite = finite && t.allFinite();
  });
  return finite;
}

bool NetworkTensors::SameShape(const NetworkTensors& other) const {
  bool same = true;
  ForEachTensorPair(*this, other, [&](const auto& a, const auto& b) {
    same = same && a.rows() == b.rows() && a.cols() == b.cols();
  });
  return same;
}

bool NetworkTensors::operator==(const NetworkTensors& other) const {
  if (!SameShape(other)) return false;
  bool equal = true;
  ForEachTensorPair(*this, other, [&](const auto& a, const auto& b) {
    equal = equal && (a.array() == b.array()).all();
  });
  return equal;
}

QNetwork ZeroNetwork(int input_dim) {
  CheckInputDim(input_dim);
  QNetwork net;
  ResizeZero(net, input_dim);
  return net;
}

Gradients ZeroGradients(int input_dim) {
  CheckInputDim(input_dim);
  Gradients grads;
  ResizeZero(grads, input_dim);
  return grads;
}

QNetwork InitNetwork(int input_dim, uint64_t seed) {
  Rng rng(seed);
  return InitNetwork(input_dim, rng);
}

QNetwork InitNetwork(int input_dim, Rng& rng) {
  QNetwork net = ZeroNetwork(input_dim);
  FillUniform(net.layer1_weights, rng);
  FillUniform(net.layer2_weights, rng);
  FillUniform(net.output_weights, rng);
  return net;
}

ActionValues Forward(const QNetwork& net, const Eigen::VectorXd& state) {
  CheckState(net, state.size());
  const Eigen::VectorXd h1 =
      (net.layer1_weights * state + net.layer1_bias).cwiseMax(0.0);
  const Eigen::VectorXd h2 =
      (net.layer2_weights * h1 + net.layer2_bias).cwiseMax(0.0);
  return net.output_weights * h2 + net.output_bias;
}

Eigen::MatrixXd ForwardBatch(const QNetwork& net,
                             const Eigen::MatrixXd& states) {
  CheckState(net, states.rows());
  Eigen::MatrixXd h1 = net.layer1_weights * states;
  h1.colwise() += net.layer1_bias;
  h1 = h1.cwiseMax(0.0);
  Eigen::MatrixXd h2 = net.layer2_weights * h1;
  h2.colwise() += net.layer2_bias;
  h2 = h2.cwiseMax(0.0);
  Eigen::MatrixXd q = net.output_weights * h2;
  q.colwise() += net.output_bias;
  return q;
}

HuberResult HuberLoss(double prediction, double target) {
  const double e = prediction - target;
  if (std::abs(e) <= 1.0) return {0.5 * e * e, e};
  return {std::abs(e) - 0.5, e > 0.0 ? 1.0 : -1.0};
}

Gradients Backward(const QNetwork& net, const Eigen::VectorXd& state,
                   int action, double td_target) {
  CheckState(net, state.size());
  const Eigen::MatrixXd states = state;
  return BackwardBatch(net, states, std::span<const int>(&action, 1),
                       std::span<const double>(&td_target, 1));
}

Gradients BackwardBatch(const QNetwork& net, const Eigen::MatrixXd& states,
                        std::span<const int> actions,
                        std::span<const double> td_targets,
                        double* mean_loss) {
  CheckState(net, states.rows());
  const Eigen::Index batch = states.cols();
  if (batch == 0 || static_cast<Eigen::Index>(actions.size()) != batch ||
      static_cast<Eigen::Index>(td_targets.size()) != batch) {
    throw std::invalid_argument("BackwardBatch: batch sizes disagree");
  }

  Eigen::MatrixXd z1 = net.layer1_weights * states;
  z1.colwise() += net.layer1_bias;
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = net.layer2_weights * a1;
  z2.colwise() += net.layer2_bias;
  const Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  Eigen::MatrixXd q = net.output_weights * a2;
  q.colwise() += net.output_bias;

  // Only the taken action's head receives loss gradient.
  const double inv_batch = 1.0 / static_cast<double>(batch);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(kNumActions, batch);
  double loss_sum = 0.0;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const int a = actions[b];
    if (a != 0 && a != 1) {
      throw std::invalid_argument("action must be 0 or 1, got " +
                                  std::to_string(a));
    }
    const HuberResult h = HuberLoss(q(a, b), td_targets[b]);
    loss_sum += h.loss;
    dq(a, b) = h.gradient * inv_batch;
  }
  if (mean_loss != nullptr) *mean_loss = loss_sum * inv_batch;

  Gradients g;
  g.output_weights = dq * a2.transpose();
  g.output_bias = dq.rowwise().sum();

  Eigen::MatrixXd dz2 = net.output_weights.transpose() * dq;
  dz2 = (z2.array() > 0.0).select(dz2, 0.0);
  g.layer2_weights = dz2 * a1.transpose();
  g.layer2_bias = dz2.rowwise().sum();

  Eigen::MatrixXd dz1 = net.layer2_weights.transpose() * dz2;
  dz1 = (z1.array() > 0.0).select(dz1, 0.0);
  g.layer1_weights = dz1 * states.transpose();
  g.layer1_bias = dz1.rowwise().sum();
  return g;
}

AdamState MakeAdamState(int input_dim, double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  AdamState state;
  state.first_moment = ZeroGradients(input_dim);
  state.second_moment = ZeroGradients(input_dim);
  state.learning_rate = learning_rate;
  return state;
}

void AdamStep(QNetwork& params, const Gradients& grads, AdamState& state) {
  if (!params.SameShape(grads) || !params.SameShape(state.first_moment) ||
      !params.SameShape(state.second_moment)) {
    throw std::invalid_argument("AdamStep: tensor shapes do not align");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double lr = state.learning_rate;
  const double eps = state.epsilon;

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    theta.array() -= lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + eps);
  };
  update(params.layer1_weights, grads.layer1_weights,
         state.first_moment.layer1_weights, state.second_moment.layer1_weights);
  update(params.layer1_bias, grads.layer1_bias, state.first_moment.layer1_bias,
         state.second_moment.layer1_bias);
  update(params.layer2_weights, grads.layer2_weights,
         state.first_moment.layer2_weights, state.second_moment.layer2_weights);
  update(params.layer2_bias, grads.layer2_bias, state.first_moment.layer2_bias,
         state.second_moment.layer2_bias);
  update(params.output_weights, grads.output_weights,
         state.first_moment.output_weights, state.second_moment.output_weights);
  update(params.output_bias, grads.output_bias, state.first_moment.output_bias,
         state.second_moment.output_bias);
}

std::string SerializeNetwork(const QNetwork& net, const AdamState* adam) {
  ByteWriter w;
  w.PutBytes(kNetworkMagic);
  w.PutU32(kNetworkFormatVersion);
  w.PutU32(static_cast<uint32_t>(net.input_dim()));
  w.PutU32(kHiddenUnits);
  w.PutU32(kHiddenUnits);
  w.PutU32(kNumActions);
  w.PutU8(adam != nullptr ? 1 : 0);
  PutAll(w, net);
  if (adam != nullptr) {
    w.PutU64(static_cast<uint64_t>(adam->step_count));
    w.PutF64(adam->learning_rate);
    w.PutF64(adam->beta1);
    w.PutF64(adam->beta2);
    w.PutF64(adam->epsilon);
    PutAll(w, adam->first_moment);
    PutAll(w, adam->second_moment);
  }
  return w.Release();
}

NetworkCheckpoint DeserializeNetwork(std::string_view bytes) {
  ByteReader rd(bytes);
  if (rd.GetBytes(kNetworkMagic.size()) != kNetworkMagic) {
    throw FormatError("not a network checkpoint (bad magic)");
  }
  const uint32_t version = rd.GetU32();
  if (version != kNetworkFormatVersion) {
    throw FormatError("unsupported network format version " +
                      std::to_string(version));
  }
  const uint32_t input_dim = rd.GetU32();
  const uint32_t hidden1 = rd.GetU32();
  const uint32_t hidden2 = rd.GetU32();
  const uint32_t outputs = rd.GetU32();
  if (input_dim == 0 || hidden1 != kHiddenUnits || hidden2 != kHiddenUnits ||
      outputs != kNumActions) {
    throw FormatError("network checkpoint has unexpected layer sizes");
  }
  const uint8_t has_adam = rd.GetU8();
  if (has_adam > 1) throw FormatError("bad adam flag");

  NetworkCheckpoint ckpt;
  ckpt.network = ZeroNetwork(static_cast<int>(input_dim));
  GetAll(rd, ckpt.network);
  if (has_adam == 1) {
    AdamState adam = MakeAdamState(static_cast<int>(input_dim));
    adam.step_count = static_cast<int64_t>(rd.GetU64());
    adam.learning_rate = rd.GetF64();
    adam.beta1 = rd.GetF64();
    adam.beta2 = rd.GetF64();
    adam.epsilon = rd.GetF64();
    GetAll(rd, adam.first_moment);
    GetAll(rd, adam.second_moment);
    ckpt.adam = std::move(adam);
  }
  if (rd.remaining() != 0) {
    throw FormatError("trailing bytes after network checkpoint");
  }
  return ckpt;
}

}  // namespace sisa_rl
