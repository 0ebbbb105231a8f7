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
#include <gtest/gtest.h>

#include "oracles.h"
#include "sisa_rl/byte_io.h"

namespace sisa_rl {
namespace {

TEST(InitNetworkTest, SameSeedIsBitIdentical) {
  const QNetwork a = InitNetwork(103, 7);
  const QNetwork b = InitNetwork(103, 7);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(SerializeNetwork(a), SerializeNetwork(b));
}

TEST(InitNetworkTest, DifferentSeedsDiffer) {
  EXPECT_FALSE(InitNetwork(103, 7) == InitNetwork(103, 8));
}

TEST(InitNetworkTest, ShapesMatchArchitecture) {
  const QNetwork net = InitNetwork(103, 1);
  EXPECT_EQ(net.layer1_weights.rows(), 128);
  EXPECT_EQ(net.layer1_weights.cols(), 103);
  EXPECT_EQ(net.layer2_weights.rows(), 128);
  EXPECT_EQ(net.layer2_weights.cols(), 128);
  EXPECT_EQ(net.output_weights.rows(), 2);
  EXPECT_EQ(net.output_weights.cols(), 128);
  EXPECT_EQ(net.output_bias.size(), 2);
  EXPECT_EQ(net.input_dim(), 103);
}

TEST(InitNetworkTest, WeightsWithinFanInBoundAndBiasesZero) {
  const QNetwork net = InitNetwork(4, 1);
  const double bound1 = std::sqrt(6.0 / 4.0);
  EXPECT_NEAR(bound1, 1.2247, 1e-4);
  EXPECT_LE(net.layer1_weights.cwiseAbs().maxCoeff(), bound1);
  EXPECT_LE(net.layer2_weights.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 128.0));
  EXPECT_LE(net.output_weights.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 128.0));
  EXPECT_TRUE(net.layer1_bias.isZero(0.0));
  EXPECT_TRUE(net.layer2_bias.isZero(0.0));
  EXPECT_TRUE(net.output_bias.isZero(0.0));
  // The draws should actually use the range, not collapse near zero.
  EXPECT_GT(net.layer1_weights.cwiseAbs().maxCoeff(), 0.9 * bound1);
}

TEST(InitNetworkTest, RejectsZeroInputDim) {
  EXPECT_THROW(InitNetwork(0, 1), std::invalid_argument);
}

TEST(ForwardTest, ZeroNetworkGivesZeros) {
  const QNetwork net = ZeroNetwork(5);
  const ActionValues q = Forward(net, Eigen::VectorXd::Constant(5, 3.0));
  EXPECT_EQ(q(0), 0.0);
  EXPECT_EQ(q(1), 0.0);
}

TEST(ForwardTest, BiasOnlyNetworkPassesOutputBias) {
  QNetwork net = ZeroNetwork(3);
  net.output_bias << 0.3, -0.3;
  const ActionValues q = Forward(net, Eigen::VectorXd::Ones(3));
  EXPECT_EQ(q(0), 0.3);
  EXPECT_EQ(q(1), -0.3);
}

TEST(ForwardTest, MatchesStraightLineOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.Below(12));
    const QNetwork net = oracle::RandomNetwork(d, rng);
    const Eigen::VectorXd s = oracle::RandomState(d, rng);
    const ActionValues q = Forward(net, s);
    const std::vector<double> ref = oracle::StraightLineForward(net, s);
    EXPECT_NEAR(q(0), ref[0], 1e-12);
    EXPECT_NEAR(q(1), ref[1], 1e-12);
  }
}

TEST(ForwardTest, BatchAgreesWithSingle) {
  Rng rng(5);
  const QNetwork net = oracle::RandomNetwork(9, rng);
  Eigen::MatrixXd states(9, 17);
  for (int b = 0; b < 17; ++b) states.col(b) = oracle::RandomState(9, rng);
  const Eigen::MatrixXd q = ForwardBatch(net, states);
  for (int b = 0; b < 17; ++b) {
    const ActionValues single = Forward(net, states.col(b));
    EXPECT_NEAR(q(0, b), single(0), 1e-12);
    EXPECT_NEAR(q(1, b), single(1), 1e-12);
  }
}

TEST(ForwardTest, RejectsDimensionMismatch) {
  const QNetwork net = InitNetwork(4, 1);
  EXPECT_THROW(Forward(net, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  EXPECT_THROW(ForwardBatch(net, Eigen::MatrixXd::Zero(3, 2)),
               std::invalid_argument);
}

TEST(ForwardTest, OutputLayerScalesLinearly) {
  Rng rng(3);
  QNetwork net = oracle::RandomNetwork(6, rng);
  const Eigen::VectorXd s = oracle::RandomState(6, rng);
  const ActionValues q = Forward(net, s);
  const double c = 2.5;
  net.output_weights *= c;
  net.output_bias *= c;
  const ActionValues scaled = Forward(net, s);
  EXPECT_NEAR(scaled(0), c * q(0), 1e-12 * (1 + std::abs(q(0))));
  EXPECT_NEAR(scaled(1), c * q(1), 1e-12 * (1 + std::abs(q(1))));
}

TEST(HuberLossTest, QuadraticBranch) {
  const HuberResult h = HuberLoss(0.5, 0.0);
  EXPECT_DOUBLE_EQ(h.loss, 0.125);
  EXPECT_DOUBLE_EQ(h.gradient, 0.5);
}

TEST(HuberLossTest, LinearBranch) {
  const HuberResult h = HuberLoss(2.0, 0.0);
  EXPECT_DOUBLE_EQ(h.loss, 1.5);
  EXPECT_DOUBLE_EQ(h.gradient, 1.0);
  const HuberResult neg = HuberLoss(-3.0, 0.0);
  EXPECT_DOUBLE_EQ(neg.loss, 2.5);
  EXPECT_DOUBLE_EQ(neg.gradient, -1.0);
}

TEST(HuberLossTest, ZeroAtTarget) {
  const HuberResult h = HuberLoss(0.731, 0.731);
  EXPECT_EQ(h.loss, 0.0);
  EXPECT_EQ(h.gradient, 0.0);
}

TEST(HuberLossTest, ContinuousAtBoundary) {
  for (double sign : {-1.0, 1.0}) {
    const HuberResult inside = HuberLoss(sign * (1.0 - 1e-13), 0.0);
    const HuberResult outside = HuberLoss(sign * (1.0 + 1e-13), 0.0);
    EXPECT_NEAR(inside.loss, outside.loss, 1e-12);
    EXPECT_NEAR(inside.gradient, outside.gradient, 1e-12);
  }
}

TEST(BackwardTest, ZeroWhenTargetEqualsPrediction) {
  Rng rng(2);
  const QNetwork net = oracle::RandomNetwork(5, rng);
  const Eigen::VectorXd s = oracle::RandomState(5, rng);
  const ActionValues q = Forward(net, s);
  const Gradients g = Backward(net, s, 1, q(1));
  EXPECT_TRUE(g == ZeroGradients(5));
}

TEST(BackwardTest, ZeroNetworkHandComputation) {
  // e = 0 - 1 = -1 sits on the quadratic boundary: d loss / dq = e = -1.
  const QNetwork net = ZeroNetwork(3);
  const Gradients g = Backward(net, Eigen::VectorXd::Ones(3), 1, 1.0);
  EXPECT_EQ(g.output_bias(0), 0.0);
  EXPECT_EQ(g.output_bias(1), -1.0);
  EXPECT_TRUE(g.output_weights.isZero(0.0));
  EXPECT_TRUE(g.layer1_weights.isZero(0.0));
  EXPECT_TRUE(g.layer2_weights.isZero(0.0));
}

TEST(BackwardTest, UnselectedHeadGetsNoDirectGradient) {
  Rng rng(8);
  const QNetwork net = oracle::RandomNetwork(4, rng);
  const Eigen::VectorXd s = oracle::RandomState(4, rng);
  for (int a : {0, 1}) {
    const Gradients g = Backward(net, s, a, 3.0);
    EXPECT_TRUE(g.output_weights.row(1 - a).isZero(0.0));
    EXPECT_EQ(g.output_bias(1 - a), 0.0);
  }
}

TEST(BackwardTest, MatchesFiniteDifferences) {
  Rng rng(2024);
  constexpr double kStep = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + static_cast<int>(rng.Below(8));
    QNetwork net = oracle::RandomNetwork(d, rng);
    const Eigen::VectorXd s = oracle::RandomState(d, rng);
    const int action = static_cast<int>(rng.Below(2));
    // Spread targets so both Huber branches are exercised.
    const double target = Forward(net, s)(action) + rng.Uniform(-3.0, 3.0);
    const Gradients g = Backward(net, s, action, target);

    auto check_all = [&](auto& param, const auto& grad, const char* name) {
      for (Eigen::Index r = 0; r < param.rows(); ++r) {
        for (Eigen::Index c = 0; c < param.cols(); ++c) {
          const double numeric = oracle::CentralDifference(
              net, param, r, c, s, action, target, kStep);
          ASSERT_TRUE(oracle::GradientClose(grad(r, c), numeric))
              << name << "(" << r << "," << c << ") analytic " << grad(r, c)
              << " numeric " << numeric << " trial " << trial;
          ++checked;
        }
      }
    };
    check_all(net.layer1_weights, g.layer1_weights, "layer1_weights");
    check_all(net.layer1_bias, g.layer1_bias, "layer1_bias");
    check_all(net.layer2_bias, g.layer2_bias, "layer2_bias");
    check_all(net.output_weights, g.output_weights, "output_weights");
    check_all(net.output_bias, g.output_bias, "output_bias");
    // layer2_weights has 16k entries; a seeded sample keeps this test fast.
    for (int k = 0; k < 128; ++k) {
      const Eigen::Index r = static_cast<Eigen::Index>(rng.Below(kHiddenUnits));
      const Eigen::Index c = static_cast<Eigen::Index>(rng.Below(kHiddenUnits));
      const double numeric = oracle::CentralDifference(
          net, net.layer2_weights, r, c, s, action, target, kStep);
      ASSERT_TRUE(oracle::GradientClose(g.layer2_weights(r, c), numeric))
          << "layer2_weights(" << r << "," << c << ")";
      ++checked;
    }
  }
  EXPECT_GT(checked, 40 * 128);
}

TEST(BackwardTest, BatchGradientIsMeanOfPerSample) {
  Rng rng(17);
  const QNetwork net = oracle::RandomNetwork(5, rng);
  static constexpr int kBatch = 6;
  Eigen::MatrixXd states(5, kBatch);
  std::vector<int> actions(kBatch);
  std::vector<double> targets(kBatch);
  Gradients mean = ZeroGradients(5);
  for (int b = 0; b < kBatch; ++b) {
    states.col(b) = oracle::RandomState(5, rng);
    actions[b] = static_cast<int>(rng.Below(2));
    targets[b] = rng.Uniform(-2.0, 2.0);
    const Gradients g = Backward(net, states.col(b), actions[b], targets[b]);
    ForEachTensorPair(mean, g, [](auto& m, const auto& x) { m += x / kBatch; });
  }
  const Gradients batch = BackwardBatch(net, states, actions, targets);
  ForEachTensorPair(batch, mean, [](const auto& a, const auto& b) {
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
  });
}

TEST(BackwardTest, RejectsBadInputs) {
  const QNetwork net = InitNetwork(3, 1);
  EXPECT_THROW(Backward(net, Eigen::VectorXd::Zero(4), 0, 0.0),
               std::invalid_argument);
  EXPECT_THROW(Backward(net, Eigen::VectorXd::Zero(3), 2, 0.0),
               std::invalid_argument);
}

TEST(AdamTest, ZeroGradientIsFixedPoint) {
  QNetwork net = InitNetwork(4, 3);
  const QNetwork before = net;
  AdamState state = MakeAdamState(4);
  AdamStep(net, ZeroGradients(4), state);
  EXPECT_TRUE(net == before);
  EXPECT_EQ(state.step_count, 1);
}

TEST(AdamTest, FirstStepMatchesHandComputation) {
  // t = 1: m_hat = g, v_hat = g^2, so delta = -lr * g / (|g| + eps).
  QNetwork net = ZeroNetwork(1);
  Gradients g = ZeroGradients(1);
  ForEachTensorPair(g, g, [](auto& t, auto&) { t.setConstant(1.0); });
  AdamState state = MakeAdamState(1, 0.001);
  AdamStep(net, g, state);
  const double expected = -0.001 * (1.0 / (1.0 + 1e-8));
  EXPECT_NEAR(expected, -0.000999999990, 1e-15);
  ForEachTensorPair(net, net, [&](const auto& t, const auto&) {
    EXPECT_NEAR(t.maxCoeff(), expected, 1e-18);
    EXPECT_NEAR(t.minCoeff(), expected, 1e-18);
  });
}

TEST(AdamTest, DeterministicAndMomentsNonNegative) {
  Rng rng(4);
  QNetwork a = oracle::RandomNetwork(3, rng);
  QNetwork b = a;
  AdamState sa = MakeAdamState(3);
  AdamState sb = MakeAdamState(3);
  for (int step = 0; step < 5; ++step) {
    const Eigen::VectorXd s = oracle::RandomState(3, rng);
    const Gradients g = Backward(a, s, step % 2, rng.Normal());
    AdamStep(a, g, sa);
    AdamStep(b, g, sb);
    EXPECT_EQ(sa.step_count, step + 1);
  }
  EXPECT_EQ(SerializeNetwork(a, &sa), SerializeNetwork(b, &sb));
  ForEachTensorPair(sa.second_moment, sa.second_moment,
                    [](const auto& v, const auto&) {
                      EXPECT_GE(v.minCoeff(), 0.0);
                    });
  EXPECT_TRUE(a.AllFinite());
}

TEST(AdamTest, RejectsShapeMismatch) {
  QNetwork net = InitNetwork(3, 1);
  AdamState state = MakeAdamState(3);
  EXPECT_THROW(AdamStep(net, ZeroGradients(4), state), std::invalid_argument);
}

TEST(CheckpointTest, RoundTripIsByteIdentical) {
  Rng rng(9);
  QNetwork net = oracle::RandomNetwork(7, rng);
  AdamState adam = MakeAdamState(7);
  AdamStep(net, Backward(net, oracle::RandomState(7, rng), 1, 0.5), adam);

  for (const AdamState* opt : {static_cast<const AdamState*>(nullptr),
                               static_cast<const AdamState*>(&adam)}) {
    const std::string bytes = SerializeNetwork(net, opt);
    const NetworkCheckpoint ckpt = DeserializeNetwork(bytes);
    EXPECT_TRUE(ckpt.network == net);
    EXPECT_EQ(ckpt.adam.has_value(), opt != nullptr);
    EXPECT_EQ(SerializeNetwork(ckpt.network,
                               ckpt.adam ? &*ckpt.adam : nullptr),
              bytes);
  }
}

TEST(CheckpointTest, HeaderLayout) {
  const std::string bytes = SerializeNetwork(ZeroNetwork(103));
  ByteReader rd(bytes);
  EXPECT_EQ(rd.GetBytes(4), "SQNW");
  EXPECT_EQ(rd.GetU32(), kNetworkFormatVersion);
  EXPECT_EQ(rd.GetU32(), 103u);
  EXPECT_EQ(rd.GetU32(), 128u);
  EXPECT_EQ(rd.GetU32(), 128u);
  EXPECT_EQ(rd.GetU32(), 2u);
  EXPECT_EQ(rd.GetU8(), 0);
  const size_t params = 128 * 103 + 128 + 128 * 128 + 128 + 2 * 128 + 2;
  EXPECT_EQ(rd.remaining(), 8 * params);
}

TEST(CheckpointTest, RejectsCorruptInput) {
  const std::string bytes = SerializeNetwork(InitNetwork(2, 1));
  EXPECT_THROW(DeserializeNetwork(bytes.substr(0, bytes.size() - 1)),
               FormatError);
  EXPECT_THROW(DeserializeNetwork(bytes + "x"), FormatError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(DeserializeNetwork(bad_magic), FormatError);
}

}  // namespace
}  // namespace sisa_rl
