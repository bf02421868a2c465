// Copyright 2026 The IrisNet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <irisnet/train.hpp>

#include "oracles.hpp"

namespace irisnet {
namespace {

using testing::random_tensor;

Tensor onehot(const BinaryMask& fg, std::size_t batch = 1) {
  const Tensor two = two_channel_mask(fg);
  std::vector<double> v;
  for (std::size_t b = 0; b < batch; ++b) v.insert(v.end(), two.storage().begin(), two.storage().end());
  return Tensor({batch, 2, fg.rows(), fg.cols()}, v);
}

Tensor random_simplex(Shape shape, Rng& rng) {
  Tensor p(shape, 0.0);
  const std::size_t plane = shape[2] * shape[3];
  for (std::size_t b = 0; b < shape[0]; ++b)
    for (std::size_t i = 0; i < plane; ++i) {
      const double f = rng.uniform(0.01, 0.99);
      p[(b * 2 + 1) * plane + i] = f;
      p[(b * 2) * plane + i] = 1.0 - f;
    }
  return p;
}

TEST(Dice, PerfectMatch) {
  Rng rng(1);
  const Tensor t = onehot(testing::random_mask(6, 6, rng));
  EXPECT_LT(dice_loss(t, t), 1e-12);
}

TEST(Dice, TotalMiss) {
  BinaryMask fg(4, 4);
  fg.set(1, 1, true);
  const Tensor t = onehot(fg);
  const Tensor p = onehot(BinaryMask(4, 4));
  EXPECT_NEAR(dice_loss(p, t), 1.0, 1e-6);
}

TEST(Dice, HalfOverlap) {
  BinaryMask a(4, 4), b(4, 4);
  for (std::size_t c = 0; c < 4; ++c) a.set(0, c, true);
  b.set(0, 2, true);
  b.set(0, 3, true);
  b.set(1, 0, true);
  b.set(1, 1, true);
  EXPECT_NEAR(dice_loss(onehot(a), onehot(b)), 0.5, 1e-6);
}

TEST(Dice, MatchesOracleAndRange) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor t = onehot(testing::random_mask(5, 7, rng), 1);
    const Tensor p = random_simplex({1, 2, 5, 7}, rng);
    const double d = dice_loss(p, t);
    EXPECT_EQ(d, testing::dice_oracle(p, t, kDiceSmoothing));
    EXPECT_GE(d, 0.0);
    EXPECT_LT(d, 1.0);
  }
}

TEST(Dice, NonBinaryTargetRejected) {
  Tensor t({1, 2, 2, 2}, 0.5);
  EXPECT_THROW(dice_loss(t, t), std::invalid_argument);
  Tensor both({1, 2, 2, 2}, 1.0);
  EXPECT_THROW(dice_loss(both, both), std::invalid_argument);
}

TEST(Bce, PerfectMatchNearZero) {
  Rng rng(3);
  const Tensor t = onehot(testing::random_mask(4, 4, rng));
  EXPECT_LT(bce_loss(t, t), 1e-6);
  EXPECT_GE(bce_loss(t, t), 0.0);
}

TEST(Bce, HalfEverywhereIsLn2) {
  Rng rng(4);
  const Tensor t = onehot(testing::random_mask(4, 4, rng), 2);
  EXPECT_NEAR(bce_loss(Tensor(t.shape(), 0.5), t), std::log(2.0), 1e-6);
}

TEST(Losses, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor t = onehot(testing::random_mask(3, 4, rng), 2);
    const Tensor p = random_simplex({2, 2, 3, 4}, rng);
    EXPECT_LT(finite_difference_check([&](const Tensor& x) { return dice_loss(x, t); }, p, dice_loss_grad(p, t), 1e-6),
              1e-4);
    EXPECT_LT(finite_difference_check([&](const Tensor& x) { return bce_loss(x, t); }, p, bce_loss_grad(p, t), 1e-6),
              1e-4);
  }
}

TEST(LossMode, Names) {
  for (LossMode m : {LossMode::dice_bce, LossMode::dice, LossMode::bce}) {
    EXPECT_EQ(loss_mode_from_name(loss_mode_name(m)), m);
  }
  EXPECT_THROW(loss_mode_from_name("focal"), std::invalid_argument);
}

TEST(Adam, FirstStepClosedForm) {
  std::vector<Parameter> ps{{"p", Tensor({1}, 0.0)}};
  OptimizerState st(ps, AdamConfig{});
  adam_step(ps, {Tensor({1}, 2.0)}, st);
  EXPECT_NEAR(ps[0].value[0], -1e-3 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_EQ(st.t, 1u);
}

TEST(Adam, ZeroGradientIsIdentity) {
  Rng rng(6);
  std::vector<Parameter> ps{{"a", random_tensor({3, 2}, rng)}, {"b", random_tensor({4}, rng)}};
  const auto before = ps;
  OptimizerState st(ps, AdamConfig{});
  adam_step(ps, {Tensor({3, 2}, 0.0), Tensor({4}, 0.0)}, st);
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(ps[i].value, before[i].value);
}

TEST(Adam, MinimizesQuadratic) {
  std::vector<Parameter> ps{{"p", Tensor({1}, 1.0)}};
  AdamConfig cfg;
  cfg.learning_rate = 1e-2;
  OptimizerState st(ps, cfg);
  for (int i = 0; i < 200; ++i) adam_step(ps, {Tensor({1}, 2.0 * ps[0].value[0])}, st);
  EXPECT_LT(std::abs(ps[0].value[0]), 0.05);
}

TEST(Adam, NonFiniteGradientAborts) {
  std::vector<Parameter> ps{{"weights", Tensor({2}, 1.0)}};
  OptimizerState st(ps, AdamConfig{});
  try {
    adam_step(ps, {Tensor({2}, std::vector<double>{0.0, NAN})}, st);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("weights"), std::string::npos);
  }
  EXPECT_EQ(ps[0].value, Tensor({2}, 1.0));
  EXPECT_EQ(st.t, 0u);
}

std::vector<SegmentationSample> phantoms(std::size_t n, std::uint64_t seed0, std::size_t size = 16) {
  std::vector<SegmentationSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    PhantomParams p;
    p.rows = p.cols = size;
    p.thickness_min = 2.0;
    p.thickness_max = 3.0;
    p.seed = seed0 + i;
    out.push_back(generate_phantom(p));
  }
  return out;
}

ArchConfig tiny() {
  ArchConfig c;
  c.depth = 1;
  c.base_filters = 2;
  c.input_size = 16;
  return c;
}

TEST(Train, ZeroLearningRateFreezesParameters) {
  Model m = build_irisnet(tiny(), 1);
  const auto before = m.parameters();
  TrainOptions o;
  o.epochs = 1;
  o.adam.learning_rate = 0.0;
  const auto data = phantoms(2, 10);
  const TrainResult r = train(m, {data[0]}, {data[1]}, o);
  EXPECT_EQ(r.history.records.size(), 1u);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(m.parameters()[i].value, before[i].value);
}

TEST(Train, DeterministicHistory) {
  const auto data = phantoms(6, 20);
  const std::vector<SegmentationSample> tr(data.begin(), data.begin() + 4), va(data.begin() + 4, data.end());
  TrainOptions o;
  o.epochs = 2;
  o.batch_size = 3;
  o.seed = 5;
  Model a = build_irisnet(tiny(), 2), b = build_irisnet(tiny(), 2);
  EXPECT_EQ(train(a, tr, va, o).history.to_csv(), train(b, tr, va, o).history.to_csv());
}

TEST(Train, BestEpochIsArgminAndSavedFlags) {
  const auto data = phantoms(6, 30);
  const std::vector<SegmentationSample> tr(data.begin(), data.begin() + 4), va(data.begin() + 4, data.end());
  TrainOptions o;
  o.epochs = 4;
  o.batch_size = 3;
  o.adam.learning_rate = 1e-2;
  Model m = build_irisnet(tiny(), 3);
  const TrainResult r = train(m, tr, va, o);
  ASSERT_EQ(r.history.records.size(), 4u);
  double best = INFINITY;
  int arg = 0;
  for (const auto& rec : r.history.records) {
    EXPECT_EQ(rec.saved, rec.val_dice < best);
    if (rec.val_dice < best) {
      best = rec.val_dice;
      arg = rec.epoch;
    }
  }
  EXPECT_EQ(r.history.best_epoch(), arg);
  Model best_model = r.best;
  EXPECT_DOUBLE_EQ(evaluate_losses(best_model, va, 8).dice, best);
}

TEST(Train, EmptyDatasetRejected) {
  Model m = build_irisnet(tiny(), 1);
  const auto data = phantoms(1, 40);
  EXPECT_THROW(train(m, {}, data, TrainOptions{}), std::invalid_argument);
}

TEST(Train, HistoryCsvHeader) {
  TrainHistory h;
  h.records.push_back(EpochRecord{1, 0.5, 0.25, 0.4, 0.2, 0.0, true});
  EXPECT_EQ(h.to_csv(), "epoch,train_dice,train_bce,val_dice,val_bce,seconds,saved\n1,0.5,0.25,0.40000000000000002,"
                        "0.20000000000000001,0.000,1\n");
}

}  // namespace
}  // namespace irisnet
