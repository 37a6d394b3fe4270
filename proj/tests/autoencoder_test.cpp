/*
 * Copyright 2026 The fairgan-tab Authors.
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

#include <gtest/gtest.h>

#include "fairgan/autoencoder.hpp"
#include "fairgan/experiments.hpp"

namespace fairgan {
namespace {

TEST(ReconstructionLoss, Identity) {
  Matrix x(2, 3);
  x << 0.1, 0.2, 0.3, 1, 0, 1;
  EXPECT_EQ(ReconstructionLoss(x, x), 0.0);
}

TEST(ReconstructionLoss, UnitDifference) {
  Matrix x(1, 2), r(1, 2);
  x << 0, 0;
  r << 1, 0;
  EXPECT_DOUBLE_EQ(ReconstructionLoss(x, r), 1.0);
}

TEST(ReconstructionLoss, TwoRowsHandValue) {
  Matrix x(2, 2), r(2, 2);
  x << 0, 1, 1, 1;
  r << 0.5, 1, 1, 0;
  EXPECT_DOUBLE_EQ(ReconstructionLoss(x, r), 0.625);
}

TEST(ReconstructionLoss, ShapeMismatchThrows) {
  EXPECT_THROW(ReconstructionLoss(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), ShapeError);
}

TEST(Pretrain, RepeatedRowIsLearned) {
  // 1,024 copies at batch 128: eight Adam steps per epoch.
  Matrix data(1024, 5);
  for (Eigen::Index i = 0; i < data.rows(); ++i) data.row(i) << 1, 0, 0, 1, 0.3;
  PretrainConfig cfg;
  Rng rng(1);
  const auto r = Pretrain(data, cfg, rng);
  EXPECT_LT(r.final_loss, 1e-3);
  EXPECT_EQ(r.loss_trace.size(), 200u);
}

TEST(Pretrain, OneHotRowsWithSquareBottleneck) {
  Matrix data = Matrix::Identity(4, 4);
  PretrainConfig cfg;
  cfg.hidden = 4;
  cfg.epochs = 500;
  cfg.batch = 4;
  // The identity through tanh then sigmoid needs large weights; 500 full-batch
  // steps reach them only with a larger step size.
  cfg.learning_rate = 1e-2;
  Rng rng(2);
  const auto r = Pretrain(data, cfg, rng);
  EXPECT_LT(r.final_loss, 0.01);
  EXPECT_LE(r.final_loss, r.initial_loss);
}

TEST(Pretrain, EmptyDataThrows) {
  Rng rng(3);
  EXPECT_THROW(Pretrain(Matrix(0, 3), PretrainConfig{}, rng), std::exception);
}

TEST(Pretrain, SameSeedIsBitReproducible) {
  Rng data_rng(4);
  const Matrix data = data_rng.NormalMatrix(50, 6).cwiseAbs().cwiseMin(1.0);
  PretrainConfig cfg;
  cfg.epochs = 20;
  cfg.hidden = 8;
  Rng a(5), b(5);
  const auto ra = Pretrain(data, cfg, a);
  const auto rb = Pretrain(data, cfg, b);
  EXPECT_EQ(ra.model.encoder, rb.model.encoder);
  EXPECT_EQ(ra.model.decoder, rb.model.decoder);
  EXPECT_EQ(ra.loss_trace, rb.loss_trace);
}

TEST(Pretrain, DecoderOutputsStayInUnitInterval) {
  Rng rng(6);
  const auto ae = AutoencoderModel::Init(7, 5, rng);
  const Matrix out = ae.Reconstruct(50.0 * rng.NormalMatrix(30, 7));
  EXPECT_GT(out.minCoeff(), 0.0);
  EXPECT_LT(out.maxCoeff(), 1.0);
}

TEST(Pretrain, AdultTraceTrendsDown) {
  const auto full = LoadEncoded(FAIRGAN_SOURCE_DIR "/data/adult_schema.json",
                                FAIRGAN_SOURCE_DIR "/data/adult.csv");
  Rng sub_rng(7);
  const auto ds = StratifiedSubsample(full, 2000, sub_rng);
  PretrainConfig cfg;
  cfg.epochs = 60;
  Rng rng(8);
  const auto r = Pretrain(ds, cfg, rng);
  // 10-epoch window means never increase.
  double prev = 1e300;
  for (size_t w = 0; w + 10 <= r.loss_trace.size(); w += 10) {
    double mean = 0;
    for (size_t k = w; k < w + 10; ++k) mean += r.loss_trace[k] / 10.0;
    EXPECT_LE(mean, prev);
    prev = mean;
  }
  EXPECT_LE(r.final_loss, r.initial_loss);
}

TEST(Checkpoint, JsonRoundTrip) {
  Rng rng(9);
  const auto ae = AutoencoderModel::Init(6, 3, rng);
  const auto back = AutoencoderModel::FromJson(nlohmann::json::parse(ae.ToJson().dump()));
  EXPECT_EQ(back.encoder, ae.encoder);
  EXPECT_EQ(back.decoder, ae.decoder);
  EXPECT_EQ(back.hidden, 3);
}

}  // namespace
}  // namespace fairgan
