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

#include <atomic>
#include <sstream>

#include <gtest/gtest.h>

#include "fairgan/experiments.hpp"

namespace fairgan {
namespace {

TEST(Spearman, PerfectAndReversed) {
  const std::vector<double> a = {0, 0.5, 1, 2};
  const std::vector<double> up = {0.3, 0.31, 0.5, 9};
  const std::vector<double> down = {0.2, 0.1, 0.05, 0.01};
  EXPECT_DOUBLE_EQ(Spearman(a, up), 1.0);
  EXPECT_DOUBLE_EQ(Spearman(a, down), -1.0);
}

TEST(Spearman, TiesUseAverageRanks) {
  // Ranks: a = [1, 2, 3, 4], b = [1.5, 1.5, 3, 4] -> Pearson on ranks.
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {5, 5, 6, 7};
  const double mb = 2.5;
  const std::vector<double> rb = {1.5, 1.5, 3, 4};
  double cov = 0, va = 0, vb = 0;
  for (int i = 0; i < 4; ++i) {
    cov += (i + 1 - 2.5) * (rb[i] - mb);
    va += (i + 1 - 2.5) * (i + 1 - 2.5);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  EXPECT_NEAR(Spearman(a, b), cov / std::sqrt(va * vb), 1e-15);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_EQ(Median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(Median({}), std::invalid_argument);
}

TEST(StageRng, StreamsDifferAndRepeat) {
  Rng a = StageRng(1, Stage::kAutoencoder);
  Rng b = StageRng(1, Stage::kSynthesis);
  Rng c = StageRng(1, Stage::kAutoencoder);
  const double va = a.Uniform();
  EXPECT_NE(va, b.Uniform());
  EXPECT_EQ(va, c.Uniform());
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(50);
  ParallelFor(50, 4, [&](size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(ParallelFor(10, 3,
                           [](size_t i) {
                             if (i == 7) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

TEST(Profile, ApplyOverridesAndValidates) {
  Profile p = Profile::Fast();
  p.Apply(nlohmann::json::parse(R"({"phase1_epochs": 5, "lambda": 0.5, "ae_hidden": 16})"));
  EXPECT_EQ(p.train.phase1_epochs, 5);
  EXPECT_EQ(p.train.phase2_epochs, 300);
  EXPECT_EQ(p.train.lambda, 0.5);
  EXPECT_EQ(p.autoencoder.hidden, 16);
  EXPECT_EQ(p.subsample, 8000u);
  EXPECT_THROW(p.Apply(nlohmann::json::parse(R"({"batch": 3})")), std::invalid_argument);
  Profile q;
  q.Apply(Profile::Fast().ToJson());
  EXPECT_EQ(q.ToJson(), Profile::Fast().ToJson());
}

TEST(WriteHistogramCsv, HeaderAndEdges) {
  std::ostringstream out;
  WriteHistogramCsv(out, {"a"}, {{0.5, 0.5}});
  EXPECT_EQ(out.str(), "bin_lo,bin_hi,a\n-1,2,0.5\n2,5,0.5\n");
}

TEST(TrainSeed, SharedPhaseAndLambdaBranches) {
  Rng rng(1);
  auto ds = SampleToy(200, rng);
  for (size_t i = 0; i < ds.size(); ++i) ds.y[i] = rng.Bernoulli(0.5);
  Profile p = Profile::Toy();
  p.autoencoder.epochs = 2;
  p.autoencoder.hidden = 4;
  p.train.phase1_epochs = 1;
  p.train.phase2_epochs = 1;
  p.train.noise_dim = 4;
  p.train.generator_hidden = {8};
  p.train.discriminator_hidden = {8};
  SeedPlan plan;
  plan.lambdas = {0.0, 2.0};
  const auto m = TrainSeed(ds, p, 3, plan);
  EXPECT_EQ(m.fairgan_by_lambda.size(), 3u);  // 0, 1 (config), 2
  EXPECT_EQ(m.models.size(), 4u);
  EXPECT_EQ(m.models.at(Variant::kFairgan), m.fairgan_by_lambda.at(1.0));
  // gan is fairgan's first phase, so lambda = 0 differs only through D2.
  EXPECT_EQ(m.models.at(Variant::kGan).generator.g.layers.size(),
            m.fairgan_by_lambda.at(0.0).generator.g.layers.size());
  EXPECT_EQ(m.models.at(Variant::kGan).variant, Variant::kGan);
  EXPECT_FALSE(m.models.at(Variant::kGan).d2.has_value());
}

}  // namespace
}  // namespace fairgan
