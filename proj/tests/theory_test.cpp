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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fairgan/metrics.hpp"
#include "fairgan/nn.hpp"
#include "fairgan/theory.hpp"

namespace fairgan {
namespace {

const double kLog4 = std::log(4.0);

std::vector<Outcome> XYS(int n_x) {
  std::vector<Outcome> o;
  for (int s : {1, 0}) {
    for (int k = 0; k < n_x; ++k) o.push_back({"x" + std::to_string(k / 2), k % 2, s});
  }
  return o;
}

std::vector<double> RandomSimplex(size_t n, Rng& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = rng.Uniform(0.05, 1.0);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return p;
}

TEST(OptimalD1, HandRatios) {
  const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}};
  const auto d = OptimalD1(FinitePmf(o, {0.5, 0.3, 0.2}), FinitePmf(o, {0.2, 0.3, 0.5}));
  EXPECT_NEAR(d[0], 5.0 / 7, 1e-15);
  EXPECT_NEAR(d[1], 0.5, 1e-15);
  EXPECT_NEAR(d[2], 2.0 / 7, 1e-15);
}

TEST(OptimalD1, LimitsAndConventions) {
  const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 0, 1}, {"c", 0, 1}};
  const auto d = OptimalD1(FinitePmf(o, {0.5, 0.5, 0.0}), FinitePmf(o, {0.0, 1.0, 0.0}));
  EXPECT_EQ(d[0], 1.0);
  EXPECT_EQ(d[2], 0.5);
  const std::vector<Outcome> other = {{"a", 0, 1}, {"b", 0, 1}, {"z", 0, 1}};
  EXPECT_THROW(OptimalD1(FinitePmf(o, {0.5, 0.5, 0.0}), FinitePmf(other, {0.5, 0.5, 0.0})),
               std::invalid_argument);
}

TEST(OptimalD2, HandRatios) {
  const std::vector<Outcome> a = {{"a", 0, 1}, {"b", 0, 1}};
  const std::vector<Outcome> b = {{"a", 0, 0}, {"b", 0, 0}};
  const auto d = OptimalD2(FinitePmf(a, {0.6, 0.4}), FinitePmf(b, {0.2, 0.8}));
  EXPECT_NEAR(d[0], 0.75, 1e-15);
  EXPECT_NEAR(d[1], 1.0 / 3, 1e-15);
  const auto e = OptimalD2(FinitePmf(a, {1.0, 0.0}), FinitePmf(b, {0.0, 1.0}));
  EXPECT_EQ(e[0], 1.0);
}

TEST(FairganValue, FloorAtMatchedGenerator) {
  for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
    const auto o = XYS(2);
    const FinitePmf p(o, {0.2, 0.3, 0.2, 0.3});
    const auto ev = FairganValue(p, p, lambda);
    EXPECT_NEAR(ev.value, -(1 + lambda) * kLog4, 1e-12) << lambda;
    EXPECT_NEAR(ev.delta, 0.0, 1e-12);
    EXPECT_NEAR(FairganFloor(lambda), -(1 + lambda) * kLog4, 1e-15);
  }
}

TEST(FairganValue, ZeroLambdaIsTheTwoTermGanCriterion) {
  Rng rng(1);
  const auto o = XYS(3);
  const FinitePmf p(o, RandomSimplex(o.size(), rng));
  const FinitePmf q(o, RandomSimplex(o.size(), rng));
  const auto ev = FairganValue(p, q, 0.0);
  EXPECT_NEAR(ev.value, -kLog4 + 2 * Jsd(p.probs(), q.probs()), 1e-12);
}

TEST(FairganValue, MatchesGridSearchOverDiscriminators) {
  // V separates into one concave term per discriminator entry, so a
  // coordinate-wise grid search is the global grid maximum.
  const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 1, 1}, {"a", 0, 0}, {"b", 1, 0}};
  const FinitePmf p(o, {0.25, 0.25, 0.25, 0.25});
  const FinitePmf q(o, {0.4, 0.1, 0.15, 0.35});
  const double lambda = 1.0;
  auto best = [](double a, double b) {
    double top = -1e300;
    for (int k = 1; k < 1000; ++k) {
      const double d = k * 1e-3;
      top = std::max(top, a * std::log(d) + b * std::log(1 - d));
    }
    return top;
  };
  double v = 0;
  for (size_t i = 0; i < o.size(); ++i) v += best(p.probs()[i], q.probs()[i]);
  const auto g1 = q.Conditional(1).probs();
  const auto g0 = q.Conditional(0).probs();
  for (size_t i = 0; i < g1.size(); ++i) v += lambda * best(g1[i], g0[i]);
  EXPECT_NEAR(FairganValue(p, q, lambda).value, v, 1e-4);
}

TEST(FairganValue, OptimalTablesAreLocalMaxima) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto o = XYS(4);
    const FinitePmf p(o, RandomSimplex(o.size(), rng));
    const FinitePmf q(o, RandomSimplex(o.size(), rng));
    const double lambda = rng.Uniform(0, 2);
    const auto ev = FairganValue(p, q, lambda);
    const double v = FairganGameValue(p, q, lambda, ev.d1_table, ev.d2_table);
    EXPECT_NEAR(v, ev.value, 1e-12);
    EXPECT_NEAR(ev.value, ev.closed_form, 1e-9);
    for (auto* table : {&ev.d1_table, &ev.d2_table}) {
      for (size_t i = 0; i < table->size(); ++i) {
        for (double step : {-0.01, 0.01}) {
          auto d1 = ev.d1_table;
          auto d2 = ev.d2_table;
          auto& t = table == &ev.d1_table ? d1 : d2;
          t[i] = std::clamp(t[i] + step, 1e-9, 1 - 1e-9);
          EXPECT_LE(FairganGameValue(p, q, lambda, d1, d2), v + 1e-15);
        }
      }
    }
  }
}

TEST(FairganValue, SmallerDivergencesGiveSmallerValue) {
  Rng rng(3);
  const auto o = XYS(4);
  const FinitePmf p(o, RandomSimplex(o.size(), rng));
  const double lambda = 1.0;
  for (int k = 0; k < 100; ++k) {
    const FinitePmf a(o, RandomSimplex(o.size(), rng));
    const FinitePmf b(o, RandomSimplex(o.size(), rng));
    const auto ea = FairganValue(p, a, lambda);
    const auto eb = FairganValue(p, b, lambda);
    if (ea.jsd_data_vs_g <= eb.jsd_data_vs_g && ea.jsd_s1_vs_s0 <= eb.jsd_s1_vs_s0) {
      EXPECT_LE(ea.value, eb.value);
    }
  }
}

TEST(Nfgan2, IdenticalConditionalsGiveThatConditional) {
  const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 1, 1}, {"a", 0, 0}, {"b", 1, 0}};
  const FinitePmf p(o, {0.3, 0.2, 0.3, 0.2});
  const auto opt = Nfgan2ValueAndOptimum(p);
  EXPECT_NEAR(opt.given_s1.probs()[0], 0.6, 1e-15);
  EXPECT_NEAR(opt.given_s0.probs()[1], 0.4, 1e-15);
  EXPECT_NEAR(opt.evaluation.value, Nfgan2Floor(), 1e-12);
  EXPECT_NEAR(Nfgan2Floor(), -3 * kLog4, 1e-15);
}

TEST(Nfgan2, OptimumIsMixtureAverageAndStrictMinimum) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto o = XYS(6);
    const FinitePmf p(o, RandomSimplex(o.size(), rng));
    const auto opt = Nfgan2ValueAndOptimum(p);
    const auto c1 = p.Conditional(1).probs();
    const auto c0 = p.Conditional(0).probs();
    for (size_t i = 0; i < c1.size(); ++i) {
      EXPECT_NEAR(opt.given_s1.probs()[i], 0.5 * (c1[i] + c0[i]), 1e-15);
      EXPECT_EQ(opt.given_s1.probs()[i], opt.given_s0.probs()[i]);
    }
    EXPECT_NEAR(opt.evaluation.value, -3 * kLog4, 1e-12);
    // Shift 1e-3 of mass between two bins of one conditional.
    auto g = opt.given_s1.probs();
    g[0] += 1e-3;
    g[1] -= 1e-3;
    const FinitePmf shifted(opt.given_s1.outcomes(), g);
    EXPECT_GT(Nfgan2Value(p, shifted, opt.given_s0).value, opt.evaluation.value);
  }
}

TEST(Nfgan2, MissingGroupThrows) {
  const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 0, 1}};
  EXPECT_THROW(Nfgan2ValueAndOptimum(FinitePmf(o, {0.5, 0.5})), std::invalid_argument);
}

TEST(Nfgan2, DirectEqualsClosedForm) {
  Rng rng(5);
  const auto o = XYS(4);
  const FinitePmf p(o, RandomSimplex(o.size(), rng));
  const auto xy = p.Conditional(1).outcomes();
  std::vector<Outcome> xy0 = xy;
  for (auto& e : xy0) e.s = 0;
  const FinitePmf g1(xy, RandomSimplex(xy.size(), rng));
  const FinitePmf g0(xy0, RandomSimplex(xy.size(), rng));
  const auto ev = Nfgan2Value(p, g1, g0);
  EXPECT_NEAR(ev.value, ev.closed_form, 1e-9);
  EXPECT_GT(ev.value, -3 * kLog4);
}

TEST(Toy, DiscretizedOptimumIsBinwiseAverage) {
  const auto toy = DiscretizeToy(64);
  ASSERT_EQ(toy.given_s1.size(), 64u);
  EXPECT_NEAR(std::accumulate(toy.given_s1.begin(), toy.given_s1.end(), 0.0), 1.0, 1e-12);
  const auto opt = Nfgan2ValueAndOptimum(ToyJointPmf(64));
  for (size_t k = 0; k < 64; ++k) {
    EXPECT_NEAR(opt.given_s1.probs()[k], 0.5 * (toy.given_s1[k] + toy.given_s0[k]), 1e-15);
    EXPECT_NEAR(toy.mixture[k], opt.given_s1.probs()[k], 1e-15);
  }
  // Bin mass against an independent midpoint-rule integral of the density.
  const double width = 6.0 / 64, sigma = std::sqrt(0.5);
  for (size_t k = 1; k + 1 < 64; ++k) {
    double mass = 0;
    for (int j = 0; j < 200; ++j) {
      const double x = -1.0 + width * (k + (j + 0.5) / 200);
      mass += std::exp(-0.5 * std::pow((x - 1.0) / sigma, 2)) / (sigma * std::sqrt(2 * M_PI)) *
              width / 200;
    }
    EXPECT_NEAR(toy.given_s1[k], mass, 1e-6);
  }
}

TEST(Scenario, EvaluatesJson) {
  const auto j = nlohmann::json::parse(R"({
    "lambda": 1.0,
    "outcomes": [
      {"x": "a", "y": 0, "s": 1, "p": 0.25}, {"x": "b", "y": 1, "s": 1, "p": 0.25},
      {"x": "a", "y": 0, "s": 0, "p": 0.25}, {"x": "b", "y": 1, "s": 0, "p": 0.25}
    ]
  })");
  const auto r = EvaluateScenario(j);
  EXPECT_NEAR(r.at("fairgan").at("value").get<double>(), -2 * kLog4, 1e-12);
  EXPECT_TRUE(r.contains("nfgan2"));
}

TEST(FinitePmfType, RejectsBadInput) {
  const std::vector<Outcome> o = {{"a", 0, 1}, {"a", 0, 1}};
  EXPECT_THROW(FinitePmf(o, {0.5, 0.5}), std::invalid_argument);
  const std::vector<Outcome> u = {{"a", 0, 1}, {"b", 0, 1}};
  EXPECT_THROW(FinitePmf(u, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(FinitePmf(u, {1.5, -0.5}), std::invalid_argument);
}

}  // namespace
}  // namespace fairgan
