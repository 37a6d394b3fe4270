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

// Exact evaluation of the adversarial games on finite outcome spaces.
//
// With p = P_data(x, y, s), q = P_G(x, y, s) and g1, g0 the generator's
// conditionals P_G(x, y | s), the FairGAN game is
//
//   V = sum p log D1 + sum q log(1 - D1) + lambda [sum g1 log D2 + sum g0 log(1 - D2)].
//
// For a fixed generator each sum is maximized pointwise, which gives
//
//   C = -(1 + lambda) log 4 + 2 JSD(p || q) + 2 lambda JSD(g1 || g0).
//
// The nfgan2 game drops s from D1 and weighs both real conditionals equally
// against both generated ones. With A = (P1 + P0) / 2 and B = (g1 + g0) / 2,
//
//   C' = -3 log 4 + 4 JSD(A || B) + 2 JSD(g1 || g0),
//
// minimized at g1 = g0 = A.

#ifndef FAIRGAN_THEORY_HPP_
#define FAIRGAN_THEORY_HPP_

#include <span>
#include <vector>

#include "fairgan/pmf.hpp"

namespace fairgan {

// p_data / (p_data + p_g) per outcome; 0/0 -> 0.5. Throws on mismatched
// outcome lists.
std::vector<double> OptimalD1(const FinitePmf& p_data, const FinitePmf& p_g);
// g1 / (g1 + g0) per (x, y) outcome; 0/0 -> 0.5.
std::vector<double> OptimalD2(const FinitePmf& g_s1, const FinitePmf& g_s0);

// V at arbitrary discriminator tables: d1 indexed like p_data's outcomes, d2
// like p_g's (x, y) support. Terms with zero mass contribute 0.
double FairganGameValue(const FinitePmf& p_data, const FinitePmf& p_g, double lambda,
                        std::span<const double> d1, std::span<const double> d2);

// Value of the FairGAN game at p_g = p_data with equal conditionals.
double FairganFloor(double lambda);

struct GameEvaluation {
  std::vector<double> d1_table;
  std::vector<double> d2_table;
  double lambda = 0.0;
  double value = 0.0;        // direct summation at the optimal discriminators
  double closed_form = 0.0;  // floor + JSD terms
  double jsd_data_vs_g = 0.0;
  double jsd_s1_vs_s0 = 0.0;
  double delta = 0.0;  // value - FairganFloor(lambda)

  nlohmann::json ToJson() const;
};

// Throws std::logic_error if the two evaluations disagree by more than 1e-9.
GameEvaluation FairganValue(const FinitePmf& p_data, const FinitePmf& p_g, double lambda);

// Value of C' at its minimizer.
double Nfgan2Floor();

struct Nfgan2Evaluation {
  std::vector<double> d1_table;  // over the (x, y) support
  std::vector<double> d2_table;
  double value = 0.0;
  double closed_form = 0.0;
  double jsd_mixtures = 0.0;  // JSD(A || B)
  double jsd_s1_vs_s0 = 0.0;

  nlohmann::json ToJson() const;
};

// C' at arbitrary generator conditionals over p_data's (x, y) support.
Nfgan2Evaluation Nfgan2Value(const FinitePmf& p_data, const FinitePmf& g_s1,
                             const FinitePmf& g_s0);

struct Nfgan2Optimum {
  FinitePmf given_s1;  // both equal the mixture average
  FinitePmf given_s0;
  Nfgan2Evaluation evaluation;
};

// Throws std::invalid_argument when p_data lacks an s group.
Nfgan2Optimum Nfgan2ValueAndOptimum(const FinitePmf& p_data);

// The toy Gaussians discretized to `bins` equal bins over [kToyMin, kToyMax].
// Mass beyond the range is folded into the edge bins.
struct ToyDiscretization {
  std::vector<double> given_s1;
  std::vector<double> given_s0;
  std::vector<double> mixture;  // (given_s1 + given_s0) / 2
};
ToyDiscretization DiscretizeToy(int bins = 64);
// Joint PMF over ("bin<k>", y = 0, s) with P(s = 1) = 1/2.
FinitePmf ToyJointPmf(int bins = 64);

// Scenario: {"outcomes": [...], "lambda": l, optional "generator": [...]}.
// The generator defaults to the data PMF. Returns the FairGAN evaluation and,
// when both s groups are present, the nfgan2 optimum.
nlohmann::json EvaluateScenario(const nlohmann::json& scenario);

}  // namespace fairgan

#endif  // FAIRGAN_THEORY_HPP_
