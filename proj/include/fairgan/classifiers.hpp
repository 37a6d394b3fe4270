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

// Downstream classifiers and the REAL2REAL / SYN2SYN / SYN2REAL protocols.
// Classifiers only ever see X; the protected attribute is used for scoring.

#ifndef FAIRGAN_CLASSIFIERS_HPP_
#define FAIRGAN_CLASSIFIERS_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "fairgan/data.hpp"
#include "fairgan/metrics.hpp"
#include "fairgan/nn.hpp"

namespace fairgan {

struct LinearSvmModel {
  Vector weights;
  double bias = 0.0;
  double c = 1.0;

  Vector Decision(const Matrix& x) const;
  std::vector<int> Predict(const Matrix& x) const;
};

struct SvmOptions {
  double c = 1.0;
  int epochs = 50;
};

// Soft-margin linear SVM, primal objective
//   (1/2) ||w||^2 + C * sum_i hinge(y_i (w.x_i + b)),
// solved by Pegasos-style stochastic subgradient steps 1 / (lambda t) with
// lambda = 1 / (C n), the bias carried as a constant feature. The returned
// weights average the iterates of the second half of training.
LinearSvmModel TrainLinearSvm(const Matrix& x, std::span<const int> y, const SvmOptions& opts,
                              Rng& rng);

struct TreeNode {
  int column = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;  // x[column] <= threshold
  int right = -1;
  int label = 0;
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int max_depth = 5;

  int Depth() const;
  std::vector<int> Predict(const Matrix& x) const;
};

// Greedy CART with Gini impurity. Candidate thresholds are midpoints between
// consecutive distinct values; ties go to the lower column, then the lower
// threshold. Leaves predict the majority class (ties to 0).
DecisionTreeModel TrainDecisionTree(const Matrix& x, std::span<const int> y, int max_depth = 5);

enum class ClassifierKind { kLinearSvm, kDecisionTree };
enum class Setting { kReal2Real, kSyn2Syn, kSyn2Real };

std::string_view ClassifierName(ClassifierKind k);
std::string_view SettingName(Setting s);
ClassifierKind ParseClassifier(std::string_view name);
Setting ParseSetting(std::string_view name);

Learner MakeLearner(ClassifierKind kind);

struct EvalResult {
  Setting setting = Setting::kReal2Real;
  ClassifierKind classifier = ClassifierKind::kLinearSvm;
  double accuracy = 0.0;
  double risk_difference = 0.0;
  std::uint64_t seed = 0;
};

// Every setting uses a 1:1 split. REAL2REAL trains and tests on the real
// halves; SYN2SYN on the synthetic halves; SYN2REAL trains on the synthetic
// train half and tests on the real test half. Both datasets are split with
// permutations drawn from the same seed. A single-class training half gives
// the constant predictor for that class.
EvalResult RunSetting(Setting setting, const EncodedDataset& real,
                      const EncodedDataset* synthetic, ClassifierKind classifier,
                      std::uint64_t seed);

void WriteEvalCsvHeader(std::ostream& out);
void WriteEvalCsvRow(std::ostream& out, const EvalResult& r);

}  // namespace fairgan

#endif  // FAIRGAN_CLASSIFIERS_HPP_
