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

// Fairness and utility measurements over encoded datasets and classifiers.
// All logarithms are natural.

#ifndef FAIRGAN_METRICS_HPP_
#define FAIRGAN_METRICS_HPP_

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairgan/data.hpp"
#include "fairgan/nn.hpp"
#include "fairgan/pmf.hpp"

namespace fairgan {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Maps a feature matrix to one {0, 1} label per row.
using Predictor = std::function<std::vector<int>(const Matrix&)>;
// Fits a predictor of `labels` from `x`.
using Learner = std::function<Predictor(const Matrix& x, std::span<const int> labels, Rng& rng)>;

// P(y=1 | s=1) - P(y=1 | s=0). Throws MetricError if a group is empty.
double RiskDifferenceData(std::span<const int> y, std::span<const int> s);
double RiskDifferenceData(const EncodedDataset& ds);

// P(pred=1 | s=1) - P(pred=1 | s=0).
double RiskDifferenceClassifier(std::span<const int> predictions, std::span<const int> s);
double RiskDifferenceClassifier(const Predictor& predict, const EncodedDataset& ds);

// [P(f=0 | s=1) + P(f=1 | s=0)] / 2.
double BalancedErrorRate(std::span<const int> s_predicted, std::span<const int> s);
double BalancedErrorRate(const Predictor& predict_s, const Matrix& x, std::span<const int> s);

double Accuracy(std::span<const int> predictions, std::span<const int> labels);

struct EpsilonFairResult {
  bool pass = false;  // ber > epsilon
  double ber = 0.0;
};

// Trains `attacker` to predict s from x on one half of a seeded 1:1 split and
// measures BER on the other half. The default attacker is a linear SVM with
// C = 1.
EpsilonFairResult EpsilonFair(const Matrix& x, std::span<const int> s, double epsilon, Rng& rng,
                              const Learner& attacker = {});
EpsilonFairResult EpsilonFair(const EncodedDataset& ds, double epsilon, Rng& rng,
                              const Learner& attacker = {});

struct DimensionRate {
  std::string column;
  double overall = 0.0;
  std::optional<double> given_s1;
  std::optional<double> given_s0;
};

// Mean of every encoded column plus the decision column "y", overall and per
// s group (absent when the group is empty).
std::vector<DimensionRate> DimensionwiseProbability(const EncodedDataset& ds);

enum class PmfMode { kJointXY, kJointXYS, kCondS1, kCondS0 };
std::string_view PmfModeName(PmfMode m);

// L2 distance between the empirical PMFs of decoded (x, y) records (plus s in
// kJointXYS) over the union of observed outcomes.
double PmfDistance(const EncodedDataset& a, const EncodedDataset& b, PmfMode mode);

// Jensen-Shannon divergence, in [0, log 2]. Inputs must share a support and
// each sum to 1 within 1e-9.
double Jsd(const FinitePmf& p, const FinitePmf& q);
double Jsd(std::span<const double> p, std::span<const double> q);

// Normalized histogram on [lo, hi]; values outside land in the edge bins.
std::vector<double> Histogram(std::span<const double> values, int bins, double lo, double hi);

struct FairnessReport {
  size_t rows = 0;
  double risk_difference = 0.0;
  std::optional<double> ber;
  double epsilon = 0.0;
  std::vector<DimensionRate> dimensionwise;
  std::map<std::string, double> pmf_distances;  // only when a reference is given

  nlohmann::json ToJson() const;
};

struct AuditOptions {
  double epsilon = 0.3;
  bool with_ber = true;
  const EncodedDataset* reference = nullptr;  // for PMF distances
};

FairnessReport Audit(const EncodedDataset& ds, const AuditOptions& options, Rng& rng);

// Dimension-wise table for two datasets over the same columns:
// column, a, b, a_s1, a_s0, b_s1, b_s0. Absent group rates are left empty.
void WriteDimensionwiseCsv(std::ostream& out, const std::vector<DimensionRate>& a,
                           const std::vector<DimensionRate>& b);

}  // namespace fairgan

#endif  // FAIRGAN_METRICS_HPP_
