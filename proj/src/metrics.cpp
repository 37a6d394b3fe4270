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

#include "fairgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "fairgan/classifiers.hpp"

namespace fairgan {
namespace {

void CheckBinary(std::span<const int> v, const char* what) {
  for (int e : v) {
    if (e != 0 && e != 1) throw MetricError(std::string(what) + " must be 0/1");
  }
}

// Positive rate of `v` within each s group: {rate | s=1, rate | s=0}.
std::pair<double, double> GroupRates(std::span<const int> v, std::span<const int> s,
                                     const char* what) {
  if (v.size() != s.size()) throw MetricError(std::string(what) + ": length mismatch with s");
  CheckBinary(v, what);
  CheckBinary(s, "s");
  double pos[2] = {0, 0};
  double cnt[2] = {0, 0};
  for (size_t i = 0; i < v.size(); ++i) {
    cnt[s[i]] += 1;
    pos[s[i]] += v[i];
  }
  if (cnt[0] == 0 || cnt[1] == 0) {
    throw MetricError(std::string(what) + ": an s group is empty");
  }
  return {pos[1] / cnt[1], pos[0] / cnt[0]};
}

std::string FormatCell(const Cell& c) {
  if (!c) return "?";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *c);
  return buf;
}

std::string RowKey(const EncodedDataset& ds, size_t i, bool with_s) {
  const RowVector row = ds.x.row(static_cast<Eigen::Index>(i));
  const Record rec =
      Decode(std::span<const double>(row.data(), static_cast<size_t>(row.size())), ds.features);
  std::string key;
  for (const auto& c : rec) {
    key += FormatCell(c);
    key += ',';
  }
  key += ds.y[i] ? "y1" : "y0";
  if (with_s) key += ds.s[i] ? ",s1" : ",s0";
  return key;
}

}  // namespace

double RiskDifferenceData(std::span<const int> y, std::span<const int> s) {
  const auto [r1, r0] = GroupRates(y, s, "RiskDifferenceData");
  return r1 - r0;
}

double RiskDifferenceData(const EncodedDataset& ds) { return RiskDifferenceData(ds.y, ds.s); }

double RiskDifferenceClassifier(std::span<const int> predictions, std::span<const int> s) {
  const auto [r1, r0] = GroupRates(predictions, s, "RiskDifferenceClassifier");
  return r1 - r0;
}

double RiskDifferenceClassifier(const Predictor& predict, const EncodedDataset& ds) {
  const auto pred = predict(ds.x);
  return RiskDifferenceClassifier(pred, ds.s);
}

double BalancedErrorRate(std::span<const int> s_predicted, std::span<const int> s) {
  // rate1 = P(f=1 | s=1), rate0 = P(f=1 | s=0).
  const auto [rate1, rate0] = GroupRates(s_predicted, s, "BalancedErrorRate");
  return ((1.0 - rate1) + rate0) / 2.0;
}

double BalancedErrorRate(const Predictor& predict_s, const Matrix& x, std::span<const int> s) {
  const auto pred = predict_s(x);
  return BalancedErrorRate(pred, s);
}

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw MetricError("Accuracy: length mismatch");
  if (labels.empty()) throw MetricError("Accuracy: empty evaluation set");
  size_t hit = 0;
  for (size_t i = 0; i < labels.size(); ++i) hit += predictions[i] == labels[i];
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

EpsilonFairResult EpsilonFair(const Matrix& x, std::span<const int> s, double epsilon, Rng& rng,
                              const Learner& attacker) {
  if (static_cast<size_t>(x.rows()) != s.size()) throw MetricError("EpsilonFair: length mismatch");
  if (s.size() < 4) throw MetricError("EpsilonFair: need at least 4 rows");
  const Learner learn = attacker ? attacker : MakeLearner(ClassifierKind::kLinearSvm);
  const auto perm = SplitPermutation(s.size(), rng);
  const size_t half = s.size() / 2;
  auto gather = [&](size_t lo, size_t hi, Matrix& xs, std::vector<int>& ss) {
    xs.resize(static_cast<Eigen::Index>(hi - lo), x.cols());
    ss.resize(hi - lo);
    for (size_t k = lo; k < hi; ++k) {
      xs.row(static_cast<Eigen::Index>(k - lo)) = x.row(static_cast<Eigen::Index>(perm[k]));
      ss[k - lo] = s[perm[k]];
    }
  };
  Matrix x_train, x_test;
  std::vector<int> s_train, s_test;
  gather(0, half, x_train, s_train);
  gather(half, s.size(), x_test, s_test);

  EpsilonFairResult out;
  const bool one_class = std::all_of(s_train.begin(), s_train.end(),
                                     [&](int v) { return v == s_train.front(); });
  if (one_class) {
    // Nothing to learn: the attacker can only output the observed class.
    const std::vector<int> constant(s_test.size(), s_train.front());
    out.ber = BalancedErrorRate(constant, s_test);
  } else {
    const Predictor f = learn(x_train, s_train, rng);
    out.ber = BalancedErrorRate(f(x_test), s_test);
  }
  out.pass = out.ber > epsilon;
  return out;
}

EpsilonFairResult EpsilonFair(const EncodedDataset& ds, double epsilon, Rng& rng,
                              const Learner& attacker) {
  return EpsilonFair(ds.x, ds.s, epsilon, rng, attacker);
}

std::vector<DimensionRate> DimensionwiseProbability(const EncodedDataset& ds) {
  if (ds.size() == 0) throw MetricError("DimensionwiseProbability: empty dataset");
  const auto names = EncodedColumnNames(ds.features);
  const Eigen::Index d = ds.x.cols();
  std::vector<double> sum_all(static_cast<size_t>(d) + 1, 0.0);
  std::vector<double> sum_s[2] = {sum_all, sum_all};
  double cnt[2] = {0, 0};
  for (size_t i = 0; i < ds.size(); ++i) {
    const int g = ds.s[i];
    cnt[g] += 1;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = ds.x(static_cast<Eigen::Index>(i), j);
      sum_all[static_cast<size_t>(j)] += v;
      sum_s[g][static_cast<size_t>(j)] += v;
    }
    sum_all.back() += ds.y[i];
    sum_s[g].back() += ds.y[i];
  }
  const double n = static_cast<double>(ds.size());
  std::vector<DimensionRate> out;
  out.reserve(sum_all.size());
  for (size_t j = 0; j < sum_all.size(); ++j) {
    DimensionRate r;
    r.column = j < static_cast<size_t>(d) ? names[j] : "y";
    r.overall = sum_all[j] / n;
    if (cnt[1] > 0) r.given_s1 = sum_s[1][j] / cnt[1];
    if (cnt[0] > 0) r.given_s0 = sum_s[0][j] / cnt[0];
    out.push_back(std::move(r));
  }
  return out;
}

std::string_view PmfModeName(PmfMode m) {
  switch (m) {
    case PmfMode::kJointXY: return "joint_xy";
    case PmfMode::kJointXYS: return "joint_xys";
    case PmfMode::kCondS1: return "cond_s1";
    case PmfMode::kCondS0: return "cond_s0";
  }
  return "?";
}

double PmfDistance(const EncodedDataset& a, const EncodedDataset& b, PmfMode mode) {
  if (a.x.cols() != b.x.cols()) throw MetricError("PmfDistance: datasets differ in width");
  const bool with_s = mode == PmfMode::kJointXYS;
  const int only_s = mode == PmfMode::kCondS1 ? 1 : (mode == PmfMode::kCondS0 ? 0 : -1);
  std::unordered_map<std::string, std::pair<double, double>> counts;
  double na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (only_s >= 0 && a.s[i] != only_s) continue;
    counts[RowKey(a, i, with_s)].first += 1;
    na += 1;
  }
  for (size_t i = 0; i < b.size(); ++i) {
    if (only_s >= 0 && b.s[i] != only_s) continue;
    counts[RowKey(b, i, with_s)].second += 1;
    nb += 1;
  }
  if (na == 0 || nb == 0) {
    throw MetricError("PmfDistance: no rows for mode " + std::string(PmfModeName(mode)));
  }
  double sq = 0.0;
  for (const auto& [key, c] : counts) {
    const double diff = c.first / na - c.second / nb;
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double Jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw MetricError("Jsd: supports differ");
  double sp = 0, sq = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) throw MetricError("Jsd: negative mass");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
    throw MetricError("Jsd: inputs are not normalized");
  }
  double out = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) out += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0) out += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::max(out, 0.0);
}

double Jsd(const FinitePmf& p, const FinitePmf& q) {
  if (!SameXYSupport(p, q)) throw MetricError("Jsd: PMFs have different supports");
  return Jsd(p.probs(), q.probs());
}

std::vector<double> Histogram(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw MetricError("Histogram: bad bin layout");
  if (values.empty()) throw MetricError("Histogram: no values");
  std::vector<double> h(static_cast<size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int k = static_cast<int>(std::floor((v - lo) / width));
    k = std::clamp(k, 0, bins - 1);
    h[static_cast<size_t>(k)] += 1.0;
  }
  for (auto& e : h) e /= static_cast<double>(values.size());
  return h;
}

nlohmann::json FairnessReport::ToJson() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["risk_difference"] = risk_difference;
  j["epsilon"] = epsilon;
  if (ber) {
    j["ber"] = *ber;
    j["epsilon_fair"] = *ber > epsilon;
  }
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& r : dimensionwise) {
    nlohmann::json e{{"column", r.column}, {"overall", r.overall}};
    e["given_s1"] = r.given_s1 ? nlohmann::json(*r.given_s1) : nlohmann::json(nullptr);
    e["given_s0"] = r.given_s0 ? nlohmann::json(*r.given_s0) : nlohmann::json(nullptr);
    dims.push_back(std::move(e));
  }
  j["dimensionwise"] = std::move(dims);
  if (!pmf_distances.empty()) j["pmf_distance"] = pmf_distances;
  return j;
}

FairnessReport Audit(const EncodedDataset& ds, const AuditOptions& options, Rng& rng) {
  FairnessReport r;
  r.rows = ds.size();
  r.epsilon = options.epsilon;
  r.risk_difference = RiskDifferenceData(ds);
  if (options.with_ber) r.ber = EpsilonFair(ds, options.epsilon, rng).ber;
  r.dimensionwise = DimensionwiseProbability(ds);
  if (options.reference != nullptr) {
    for (auto m : {PmfMode::kJointXY, PmfMode::kJointXYS, PmfMode::kCondS1, PmfMode::kCondS0}) {
      r.pmf_distances[std::string(PmfModeName(m))] = PmfDistance(*options.reference, ds, m);
    }
  }
  return r;
}

void WriteDimensionwiseCsv(std::ostream& out, const std::vector<DimensionRate>& a,
                           const std::vector<DimensionRate>& b) {
  if (a.size() != b.size()) throw MetricError("WriteDimensionwiseCsv: column counts differ");
  auto opt = [](const std::optional<double>& v) {
    char buf[32] = "";
    if (v) std::snprintf(buf, sizeof buf, "%.10g", *v);
    return std::string(buf);
  };
  out << "column,p_overall_a,p_overall_b,p_s1_a,p_s0_a,p_s1_b,p_s0_b\n";
  for (size_t i = 0; i < a.size(); ++i) {
    out << CsvEscape(a[i].column) << ',' << opt(a[i].overall) << ',' << opt(b[i].overall) << ','
        << opt(a[i].given_s1) << ',' << opt(a[i].given_s0) << ',' << opt(b[i].given_s1) << ','
        << opt(b[i].given_s0) << '\n';
  }
}

}  // namespace fairgan
