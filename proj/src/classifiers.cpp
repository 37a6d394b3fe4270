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

#include "fairgan/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

namespace fairgan {
namespace {

void CheckTrainingSet(const Matrix& x, std::span<const int> y, const char* who) {
  if (static_cast<size_t>(x.rows()) != y.size()) {
    throw MetricError(std::string(who) + ": feature and label counts differ");
  }
  if (y.empty()) throw MetricError(std::string(who) + ": empty training set");
  for (int v : y) {
    if (v != 0 && v != 1) throw MetricError(std::string(who) + ": labels must be 0/1");
  }
}

double Gini(double pos, double n) {
  if (n <= 0) return 0.0;
  const double p = pos / n;
  return 2.0 * p * (1.0 - p);
}

int Majority(double pos, double n) { return pos > n - pos ? 1 : 0; }

struct TreeBuilder {
  const Matrix& x;
  std::span<const int> y;
  int max_depth;
  std::vector<TreeNode> nodes;

  int Build(std::vector<size_t>& idx, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const double n = static_cast<double>(idx.size());
    double pos = 0;
    for (size_t i : idx) pos += y[i];
    nodes[static_cast<size_t>(id)].label = Majority(pos, n);
    const double parent = Gini(pos, n);
    if (depth >= max_depth || parent == 0.0 || idx.size() < 2) return id;

    double best = parent;
    int best_col = -1;
    double best_thr = 0.0;
    std::vector<std::pair<double, int>> col(idx.size());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (size_t k = 0; k < idx.size(); ++k) {
        col[k] = {x(static_cast<Eigen::Index>(idx[k]), c), y[idx[k]]};
      }
      std::sort(col.begin(), col.end());
      double left_n = 0, left_pos = 0;
      for (size_t k = 0; k + 1 < col.size(); ++k) {
        left_n += 1;
        left_pos += col[k].second;
        if (col[k].first == col[k + 1].first) continue;
        const double right_n = n - left_n;
        const double right_pos = pos - left_pos;
        const double imp =
            (left_n * Gini(left_pos, left_n) + right_n * Gini(right_pos, right_n)) / n;
        if (imp < best - 1e-12) {
          best = imp;
          best_col = static_cast<int>(c);
          best_thr = 0.5 * (col[k].first + col[k + 1].first);
        }
      }
    }
    if (best_col < 0) return id;

    std::vector<size_t> left, right;
    for (size_t i : idx) {
      (x(static_cast<Eigen::Index>(i), best_col) <= best_thr ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = Build(left, depth + 1);
    const int r = Build(right, depth + 1);
    auto& node = nodes[static_cast<size_t>(id)];
    node.column = best_col;
    node.threshold = best_thr;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

Vector LinearSvmModel::Decision(const Matrix& x) const {
  if (x.cols() != weights.size()) {
    throw ShapeError("LinearSvm: expected " + std::to_string(weights.size()) + " features, got " +
                     std::to_string(x.cols()));
  }
  return (x * weights).array() + bias;
}

std::vector<int> LinearSvmModel::Predict(const Matrix& x) const {
  const Vector f = Decision(x);
  std::vector<int> out(static_cast<size_t>(f.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<size_t>(i)] = f(i) > 0.0 ? 1 : 0;
  return out;
}

LinearSvmModel TrainLinearSvm(const Matrix& x, std::span<const int> y, const SvmOptions& opts,
                              Rng& rng) {
  CheckTrainingSet(x, y, "TrainLinearSvm");
  if (!(opts.c > 0.0) || opts.epochs < 1) throw MetricError("TrainLinearSvm: bad options");
  const bool has_both = std::any_of(y.begin(), y.end(), [](int v) { return v == 1; }) &&
                        std::any_of(y.begin(), y.end(), [](int v) { return v == 0; });
  if (!has_both) throw MetricError("TrainLinearSvm: training labels contain a single class");

  const Eigen::Index d = x.cols();
  const size_t n = y.size();
  const double lambda = 1.0 / (opts.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  const std::int64_t total = static_cast<std::int64_t>(opts.epochs) * static_cast<std::int64_t>(n);
  const std::int64_t average_from = total / 2;

  // Augmented weights: last entry multiplies a constant 1 feature.
  Vector w = Vector::Zero(d + 1);
  Vector avg = Vector::Zero(d + 1);
  std::int64_t averaged = 0;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::int64_t t = 0;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double label = y[i] ? 1.0 : -1.0;
      const auto row = x.row(static_cast<Eigen::Index>(i));
      const double margin = label * (row.dot(w.head(d)) + w(d));
      w *= 1.0 - 1.0 / static_cast<double>(t);
      if (margin < 1.0) {
        w.head(d) += (eta * label) * row.transpose();
        w(d) += eta * label;
      }
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      if (t > average_from) {
        ++averaged;
        avg += (w - avg) / static_cast<double>(averaged);
      }
    }
  }
  LinearSvmModel m;
  m.weights = avg.head(d);
  m.bias = avg(d);
  m.c = opts.c;
  return m;
}

int DecisionTreeModel::Depth() const {
  if (nodes.empty()) return 0;
  std::function<int(int)> depth = [&](int id) -> int {
    const auto& nd = nodes[static_cast<size_t>(id)];
    if (nd.column < 0) return 0;
    return 1 + std::max(depth(nd.left), depth(nd.right));
  };
  return depth(0);
}

std::vector<int> DecisionTreeModel::Predict(const Matrix& x) const {
  if (nodes.empty()) throw MetricError("DecisionTree: model is empty");
  std::vector<int> out(static_cast<size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    int id = 0;
    while (nodes[static_cast<size_t>(id)].column >= 0) {
      const auto& nd = nodes[static_cast<size_t>(id)];
      if (nd.column >= x.cols()) throw ShapeError("DecisionTree: feature width mismatch");
      id = x(i, nd.column) <= nd.threshold ? nd.left : nd.right;
    }
    out[static_cast<size_t>(i)] = nodes[static_cast<size_t>(id)].label;
  }
  return out;
}

DecisionTreeModel TrainDecisionTree(const Matrix& x, std::span<const int> y, int max_depth) {
  CheckTrainingSet(x, y, "TrainDecisionTree");
  if (max_depth < 0) throw MetricError("TrainDecisionTree: negative depth budget");
  TreeBuilder b{x, y, max_depth, {}};
  std::vector<size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  b.Build(idx, 0);
  DecisionTreeModel m;
  m.nodes = std::move(b.nodes);
  m.max_depth = max_depth;
  return m;
}

std::string_view ClassifierName(ClassifierKind k) {
  return k == ClassifierKind::kLinearSvm ? "svm_linear" : "decision_tree";
}

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kReal2Real: return "REAL2REAL";
    case Setting::kSyn2Syn: return "SYN2SYN";
    case Setting::kSyn2Real: return "SYN2REAL";
  }
  return "?";
}

ClassifierKind ParseClassifier(std::string_view name) {
  if (name == "svm_linear" || name == "svm") return ClassifierKind::kLinearSvm;
  if (name == "decision_tree" || name == "tree") return ClassifierKind::kDecisionTree;
  throw std::invalid_argument("unknown classifier '" + std::string(name) +
                              "' (expected svm_linear or decision_tree)");
}

Setting ParseSetting(std::string_view name) {
  for (auto s : {Setting::kReal2Real, Setting::kSyn2Syn, Setting::kSyn2Real}) {
    if (name == SettingName(s)) return s;
  }
  throw std::invalid_argument("unknown setting '" + std::string(name) +
                              "' (expected REAL2REAL, SYN2SYN or SYN2REAL)");
}

Learner MakeLearner(ClassifierKind kind) {
  if (kind == ClassifierKind::kLinearSvm) {
    return [](const Matrix& x, std::span<const int> labels, Rng& rng) -> Predictor {
      auto m = TrainLinearSvm(x, labels, SvmOptions{}, rng);
      return [m = std::move(m)](const Matrix& q) { return m.Predict(q); };
    };
  }
  return [](const Matrix& x, std::span<const int> labels, Rng&) -> Predictor {
    auto m = TrainDecisionTree(x, labels, 5);
    return [m = std::move(m)](const Matrix& q) { return m.Predict(q); };
  };
}

EvalResult RunSetting(Setting setting, const EncodedDataset& real,
                      const EncodedDataset* synthetic, ClassifierKind classifier,
                      std::uint64_t seed) {
  if (setting != Setting::kReal2Real && synthetic == nullptr) {
    throw MetricError(std::string(SettingName(setting)) + " needs a synthetic dataset");
  }
  if (synthetic != nullptr && synthetic->dim() != real.dim()) {
    throw ShapeError("RunSetting: synthetic width " + std::to_string(synthetic->dim()) +
                     " != real width " + std::to_string(real.dim()));
  }
  auto halves = [seed](const EncodedDataset& ds) {
    Rng split_rng(seed);
    return Split(ds, 0.5, split_rng);
  };
  const SplitResult real_split = halves(real);
  const EncodedDataset* train = &real_split.train;
  const EncodedDataset* test = &real_split.test;
  SplitResult syn_split;
  if (setting != Setting::kReal2Real) {
    syn_split = halves(*synthetic);
    train = &syn_split.train;
    if (setting == Setting::kSyn2Syn) test = &syn_split.test;
  }
  Rng fit_rng = Rng(seed).Fork();
  // A collapsed generator can emit a single label; the only consistent
  // classifier for that training set is the constant one.
  const auto& ty = train->y;
  const bool one_class =
      !ty.empty() && std::all_of(ty.begin(), ty.end(), [&](int v) { return v == ty.front(); });
  std::vector<int> pred;
  if (one_class) {
    pred.assign(static_cast<size_t>(test->x.rows()), ty.front());
  } else {
    pred = MakeLearner(classifier)(train->x, train->y, fit_rng)(test->x);
  }
  EvalResult r;
  r.setting = setting;
  r.classifier = classifier;
  r.accuracy = Accuracy(pred, test->y);
  r.risk_difference = RiskDifferenceClassifier(pred, test->s);
  r.seed = seed;
  return r;
}

void WriteEvalCsvHeader(std::ostream& out) {
  out << "setting,classifier,accuracy,risk_difference,seed\n";
}

void WriteEvalCsvRow(std::ostream& out, const EvalResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%llu\n", std::string(SettingName(r.setting)).c_str(),
                std::string(ClassifierName(r.classifier)).c_str(), r.accuracy, r.risk_difference,
                static_cast<unsigned long long>(r.seed));
  out << buf;
}

}  // namespace fairgan
