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

// Small dense-network engine: feed-forward MLPs with explicit backprop and
// Adam. Only what the adversarial trainers need.
//
// Conventions
//   - A batch is a row-major matrix, one example per row.
//   - Layer weights are [fan_in x fan_out]; a layer computes
//     act(input * W + b).
//   - All probabilities fed to log terms are clamped to [kProbClamp,
//     1 - kProbClamp].

#ifndef FAIRGAN_NN_HPP_
#define FAIRGAN_NN_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace fairgan {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;

inline constexpr double kProbClamp = 1e-7;

// Raised for shape mismatches and malformed inputs anywhere in the library.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// kLeakyRelu passes 0.2 of negative inputs.
enum class Activation { kRelu, kSigmoid, kIdentity, kTanh, kLeakyRelu };

inline constexpr double kLeakySlope = 0.2;

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

// Seeded source of every random draw in the library. Two instances built from
// the same seed produce the same sequence on the same build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  double Uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double Normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  int Bernoulli(double p) { return Uniform() < p ? 1 : 0; }
  Matrix NormalMatrix(Eigen::Index rows, Eigen::Index cols);
  // Derives an independent stream; used to give sub-tasks their own seeds.
  Rng Fork();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.99;

// With batch_norm set, the affine output is normalized per column before the
// activation: batch statistics in MlpForward, running statistics in
// MlpPredict. gamma/beta/running_* are empty otherwise.
struct DenseLayer {
  Matrix weight;  // [in x out]
  RowVector bias;  // [out]
  Activation activation = Activation::kIdentity;
  bool batch_norm = false;
  RowVector gamma;
  RowVector beta;
  RowVector running_mean;
  RowVector running_var;

  Eigen::Index in_dim() const { return weight.rows(); }
  Eigen::Index out_dim() const { return weight.cols(); }
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  bool operator==(const MlpParams& other) const;
};

struct LayerSpec {
  Eigen::Index out_dim;
  Activation activation;
  bool batch_norm = false;
};

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpParams MakeMlp(Eigen::Index input_dim, std::span<const LayerSpec> layers, Rng& rng);

// activations[0] is the network input, activations[i + 1] the post-activation
// output of layer i.
struct ForwardCache {
  std::vector<Matrix> activations;
  // Per layer; empty for layers without batch norm.
  std::vector<Matrix> normalized;
  std::vector<RowVector> batch_mean;
  std::vector<RowVector> batch_var;
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

ForwardResult MlpForward(const MlpParams& params, const Matrix& input);
// Output only; no cache kept.
Matrix MlpPredict(const MlpParams& params, const Matrix& input);

// Folds the batch statistics of a training pass into the running ones.
void UpdateRunningStats(MlpParams& params, const ForwardCache& cache);

struct LayerGradient {
  Matrix weight;
  RowVector bias;
  RowVector gamma;  // empty without batch norm
  RowVector beta;
};

struct Gradients {
  std::vector<LayerGradient> layers;

  static Gradients ZerosLike(const MlpParams& params);
  // this += scale * other
  void AddScaled(const Gradients& other, double scale);
};

struct BackwardResult {
  Gradients grads;
  Matrix input_grad;  // d loss / d input, only if requested
};

enum class BackwardMode { kParamsAndInput, kParamsOnly, kInputOnly };

// Back-propagates `upstream_grad` (d loss / d output) through the network.
BackwardResult MlpBackward(const MlpParams& params, const ForwardCache& cache,
                           const Matrix& upstream_grad,
                           BackwardMode mode = BackwardMode::kParamsAndInput);

struct AdamState {
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
  Gradients first_moment;
  Gradients second_moment;

  static AdamState For(const MlpParams& params, double learning_rate = 1e-3);
};

// Bias-corrected Adam update of `params` in place.
void AdamStep(MlpParams& params, const Gradients& grads, AdamState& state);

struct BceResult {
  double loss;
  Matrix grad;  // d loss / d prediction, same shape as the predictions
};

// Mean binary cross-entropy over a column of probabilities.
BceResult BceTerms(const Matrix& predictions, std::span<const double> targets);
BceResult BceTerms(const Matrix& predictions, double target);

inline double ClampProb(double p) {
  return p < kProbClamp ? kProbClamp : (p > 1.0 - kProbClamp ? 1.0 - kProbClamp : p);
}

// Probability used inside BCE gradients. It only guards the divisions, so the
// chain through a sigmoid output stays exact where the loss clamp would
// flatten it.
inline double GradProb(double p) {
  return p < 1e-300 ? 1e-300 : (p > 1.0 - 0x1p-53 ? 1.0 - 0x1p-53 : p);
}

bool AllFinite(const Matrix& m);

// Checkpoint I/O. Layers are keyed by index as strings; weights are flat
// row-major arrays. nlohmann::json writes doubles with round-trip precision.
nlohmann::json MlpToJson(const MlpParams& params);
MlpParams MlpFromJson(const nlohmann::json& j);

}  // namespace fairgan

#endif  // FAIRGAN_NN_HPP_
