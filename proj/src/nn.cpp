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

#include "fairgan/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairgan {
namespace {

void ApplyActivation(Activation a, Matrix& m) {
  switch (a) {
    case Activation::kRelu:
      m = m.cwiseMax(0.0);
      break;
    case Activation::kLeakyRelu:
      m = m.cwiseMax(kLeakySlope * m);
      break;
    case Activation::kSigmoid:
      // exp saturates to a finite value, so neither tail overflows.
      m = (1.0 / (1.0 + (-m.array()).exp())).matrix();
      break;
    case Activation::kTanh: {
      // tanh|v| = (1 - e) / (1 + e) with e = exp(-2|v|); Eigen's double tanh
      // is scalar and an order of magnitude slower.
      const Matrix e = (-2.0 * m.array().abs()).exp().matrix();
      double* p = m.data();
      const double* q = e.data();
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double t = (1.0 - q[i]) / (1.0 + q[i]);
        p[i] = p[i] < 0.0 ? -t : t;
      }
      break;
    }
    case Activation::kIdentity:
      break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the post-activation values. Plain loops: Eigen's select does not vectorize.
void ApplyActivationDerivative(Activation a, const Matrix& post, Matrix& grad) {
  const double* p = post.data();
  double* g = grad.data();
  const Eigen::Index n = grad.size();
  switch (a) {
    case Activation::kRelu:
      for (Eigen::Index i = 0; i < n; ++i) g[i] = p[i] > 0.0 ? g[i] : 0.0;
      break;
    case Activation::kLeakyRelu:
      for (Eigen::Index i = 0; i < n; ++i) g[i] = p[i] > 0.0 ? g[i] : kLeakySlope * g[i];
      break;
    case Activation::kSigmoid:
      grad.array() *= post.array() * (1.0 - post.array());
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - post.array().square();
      break;
    case Activation::kIdentity:
      break;
  }
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kLeakyRelu:
      return "leaky_relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
    case Activation::kTanh:
      return "tanh";
  }
  return "identity";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "leaky_relu") return Activation::kLeakyRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  throw ShapeError("unknown activation '" + std::string(name) + "'");
}

Matrix Rng::NormalMatrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(engine_);
  return m;
}

Rng Rng::Fork() { return Rng(engine_()); }

Eigen::Index MlpParams::input_dim() const {
  return layers.empty() ? 0 : layers.front().in_dim();
}

Eigen::Index MlpParams::output_dim() const {
  return layers.empty() ? 0 : layers.back().out_dim();
}

bool MlpParams::operator==(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
        a.weight.cols() != b.weight.cols() || a.weight != b.weight || a.bias != b.bias ||
        a.batch_norm != b.batch_norm) {
      return false;
    }
    if (a.batch_norm && (a.gamma != b.gamma || a.beta != b.beta ||
                         a.running_mean != b.running_mean || a.running_var != b.running_var)) {
      return false;
    }
  }
  return true;
}

MlpParams MakeMlp(Eigen::Index input_dim, std::span<const LayerSpec> specs, Rng& rng) {
  if (input_dim <= 0) throw ShapeError("MakeMlp: input_dim must be positive");
  MlpParams params;
  Eigen::Index fan_in = input_dim;
  for (const auto& spec : specs) {
    if (spec.out_dim <= 0) throw ShapeError("MakeMlp: layer width must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + spec.out_dim));
    DenseLayer layer;
    layer.weight.resize(fan_in, spec.out_dim);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.Uniform(-limit, limit);
    }
    layer.bias = RowVector::Zero(spec.out_dim);
    layer.activation = spec.activation;
    if (spec.batch_norm) {
      layer.batch_norm = true;
      layer.gamma = RowVector::Ones(spec.out_dim);
      layer.beta = RowVector::Zero(spec.out_dim);
      layer.running_mean = RowVector::Zero(spec.out_dim);
      layer.running_var = RowVector::Ones(spec.out_dim);
    }
    params.layers.push_back(std::move(layer));
    fan_in = spec.out_dim;
  }
  return params;
}

ForwardResult MlpForward(const MlpParams& params, const Matrix& input) {
  if (params.layers.empty()) throw ShapeError("MlpForward: network has no layers");
  ForwardResult result;
  auto& cache = result.cache;
  auto& acts = cache.activations;
  acts.reserve(params.layers.size() + 1);
  acts.push_back(input);
  cache.normalized.resize(params.layers.size());
  cache.batch_mean.resize(params.layers.size());
  cache.batch_var.resize(params.layers.size());
  for (size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    const Matrix& x = acts.back();
    if (x.cols() != layer.in_dim()) {
      throw ShapeError("MlpForward: layer " + std::to_string(i) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, got " +
                       std::to_string(x.cols()));
    }
    Matrix z = x * layer.weight;
    z.rowwise() += layer.bias;
    if (layer.batch_norm) {
      const double inv_n = 1.0 / static_cast<double>(std::max<Eigen::Index>(z.rows(), 1));
      RowVector mean = z.colwise().sum() * inv_n;
      z.rowwise() -= mean;
      RowVector var = z.cwiseAbs2().colwise().sum() * inv_n;
      const RowVector inv_std = (var.array() + kBatchNormEpsilon).rsqrt().matrix();
      z.array().rowwise() *= inv_std.array();
      cache.normalized[i] = z;
      cache.batch_mean[i] = std::move(mean);
      cache.batch_var[i] = std::move(var);
      z.array().rowwise() *= layer.gamma.array();
      z.rowwise() += layer.beta;
    }
    ApplyActivation(layer.activation, z);
    acts.push_back(std::move(z));
  }
  result.output = acts.back();
  return result;
}

Matrix MlpPredict(const MlpParams& params, const Matrix& input) {
  if (params.layers.empty()) throw ShapeError("MlpPredict: network has no layers");
  Matrix x = input;
  for (size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    if (x.cols() != layer.in_dim()) {
      throw ShapeError("MlpPredict: layer " + std::to_string(i) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, got " +
                       std::to_string(x.cols()));
    }
    Matrix z = x * layer.weight;
    z.rowwise() += layer.bias;
    if (layer.batch_norm) {
      const RowVector scale =
          (layer.gamma.array() * (layer.running_var.array() + kBatchNormEpsilon).rsqrt()).matrix();
      z.rowwise() -= layer.running_mean;
      z.array().rowwise() *= scale.array();
      z.rowwise() += layer.beta;
    }
    ApplyActivation(layer.activation, z);
    x = std::move(z);
  }
  return x;
}

void UpdateRunningStats(MlpParams& params, const ForwardCache& cache) {
  if (cache.batch_mean.size() != params.layers.size()) {
    throw ShapeError("UpdateRunningStats: cache does not match the network");
  }
  for (size_t i = 0; i < params.layers.size(); ++i) {
    auto& layer = params.layers[i];
    if (!layer.batch_norm) continue;
    if (cache.batch_mean[i].size() != layer.out_dim()) {
      throw ShapeError("UpdateRunningStats: missing batch statistics at layer " +
                       std::to_string(i));
    }
    layer.running_mean =
        kBatchNormMomentum * layer.running_mean + (1.0 - kBatchNormMomentum) * cache.batch_mean[i];
    layer.running_var =
        kBatchNormMomentum * layer.running_var + (1.0 - kBatchNormMomentum) * cache.batch_var[i];
  }
}

Gradients Gradients::ZerosLike(const MlpParams& params) {
  Gradients g;
  g.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    g.layers.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                        RowVector::Zero(layer.bias.size()), RowVector::Zero(layer.gamma.size()),
                        RowVector::Zero(layer.beta.size())});
  }
  return g;
}

void Gradients::AddScaled(const Gradients& other, double scale) {
  if (other.layers.size() != layers.size()) throw ShapeError("Gradients::AddScaled: layer count");
  for (size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += scale * other.layers[i].weight;
    layers[i].bias += scale * other.layers[i].bias;
    if (layers[i].gamma.size() != other.layers[i].gamma.size()) {
      throw ShapeError("Gradients::AddScaled: batch-norm shape");
    }
    layers[i].gamma += scale * other.layers[i].gamma;
    layers[i].beta += scale * other.layers[i].beta;
  }
}

BackwardResult MlpBackward(const MlpParams& params, const ForwardCache& cache,
                           const Matrix& upstream_grad, BackwardMode mode) {
  const size_t n_layers = params.layers.size();
  const auto& acts = cache.activations;
  if (acts.size() != n_layers + 1) {
    throw ShapeError("MlpBackward: cache holds " + std::to_string(acts.size()) +
                     " activations for a " + std::to_string(n_layers) + "-layer network");
  }
  for (size_t i = 0; i < n_layers; ++i) {
    if (acts[i].cols() != params.layers[i].in_dim() ||
        acts[i + 1].cols() != params.layers[i].out_dim() || acts[i].rows() != acts[0].rows()) {
      throw ShapeError("MlpBackward: stale cache at layer " + std::to_string(i));
    }
    if (params.layers[i].batch_norm &&
        (cache.normalized.size() != n_layers || cache.normalized[i].rows() != acts[0].rows() ||
         cache.normalized[i].cols() != params.layers[i].out_dim())) {
      throw ShapeError("MlpBackward: missing batch-norm cache at layer " + std::to_string(i));
    }
  }
  if (upstream_grad.rows() != acts.back().rows() || upstream_grad.cols() != acts.back().cols()) {
    throw ShapeError("MlpBackward: upstream gradient shape does not match output");
  }

  const bool want_params = mode != BackwardMode::kInputOnly;
  const bool want_input = mode != BackwardMode::kParamsOnly;
  BackwardResult result;
  if (want_params) result.grads.layers.resize(n_layers);

  Matrix delta = upstream_grad;
  for (size_t k = n_layers; k-- > 0;) {
    const auto& layer = params.layers[k];
    ApplyActivationDerivative(layer.activation, acts[k + 1], delta);
    if (layer.batch_norm) {
      // delta is d loss / d(gamma * xhat + beta); map it back to the affine
      // output through the batch statistics.
      const Matrix& xhat = cache.normalized[k];
      if (want_params) {
        result.grads.layers[k].gamma = delta.cwiseProduct(xhat).colwise().sum();
        result.grads.layers[k].beta = delta.colwise().sum();
      }
      Matrix dxhat = delta.array().rowwise() * layer.gamma.array();
      const double n = static_cast<double>(dxhat.rows());
      const RowVector mean_d = dxhat.colwise().sum() / n;
      const RowVector mean_dx = dxhat.cwiseProduct(xhat).colwise().sum() / n;
      const RowVector inv_std = (cache.batch_var[k].array() + kBatchNormEpsilon).rsqrt().matrix();
      dxhat.rowwise() -= mean_d;
      dxhat -= (xhat.array().rowwise() * mean_dx.array()).matrix();
      dxhat.array().rowwise() *= inv_std.array();
      delta = std::move(dxhat);
    }
    if (want_params) {
      result.grads.layers[k].weight.noalias() = acts[k].transpose() * delta;
      result.grads.layers[k].bias = delta.colwise().sum();
    }
    if (k > 0 || want_input) {
      Matrix next = delta * layer.weight.transpose();
      delta = std::move(next);
    }
  }
  if (want_input) result.input_grad = std::move(delta);
  return result;
}

AdamState AdamState::For(const MlpParams& params, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  s.first_moment = Gradients::ZerosLike(params);
  s.second_moment = Gradients::ZerosLike(params);
  return s;
}

void AdamStep(MlpParams& params, const Gradients& grads, AdamState& state) {
  const size_t n = params.layers.size();
  if (grads.layers.size() != n || state.first_moment.layers.size() != n ||
      state.second_moment.layers.size() != n) {
    throw ShapeError("AdamStep: gradient/state layer count does not match parameters");
  }
  for (size_t i = 0; i < n; ++i) {
    const auto& layer = params.layers[i];
    const auto& g = grads.layers[i];
    if (g.weight.rows() != layer.weight.rows() || g.weight.cols() != layer.weight.cols() ||
        g.bias.size() != layer.bias.size() || g.gamma.size() != layer.gamma.size() ||
        g.beta.size() != layer.beta.size()) {
      throw ShapeError("AdamStep: gradient shape mismatch at layer " + std::to_string(i));
    }
  }
  state.step += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.learning_rate;
  const double eps = state.epsilon;

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (size_t i = 0; i < n; ++i) {
    auto& layer = params.layers[i];
    update(layer.weight, grads.layers[i].weight, state.first_moment.layers[i].weight,
           state.second_moment.layers[i].weight);
    update(layer.bias, grads.layers[i].bias, state.first_moment.layers[i].bias,
           state.second_moment.layers[i].bias);
    if (layer.batch_norm) {
      update(layer.gamma, grads.layers[i].gamma, state.first_moment.layers[i].gamma,
             state.second_moment.layers[i].gamma);
      update(layer.beta, grads.layers[i].beta, state.first_moment.layers[i].beta,
             state.second_moment.layers[i].beta);
    }
  }
}

BceResult BceTerms(const Matrix& predictions, std::span<const double> targets) {
  if (predictions.cols() != 1 || static_cast<size_t>(predictions.rows()) != targets.size()) {
    throw ShapeError("BceTerms: predictions must be a column matching the targets");
  }
  const auto n = predictions.rows();
  BceResult r{0.0, Matrix::Zero(n, 1)};
  if (n == 0) return r;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = ClampProb(predictions(i, 0));
    const double q = GradProb(predictions(i, 0));
    const double t = targets[static_cast<size_t>(i)];
    r.loss -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    r.grad(i, 0) = (-t / q + (1.0 - t) / (1.0 - q)) * inv_n;
  }
  r.loss *= inv_n;
  return r;
}

BceResult BceTerms(const Matrix& predictions, double target) {
  std::vector<double> t(static_cast<size_t>(predictions.rows()), target);
  return BceTerms(predictions, t);
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

nlohmann::json MlpToJson(const MlpParams& params) {
  nlohmann::json j = nlohmann::json::object();
  for (size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    std::vector<double> w(layer.weight.data(), layer.weight.data() + layer.weight.size());
    std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
    j[std::to_string(i)] = {{"rows", layer.weight.rows()},
                            {"cols", layer.weight.cols()},
                            {"weights", w},
                            {"bias", b},
                            {"activation", ActivationName(layer.activation)}};
    if (layer.batch_norm) {
      auto vec = [](const RowVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
      j[std::to_string(i)]["batch_norm"] = {{"gamma", vec(layer.gamma)},
                                            {"beta", vec(layer.beta)},
                                            {"running_mean", vec(layer.running_mean)},
                                            {"running_var", vec(layer.running_var)}};
    }
  }
  return j;
}

MlpParams MlpFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ShapeError("MlpFromJson: expected an object of layers");
  MlpParams params;
  for (size_t i = 0; i < j.size(); ++i) {
    const auto key = std::to_string(i);
    if (!j.contains(key)) throw ShapeError("MlpFromJson: missing layer " + key);
    const auto& lj = j.at(key);
    const auto rows = lj.at("rows").get<Eigen::Index>();
    const auto cols = lj.at("cols").get<Eigen::Index>();
    const auto w = lj.at("weights").get<std::vector<double>>();
    const auto b = lj.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != cols) {
      throw ShapeError("MlpFromJson: layer " + key + " has inconsistent sizes");
    }
    DenseLayer layer;
    layer.weight = Eigen::Map<const Matrix>(w.data(), rows, cols);
    layer.bias = Eigen::Map<const RowVector>(b.data(), cols);
    layer.activation = ParseActivation(lj.at("activation").get<std::string>());
    if (lj.contains("batch_norm")) {
      const auto& bn = lj.at("batch_norm");
      auto vec = [&](const char* name) {
        const auto v = bn.at(name).get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != cols) {
          throw ShapeError("MlpFromJson: layer " + key + " batch-norm " + name + " size");
        }
        return RowVector(Eigen::Map<const RowVector>(v.data(), cols));
      };
      layer.batch_norm = true;
      layer.gamma = vec("gamma");
      layer.beta = vec("beta");
      layer.running_mean = vec("running_mean");
      layer.running_var = vec("running_var");
    }
    if (!params.layers.empty() && params.layers.back().out_dim() != rows) {
      throw ShapeError("MlpFromJson: layer " + key + " does not chain with its predecessor");
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace fairgan
