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

#include "fairgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace fairgan {
namespace {

constexpr size_t kGenerateChunk = 4096;

std::vector<LayerSpec> HiddenThen(const std::vector<Eigen::Index>& hidden, Activation hidden_act,
                                  Eigen::Index out, Activation out_act, bool batch_norm = false) {
  std::vector<LayerSpec> specs;
  for (auto h : hidden) specs.push_back({h, hidden_act, batch_norm});
  specs.push_back({out, out_act, batch_norm});
  return specs;
}

Matrix GeneratorInput(const Matrix& z, std::span<const int> s, bool conditions_on_s) {
  if (!conditions_on_s) return z;
  Matrix in(z.rows(), z.cols() + 1);
  in.leftCols(z.cols()) = z;
  for (Eigen::Index i = 0; i < z.rows(); ++i) in(i, z.cols()) = s[static_cast<size_t>(i)];
  return in;
}

struct LossAndGrad {
  double loss;
  Matrix grad;
};

// -[mean_{s=1} log p + mean_{s=0} log(1 - p)] and its gradient wrt p.
LossAndGrad GroupBce(const Matrix& out, std::span<const int> s_hat) {
  if (out.cols() != 1 || static_cast<size_t>(out.rows()) != s_hat.size()) {
    throw ShapeError("V2: discriminator output must be a column matching s_hat");
  }
  const auto n1 = std::count(s_hat.begin(), s_hat.end(), 1);
  const auto n0 = static_cast<long>(s_hat.size()) - n1;
  if (n1 == 0 || n0 == 0) throw ShapeError("V2: batch needs both s=1 and s=0 rows");
  LossAndGrad r{0.0, Matrix::Zero(out.rows(), 1)};
  double sum1 = 0.0;
  double sum0 = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double p = ClampProb(out(i, 0));
    const double q = GradProb(out(i, 0));
    if (s_hat[static_cast<size_t>(i)] == 1) {
      sum1 += std::log(p);
      r.grad(i, 0) = -1.0 / q / static_cast<double>(n1);
    } else {
      sum0 += std::log(1.0 - p);
      r.grad(i, 0) = 1.0 / (1.0 - q) / static_cast<double>(n0);
    }
  }
  r.loss = -(sum1 / static_cast<double>(n1) + sum0 / static_cast<double>(n0));
  return r;
}

struct GeneratorPass {
  ForwardResult g;
  ForwardResult dec;
};

GeneratorPass RunGenerator(const GeneratorGDec& gen, std::span<const int> s, Rng& rng) {
  const Matrix z = rng.NormalMatrix(static_cast<Eigen::Index>(s.size()), gen.noise_dim);
  GeneratorPass pass;
  pass.g = MlpForward(gen.g, GeneratorInput(z, s, gen.conditions_on_s));
  pass.dec = MlpForward(gen.dec, pass.g.output);
  return pass;
}

// Pushes d loss / d (generated xy) through Dec and G and applies Adam.
void UpdateGenerator(GeneratorGDec& gen, const GeneratorPass& pass, const Matrix& xy_grad,
                     AdamState& g_opt, AdamState& dec_opt) {
  auto dec_back = MlpBackward(gen.dec, pass.dec.cache, xy_grad, BackwardMode::kParamsAndInput);
  auto g_back = MlpBackward(gen.g, pass.g.cache, dec_back.input_grad, BackwardMode::kParamsOnly);
  AdamStep(gen.dec, dec_back.grads, dec_opt);
  AdamStep(gen.g, g_back.grads, g_opt);
  UpdateRunningStats(gen.g, pass.g.cache);
}

}  // namespace

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kGan:
      return "gan";
    case Variant::kNfgan1:
      return "nfgan1";
    case Variant::kNfgan2:
      return "nfgan2";
    case Variant::kFairgan:
      return "fairgan";
  }
  return "gan";
}

Variant ParseVariant(std::string_view name) {
  if (name == "gan") return Variant::kGan;
  if (name == "nfgan1") return Variant::kNfgan1;
  if (name == "nfgan2") return Variant::kNfgan2;
  if (name == "fairgan") return Variant::kFairgan;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected gan|nfgan1|nfgan2|fairgan)");
}

void TrainConfig::Validate() const {
  if (batch < 2 || batch % 2 != 0) throw std::invalid_argument("batch must be even and >= 2");
  if (phase1_epochs < 0 || phase2_epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (noise_dim < 1) throw std::invalid_argument("noise_dim must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"phase1_epochs", phase1_epochs},
          {"phase2_epochs", phase2_epochs},
          {"batch", batch},
          {"lambda", lambda},
          {"noise_dim", noise_dim},
          {"learning_rate", learning_rate},
          {"seed", seed},
          {"generator_hidden", generator_hidden},
          {"discriminator_hidden", discriminator_hidden},
          {"non_saturating", non_saturating},
          {"adam_beta1", adam_beta1},
          {"decoder_lr_scale", decoder_lr_scale},
          {"generator_batch_norm", generator_batch_norm}};
}

nlohmann::json FairGanModel::ToJson() const {
  nlohmann::json j = {{"variant", VariantName(variant)},
                      {"lambda", lambda},
                      {"p_s1", p_s1},
                      {"noise_dim", generator.noise_dim},
                      {"conditions_on_s", generator.conditions_on_s},
                      {"generator", {{"g", MlpToJson(generator.g)}, {"dec", MlpToJson(generator.dec)}}},
                      {"d1", MlpToJson(d1)}};
  if (d2) j["d2"] = MlpToJson(*d2);
  return j;
}

FairGanModel FairGanModel::FromJson(const nlohmann::json& j) {
  FairGanModel m;
  m.variant = ParseVariant(j.at("variant").get<std::string>());
  m.lambda = j.at("lambda").get<double>();
  m.p_s1 = j.at("p_s1").get<double>();
  m.generator.noise_dim = j.at("noise_dim").get<Eigen::Index>();
  m.generator.conditions_on_s = ConditionsOnS(m.variant);
  m.generator.g = MlpFromJson(j.at("generator").at("g"));
  m.generator.dec = MlpFromJson(j.at("generator").at("dec"));
  m.d1 = MlpFromJson(j.at("d1"));
  if (j.contains("d2")) m.d2 = MlpFromJson(j.at("d2"));
  const Eigen::Index g_in = m.generator.noise_dim + (m.generator.conditions_on_s ? 1 : 0);
  if (m.generator.g.input_dim() != g_in || m.generator.g.output_dim() != m.generator.dec.input_dim()) {
    throw ShapeError("model checkpoint: generator layers do not chain");
  }
  const Eigen::Index xy = m.generator.dec.output_dim();
  if (m.d1.input_dim() != xy + (ConditionsOnS(m.variant) ? 1 : 0)) {
    throw ShapeError("model checkpoint: d1 input width does not match the variant");
  }
  if (m.d2 && m.d2->input_dim() != xy) throw ShapeError("model checkpoint: d2 input width");
  return m;
}

bool FairGanModel::operator==(const FairGanModel& o) const {
  return variant == o.variant && lambda == o.lambda && p_s1 == o.p_s1 &&
         generator.noise_dim == o.generator.noise_dim &&
         generator.conditions_on_s == o.generator.conditions_on_s && generator.g == o.generator.g &&
         generator.dec == o.generator.dec && d1 == o.d1 && d2.has_value() == o.d2.has_value() &&
         (!d2 || *d2 == *o.d2);
}

FairGanModel InitModel(Variant variant, const AutoencoderModel& ae, Eigen::Index data_dim,
                       double p_s1, const TrainConfig& cfg) {
  cfg.Validate();
  const Eigen::Index xy_dim = data_dim + 1;
  if (ae.decoder.output_dim() != xy_dim) {
    throw ShapeError("autoencoder decoder emits " + std::to_string(ae.decoder.output_dim()) +
                     " columns but the dataset needs " + std::to_string(xy_dim) + " (X plus y)");
  }
  // Fixed draw order so every variant sees the same streams.
  Rng base(cfg.seed);
  Rng g_rng = base.Fork();
  Rng d1_rng = base.Fork();
  Rng d2_rng = base.Fork();

  FairGanModel m;
  m.variant = variant;
  m.lambda = cfg.lambda;
  m.p_s1 = p_s1;
  m.generator.noise_dim = cfg.noise_dim;
  m.generator.conditions_on_s = ConditionsOnS(variant);
  const auto g_specs = HiddenThen(cfg.generator_hidden, Activation::kRelu, ae.hidden,
                                   Activation::kTanh, cfg.generator_batch_norm);
  m.generator.g = MakeMlp(cfg.noise_dim + (m.generator.conditions_on_s ? 1 : 0), g_specs, g_rng);
  m.generator.dec = ae.decoder;
  // Discriminator inputs sit in [0,1]; plain ReLU units there die early and
  // leave D constant at 0.5 with no gradient for G.
  const auto d_specs =
      HiddenThen(cfg.discriminator_hidden, Activation::kLeakyRelu, 1, Activation::kSigmoid);
  m.d1 = MakeMlp(xy_dim + (ConditionsOnS(variant) ? 1 : 0), d_specs, d1_rng);
  if (HasFairnessPhase(variant)) m.d2 = MakeMlp(xy_dim, d_specs, d2_rng);
  return m;
}

GeneratedBatch GenerateBatch(const FairGanModel& model, std::span<const int> s_values, Rng& rng) {
  const auto& gen = model.generator;
  const Matrix z = rng.NormalMatrix(static_cast<Eigen::Index>(s_values.size()), gen.noise_dim);
  GeneratedBatch b;
  b.xy = MlpPredict(gen.dec, MlpPredict(gen.g, GeneratorInput(z, s_values, gen.conditions_on_s)));
  b.s.assign(s_values.begin(), s_values.end());
  return b;
}

Matrix DiscriminatorInput(const Matrix& xy, std::span<const int> s, Variant variant) {
  if (!ConditionsOnS(variant)) return xy;
  if (static_cast<size_t>(xy.rows()) != s.size()) throw ShapeError("DiscriminatorInput: s length");
  Matrix in(xy.rows(), xy.cols() + 1);
  in.leftCols(xy.cols()) = xy;
  for (Eigen::Index i = 0; i < xy.rows(); ++i) in(i, xy.cols()) = s[static_cast<size_t>(i)];
  return in;
}

AdversarialLoss V1Losses(const Matrix& d1_real_out, const Matrix& d1_fake_out) {
  if (d1_real_out.rows() != d1_fake_out.rows()) throw ShapeError("V1: batches differ in size");
  const double real = BceTerms(d1_real_out, 1.0).loss;
  const double fake = BceTerms(d1_fake_out, 0.0).loss;
  // BceTerms(fake, 0) = -mean log(1 - D1(fake)).
  return {real + fake, -fake};
}

AdversarialLoss V1Losses(const MlpParams& d1, const Matrix& real_input, const Matrix& fake_input) {
  return V1Losses(MlpPredict(d1, real_input), MlpPredict(d1, fake_input));
}

AdversarialLoss V2Losses(const Matrix& d2_out, std::span<const int> s_hat, double lambda) {
  const double loss = GroupBce(d2_out, s_hat).loss;
  return {loss, lambda == 0.0 ? 0.0 : -lambda * loss};
}

AdversarialLoss V2Losses(const MlpParams& d2, const Matrix& fake_xy, std::span<const int> s_hat,
                         double lambda) {
  return V2Losses(MlpPredict(d2, fake_xy), s_hat, lambda);
}

Trainer::Trainer(const EncodedDataset& ds, Variant variant, const AutoencoderModel& ae,
                 const TrainConfig& cfg)
    : ds_(&ds), real_xy_(ds.XY()), cfg_(cfg), rng_(0) {
  cfg_.Validate();
  if (ds.size() == 0) throw DataError("Train: empty dataset");
  double p_s1 = 0.0;
  for (int s : ds.s) p_s1 += s;
  p_s1 /= static_cast<double>(ds.size());
  model_ = InitModel(variant, ae, ds.dim(), p_s1, cfg_);
  g_opt_ = AdamState::For(model_.generator.g, cfg_.learning_rate);
  dec_opt_ = AdamState::For(model_.generator.dec, cfg_.learning_rate * cfg_.decoder_lr_scale);
  d1_opt_ = AdamState::For(model_.d1, cfg_.learning_rate);
  if (model_.d2) d2_opt_ = AdamState::For(*model_.d2, cfg_.learning_rate);
  for (AdamState* o : {&g_opt_, &dec_opt_, &d1_opt_}) o->beta1 = cfg_.adam_beta1;
  if (d2_opt_) d2_opt_->beta1 = cfg_.adam_beta1;

  Rng base(cfg_.seed);
  for (int i = 0; i < 3; ++i) base.Fork();
  rng_ = base.Fork();

  order_.resize(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) order_[i] = i;
  for (size_t i = 0; i < ds.size(); ++i) group_[ds.s[i] ? 1 : 0].push_back(i);
  if (variant == Variant::kNfgan2 && (group_[0].empty() || group_[1].empty())) {
    throw DataError("nfgan2 needs rows from both s groups");
  }
}

void Trainer::set_lambda(double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  cfg_.lambda = lambda;
  model_.lambda = lambda;
}

void Trainer::set_variant(Variant v) {
  if (ConditionsOnS(v) != ConditionsOnS(model_.variant)) {
    throw std::invalid_argument("set_variant: conditioning on s must not change");
  }
  model_.variant = v;
  if (!HasFairnessPhase(v)) {
    model_.d2.reset();
    d2_opt_.reset();
  }
}

Trainer::Batch Trainer::NextRealBatch() {
  const auto m = static_cast<size_t>(cfg_.batch);
  std::vector<size_t> rows;
  rows.reserve(m);
  if (model_.variant == Variant::kNfgan2) {
    // Equal weight on both s groups, matching the per-group expectations.
    for (int g = 1; g >= 0; --g) {
      auto& idx = group_[g];
      for (size_t k = 0; k < m / 2; ++k) {
        if (group_cursor_[g] == 0) std::shuffle(idx.begin(), idx.end(), rng_.engine());
        rows.push_back(idx[group_cursor_[g]]);
        group_cursor_[g] = (group_cursor_[g] + 1) % idx.size();
      }
    }
  } else {
    const size_t take = std::min(m, order_.size() - cursor_);
    for (size_t k = 0; k < take; ++k) rows.push_back(order_[cursor_ + k]);
    cursor_ += take;
  }
  Batch b;
  b.xy.resize(static_cast<Eigen::Index>(rows.size()), real_xy_.cols());
  b.s.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    b.xy.row(static_cast<Eigen::Index>(i)) = real_xy_.row(static_cast<Eigen::Index>(rows[i]));
    b.s[i] = ds_->s[rows[i]];
  }
  return b;
}

void Trainer::AdversarialStep(const Batch& real, EpochLosses& acc) {
  const auto m = static_cast<size_t>(real.xy.rows());
  const Eigen::Index xy_dim = real.xy.cols();
  std::vector<int> fake_s(m);
  for (auto& s : fake_s) s = rng_.Bernoulli(model_.p_s1);
  const GeneratorPass pass = RunGenerator(model_.generator, fake_s, rng_);

  const Matrix real_in = DiscriminatorInput(real.xy, real.s, model_.variant);
  const Matrix fake_in = DiscriminatorInput(pass.dec.output, fake_s, model_.variant);

  // D1 ascends mean log D1(real) + mean log(1 - D1(fake)).
  {
    auto r = MlpForward(model_.d1, real_in);
    auto f = MlpForward(model_.d1, fake_in);
    const auto lr = BceTerms(r.output, 1.0);
    const auto lf = BceTerms(f.output, 0.0);
    auto gr = MlpBackward(model_.d1, r.cache, lr.grad, BackwardMode::kParamsOnly);
    auto gf = MlpBackward(model_.d1, f.cache, lf.grad, BackwardMode::kParamsOnly);
    gr.grads.AddScaled(gf.grads, 1.0);
    AdamStep(model_.d1, gr.grads, d1_opt_);
    acc.d1_loss += lr.loss + lf.loss;
  }

  // G_Dec descends mean log(1 - D1(fake)), or -mean log D1(fake) in the
  // non-saturating form. The trace always records the former.
  {
    auto f = MlpForward(model_.d1, fake_in);
    Matrix grad(f.output.rows(), 1);
    double loss = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m);
    for (Eigen::Index i = 0; i < f.output.rows(); ++i) {
      const double p = ClampProb(f.output(i, 0));
      const double q = GradProb(f.output(i, 0));
      loss += std::log(1.0 - p);
      grad(i, 0) = cfg_.non_saturating ? -inv_m / q : -inv_m / (1.0 - q);
    }
    auto back = MlpBackward(model_.d1, f.cache, grad, BackwardMode::kInputOnly);
    const Matrix xy_grad = back.input_grad.leftCols(xy_dim);
    UpdateGenerator(model_.generator, pass, xy_grad, g_opt_, dec_opt_);
    acc.g_loss += loss * inv_m;
  }
}

void Trainer::FairnessStep(EpochLosses& acc) {
  const double lambda = cfg_.lambda;
  // s_hat ~ Bernoulli(p_s1), as in the adversarial step. With a fixed 50/50
  // split here, G learned to be fair only for batches of that composition:
  // batch norm lets it read the mix through the batch statistics.
  if (model_.p_s1 <= 0.0 || model_.p_s1 >= 1.0) {
    throw std::invalid_argument("fairness phase needs both protected groups in the data");
  }
  std::vector<int> s_hat(static_cast<size_t>(cfg_.batch));
  do {
    for (auto& v : s_hat) v = rng_.Bernoulli(model_.p_s1);
  } while (std::count(s_hat.begin(), s_hat.end(), 1) == 0 ||
           std::count(s_hat.begin(), s_hat.end(), 0) == 0);
  const GeneratorPass pass = RunGenerator(model_.generator, s_hat, rng_);
  const Matrix& fake_xy = pass.dec.output;
  auto& d2 = *model_.d2;

  // D2 ascends lambda * V2.
  {
    auto f = MlpForward(d2, fake_xy);
    const auto lg = GroupBce(f.output, s_hat);
    auto back = MlpBackward(d2, f.cache, lambda * lg.grad, BackwardMode::kParamsOnly);
    AdamStep(d2, back.grads, *d2_opt_);
    acc.d2_loss += lg.loss;
  }

  // G_Dec descends lambda * V2 = -lambda * d2_loss.
  {
    auto f = MlpForward(d2, fake_xy);
    const auto lg = GroupBce(f.output, s_hat);
    auto back = MlpBackward(d2, f.cache, -lambda * lg.grad, BackwardMode::kInputOnly);
    UpdateGenerator(model_.generator, pass, back.input_grad, g_opt_, dec_opt_);
    acc.lambda_term += -lambda * lg.loss;
  }
}

void Trainer::RunEpoch(int phase) {
  const bool fairness = phase == 2 && model_.d2.has_value() && cfg_.lambda > 0.0;
  const size_t n = ds_->size();
  const auto m = static_cast<size_t>(cfg_.batch);
  const size_t steps = (n + m - 1) / m;
  if (model_.variant != Variant::kNfgan2) {
    std::shuffle(order_.begin(), order_.end(), rng_.engine());
    cursor_ = 0;
  }
  EpochLosses acc;
  acc.epoch = ++epochs_done_;
  acc.phase = phase;
  for (size_t step = 0; step < steps; ++step) {
    const Batch real = NextRealBatch();
    AdversarialStep(real, acc);
    if (fairness) FairnessStep(acc);
  }
  const double inv = 1.0 / static_cast<double>(steps);
  acc.d1_loss *= inv;
  acc.g_loss *= inv;
  acc.d2_loss *= inv;
  acc.lambda_term *= inv;
  trace_.push_back(acc);
}

void Trainer::RunPhase1() {
  for (int e = 0; e < cfg_.phase1_epochs; ++e) RunEpoch(1);
}

void Trainer::RunPhase2() {
  if (!HasFairnessPhase(model_.variant)) return;
  for (int e = 0; e < cfg_.phase2_epochs; ++e) RunEpoch(2);
}

TrainResult Train(const EncodedDataset& ds, Variant variant, const AutoencoderModel& ae,
                  const TrainConfig& cfg) {
  Trainer trainer(ds, variant, ae, cfg);
  trainer.RunPhase1();
  trainer.RunPhase2();
  return {trainer.model(), trainer.trace()};
}

void WriteLossTrace(std::ostream& out, const std::vector<EpochLosses>& trace) {
  out << "epoch,phase,d1_loss,g_loss,d2_loss,lambda_term\n" << std::setprecision(10);
  for (const auto& e : trace) {
    out << e.epoch << "," << e.phase << "," << e.d1_loss << "," << e.g_loss << "," << e.d2_loss
        << "," << e.lambda_term << "\n";
  }
}

EncodedDataset SynthesizeWithS(const FairGanModel& model, std::span<const int> s_values,
                               const FeatureMap& features, Rng& rng) {
  const Eigen::Index d = features.width();
  if (model.generator.output_dim() != d + 1) {
    throw ShapeError("Synthesize: model emits " + std::to_string(model.generator.output_dim()) +
                     " columns, feature map needs " + std::to_string(d + 1));
  }
  EncodedDataset out;
  out.features = features;
  const size_t n = s_values.size();
  out.x.resize(static_cast<Eigen::Index>(n), d);
  out.y.resize(n);
  out.s.assign(s_values.begin(), s_values.end());
  for (size_t start = 0; start < n; start += kGenerateChunk) {
    const size_t len = std::min(kGenerateChunk, n - start);
    const auto batch = GenerateBatch(model, s_values.subspan(start, len), rng);
    out.x.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(len)) =
        batch.xy.leftCols(d);
    for (size_t i = 0; i < len; ++i) {
      out.y[start + i] = batch.xy(static_cast<Eigen::Index>(i), d) >= 0.5 ? 1 : 0;
    }
  }
  Discretize(out.x, features);
  return out;
}

EncodedDataset Synthesize(const FairGanModel& model, size_t n, const FeatureMap& features,
                          Rng& rng) {
  std::vector<int> s(n);
  for (auto& v : s) v = rng.Bernoulli(model.p_s1);
  return SynthesizeWithS(model, s, features, rng);
}

}  // namespace fairgan
