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

// Adversarial generators for tabular data with a binary protected attribute.
//
// Four variants share one engine:
//
//   gan      G(z, s) and D1(x, y, s). Plain conditional GAN.
//   nfgan1   G(z) and D1(x, y). s is assigned to generated rows independently.
//   nfgan2   nfgan1 plus D2(x, y); the real side of D1 is drawn half from each
//            s group, and a second adversarial phase trains D2.
//   fairgan  gan plus D2(x, y) in the second phase. The generator maximizes
//            D2's error on telling generated s=1 rows from s=0 rows, weighted
//            by lambda.
//
// The generator is G followed by the pretrained decoder (G_Dec); the decoder
// keeps training with G. Generated rows are continuous in (0, 1)^(d+1) during
// training; the last column is the decision probability.

#ifndef FAIRGAN_GAN_HPP_
#define FAIRGAN_GAN_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgan/autoencoder.hpp"
#include "fairgan/data.hpp"
#include "fairgan/nn.hpp"

namespace fairgan {

enum class Variant { kGan, kNfgan1, kNfgan2, kFairgan };

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);
inline bool ConditionsOnS(Variant v) { return v == Variant::kGan || v == Variant::kFairgan; }
inline bool HasFairnessPhase(Variant v) { return v == Variant::kNfgan2 || v == Variant::kFairgan; }

struct TrainConfig {
  int phase1_epochs = 2000;
  int phase2_epochs = 2000;
  int batch = 128;
  double lambda = 1.0;
  Eigen::Index noise_dim = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  std::vector<Eigen::Index> generator_hidden = {128, 128};
  std::vector<Eigen::Index> discriminator_hidden = {256, 128};
  // G descends -log D1(fake) instead of log(1 - D1(fake)). Same fixed point,
  // but the gradient does not vanish once D1 rejects every fake.
  bool non_saturating = true;
  double adam_beta1 = 0.9;
  double decoder_lr_scale = 1.0;
  // Batch norm ahead of every generator activation keeps G's latent from
  // drifting into the tanh corners, where it stops receiving gradient.
  bool generator_batch_norm = true;

  void Validate() const;  // throws std::invalid_argument
  nlohmann::json ToJson() const;
};

struct GeneratorGDec {
  MlpParams g;    // noise_dim (+1 when conditioning) -> h
  MlpParams dec;  // h -> d + 1
  Eigen::Index noise_dim = 0;
  bool conditions_on_s = false;

  Eigen::Index output_dim() const { return dec.output_dim(); }
};

struct FairGanModel {
  Variant variant = Variant::kFairgan;
  GeneratorGDec generator;
  MlpParams d1;
  std::optional<MlpParams> d2;
  double lambda = 1.0;
  double p_s1 = 0.5;

  nlohmann::json ToJson() const;
  static FairGanModel FromJson(const nlohmann::json& j);
  bool operator==(const FairGanModel& other) const;
};

// Builds a model with fresh G/D weights and the autoencoder's decoder.
FairGanModel InitModel(Variant variant, const AutoencoderModel& ae, Eigen::Index data_dim,
                       double p_s1, const TrainConfig& cfg);

struct GeneratedBatch {
  Matrix xy;  // [m x (d+1)], continuous, last column = decision probability
  std::vector<int> s;
};

// z ~ N(0, I). The returned s equals `s_values`.
GeneratedBatch GenerateBatch(const FairGanModel& model, std::span<const int> s_values, Rng& rng);

// D1 input: [xy | s] for conditioning variants, [xy] otherwise.
Matrix DiscriminatorInput(const Matrix& xy, std::span<const int> s, Variant variant);

struct AdversarialLoss {
  double discriminator_loss;
  double generator_part;
};

// d1_loss = -[mean log D1(real) + mean log(1 - D1(fake))];
// generator part = mean log(1 - D1(fake)).
AdversarialLoss V1Losses(const Matrix& d1_real_out, const Matrix& d1_fake_out);
AdversarialLoss V1Losses(const MlpParams& d1, const Matrix& real_input, const Matrix& fake_input);

// d2_loss = -[mean_{s=1} log D2 + mean_{s=0} log(1 - D2)];
// generator part = -lambda * d2_loss. Throws if a group is empty.
AdversarialLoss V2Losses(const Matrix& d2_out, std::span<const int> s_hat, double lambda);
AdversarialLoss V2Losses(const MlpParams& d2, const Matrix& fake_xy, std::span<const int> s_hat,
                         double lambda);

struct EpochLosses {
  int epoch = 0;
  int phase = 1;
  double d1_loss = 0.0;
  double g_loss = 0.0;
  double d2_loss = 0.0;
  double lambda_term = 0.0;
};

// Algorithm-1 trainer. Copyable: copying after phase 1 branches the run, which
// is how a lambda sweep shares one phase-1 model.
class Trainer {
 public:
  Trainer(const EncodedDataset& ds, Variant variant, const AutoencoderModel& ae,
          const TrainConfig& cfg);

  void RunPhase1();
  // No-op for gan / nfgan1.
  void RunPhase2();
  void RunEpoch(int phase);

  void set_lambda(double lambda);
  // Relabels the run (used to read a conditional GAN off fairgan's phase 1).
  void set_variant(Variant v);
  const FairGanModel& model() const { return model_; }
  const std::vector<EpochLosses>& trace() const { return trace_; }
  const TrainConfig& config() const { return cfg_; }

 private:
  struct Batch {
    Matrix xy;
    std::vector<int> s;
  };
  Batch NextRealBatch();
  void AdversarialStep(const Batch& real, EpochLosses& acc);
  void FairnessStep(EpochLosses& acc);

  const EncodedDataset* ds_;
  Matrix real_xy_;
  TrainConfig cfg_;
  FairGanModel model_;
  AdamState g_opt_;
  AdamState dec_opt_;
  AdamState d1_opt_;
  std::optional<AdamState> d2_opt_;
  Rng rng_;
  std::vector<size_t> order_;
  size_t cursor_ = 0;
  std::vector<size_t> group_[2];
  size_t group_cursor_[2] = {0, 0};
  int epochs_done_ = 0;
  std::vector<EpochLosses> trace_;
};

struct TrainResult {
  FairGanModel model;
  std::vector<EpochLosses> trace;
};

TrainResult Train(const EncodedDataset& ds, Variant variant, const AutoencoderModel& ae,
                  const TrainConfig& cfg);

void WriteLossTrace(std::ostream& out, const std::vector<EpochLosses>& trace);

// Discrete synthetic data: s ~ Bernoulli(p_s1), categorical groups snapped to
// one-hot by argmax, decision thresholded at 0.5, numerics clipped to [0, 1].
EncodedDataset Synthesize(const FairGanModel& model, size_t n, const FeatureMap& features,
                          Rng& rng);
// Same, conditioning row i on s_values[i] instead of sampling s.
EncodedDataset SynthesizeWithS(const FairGanModel& model, std::span<const int> s_values,
                               const FeatureMap& features, Rng& rng);

}  // namespace fairgan

#endif  // FAIRGAN_GAN_HPP_
