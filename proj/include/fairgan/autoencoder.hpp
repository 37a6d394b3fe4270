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

// Autoencoder pretraining. The decoder later becomes the output stage of the
// generator, so it is trained on the generator's target space [X | y].

#ifndef FAIRGAN_AUTOENCODER_HPP_
#define FAIRGAN_AUTOENCODER_HPP_

#include <vector>

#include "fairgan/data.hpp"
#include "fairgan/nn.hpp"

namespace fairgan {

struct AutoencoderModel {
  MlpParams encoder;  // d -> h, tanh
  MlpParams decoder;  // h -> d, sigmoid
  Eigen::Index hidden = 0;

  static AutoencoderModel Init(Eigen::Index input_dim, Eigen::Index hidden, Rng& rng);
  Matrix Reconstruct(const Matrix& x) const;

  nlohmann::json ToJson() const;
  static AutoencoderModel FromJson(const nlohmann::json& j);
};

// Batch mean of the per-row squared Euclidean distance.
double ReconstructionLoss(const Matrix& x, const Matrix& x_rec);

struct PretrainConfig {
  int epochs = 200;
  int batch = 128;
  Eigen::Index hidden = 128;
  double learning_rate = 1e-3;
};

struct PretrainResult {
  AutoencoderModel model;
  std::vector<double> loss_trace;  // mean minibatch loss per epoch
  double initial_loss = 0.0;       // full-data loss before the first update
  double final_loss = 0.0;         // full-data loss after the last epoch
};

// Adam on shuffled minibatches of `data` (rows are training examples).
PretrainResult Pretrain(const Matrix& data, const PretrainConfig& cfg, Rng& rng);
// Trains on ds.XY().
PretrainResult Pretrain(const EncodedDataset& ds, const PretrainConfig& cfg, Rng& rng);

}  // namespace fairgan

#endif  // FAIRGAN_AUTOENCODER_HPP_
