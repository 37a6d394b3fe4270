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

#include "fairgan/autoencoder.hpp"

#include <algorithm>

namespace fairgan {

AutoencoderModel AutoencoderModel::Init(Eigen::Index input_dim, Eigen::Index hidden, Rng& rng) {
  AutoencoderModel m;
  m.hidden = hidden;
  const LayerSpec enc[] = {{hidden, Activation::kTanh}};
  const LayerSpec dec[] = {{input_dim, Activation::kSigmoid}};
  m.encoder = MakeMlp(input_dim, enc, rng);
  m.decoder = MakeMlp(hidden, dec, rng);
  return m;
}

Matrix AutoencoderModel::Reconstruct(const Matrix& x) const {
  return MlpPredict(decoder, MlpPredict(encoder, x));
}

nlohmann::json AutoencoderModel::ToJson() const {
  return {{"encoder", MlpToJson(encoder)}, {"decoder", MlpToJson(decoder)}, {"h", hidden}};
}

AutoencoderModel AutoencoderModel::FromJson(const nlohmann::json& j) {
  AutoencoderModel m;
  m.encoder = MlpFromJson(j.at("encoder"));
  m.decoder = MlpFromJson(j.at("decoder"));
  m.hidden = j.at("h").get<Eigen::Index>();
  if (m.encoder.output_dim() != m.hidden || m.decoder.input_dim() != m.hidden ||
      m.decoder.output_dim() != m.encoder.input_dim()) {
    throw ShapeError("autoencoder checkpoint: encoder/decoder do not chain through h");
  }
  return m;
}

double ReconstructionLoss(const Matrix& x, const Matrix& x_rec) {
  if (x.rows() != x_rec.rows() || x.cols() != x_rec.cols()) {
    throw ShapeError("ReconstructionLoss: shape mismatch");
  }
  if (x.rows() == 0) return 0.0;
  return (x_rec - x).squaredNorm() / static_cast<double>(x.rows());
}

PretrainResult Pretrain(const Matrix& data, const PretrainConfig& cfg, Rng& rng) {
  if (data.rows() == 0) throw DataError("Pretrain: empty dataset");
  if (cfg.epochs < 1) throw DataError("Pretrain: epochs must be >= 1");
  if (cfg.batch < 1) throw DataError("Pretrain: batch must be >= 1");
  PretrainResult result;
  result.model = AutoencoderModel::Init(data.cols(), cfg.hidden, rng);
  auto& model = result.model;
  AdamState enc_opt = AdamState::For(model.encoder, cfg.learning_rate);
  AdamState dec_opt = AdamState::For(model.decoder, cfg.learning_rate);
  result.initial_loss = ReconstructionLoss(data, model.Reconstruct(data));

  const auto n = static_cast<size_t>(data.rows());
  const auto batch = static_cast<size_t>(cfg.batch);
  Matrix xb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto perm = SplitPermutation(n, rng);
    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < n; start += batch) {
      const size_t m = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(m), data.cols());
      for (size_t i = 0; i < m; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = data.row(static_cast<Eigen::Index>(perm[start + i]));
      }
      auto enc = MlpForward(model.encoder, xb);
      auto dec = MlpForward(model.decoder, enc.output);
      epoch_loss += ReconstructionLoss(xb, dec.output);
      ++batches;
      const Matrix upstream = (2.0 / static_cast<double>(m)) * (dec.output - xb);
      auto dec_back = MlpBackward(model.decoder, dec.cache, upstream);
      auto enc_back =
          MlpBackward(model.encoder, enc.cache, dec_back.input_grad, BackwardMode::kParamsOnly);
      AdamStep(model.decoder, dec_back.grads, dec_opt);
      AdamStep(model.encoder, enc_back.grads, enc_opt);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
  }
  result.final_loss = ReconstructionLoss(data, model.Reconstruct(data));
  return result;
}

PretrainResult Pretrain(const EncodedDataset& ds, const PretrainConfig& cfg, Rng& rng) {
  return Pretrain(ds.XY(), cfg, rng);
}

}  // namespace fairgan
