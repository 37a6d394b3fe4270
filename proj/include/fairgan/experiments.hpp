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

// End-to-end experiment drivers shared by the CLI and the acceptance suite.

#ifndef FAIRGAN_EXPERIMENTS_HPP_
#define FAIRGAN_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairgan/autoencoder.hpp"
#include "fairgan/classifiers.hpp"
#include "fairgan/data.hpp"
#include "fairgan/gan.hpp"

namespace fairgan {

// Independent random stream for each pipeline stage of a seeded run.
enum class Stage { kSubsample, kAutoencoder, kSynthesis, kToyData, kAudit };
Rng StageRng(std::uint64_t seed, Stage stage);

// Complete rows of a schema-conforming table, encoded.
EncodedDataset LoadEncoded(const std::string& schema_path, const std::string& data_path);

struct Profile {
  std::string name = "default";
  size_t subsample = 0;  // 0 keeps every row
  PretrainConfig autoencoder;
  TrainConfig train;

  static Profile Default();  // 200 AE epochs, phases 2000/2000
  static Profile Fast();     // 8,000 rows, phases 300/300
  static Profile Toy();
  nlohmann::json ToJson() const;
  // Overrides any field present in `j` (same keys as ToJson).
  void Apply(const nlohmann::json& j);
};

// Models trained for one seed. gan is read off fairgan's first phase; the
// fairgan entries share that phase and branch per lambda.
struct SeedModels {
  std::uint64_t seed = 0;
  AutoencoderModel autoencoder;
  std::map<Variant, FairGanModel> models;   // gan, nfgan1, nfgan2, fairgan (lambda = cfg)
  std::map<double, FairGanModel> fairgan_by_lambda;
};

struct SeedPlan {
  bool gan = true;
  bool nfgan1 = true;
  bool nfgan2 = true;
  bool fairgan = true;
  std::vector<double> lambdas;  // extra fairgan branches; cfg.lambda is always run
};

SeedModels TrainSeed(const EncodedDataset& real, const Profile& profile, std::uint64_t seed,
                     const SeedPlan& plan);

// Rows used for training under `profile` (stratified subsample when set).
EncodedDataset ProfileData(const EncodedDataset& full, const Profile& profile,
                           std::uint64_t seed);

struct ToyRun {
  Variant variant = Variant::kFairgan;
  std::uint64_t seed = 0;
  std::vector<double> hist_all;  // generated x on [kToyMin, kToyMax]
  std::vector<double> hist_s1;
  std::vector<double> hist_s0;
  double mean_s1 = 0.0;
  double mean_s0 = 0.0;
};

inline constexpr int kToyBins = 64;

ToyRun RunToy(Variant variant, std::uint64_t seed, const Profile& profile, size_t n_train,
              size_t n_generate);

// Plot-ready histogram table: bin_lo, bin_hi, then one column per series.
void WriteHistogramCsv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& series);

double Median(std::vector<double> v);
// Spearman rank correlation with average ranks for ties.
double Spearman(std::span<const double> a, std::span<const double> b);

// Worker count from FAIRGAN_WORKERS (default 1).
int WorkerCount();
// Runs fn(0..count-1) on up to `workers` threads; rethrows the first error.
void ParallelFor(size_t count, int workers, const std::function<void(size_t)>& fn);

}  // namespace fairgan

#endif  // FAIRGAN_EXPERIMENTS_HPP_
