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

#include "fairgan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "fairgan/metrics.hpp"

namespace fairgan {
namespace {

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

// Distinct streams per stage so that changing one stage never shifts another
// stage's draws.
Rng StageRng(std::uint64_t seed, Stage stage) {
  const auto stream = static_cast<std::uint64_t>(stage) + 1;
  return Rng(seed ^ (stream * 0x9E3779B97F4A7C15ULL)).Fork();
}

EncodedDataset LoadEncoded(const std::string& schema_path, const std::string& data_path) {
  auto schema = std::make_shared<const Schema>(Schema::Load(schema_path));
  return Encode(LoadTable(data_path, schema).DropIncomplete());
}

Profile Profile::Default() { return Profile{}; }

Profile Profile::Fast() {
  Profile p;
  p.name = "fast";
  p.subsample = 8000;
  p.train.phase1_epochs = 300;
  p.train.phase2_epochs = 300;
  return p;
}

Profile Profile::Toy() {
  Profile p;
  p.name = "toy";
  p.autoencoder.epochs = 100;
  p.autoencoder.hidden = 16;
  p.train.phase1_epochs = 150;
  p.train.phase2_epochs = 150;
  p.train.noise_dim = 16;
  p.train.generator_hidden = {64, 64};
  p.train.discriminator_hidden = {64, 32};
  // A one-dimensional mixture oscillates between modes at the Adult settings.
  p.train.learning_rate = 2e-4;
  p.train.adam_beta1 = 0.5;
  return p;
}

nlohmann::json Profile::ToJson() const {
  nlohmann::json j = train.ToJson();
  j.erase("seed");
  j["name"] = name;
  j["subsample"] = subsample;
  j["ae_epochs"] = autoencoder.epochs;
  j["ae_batch"] = autoencoder.batch;
  j["ae_hidden"] = autoencoder.hidden;
  j["ae_learning_rate"] = autoencoder.learning_rate;
  return j;
}

void Profile::Apply(const nlohmann::json& j) {
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("name", name);
  take("subsample", subsample);
  take("ae_epochs", autoencoder.epochs);
  take("ae_batch", autoencoder.batch);
  take("ae_hidden", autoencoder.hidden);
  take("ae_learning_rate", autoencoder.learning_rate);
  take("phase1_epochs", train.phase1_epochs);
  take("phase2_epochs", train.phase2_epochs);
  take("batch", train.batch);
  take("lambda", train.lambda);
  take("noise_dim", train.noise_dim);
  take("learning_rate", train.learning_rate);
  take("generator_hidden", train.generator_hidden);
  take("discriminator_hidden", train.discriminator_hidden);
  take("non_saturating", train.non_saturating);
  take("adam_beta1", train.adam_beta1);
  take("decoder_lr_scale", train.decoder_lr_scale);
  take("generator_batch_norm", train.generator_batch_norm);
  train.Validate();
}

EncodedDataset ProfileData(const EncodedDataset& full, const Profile& profile,
                           std::uint64_t seed) {
  if (profile.subsample == 0 || profile.subsample >= full.size()) return full;
  Rng rng = StageRng(seed, Stage::kSubsample);
  return StratifiedSubsample(full, profile.subsample, rng);
}

SeedModels TrainSeed(const EncodedDataset& real, const Profile& profile, std::uint64_t seed,
                     const SeedPlan& plan) {
  SeedModels out;
  out.seed = seed;
  Rng ae_rng = StageRng(seed, Stage::kAutoencoder);
  out.autoencoder = Pretrain(real, profile.autoencoder, ae_rng).model;

  TrainConfig cfg = profile.train;
  cfg.seed = seed;

  if (plan.gan || plan.fairgan) {
    Trainer shared(real, Variant::kFairgan, out.autoencoder, cfg);
    shared.RunPhase1();
    if (plan.gan) {
      Trainer gan = shared;
      gan.set_variant(Variant::kGan);
      out.models.emplace(Variant::kGan, gan.model());
    }
    if (plan.fairgan) {
      std::set<double> lambdas(plan.lambdas.begin(), plan.lambdas.end());
      lambdas.insert(cfg.lambda);
      for (double l : lambdas) {
        Trainer branch = shared;
        branch.set_lambda(l);
        branch.RunPhase2();
        out.fairgan_by_lambda.emplace(l, branch.model());
      }
      out.models.emplace(Variant::kFairgan, out.fairgan_by_lambda.at(cfg.lambda));
    }
  }
  if (plan.nfgan1) {
    out.models.emplace(Variant::kNfgan1,
                       Train(real, Variant::kNfgan1, out.autoencoder, cfg).model);
  }
  if (plan.nfgan2) {
    out.models.emplace(Variant::kNfgan2,
                       Train(real, Variant::kNfgan2, out.autoencoder, cfg).model);
  }
  return out;
}

ToyRun RunToy(Variant variant, std::uint64_t seed, const Profile& profile, size_t n_train,
              size_t n_generate) {
  Rng data_rng = StageRng(seed, Stage::kToyData);
  const EncodedDataset real = SampleToy(n_train, data_rng);
  Rng ae_rng = StageRng(seed, Stage::kAutoencoder);
  const AutoencoderModel ae = Pretrain(real, profile.autoencoder, ae_rng).model;
  TrainConfig cfg = profile.train;
  cfg.seed = seed;
  const FairGanModel model = Train(real, variant, ae, cfg).model;

  Rng gen_rng = StageRng(seed, Stage::kSynthesis);
  const EncodedDataset syn = Synthesize(model, n_generate, real.features, gen_rng);
  std::vector<double> all, s1, s0;
  for (size_t i = 0; i < syn.size(); ++i) {
    const double x = ToyUnscale(syn.x(static_cast<Eigen::Index>(i), 0));
    all.push_back(x);
    (syn.s[i] ? s1 : s0).push_back(x);
  }
  ToyRun r;
  r.variant = variant;
  r.seed = seed;
  r.hist_all = Histogram(all, kToyBins, kToyMin, kToyMax);
  r.hist_s1 = Histogram(s1, kToyBins, kToyMin, kToyMax);
  r.hist_s0 = Histogram(s0, kToyBins, kToyMin, kToyMax);
  r.mean_s1 = std::accumulate(s1.begin(), s1.end(), 0.0) / static_cast<double>(s1.size());
  r.mean_s0 = std::accumulate(s0.begin(), s0.end(), 0.0) / static_cast<double>(s0.size());
  return r;
}

void WriteHistogramCsv(std::ostream& out, const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& series) {
  if (names.size() != series.size() || series.empty()) {
    throw std::invalid_argument("WriteHistogramCsv: names and series must match");
  }
  const size_t bins = series.front().size();
  const double width = (kToyMax - kToyMin) / static_cast<double>(bins);
  out << "bin_lo,bin_hi";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  char buf[48];
  for (size_t k = 0; k < bins; ++k) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g", kToyMin + k * width, kToyMin + (k + 1) * width);
    out << buf;
    for (const auto& s : series) {
      std::snprintf(buf, sizeof buf, ",%.10g", s.at(k));
      out << buf;
    }
    out << '\n';
  }
}

double Median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("Median: empty input");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("Spearman: need two equal-length series of >= 2 points");
  }
  const auto ra = Ranks(a);
  const auto rb = Ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

int WorkerCount() {
  if (const char* env = std::getenv("FAIRGAN_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

void ParallelFor(size_t count, int workers, const std::function<void(size_t)>& fn) {
  const size_t nthreads = std::min<size_t>(count, static_cast<size_t>(std::max(workers, 1)));
  if (nthreads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace fairgan
