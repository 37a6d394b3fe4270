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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion (or a group's time budget) fails.
//
//   acceptance [--group theory|numerics|toy|adult|all]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include "fairgan/classifiers.hpp"
#include "fairgan/experiments.hpp"
#include "fairgan/metrics.hpp"
#include "fairgan/theory.hpp"

namespace fairgan {
namespace {

const double kLog4 = std::log(4.0);

int g_failures = 0;

void Report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void Budget(const std::string& group, double seconds, double limit) {
  const bool ok = seconds < limit;
  std::printf("%s budget %s: %.1f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", group.c_str(),
              seconds, limit);
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- theory

std::vector<double> RandomSimplex(size_t n, Rng& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = rng.Uniform(0.02, 1.0);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return p;
}

std::vector<Outcome> RandomOutcomes(int n_xy) {
  std::vector<Outcome> o;
  for (int s : {1, 0}) {
    for (int k = 0; k < n_xy; ++k) o.push_back({"x" + std::to_string(k / 2), k % 2, s});
  }
  return o;
}

// The closed form as stated for the theorem: -(2 + lambda) log 4 plus the
// two JSD terms.
double StatedClosedForm(const GameEvaluation& ev) {
  return -(2.0 + ev.lambda) * kLog4 + 2.0 * ev.jsd_data_vs_g + 2.0 * ev.lambda * ev.jsd_s1_vs_s0;
}

void TheoryGroup() {
  // 1. Optimal discriminators are maximizers; direct V equals the stated
  //    closed form.
  {
    Rng rng(101);
    bool never_increases = true;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n_xy = 2 + static_cast<int>(rng.Uniform() * 5);
      const auto o = RandomOutcomes(n_xy);
      const FinitePmf p(o, RandomSimplex(o.size(), rng));
      const FinitePmf q(o, RandomSimplex(o.size(), rng));
      const double lambda = std::vector<double>{0.0, 0.5, 1.0, 2.0}[trial % 4];
      const auto ev = FairganValue(p, q, lambda);
      const double v = FairganGameValue(p, q, lambda, ev.d1_table, ev.d2_table);
      for (int table = 0; table < 2; ++table) {
        const size_t n = table == 0 ? ev.d1_table.size() : ev.d2_table.size();
        for (size_t i = 0; i < n; ++i) {
          for (double step : {-0.01, 0.01}) {
            auto d1 = ev.d1_table;
            auto d2 = ev.d2_table;
            auto& t = table == 0 ? d1 : d2;
            t[i] = std::clamp(t[i] + step, 0.0, 1.0);
            if (FairganGameValue(p, q, lambda, d1, d2) > v + 1e-15) never_increases = false;
          }
        }
      }
      worst_gap = std::max(worst_gap, std::abs(v - StatedClosedForm(ev)));
    }
    Report(1, never_increases && worst_gap <= 1e-9,
           "optimal D1/D2 maximize V; direct V = stated closed form within 1e-9",
           std::string("perturbations never increase V: ") + (never_increases ? "yes" : "no") +
               Fmt("; max |V - (-(2+l)log4 + 2JSD + 2l JSD)| = %.6g (log 4 = %.6g)", worst_gap,
                   kLog4));
  }

  // 2. Floor at p_g = p_data with equal conditionals.
  {
    const std::vector<Outcome> o = {{"a", 0, 1}, {"b", 1, 1}, {"a", 0, 0}, {"b", 1, 0}};
    const FinitePmf p(o, {0.15, 0.35, 0.15, 0.35});
    bool pass = true;
    std::string detail;
    for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
      const auto ev = FairganValue(p, p, lambda);
      const double target = -(2.0 + lambda) * kLog4;
      if (std::abs(ev.value - target) > 1e-12) pass = false;
      detail += Fmt("l=%.1f value %.12f target %.12f; ", lambda, ev.value, target);
    }
    Report(2, pass, "fairgan_value = -(2+l)log4 at the matched generator within 1e-12", detail);
  }

  // 3. nfgan2 optimum and value.
  {
    Rng rng(303);
    bool is_average = true, value_ok = true, strict = true;
    double value = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto o = RandomOutcomes(3 + trial % 4);
      const FinitePmf p(o, RandomSimplex(o.size(), rng));
      const auto opt = Nfgan2ValueAndOptimum(p);
      const auto c1 = p.Conditional(1).probs();
      const auto c0 = p.Conditional(0).probs();
      for (size_t i = 0; i < c1.size(); ++i) {
        const double avg = 0.5 * (c1[i] + c0[i]);
        if (std::abs(opt.given_s1.probs()[i] - avg) > 1e-15 ||
            std::abs(opt.given_s0.probs()[i] - avg) > 1e-15) {
          is_average = false;
        }
      }
      value = opt.evaluation.value;
      if (std::abs(value - (-4.0 * kLog4)) > 1e-12) value_ok = false;
      for (size_t k = 0; k + 1 < c1.size(); ++k) {
        auto g = opt.given_s1.probs();
        const double shift = std::min(1e-3, g[k + 1]);
        g[k] += shift;
        g[k + 1] -= shift;
        const FinitePmf perturbed(opt.given_s1.outcomes(), g);
        if (!(Nfgan2Value(p, perturbed, opt.given_s0).value > value)) strict = false;
      }
    }
    Report(3, is_average && value_ok && strict,
           "nfgan2 optimum is the conditional average, value -4log4 within 1e-12, perturbations "
           "increase it",
           std::string("average: ") + (is_average ? "yes" : "no") +
               "; strictly increasing: " + (strict ? "yes" : "no") +
               Fmt("; value %.12f vs -4log4 = %.12f", value, -4.0 * kLog4));
  }
}

// -------------------------------------------------------------- numerics

void NumericsGroup() {
  // 4. Backprop against central differences on 10 random small nets.
  {
    Rng rng(404);
    const Activation acts[] = {Activation::kTanh, Activation::kSigmoid, Activation::kIdentity,
                               Activation::kRelu, Activation::kLeakyRelu};
    double worst = 0.0;
    const double h = 1e-5;
    for (int net = 0; net < 10; ++net) {
      const Eigen::Index in = 2 + static_cast<Eigen::Index>(rng.Uniform() * 5);
      std::vector<LayerSpec> specs;
      const int depth = 1 + static_cast<int>(rng.Uniform() * 3);
      for (int l = 0; l < depth; ++l) {
        specs.push_back({1 + static_cast<Eigen::Index>(rng.Uniform() * 6),
                         acts[static_cast<int>(rng.Uniform() * 5)]});
      }
      auto params = MakeMlp(in, specs, rng);
      for (auto& layer : params.layers) {
        for (Eigen::Index j = 0; j < layer.bias.size(); ++j) layer.bias(j) = rng.Uniform(-0.5, 0.5);
      }
      const Matrix x = rng.NormalMatrix(4, in);
      const Matrix c = rng.NormalMatrix(4, params.output_dim());
      auto loss = [&] { return (MlpPredict(params, x).array() * c.array()).sum(); };
      const auto fwd = MlpForward(params, x);
      const auto back = MlpBackward(params, fwd.cache, c);
      for (size_t l = 0; l < params.layers.size(); ++l) {
        auto check = [&](double& w, double analytic) {
          const double orig = w;
          w = orig + h;
          const double up = loss();
          w = orig - h;
          const double down = loss();
          w = orig;
          const double numeric = (up - down) / (2 * h);
          const double rel =
              std::abs(numeric - analytic) / std::max({1e-8, std::abs(numeric), std::abs(analytic)});
          // Relative error is meaningless for gradients that vanish in both.
          if (std::abs(numeric) > 1e-6 || std::abs(analytic) > 1e-6) worst = std::max(worst, rel);
        };
        auto& layer = params.layers[l];
        for (Eigen::Index k = 0; k < layer.weight.size(); ++k) {
          check(layer.weight(k), back.grads.layers[l].weight(k));
        }
        for (Eigen::Index k = 0; k < layer.bias.size(); ++k) {
          check(layer.bias(k), back.grads.layers[l].bias(k));
        }
      }
    }
    Report(4, worst < 1e-4, "backprop matches central differences, relative error < 1e-4",
           Fmt("max relative error %.3g over 10 nets", worst));
  }

  // 5. encode then decode on 1,000 random Adult-schema rows.
  {
    const auto schema = std::make_shared<const Schema>(
        Schema::Load(FAIRGAN_SOURCE_DIR "/data/adult_schema.json"));
    Rng rng(505);
    RawTable raw;
    raw.schema = schema;
    for (int i = 0; i < 1000; ++i) {
      Record r;
      for (const auto& a : schema->attributes) {
        if (a.kind == AttributeKind::kNumeric) {
          r.push_back(rng.Uniform(a.min, a.max));
        } else {
          r.push_back(std::floor(rng.Uniform(0.0, static_cast<double>(a.values.size()))));
        }
      }
      raw.rows.push_back(std::move(r));
    }
    const auto back = DecodeDataset(Encode(raw));
    bool categorical_exact = back.size() == raw.size();
    double worst_numeric = 0.0;
    for (size_t i = 0; i < raw.size() && categorical_exact; ++i) {
      for (size_t a = 0; a < schema->attributes.size(); ++a) {
        const double want = *raw.rows[i][a];
        const double got = *back.rows[i][a];
        if (schema->attributes[a].kind == AttributeKind::kNumeric) {
          worst_numeric = std::max(worst_numeric, std::abs(got - want));
        } else if (got != want) {
          categorical_exact = false;
        }
      }
    }
    Report(5, categorical_exact && worst_numeric <= 1e-9,
           "decode(encode(row)) = row on 1,000 random rows; numerics within 1e-9",
           std::string("categoricals exact: ") + (categorical_exact ? "yes" : "no") +
               Fmt("; max numeric error %.3g", worst_numeric));
  }
}

// ------------------------------------------------------------------- toy

constexpr size_t kToyTrainRows = 10000;
constexpr size_t kToyGenerateRows = 20000;
const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

void ToyGroup() {
  Stopwatch clock;
  const Profile profile = Profile::Toy();
  const auto oracle = DiscretizeToy(kToyBins);
  std::vector<double> gap, jsd_all, jsd_cond;
  std::string per_seed_cond;
  for (auto seed : kSeeds) {
    const auto fair = RunToy(Variant::kFairgan, seed, profile, kToyTrainRows, kToyGenerateRows);
    gap.push_back(std::abs(fair.mean_s1 - fair.mean_s0));
    const auto n1 = RunToy(Variant::kNfgan1, seed, profile, kToyTrainRows, kToyGenerateRows);
    jsd_all.push_back(Jsd(n1.hist_all, oracle.mixture));
    const auto n2 = RunToy(Variant::kNfgan2, seed, profile, kToyTrainRows, kToyGenerateRows);
    const double j1 = Jsd(n2.hist_s1, oracle.mixture);
    const double j0 = Jsd(n2.hist_s0, oracle.mixture);
    jsd_cond.push_back(std::max(j1, j0));
    per_seed_cond += Fmt("(%.4f, %.4f) ", j1, j0);
    std::printf("  toy seed %llu: fairgan gap %.4f, nfgan1 JSD %.4f, nfgan2 JSD s1 %.4f s0 %.4f "
                "(%.0f s)\n",
                static_cast<unsigned long long>(seed), gap.back(), jsd_all.back(), j1, j0,
                clock.Seconds());
    std::fflush(stdout);
  }
  const double m6 = Median(gap), m7 = Median(jsd_all), m8 = Median(jsd_cond);
  Report(6, m6 < 0.4, "toy fairgan (l=1): |mean(x|s=1) - mean(x|s=0)| < 0.4, median of 3 seeds",
         Fmt("median gap %.4f (real gap 2.0)", m6));
  Report(7, m7 < 0.05, "toy nfgan1: JSD(P_G(x) || real mixture) < 0.05, median of 3 seeds",
         Fmt("median JSD %.4f", m7));
  Report(8, m8 < 0.05,
         "toy nfgan2: JSD(each generated conditional || mixture average) < 0.05, median of 3 "
         "seeds",
         Fmt("median of per-seed max JSD %.4f", m8) + "; per seed (s1, s0): " + per_seed_cond);
  Budget("toy", clock.Seconds(), 600.0);
}

// ----------------------------------------------------------------- adult

struct AdultSeed {
  double real_rd = 0, gan_rd = 0, fair_rd = 0, nf1_rd = 0, nf2_rd = 0;
  double real_ber = 0, fair_ber = 0;
  double r2r_acc = 0, r2r_rd = 0, s2r_acc = 0, s2r_rd = 0;
  std::vector<double> sweep_rd;   // per lambda in kSweep
  std::vector<double> sweep_acc;  // SYN2REAL accuracy per lambda
};

const std::vector<double> kSweep = {0.0, 0.5, 1.0, 2.0};

AdultSeed RunAdultSeed(const EncodedDataset& full, std::uint64_t seed) {
  const Profile profile = Profile::Fast();
  const EncodedDataset real = ProfileData(full, profile, seed);
  SeedPlan plan;
  plan.lambdas = kSweep;
  const SeedModels models = TrainSeed(real, profile, seed, plan);

  AdultSeed r;
  r.real_rd = RiskDifferenceData(real);
  Rng syn_rng = StageRng(seed, Stage::kSynthesis);
  auto synth = [&](const FairGanModel& m) {
    return Synthesize(m, real.size(), real.features, syn_rng);
  };
  r.gan_rd = RiskDifferenceData(synth(models.models.at(Variant::kGan)));
  r.nf1_rd = RiskDifferenceData(synth(models.models.at(Variant::kNfgan1)));
  r.nf2_rd = RiskDifferenceData(synth(models.models.at(Variant::kNfgan2)));
  for (double l : kSweep) {
    const auto syn = synth(models.fairgan_by_lambda.at(l));
    const auto s2r = RunSetting(Setting::kSyn2Real, real, &syn, ClassifierKind::kLinearSvm, seed);
    r.sweep_rd.push_back(RiskDifferenceData(syn));
    r.sweep_acc.push_back(s2r.accuracy);
    if (l == profile.train.lambda) {
      r.fair_rd = r.sweep_rd.back();
      r.s2r_acc = s2r.accuracy;
      r.s2r_rd = s2r.risk_difference;
    }
  }
  const auto r2r = RunSetting(Setting::kReal2Real, real, nullptr, ClassifierKind::kLinearSvm, seed);
  r.r2r_acc = r2r.accuracy;
  r.r2r_rd = r2r.risk_difference;

  Rng audit_rng = StageRng(seed, Stage::kAudit);
  r.real_ber = EpsilonFair(real, 0.3, audit_rng).ber;
  const auto with_s =
      SynthesizeWithS(models.models.at(Variant::kFairgan), real.s, real.features, syn_rng);
  r.fair_ber = EpsilonFair(with_s.x, real.s, 0.3, audit_rng).ber;
  return r;
}

template <typename F>
double MedianOf(const std::vector<AdultSeed>& seeds, F field) {
  std::vector<double> v;
  for (const auto& s : seeds) v.push_back(field(s));
  return Median(v);
}

void AdultGroup() {
  Stopwatch clock;
  const auto full = LoadEncoded(FAIRGAN_SOURCE_DIR "/data/adult_schema.json",
                                FAIRGAN_SOURCE_DIR "/data/adult.csv");
  std::vector<AdultSeed> seeds;
  for (auto seed : kSeeds) {
    seeds.push_back(RunAdultSeed(full, seed));
    const auto& s = seeds.back();
    std::printf("  adult seed %llu: real RD %.4f | gan %.4f fairgan %.4f nfgan1 %.4f nfgan2 %.4f "
                "| BER real %.4f fairgan %.4f | R2R acc %.4f RD %.4f | S2R acc %.4f RD %.4f | "
                "sweep RD",
                static_cast<unsigned long long>(seed), s.real_rd, s.gan_rd, s.fair_rd, s.nf1_rd,
                s.nf2_rd, s.real_ber, s.fair_ber, s.r2r_acc, s.r2r_rd, s.s2r_acc, s.s2r_rd);
    for (size_t k = 0; k < kSweep.size(); ++k) {
      std::printf(" l=%.1f:%.4f/acc %.4f", kSweep[k], s.sweep_rd[k], s.sweep_acc[k]);
    }
    std::printf(" (%.0f s)\n", clock.Seconds());
    std::fflush(stdout);
  }

  const double real_rd = MedianOf(seeds, [](const AdultSeed& s) { return s.real_rd; });
  Report(9, std::abs(real_rd - 0.1989) <= 0.01, "real-data risk difference = 0.1989 +- 0.01",
         Fmt("median %.4f", real_rd));

  const double fair_rd = MedianOf(seeds, [](const AdultSeed& s) { return s.fair_rd; });
  const double gan_rd = MedianOf(seeds, [](const AdultSeed& s) { return s.gan_rd; });
  Report(10, fair_rd < 0.10 && std::abs(gan_rd - real_rd) <= 0.06,
         "fairgan synthetic RD < 0.10; gan synthetic RD within +-0.06 of real",
         Fmt("fairgan %.4f; gan %.4f vs real %.4f", fair_rd, gan_rd, real_rd));

  const double nf1 = MedianOf(seeds, [](const AdultSeed& s) { return s.nf1_rd; });
  const double nf2 = MedianOf(seeds, [](const AdultSeed& s) { return s.nf2_rd; });
  Report(11, std::abs(nf1) < 0.03 && std::abs(nf2) < 0.03, "nfgan1/nfgan2 synthetic |RD| < 0.03",
         Fmt("nfgan1 %.4f; nfgan2 %.4f", nf1, nf2));

  const double real_ber = MedianOf(seeds, [](const AdultSeed& s) { return s.real_ber; });
  const double fair_ber = MedianOf(seeds, [](const AdultSeed& s) { return s.fair_ber; });
  Report(12, real_ber < 0.25 && fair_ber > 0.30,
         "s-attacker BER on real X < 0.25; on fairgan X (real s) > 0.30",
         Fmt("real %.4f; fairgan %.4f", real_ber, fair_ber));

  const double r2r_rd = MedianOf(seeds, [](const AdultSeed& s) { return s.r2r_rd; });
  const double r2r_acc = MedianOf(seeds, [](const AdultSeed& s) { return s.r2r_acc; });
  const double s2r_rd = MedianOf(seeds, [](const AdultSeed& s) { return s.s2r_rd; });
  const double s2r_acc = MedianOf(seeds, [](const AdultSeed& s) { return s.s2r_acc; });
  Report(13, s2r_rd < 0.5 * r2r_rd && s2r_acc >= r2r_acc - 0.06,
         "SYN2REAL linear SVM: RD < 0.5 x REAL2REAL RD; accuracy >= REAL2REAL - 0.06",
         Fmt("S2R RD %.4f vs R2R RD %.4f; S2R acc %.4f vs R2R acc %.4f", s2r_rd, r2r_rd, s2r_acc,
             r2r_acc));

  std::vector<double> med_rd, med_acc;
  for (size_t k = 0; k < kSweep.size(); ++k) {
    med_rd.push_back(MedianOf(seeds, [k](const AdultSeed& s) { return s.sweep_rd[k]; }));
    med_acc.push_back(MedianOf(seeds, [k](const AdultSeed& s) { return s.sweep_acc[k]; }));
  }
  const double rho = Spearman(kSweep, med_rd);
  std::string detail = Fmt("Spearman %.3f; S2R acc l=2 %.4f vs l=0 %.4f; median RD", rho,
                           med_acc.back(), med_acc.front());
  for (size_t k = 0; k < kSweep.size(); ++k) detail += Fmt(" %.4f", med_rd[k]);
  Report(14, rho <= -0.5 && med_acc.back() >= med_acc.front() - 0.05,
         "lambda sweep: Spearman(lambda, RD) <= -0.5; S2R accuracy at l=2 >= l=0 - 0.05", detail);
  Budget("adult", clock.Seconds(), 3600.0);
}

}  // namespace
}  // namespace fairgan

int main(int argc, char** argv) {
  std::string group = "all";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--group") == 0 && i + 1 < argc) group = argv[++i];
  }
  try {
    if (group == "theory" || group == "all") fairgan::TheoryGroup();
    if (group == "numerics" || group == "all") fairgan::NumericsGroup();
    if (group == "toy" || group == "all") fairgan::ToyGroup();
    if (group == "adult" || group == "all") fairgan::AdultGroup();
  } catch (const std::exception& e) {
    std::printf("FAIL error: %s\n", e.what());
    return 2;
  }
  return fairgan::g_failures == 0 ? 0 : 1;
}
