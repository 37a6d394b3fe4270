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

// fairgan: command-line driver.
//
//   fairgan pretrain   --config run.json [--seed N] [--fast]
//   fairgan train      --variant fairgan --lambda 1
//   fairgan synthesize --variant fairgan [--n ROWS]
//   fairgan audit      [--input table.csv] [--reference table.csv]
//   fairgan classify   --synthetic table.csv
//   fairgan sweep-lambda --lambdas 0,0.5,1,2
//   fairgan toy
//
// Artifacts go to <out>/seed-<N>/...; every command writes a manifest next to
// its outputs. FAIRGAN_WORKERS sets how many seeds run concurrently.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairgan/classifiers.hpp"
#include "fairgan/experiments.hpp"
#include "fairgan/metrics.hpp"
#include "fairgan/theory.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fairgan::cli {
namespace {

// Raised when an upstream artifact is missing; names the command to run.
class MissingPrerequisite : public std::runtime_error {
 public:
  MissingPrerequisite(const fs::path& path, const std::string& command)
      : std::runtime_error("missing " + path.string() + "; run `fairgan " + command +
                           "` first"),
        required_command(command) {}
  std::string required_command;
};

struct RunConfig {
  std::string schema = "data/adult_schema.json";
  std::string data = "data/adult.csv";
  Variant variant = Variant::kFairgan;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out = "runs";
  Profile profile = Profile::Default();
  std::optional<size_t> n;  // synthetic rows; defaults to the training size

  json ToJson() const {
    json j = {{"schema", schema},
              {"data", data},
              {"variant", VariantName(variant)},
              {"seeds", seeds},
              {"out", out},
              {"profile", profile.ToJson()}};
    if (n) j["n"] = *n;
    return j;
  }
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::string variant;
  bool fast = false;
  std::string out;
};

RunConfig Resolve(const Flags& f) {
  RunConfig c;
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot open config " + f.config);
    j = json::parse(in);
  }
  if (f.fast || j.value("fast", false)) c.profile = Profile::Fast();
  if (j.contains("schema")) c.schema = j.at("schema").get<std::string>();
  if (j.contains("data")) c.data = j.at("data").get<std::string>();
  if (j.contains("variant")) c.variant = ParseVariant(j.at("variant").get<std::string>());
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("n")) c.n = j.at("n").get<size_t>();
  if (j.contains("profile")) c.profile.Apply(j.at("profile"));
  if (j.contains("lambda")) c.profile.train.lambda = j.at("lambda").get<double>();

  if (f.seed) c.seeds = {*f.seed};
  if (f.lambda) c.profile.train.lambda = *f.lambda;
  if (!f.variant.empty()) c.variant = ParseVariant(f.variant);
  if (!f.out.empty()) c.out = f.out;

  if (c.seeds.empty()) throw std::invalid_argument("config lists no seeds");
  if (!(c.profile.train.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  for (const auto& p : {c.schema, c.data}) {
    if (!fs::exists(p)) throw std::runtime_error("path does not exist: " + p);
  }
  c.profile.train.Validate();
  return c;
}

fs::path SeedDir(const RunConfig& c, std::uint64_t seed) {
  return fs::path(c.out) / ("seed-" + std::to_string(seed));
}

std::string LambdaTag(double l) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", l);
  return buf;
}

fs::path ModelDir(const RunConfig& c, std::uint64_t seed) {
  std::string name(VariantName(c.variant));
  if (c.variant == Variant::kFairgan) {
    name += "-lambda" + LambdaTag(c.profile.train.lambda);
  }
  return SeedDir(c, seed) / name;
}

void Require(const fs::path& p, const std::string& command) {
  if (!fs::exists(p)) throw MissingPrerequisite(p, command);
}

json ReadJson(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return json::parse(in);
}

void WriteJson(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

template <typename Fn>
void WriteFile(const fs::path& p, Fn&& fn) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  fn(out);
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

EncodedDataset LoadCsvWithSchema(const std::string& schema_path, const std::string& csv) {
  return LoadEncoded(schema_path, csv);
}

std::mutex log_mu;
void Log(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mu);
  std::cerr << msg << '\n';
}

// --- commands --------------------------------------------------------------

void CmdPretrain(const RunConfig& c) {
  const EncodedDataset full = LoadEncoded(c.schema, c.data);
  ParallelFor(c.seeds.size(), WorkerCount(), [&](size_t i) {
    const auto seed = c.seeds[i];
    const EncodedDataset real = ProfileData(full, c.profile, seed);
    Rng rng = StageRng(seed, Stage::kAutoencoder);
    const PretrainResult r = Pretrain(real, c.profile.autoencoder, rng);
    const fs::path dir = SeedDir(c, seed);
    WriteJson(dir / "autoencoder.json", r.model.ToJson());
    WriteFile(dir / "autoencoder_loss.csv", [&](std::ostream& out) {
      out << "epoch,loss\n" << std::setprecision(10);
      for (size_t e = 0; e < r.loss_trace.size(); ++e) out << e + 1 << ',' << r.loss_trace[e] << '\n';
    });
    Manifest{"pretrain", c.ToJson(), seed, {c.schema, c.data},
             {dir / "autoencoder.json", dir / "autoencoder_loss.csv"}}
        .Write(dir, "pretrain.manifest.json");
    Log("seed " + std::to_string(seed) + ": reconstruction loss " +
        std::to_string(r.initial_loss) + " -> " + std::to_string(r.final_loss));
  });
}

void CmdTrain(const RunConfig& c) {
  const EncodedDataset full = LoadEncoded(c.schema, c.data);
  ParallelFor(c.seeds.size(), WorkerCount(), [&](size_t i) {
    const auto seed = c.seeds[i];
    const fs::path ae_path = SeedDir(c, seed) / "autoencoder.json";
    Require(ae_path, "pretrain");
    const auto ae = AutoencoderModel::FromJson(ReadJson(ae_path));
    const EncodedDataset real = ProfileData(full, c.profile, seed);
    TrainConfig cfg = c.profile.train;
    cfg.seed = seed;
    const TrainResult r = Train(real, c.variant, ae, cfg);
    const fs::path dir = ModelDir(c, seed);
    WriteJson(dir / "model.json", r.model.ToJson());
    WriteFile(dir / "loss_trace.csv", [&](std::ostream& out) { WriteLossTrace(out, r.trace); });
    Manifest{"train", c.ToJson(), seed, {c.schema, c.data, ae_path},
             {dir / "model.json", dir / "loss_trace.csv"}}
        .Write(dir, "train.manifest.json");
    Log("seed " + std::to_string(seed) + ": trained " + dir.string());
  });
}

void CmdSynthesize(const RunConfig& c) {
  const auto schema = std::make_shared<const Schema>(Schema::Load(c.schema));
  const EncodedDataset full = LoadEncoded(c.schema, c.data);
  ParallelFor(c.seeds.size(), WorkerCount(), [&](size_t i) {
    const auto seed = c.seeds[i];
    const fs::path dir = ModelDir(c, seed);
    Require(dir / "model.json", "train");
    const auto model = FairGanModel::FromJson(ReadJson(dir / "model.json"));
    const size_t n = c.n.value_or(ProfileData(full, c.profile, seed).size());
    Rng rng = StageRng(seed, Stage::kSynthesis);
    const EncodedDataset syn = Synthesize(model, n, full.features, rng);
    WriteFile(dir / "synthetic.csv", [&](std::ostream& out) { WriteTable(out, DecodeDataset(syn)); });
    Manifest{"synthesize", c.ToJson(), seed, {c.schema, dir / "model.json"},
             {dir / "synthetic.csv"}}
        .Write(dir, "synthesize.manifest.json");
    Log("seed " + std::to_string(seed) + ": wrote " + std::to_string(n) + " rows");
  });
}

void CmdAudit(const RunConfig& c, const std::string& input, const std::string& reference,
              double epsilon) {
  const std::string path = input.empty() ? c.data : input;
  const EncodedDataset ds = LoadCsvWithSchema(c.schema, path);
  std::optional<EncodedDataset> ref;
  AuditOptions opts;
  opts.epsilon = epsilon;
  if (!reference.empty()) {
    ref = LoadCsvWithSchema(c.schema, reference);
    opts.reference = &*ref;
  }
  const auto seed = c.seeds.front();
  Rng rng(seed);
  const FairnessReport report = Audit(ds, opts, rng);
  const fs::path dir = fs::path(c.out) / "audit" / fs::path(path).stem();
  WriteJson(dir / "report.json", report.ToJson());
  WriteFile(dir / "dimensionwise.csv", [&](std::ostream& out) {
    WriteDimensionwiseCsv(out, report.dimensionwise,
                          ref ? DimensionwiseProbability(*ref) : report.dimensionwise);
  });
  std::vector<fs::path> inputs = {c.schema, path};
  if (!reference.empty()) inputs.emplace_back(reference);
  Manifest{"audit", c.ToJson(), seed, inputs, {dir / "report.json", dir / "dimensionwise.csv"}}
      .Write(dir, "audit.manifest.json");
  std::printf("rows=%zu risk_difference=%.4f", report.rows, report.risk_difference);
  if (report.ber) std::printf(" ber=%.4f epsilon_fair=%s", *report.ber, *report.ber > epsilon ? "yes" : "no");
  std::printf("\n");
}

void CmdClassify(const RunConfig& c, const std::string& synthetic, const std::string& classifier) {
  const EncodedDataset full = LoadEncoded(c.schema, c.data);
  std::optional<EncodedDataset> syn;
  if (!synthetic.empty()) syn = LoadCsvWithSchema(c.schema, synthetic);
  std::vector<ClassifierKind> kinds;
  if (classifier == "all") {
    kinds = {ClassifierKind::kLinearSvm, ClassifierKind::kDecisionTree};
  } else {
    kinds = {ParseClassifier(classifier)};
  }
  std::vector<Setting> settings = {Setting::kReal2Real};
  if (syn) settings = {Setting::kReal2Real, Setting::kSyn2Syn, Setting::kSyn2Real};

  const fs::path dir = fs::path(c.out) / "classify";
  std::vector<EvalResult> rows;
  for (const auto seed : c.seeds) {
    const EncodedDataset real = ProfileData(full, c.profile, seed);
    for (auto s : settings) {
      for (auto k : kinds) rows.push_back(RunSetting(s, real, syn ? &*syn : nullptr, k, seed));
    }
  }
  WriteFile(dir / "eval.csv", [&](std::ostream& out) {
    WriteEvalCsvHeader(out);
    for (const auto& r : rows) WriteEvalCsvRow(out, r);
  });
  std::vector<fs::path> inputs = {c.schema, c.data};
  if (syn) inputs.emplace_back(synthetic);
  Manifest{"classify", c.ToJson(), c.seeds.front(), inputs, {dir / "eval.csv"}}.Write(
      dir, "classify.manifest.json");
  WriteEvalCsvHeader(std::cout);
  for (const auto& r : rows) WriteEvalCsvRow(std::cout, r);
}

void CmdSweep(const RunConfig& c, const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) throw std::invalid_argument("sweep-lambda needs at least two lambdas");
  const EncodedDataset full = LoadEncoded(c.schema, c.data);
  struct Row {
    double lambda;
    std::uint64_t seed;
    double data_rd, pmf, acc, rd;
  };
  std::vector<std::vector<Row>> per_seed(c.seeds.size());
  ParallelFor(c.seeds.size(), WorkerCount(), [&](size_t i) {
    const auto seed = c.seeds[i];
    const EncodedDataset real = ProfileData(full, c.profile, seed);
    SeedPlan plan;
    plan.gan = plan.nfgan1 = plan.nfgan2 = false;
    plan.lambdas = lambdas;
    const SeedModels m = TrainSeed(real, c.profile, seed, plan);
    for (double l : lambdas) {
      Rng rng = StageRng(seed, Stage::kSynthesis);
      const EncodedDataset syn =
          Synthesize(m.fairgan_by_lambda.at(l), real.size(), real.features, rng);
      const EvalResult e =
          RunSetting(Setting::kSyn2Real, real, &syn, ClassifierKind::kLinearSvm, seed);
      per_seed[i].push_back({l, seed, RiskDifferenceData(syn),
                             PmfDistance(real, syn, PmfMode::kJointXYS), e.accuracy,
                             e.risk_difference});
    }
    Log("seed " + std::to_string(seed) + ": sweep done");
  });
  const fs::path dir = fs::path(c.out) / "sweep";
  std::vector<double> xs, medians;
  json summary = json::array();
  for (double l : lambdas) {
    std::vector<double> rds;
    for (const auto& rows : per_seed) {
      for (const auto& r : rows) {
        if (r.lambda == l) rds.push_back(r.data_rd);
      }
    }
    xs.push_back(l);
    medians.push_back(Median(rds));
    summary.push_back({{"lambda", l}, {"median_data_rd", medians.back()}});
  }
  WriteFile(dir / "sweep.csv", [&](std::ostream& out) {
    out << "lambda,seed,data_rd,pmf_joint_xys,syn2real_svm_accuracy,syn2real_svm_rd\n";
    char buf[200];
    for (const auto& rows : per_seed) {
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%g,%llu,%.6f,%.6f,%.6f,%.6f\n", r.lambda,
                      static_cast<unsigned long long>(r.seed), r.data_rd, r.pmf, r.acc, r.rd);
        out << buf;
      }
    }
  });
  const json s = {{"per_lambda", summary}, {"spearman_lambda_vs_median_rd", Spearman(xs, medians)}};
  WriteJson(dir / "summary.json", s);
  Manifest{"sweep-lambda", c.ToJson(), c.seeds.front(), {c.schema, c.data},
           {dir / "sweep.csv", dir / "summary.json"}}
      .Write(dir, "sweep.manifest.json");
  std::cout << s.dump(2) << '\n';
}

void CmdToy(const RunConfig& c, size_t n_train, size_t n_generate) {
  Profile profile = Profile::Toy();
  profile.train.lambda = c.profile.train.lambda;
  const std::vector<Variant> variants = {Variant::kNfgan1, Variant::kNfgan2, Variant::kFairgan};
  const fs::path dir = fs::path(c.out) / "toy";
  const ToyDiscretization oracle = DiscretizeToy(kToyBins);
  std::vector<fs::path> outputs;
  WriteFile(dir / "oracle.csv", [&](std::ostream& out) {
    WriteHistogramCsv(out, {"data_s1", "data_s0", "data_all", "nfgan2_optimum"},
                      {oracle.given_s1, oracle.given_s0, oracle.mixture, oracle.mixture});
  });
  outputs.push_back(dir / "oracle.csv");
  json summary = json::array();
  std::vector<ToyRun> runs(variants.size() * c.seeds.size());
  ParallelFor(runs.size(), WorkerCount(), [&](size_t i) {
    runs[i] = RunToy(variants[i / c.seeds.size()], c.seeds[i % c.seeds.size()], profile, n_train,
                     n_generate);
  });
  for (const auto& r : runs) {
    const std::string name =
        std::string(VariantName(r.variant)) + "_seed" + std::to_string(r.seed) + ".csv";
    WriteFile(dir / name, [&](std::ostream& out) {
      WriteHistogramCsv(out, {"gen_all", "gen_s1", "gen_s0"}, {r.hist_all, r.hist_s1, r.hist_s0});
    });
    outputs.push_back(dir / name);
    summary.push_back({{"variant", VariantName(r.variant)},
                       {"seed", r.seed},
                       {"mean_s1", r.mean_s1},
                       {"mean_s0", r.mean_s0},
                       {"jsd_all_vs_data", Jsd(r.hist_all, oracle.mixture)},
                       {"jsd_s1_vs_mixture", Jsd(r.hist_s1, oracle.mixture)},
                       {"jsd_s0_vs_mixture", Jsd(r.hist_s0, oracle.mixture)}});
  }
  WriteJson(dir / "summary.json", summary);
  outputs.push_back(dir / "summary.json");
  Manifest{"toy", c.ToJson(), c.seeds.front(), {}, outputs}.Write(dir, "toy.manifest.json");
  std::cout << summary.dump(2) << '\n';
}

void CmdTheory(const std::string& scenario_path, const std::string& out) {
  const json result = EvaluateScenario(ReadJson(scenario_path));
  if (!out.empty()) WriteJson(out, result);
  std::cout << result.dump(2) << '\n';
}

void AddCommon(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Run configuration (JSON)");
  sub->add_option("--seed", f.seed, "Run a single seed");
  sub->add_option("--lambda", f.lambda, "Fairness weight");
  sub->add_option("--variant", f.variant, "gan | nfgan1 | nfgan2 | fairgan");
  sub->add_flag("--fast", f.fast, "Fast profile: 8,000-row subsample, phases 300/300");
  sub->add_option("--out", f.out, "Output directory");
}

}  // namespace
}  // namespace fairgan::cli

int main(int argc, char** argv) {
  using namespace fairgan::cli;
  CLI::App app{"Fairness-aware synthetic tabular data"};
  app.require_subcommand(1);
  Flags f;
  std::string input, reference, synthetic, classifier = "all", scenario, theory_out;
  double epsilon = 0.3;
  std::vector<double> lambdas;
  size_t toy_train = 10000, toy_generate = 20000;
  std::optional<size_t> n_rows;

  auto* pretrain = app.add_subcommand("pretrain", "Pretrain the autoencoder");
  auto* train = app.add_subcommand("train", "Train a generator");
  auto* synth = app.add_subcommand("synthesize", "Generate a synthetic table");
  synth->add_option("--n", n_rows, "Number of rows (default: training size)");
  auto* audit = app.add_subcommand("audit", "Fairness report for a table");
  audit->add_option("--input", input, "Table to audit (default: configured data)");
  audit->add_option("--reference", reference, "Reference table for PMF distances");
  audit->add_option("--epsilon", epsilon, "Epsilon for the BER test");
  auto* classify = app.add_subcommand("classify", "REAL2REAL / SYN2SYN / SYN2REAL evaluation");
  classify->add_option("--synthetic", synthetic, "Synthetic table");
  classify->add_option("--classifier", classifier, "svm_linear | decision_tree | all");
  auto* sweep = app.add_subcommand("sweep-lambda", "Train fairgan over several lambdas");
  sweep->add_option("--lambdas", lambdas, "Comma-separated lambda values")->delimiter(',');
  auto* toy = app.add_subcommand("toy", "1-D toy comparison of nfgan1, nfgan2 and fairgan");
  toy->add_option("--train-rows", toy_train, "Toy training rows");
  toy->add_option("--generate-rows", toy_generate, "Rows generated per model");
  auto* theory = app.add_subcommand("theory", "Evaluate the games on a finite scenario");
  theory->add_option("scenario", scenario, "Scenario JSON")->required();
  theory->add_option("--out", theory_out, "Write the evaluation here");
  for (auto* sub : {pretrain, train, synth, audit, classify, sweep, toy}) AddCommon(sub, f);

  CLI11_PARSE(app, argc, argv);
  std::string command;
  try {
    if (theory->parsed()) {
      command = "theory";
      CmdTheory(scenario, theory_out);
      return 0;
    }
    if (toy->parsed()) {
      // The toy needs no data files; resolve without touching them.
      command = "toy";
      RunConfig c;
      c.seeds = {1, 2, 3};
      if (f.seed) c.seeds = {*f.seed};
      if (f.lambda) c.profile.train.lambda = *f.lambda;
      if (!f.out.empty()) c.out = f.out;
      CmdToy(c, toy_train, toy_generate);
      return 0;
    }
    RunConfig c = Resolve(f);
    if (n_rows) c.n = *n_rows;
    command = app.get_subcommands().front()->get_name();
    if (pretrain->parsed()) CmdPretrain(c);
    if (train->parsed()) CmdTrain(c);
    if (synth->parsed()) CmdSynthesize(c);
    if (audit->parsed()) CmdAudit(c, input, reference, epsilon);
    if (classify->parsed()) CmdClassify(c, synthetic, classifier);
    if (sweep->parsed()) CmdSweep(c, lambdas);
  } catch (const MissingPrerequisite& e) {
    std::cerr << nlohmann::json{{"error", "missing_prerequisite"},
                                {"command", command},
                                {"requires", e.required_command},
                                {"message", e.what()}}
                     .dump()
              << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "failed"}, {"command", command}, {"message", e.what()}}
                     .dump()
              << '\n';
    return 1;
  }
  return 0;
}
