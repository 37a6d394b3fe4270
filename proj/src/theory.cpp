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

#include "fairgan/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fairgan/data.hpp"
#include "fairgan/metrics.hpp"

namespace fairgan {
namespace {

const double kLog4 = std::log(4.0);

double Ratio(double a, double b) { return a + b > 0.0 ? a / (a + b) : 0.5; }

// mass * log(v) with 0 * log(anything) = 0.
double XLogY(double mass, double v) { return mass > 0.0 ? mass * std::log(v) : 0.0; }

void CheckAgreement(double direct, double closed, const char* who) {
  if (std::abs(direct - closed) > 1e-9) {
    throw std::logic_error(std::string(who) + ": direct value " + std::to_string(direct) +
                           " disagrees with closed form " + std::to_string(closed));
  }
}

double NormalCdf(double x, double mean, double stddev) {
  return 0.5 * std::erfc(-(x - mean) / (stddev * std::sqrt(2.0)));
}

std::vector<double> BinMasses(int bins, double mean) {
  const double sd = std::sqrt(kToyVariance);
  const double width = (kToyMax - kToyMin) / bins;
  std::vector<double> m(static_cast<size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    const double lo = k == 0 ? 0.0 : NormalCdf(kToyMin + k * width, mean, sd);
    const double hi = k == bins - 1 ? 1.0 : NormalCdf(kToyMin + (k + 1) * width, mean, sd);
    m[static_cast<size_t>(k)] = hi - lo;
  }
  return m;
}

}  // namespace

std::vector<double> OptimalD1(const FinitePmf& p_data, const FinitePmf& p_g) {
  if (!SameSupport(p_data, p_g)) {
    throw std::invalid_argument("OptimalD1: p_data and p_g have different outcome lists");
  }
  std::vector<double> d(p_data.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = Ratio(p_data.probs()[i], p_g.probs()[i]);
  return d;
}

std::vector<double> OptimalD2(const FinitePmf& g_s1, const FinitePmf& g_s0) {
  if (!SameXYSupport(g_s1, g_s0)) {
    throw std::invalid_argument("OptimalD2: conditionals have different (x, y) supports");
  }
  std::vector<double> d(g_s1.size());
  for (size_t i = 0; i < d.size(); ++i) d[i] = Ratio(g_s1.probs()[i], g_s0.probs()[i]);
  return d;
}

double FairganGameValue(const FinitePmf& p_data, const FinitePmf& p_g, double lambda,
                        std::span<const double> d1, std::span<const double> d2) {
  if (!SameSupport(p_data, p_g)) {
    throw std::invalid_argument("FairganGameValue: p_data and p_g have different outcome lists");
  }
  const FinitePmf g1 = p_g.Conditional(1);
  const FinitePmf g0 = p_g.Conditional(0);
  if (d1.size() != p_data.size() || d2.size() != g1.size()) {
    throw std::invalid_argument("FairganGameValue: discriminator table sizes do not match");
  }
  double v1 = 0.0;
  for (size_t i = 0; i < d1.size(); ++i) {
    v1 += XLogY(p_data.probs()[i], d1[i]) + XLogY(p_g.probs()[i], 1.0 - d1[i]);
  }
  double v2 = 0.0;
  for (size_t k = 0; k < d2.size(); ++k) {
    v2 += XLogY(g1.probs()[k], d2[k]) + XLogY(g0.probs()[k], 1.0 - d2[k]);
  }
  return v1 + lambda * v2;
}

double FairganFloor(double lambda) { return -(1.0 + lambda) * kLog4; }

GameEvaluation FairganValue(const FinitePmf& p_data, const FinitePmf& p_g, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("FairganValue: lambda must be >= 0");
  const FinitePmf g1 = p_g.Conditional(1);
  const FinitePmf g0 = p_g.Conditional(0);
  GameEvaluation e;
  e.lambda = lambda;
  e.d1_table = OptimalD1(p_data, p_g);
  e.d2_table = OptimalD2(g1, g0);
  e.value = FairganGameValue(p_data, p_g, lambda, e.d1_table, e.d2_table);
  e.jsd_data_vs_g = Jsd(p_data.probs(), p_g.probs());
  e.jsd_s1_vs_s0 = Jsd(g1.probs(), g0.probs());
  e.closed_form = FairganFloor(lambda) + 2.0 * e.jsd_data_vs_g + 2.0 * lambda * e.jsd_s1_vs_s0;
  CheckAgreement(e.value, e.closed_form, "FairganValue");
  e.delta = e.value - FairganFloor(lambda);
  return e;
}

nlohmann::json GameEvaluation::ToJson() const {
  return {{"d1_table", d1_table},         {"d2_table", d2_table},
          {"lambda", lambda},             {"value", value},
          {"closed_form", closed_form},   {"jsd_data_vs_g", jsd_data_vs_g},
          {"jsd_s1_vs_s0", jsd_s1_vs_s0}, {"delta", delta}};
}

double Nfgan2Floor() { return -3.0 * kLog4; }

Nfgan2Evaluation Nfgan2Value(const FinitePmf& p_data, const FinitePmf& g_s1,
                             const FinitePmf& g_s0) {
  const FinitePmf p1 = p_data.Conditional(1);
  const FinitePmf p0 = p_data.Conditional(0);
  if (!SameXYSupport(p1, g_s1) || !SameXYSupport(p1, g_s0)) {
    throw std::invalid_argument("Nfgan2Value: generator conditionals differ in (x, y) support");
  }
  const size_t n = p1.size();
  Nfgan2Evaluation e;
  e.d1_table.resize(n);
  e.d2_table = OptimalD2(g_s1, g_s0);
  std::vector<double> a(n), b(n);
  double value = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double real = p1.probs()[k] + p0.probs()[k];
    const double fake = g_s1.probs()[k] + g_s0.probs()[k];
    const double d1 = Ratio(real, fake);
    e.d1_table[k] = d1;
    a[k] = real / 2.0;
    b[k] = fake / 2.0;
    value += XLogY(p1.probs()[k], d1) + XLogY(p0.probs()[k], d1);
    value += XLogY(g_s1.probs()[k], 1.0 - d1) + XLogY(g_s0.probs()[k], 1.0 - d1);
    value += XLogY(g_s1.probs()[k], e.d2_table[k]) + XLogY(g_s0.probs()[k], 1.0 - e.d2_table[k]);
  }
  e.value = value;
  e.jsd_mixtures = Jsd(a, b);
  e.jsd_s1_vs_s0 = Jsd(g_s1.probs(), g_s0.probs());
  e.closed_form = Nfgan2Floor() + 4.0 * e.jsd_mixtures + 2.0 * e.jsd_s1_vs_s0;
  CheckAgreement(e.value, e.closed_form, "Nfgan2Value");
  return e;
}

nlohmann::json Nfgan2Evaluation::ToJson() const {
  return {{"d1_table", d1_table},       {"d2_table", d2_table},
          {"value", value},             {"closed_form", closed_form},
          {"jsd_mixtures", jsd_mixtures}, {"jsd_s1_vs_s0", jsd_s1_vs_s0}};
}

Nfgan2Optimum Nfgan2ValueAndOptimum(const FinitePmf& p_data) {
  if (!(p_data.MassOfS(1) > 0.0) || !(p_data.MassOfS(0) > 0.0)) {
    throw std::invalid_argument("Nfgan2ValueAndOptimum: p_data is missing an s group");
  }
  const FinitePmf p1 = p_data.Conditional(1);
  const FinitePmf p0 = p_data.Conditional(0);
  std::vector<double> avg(p1.size());
  for (size_t k = 0; k < avg.size(); ++k) avg[k] = 0.5 * (p1.probs()[k] + p0.probs()[k]);
  auto outcomes_s1 = p1.outcomes();
  auto outcomes_s0 = p0.outcomes();
  Nfgan2Optimum o{FinitePmf(std::move(outcomes_s1), avg, 1e-9),
                  FinitePmf(std::move(outcomes_s0), avg, 1e-9),
                  {}};
  o.evaluation = Nfgan2Value(p_data, o.given_s1, o.given_s0);
  return o;
}

ToyDiscretization DiscretizeToy(int bins) {
  if (bins < 1) throw std::invalid_argument("DiscretizeToy: bins must be positive");
  ToyDiscretization t;
  t.given_s1 = BinMasses(bins, kToyMeanS1);
  t.given_s0 = BinMasses(bins, kToyMeanS0);
  t.mixture.resize(t.given_s1.size());
  for (size_t k = 0; k < t.mixture.size(); ++k) {
    t.mixture[k] = 0.5 * (t.given_s1[k] + t.given_s0[k]);
  }
  return t;
}

FinitePmf ToyJointPmf(int bins) {
  const ToyDiscretization t = DiscretizeToy(bins);
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (int s : {1, 0}) {
    const auto& masses = s == 1 ? t.given_s1 : t.given_s0;
    for (size_t k = 0; k < masses.size(); ++k) {
      outcomes.push_back({"bin" + std::to_string(k), 0, s});
      probs.push_back(0.5 * masses[k]);
    }
  }
  return FinitePmf(std::move(outcomes), std::move(probs), 1e-9);
}

nlohmann::json EvaluateScenario(const nlohmann::json& scenario) {
  const FinitePmf p_data = FinitePmf::FromJson(scenario.at("outcomes"));
  const double lambda = scenario.value("lambda", 1.0);
  const FinitePmf p_g =
      scenario.contains("generator") ? FinitePmf::FromJson(scenario.at("generator")) : p_data;
  nlohmann::json out;
  out["fairgan"] = FairganValue(p_data, p_g, lambda).ToJson();
  out["fairgan_floor"] = FairganFloor(lambda);
  if (p_data.MassOfS(1) > 0.0 && p_data.MassOfS(0) > 0.0) {
    const Nfgan2Optimum o = Nfgan2ValueAndOptimum(p_data);
    out["nfgan2"] = {{"optimum", o.given_s1.ToJson()},
                     {"evaluation", o.evaluation.ToJson()},
                     {"floor", Nfgan2Floor()}};
  }
  return out;
}

}  // namespace fairgan
