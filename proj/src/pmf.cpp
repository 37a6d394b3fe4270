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

#include "fairgan/pmf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairgan {

FinitePmf::FinitePmf(std::vector<Outcome> outcomes, std::vector<double> probs, double tolerance)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
  if (outcomes_.size() != probs_.size()) {
    throw std::invalid_argument("FinitePmf: outcome and probability counts differ");
  }
  for (size_t i = 0; i < outcomes_.size(); ++i) {
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw std::invalid_argument("FinitePmf: negative or non-finite mass");
    }
    for (size_t j = 0; j < i; ++j) {
      if (outcomes_[i] == outcomes_[j]) throw std::invalid_argument("FinitePmf: duplicate outcome");
    }
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > tolerance) {
    throw std::invalid_argument("FinitePmf: masses sum to " + std::to_string(total));
  }
}

double FinitePmf::MassOfS(int s) const {
  double m = 0.0;
  for (size_t i = 0; i < size(); ++i) {
    if (outcomes_[i].s == s) m += probs_[i];
  }
  return m;
}

std::vector<Outcome> FinitePmf::XYSupport() const {
  std::vector<Outcome> xy;
  for (const auto& o : outcomes_) {
    bool seen = false;
    for (const auto& e : xy) seen = seen || e.SameXY(o);
    if (!seen) xy.push_back({o.x, o.y, 0});
  }
  return xy;
}

FinitePmf FinitePmf::Conditional(int s) const {
  const double ps = MassOfS(s);
  if (!(ps > 0.0)) throw std::invalid_argument("FinitePmf::Conditional: P(s) is zero");
  auto support = XYSupport();
  std::vector<double> p(support.size(), 0.0);
  for (size_t i = 0; i < size(); ++i) {
    if (outcomes_[i].s != s) continue;
    for (size_t k = 0; k < support.size(); ++k) {
      if (support[k].SameXY(outcomes_[i])) p[k] += probs_[i] / ps;
    }
  }
  for (auto& o : support) o.s = s;
  return FinitePmf(std::move(support), std::move(p), 1e-9);
}

nlohmann::json FinitePmf::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t i = 0; i < size(); ++i) {
    arr.push_back({{"x", outcomes_[i].x}, {"y", outcomes_[i].y}, {"s", outcomes_[i].s}, {"p", probs_[i]}});
  }
  return arr;
}

FinitePmf FinitePmf::FromJson(const nlohmann::json& j) {
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (const auto& e : j) {
    outcomes.push_back({e.at("x").get<std::string>(), e.at("y").get<int>(), e.at("s").get<int>()});
    probs.push_back(e.at("p").get<double>());
  }
  return FinitePmf(std::move(outcomes), std::move(probs), 1e-9);
}

bool SameSupport(const FinitePmf& a, const FinitePmf& b) { return a.outcomes() == b.outcomes(); }

bool SameXYSupport(const FinitePmf& a, const FinitePmf& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a.outcomes()[i].SameXY(b.outcomes()[i])) return false;
  }
  return true;
}

FinitePmf JoinConditionals(const FinitePmf& given_s1, const FinitePmf& given_s0, double p_s1) {
  if (!SameXYSupport(given_s1, given_s0)) {
    throw std::invalid_argument("JoinConditionals: conditionals differ in (x, y) support");
  }
  std::vector<Outcome> outcomes;
  std::vector<double> probs;
  for (size_t i = 0; i < given_s1.size(); ++i) {
    const auto& o = given_s1.outcomes()[i];
    outcomes.push_back({o.x, o.y, 1});
    probs.push_back(p_s1 * given_s1.probs()[i]);
  }
  for (size_t i = 0; i < given_s0.size(); ++i) {
    const auto& o = given_s0.outcomes()[i];
    outcomes.push_back({o.x, o.y, 0});
    probs.push_back((1.0 - p_s1) * given_s0.probs()[i]);
  }
  return FinitePmf(std::move(outcomes), std::move(probs), 1e-9);
}

}  // namespace fairgan
