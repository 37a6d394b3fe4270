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

#ifndef FAIRGAN_PMF_HPP_
#define FAIRGAN_PMF_HPP_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace fairgan {

struct Outcome {
  std::string x;
  int y = 0;
  int s = 0;

  bool operator==(const Outcome&) const = default;
  bool SameXY(const Outcome& o) const { return x == o.x && y == o.y; }
};

// Explicit probability mass function over a finite list of (x, y, s)
// outcomes. PMFs over (x, y) only reuse the type with s fixed to the group
// they were conditioned on.
class FinitePmf {
 public:
  FinitePmf() = default;
  // Throws std::invalid_argument on negative mass, duplicate outcomes or a
  // total that deviates from 1 by more than `tolerance`.
  FinitePmf(std::vector<Outcome> outcomes, std::vector<double> probs, double tolerance = 1e-12);

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<double>& probs() const { return probs_; }
  size_t size() const { return probs_.size(); }

  double MassOfS(int s) const;
  // P(x, y | s) over the distinct (x, y) pairs of this PMF, in first-seen
  // order; pairs never seen with `s` get 0. Throws if P(s) = 0.
  FinitePmf Conditional(int s) const;
  // Distinct (x, y) pairs in first-seen order.
  std::vector<Outcome> XYSupport() const;

  nlohmann::json ToJson() const;
  static FinitePmf FromJson(const nlohmann::json& j);

 private:
  std::vector<Outcome> outcomes_;
  std::vector<double> probs_;
};

// Same outcomes in the same order.
bool SameSupport(const FinitePmf& a, const FinitePmf& b);
// Same (x, y) pairs in the same order, s ignored.
bool SameXYSupport(const FinitePmf& a, const FinitePmf& b);

// Builds P(x, y, s) = P(s) * P(x, y | s) from two conditionals over the same
// (x, y) support.
FinitePmf JoinConditionals(const FinitePmf& given_s1, const FinitePmf& given_s0, double p_s1);

}  // namespace fairgan

#endif  // FAIRGAN_PMF_HPP_
