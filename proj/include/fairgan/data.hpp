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

// Schema-driven tabular data: CSV ingestion, one-hot / min-max encoding,
// decoding of generated rows, splitting and the 1-D Gaussian toy sampler.
//
// Encoded layout
//   X holds every attribute except the decision and the protected attribute,
//   in schema order. A categorical attribute contributes one column per value
//   (value-list order); a numeric attribute contributes one column scaled to
//   [0, 1] with the schema's [min, max]. The decision is re-attached as y and
//   the protected attribute as s, both in {0, 1}; s = 1 marks rows whose
//   protected attribute equals `protected_value`.

#ifndef FAIRGAN_DATA_HPP_
#define FAIRGAN_DATA_HPP_

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairgan/nn.hpp"
#include "json.hpp"

namespace fairgan {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttributeKind { kCategorical, kNumeric };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  std::vector<std::string> values;  // categorical only
  double min = 0.0;                  // numeric only
  double max = 1.0;

  int ValueIndex(const std::string& value) const;  // -1 if absent
};

struct Schema {
  std::vector<Attribute> attributes;
  std::string decision_name;
  std::string decision_positive;
  std::string protected_name;
  std::string protected_value;

  int AttributeIndex(const std::string& name) const;  // -1 if absent
  int decision_index() const { return AttributeIndex(decision_name); }
  int protected_index() const { return AttributeIndex(protected_name); }

  // Checks the invariants (unique names, binary decision/protected, non-empty
  // duplicate-free value lists, min < max). Throws DataError.
  void Validate() const;

  static Schema FromJson(const nlohmann::json& j);
  static Schema Load(const std::string& path);
  nlohmann::json ToJson() const;
};

// One cell: categorical cells hold the value index, numeric cells the raw
// number. Missing values ("?" or empty in CSV) are nullopt.
using Cell = std::optional<double>;
using Record = std::vector<Cell>;

struct RawTable {
  std::shared_ptr<const Schema> schema;
  std::vector<Record> rows;

  size_t size() const { return rows.size(); }
  // Rows without any missing cell, order preserved.
  RawTable DropIncomplete() const;
};

// RFC-4180 parsing of a whole document: quoted fields, doubled quotes,
// embedded separators and line breaks.
std::vector<std::vector<std::string>> ParseCsv(std::istream& in);
std::string CsvEscape(const std::string& field);

// Reads a CSV whose header contains every schema attribute (extra columns are
// ignored). Throws DataError naming the row (1-based, header = row 1) and the
// attribute on any domain violation.
RawTable LoadTable(const std::string& path, std::shared_ptr<const Schema> schema);
RawTable ParseTable(std::istream& in, std::shared_ptr<const Schema> schema);
void WriteTable(std::ostream& out, const RawTable& table);

struct FeatureSpan {
  int attribute = -1;  // index into the schema
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  Eigen::Index offset = 0;
  Eigen::Index width = 0;
  double min = 0.0;
  double max = 1.0;
};

struct FeatureMap {
  std::shared_ptr<const Schema> schema;
  std::vector<FeatureSpan> spans;

  Eigen::Index width() const;
  static FeatureMap For(std::shared_ptr<const Schema> schema);
  // Width of an encoding that also one-hot encodes decision and protected.
  Eigen::Index FullWidth() const;
};

struct EncodedDataset {
  Matrix x;
  std::vector<int> y;
  std::vector<int> s;
  FeatureMap features;

  size_t size() const { return y.size(); }
  Eigen::Index dim() const { return x.cols(); }
  EncodedDataset Subset(std::span<const size_t> rows) const;
  // Columns [X | y] as the generator's target space.
  Matrix XY() const;
};

EncodedDataset Encode(const RawTable& raw);

// Decodes one encoded row over the X attributes (schema order, decision and
// protected skipped). Categorical groups use argmax with ties to the lowest
// column; numerics are un-scaled and clipped to [min, max].
Record Decode(std::span<const double> row, const FeatureMap& features);

// Inverse of Encode for a whole dataset, re-attaching decision and protected.
RawTable DecodeDataset(const EncodedDataset& ds);

// Snaps every categorical group to an exact one-hot and clips numerics to
// [0, 1].
void Discretize(Matrix& x, const FeatureMap& features);

struct SplitResult {
  EncodedDataset train;
  EncodedDataset test;
};

// Random partition; the train side gets floor(n * ratio) rows.
SplitResult Split(const EncodedDataset& ds, double ratio, Rng& rng);
std::vector<size_t> SplitPermutation(size_t n, Rng& rng);

// Sample of `n` rows drawn without replacement, stratified on the (s, y)
// cells so group rates match the source up to rounding.
EncodedDataset StratifiedSubsample(const EncodedDataset& ds, size_t n, Rng& rng);

// 1-D toy problem: s ~ Bernoulli(0.5); x | s=1 ~ N(1, 0.5), x | s=0 ~ N(3, 0.5)
// where 0.5 is the variance. x is min-max scaled over [kToyMin, kToyMax] and
// clipped to [0, 1]. y is all zero.
inline constexpr double kToyMin = -1.0;
inline constexpr double kToyMax = 5.0;
inline constexpr double kToyVariance = 0.5;
inline constexpr double kToyMeanS1 = 1.0;
inline constexpr double kToyMeanS0 = 3.0;
EncodedDataset SampleToy(size_t n, Rng& rng);
std::shared_ptr<const Schema> ToySchema();
inline double ToyUnscale(double v) { return kToyMin + v * (kToyMax - kToyMin); }

// Encoded export: one column per encoded dimension, then y and s.
void WriteEncodedCsv(std::ostream& out, const EncodedDataset& ds);
std::vector<std::string> EncodedColumnNames(const FeatureMap& features);

}  // namespace fairgan

#endif  // FAIRGAN_DATA_HPP_
