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

#include "fairgan/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fairgan {
namespace {

bool IsMissing(const std::string& field) { return field.empty() || field == "?"; }

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> ParseNumber(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string FormatNumber(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

int Attribute::ValueIndex(const std::string& value) const {
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return static_cast<int>(i);
  }
  return -1;
}

int Schema::AttributeIndex(const std::string& name) const {
  for (size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void Schema::Validate() const {
  std::set<std::string> names;
  for (const auto& a : attributes) {
    if (a.name.empty()) throw DataError("schema: attribute with empty name");
    if (!names.insert(a.name).second) throw DataError("schema: duplicate attribute '" + a.name + "'");
    if (a.kind == AttributeKind::kCategorical) {
      if (a.values.empty()) throw DataError("schema: attribute '" + a.name + "' has no values");
      std::set<std::string> seen(a.values.begin(), a.values.end());
      if (seen.size() != a.values.size()) {
        throw DataError("schema: attribute '" + a.name + "' has duplicate values");
      }
    } else if (!(a.min < a.max)) {
      throw DataError("schema: attribute '" + a.name + "' needs min < max");
    }
  }
  auto check_binary = [&](const std::string& role, const std::string& name,
                          const std::string& value) {
    const int idx = AttributeIndex(name);
    if (idx < 0) throw DataError("schema: " + role + " attribute '" + name + "' not declared");
    const auto& a = attributes[static_cast<size_t>(idx)];
    if (a.kind != AttributeKind::kCategorical || a.values.size() != 2) {
      throw DataError("schema: " + role + " attribute '" + name + "' must be binary categorical");
    }
    if (a.ValueIndex(value) < 0) {
      throw DataError("schema: " + role + " value '" + value + "' not in domain of '" + name + "'");
    }
  };
  check_binary("decision", decision_name, decision_positive);
  check_binary("protected", protected_name, protected_value);
  if (decision_name == protected_name) {
    throw DataError("schema: decision and protected attribute must differ");
  }
}

Schema Schema::FromJson(const nlohmann::json& j) {
  Schema schema;
  try {
    for (const auto& aj : j.at("attributes")) {
      Attribute a;
      a.name = aj.at("name").get<std::string>();
      const auto kind = aj.at("kind").get<std::string>();
      if (kind == "categorical") {
        a.kind = AttributeKind::kCategorical;
        a.values = aj.at("values").get<std::vector<std::string>>();
      } else if (kind == "numeric") {
        a.kind = AttributeKind::kNumeric;
        const auto range = aj.at("range").get<std::vector<double>>();
        if (range.size() != 2) throw DataError("schema: range of '" + a.name + "' needs 2 entries");
        a.min = range[0];
        a.max = range[1];
      } else {
        throw DataError("schema: unknown kind '" + kind + "' for '" + a.name + "'");
      }
      schema.attributes.push_back(std::move(a));
    }
    schema.decision_name = j.at("decision").at("name").get<std::string>();
    schema.decision_positive = j.at("decision").at("positive").get<std::string>();
    schema.protected_name = j.at("protected").at("name").get<std::string>();
    schema.protected_value = j.at("protected").at("protected_value").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  schema.Validate();
  return schema;
}

Schema Schema::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file '" + path + "': " + e.what());
  }
  return FromJson(j);
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : attributes) {
    if (a.kind == AttributeKind::kCategorical) {
      attrs.push_back({{"name", a.name}, {"kind", "categorical"}, {"values", a.values}});
    } else {
      attrs.push_back({{"name", a.name}, {"kind", "numeric"}, {"range", {a.min, a.max}}});
    }
  }
  return {{"attributes", attrs},
          {"decision", {{"name", decision_name}, {"positive", decision_positive}}},
          {"protected", {{"name", protected_name}, {"protected_value", protected_value}}}};
}

RawTable RawTable::DropIncomplete() const {
  RawTable out{schema, {}};
  for (const auto& r : rows) {
    if (std::all_of(r.begin(), r.end(), [](const Cell& c) { return c.has_value(); })) {
      out.rows.push_back(r);
    }
  }
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  char c;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_row();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

RawTable ParseTable(std::istream& in, std::shared_ptr<const Schema> schema) {
  if (!schema) throw DataError("ParseTable: null schema");
  const auto cells = ParseCsv(in);
  if (cells.empty()) throw DataError("csv: missing header");
  const auto& header = cells.front();
  std::vector<size_t> column_of(schema->attributes.size());
  for (size_t a = 0; a < schema->attributes.size(); ++a) {
    const auto& name = schema->attributes[a].name;
    auto it = std::find_if(header.begin(), header.end(),
                           [&](const std::string& h) { return Trim(h) == name; });
    if (it == header.end()) throw DataError("csv: missing column '" + name + "'");
    column_of[a] = static_cast<size_t>(it - header.begin());
  }

  RawTable table{schema, {}};
  table.rows.reserve(cells.size() - 1);
  for (size_t r = 1; r < cells.size(); ++r) {
    const auto& line = cells[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (line.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(line.size()));
    }
    Record rec(schema->attributes.size());
    for (size_t a = 0; a < schema->attributes.size(); ++a) {
      const auto& attr = schema->attributes[a];
      const std::string value = Trim(line[column_of[a]]);
      if (IsMissing(value)) continue;
      if (attr.kind == AttributeKind::kCategorical) {
        const int idx = attr.ValueIndex(value);
        if (idx < 0) {
          throw DataError(where + ", attribute '" + attr.name + "': value '" + value +
                          "' not in domain");
        }
        rec[a] = idx;
      } else {
        const auto v = ParseNumber(value);
        if (!v) {
          throw DataError(where + ", attribute '" + attr.name + "': cannot parse '" + value +
                          "' as a number");
        }
        if (*v < attr.min || *v > attr.max) {
          throw DataError(where + ", attribute '" + attr.name + "': " + value +
                          " outside declared range");
        }
        rec[a] = *v;
      }
    }
    table.rows.push_back(std::move(rec));
  }
  return table;
}

RawTable LoadTable(const std::string& path, std::shared_ptr<const Schema> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return ParseTable(in, std::move(schema));
}

void WriteTable(std::ostream& out, const RawTable& table) {
  const auto& attrs = table.schema->attributes;
  for (size_t a = 0; a < attrs.size(); ++a) out << (a ? "," : "") << CsvEscape(attrs[a].name);
  out << "\n";
  for (const auto& rec : table.rows) {
    for (size_t a = 0; a < attrs.size(); ++a) {
      if (a) out << ",";
      if (!rec[a]) {
        out << "?";
      } else if (attrs[a].kind == AttributeKind::kCategorical) {
        out << CsvEscape(attrs[a].values[static_cast<size_t>(*rec[a])]);
      } else {
        out << FormatNumber(*rec[a]);
      }
    }
    out << "\n";
  }
}

Eigen::Index FeatureMap::width() const {
  return spans.empty() ? 0 : spans.back().offset + spans.back().width;
}

Eigen::Index FeatureMap::FullWidth() const {
  const auto& attrs = schema->attributes;
  return width() +
         static_cast<Eigen::Index>(attrs[static_cast<size_t>(schema->decision_index())].values.size() +
                                   attrs[static_cast<size_t>(schema->protected_index())].values.size());
}

FeatureMap FeatureMap::For(std::shared_ptr<const Schema> schema) {
  FeatureMap map;
  map.schema = schema;
  const int dec = schema->decision_index();
  const int prot = schema->protected_index();
  Eigen::Index offset = 0;
  for (size_t a = 0; a < schema->attributes.size(); ++a) {
    if (static_cast<int>(a) == dec || static_cast<int>(a) == prot) continue;
    const auto& attr = schema->attributes[a];
    FeatureSpan span;
    span.attribute = static_cast<int>(a);
    span.name = attr.name;
    span.kind = attr.kind;
    span.offset = offset;
    span.width = attr.kind == AttributeKind::kCategorical
                     ? static_cast<Eigen::Index>(attr.values.size())
                     : 1;
    span.min = attr.min;
    span.max = attr.max;
    offset += span.width;
    map.spans.push_back(std::move(span));
  }
  return map;
}

EncodedDataset EncodedDataset::Subset(std::span<const size_t> rows) const {
  EncodedDataset out;
  out.features = features;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.reserve(rows.size());
  out.s.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
    out.s.push_back(s[rows[i]]);
  }
  return out;
}

Matrix EncodedDataset::XY() const {
  Matrix m(x.rows(), x.cols() + 1);
  m.leftCols(x.cols()) = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) m(i, x.cols()) = y[static_cast<size_t>(i)];
  return m;
}

EncodedDataset Encode(const RawTable& raw) {
  const auto& schema = *raw.schema;
  EncodedDataset ds;
  ds.features = FeatureMap::For(raw.schema);
  const auto d = ds.features.width();
  const auto n = static_cast<Eigen::Index>(raw.size());
  ds.x = Matrix::Zero(n, d);
  ds.y.resize(raw.size());
  ds.s.resize(raw.size());
  const auto dec = static_cast<size_t>(schema.decision_index());
  const auto prot = static_cast<size_t>(schema.protected_index());
  const int positive = schema.attributes[dec].ValueIndex(schema.decision_positive);
  const int protected_idx = schema.attributes[prot].ValueIndex(schema.protected_value);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = raw.rows[static_cast<size_t>(i)];
    for (const auto& c : rec) {
      if (!c) throw DataError("Encode: row " + std::to_string(i) + " has missing values");
    }
    for (const auto& span : ds.features.spans) {
      const double v = *rec[static_cast<size_t>(span.attribute)];
      if (span.kind == AttributeKind::kCategorical) {
        ds.x(i, span.offset + static_cast<Eigen::Index>(v)) = 1.0;
      } else {
        ds.x(i, span.offset) = (v - span.min) / (span.max - span.min);
      }
    }
    ds.y[static_cast<size_t>(i)] = static_cast<int>(*rec[dec]) == positive ? 1 : 0;
    ds.s[static_cast<size_t>(i)] = static_cast<int>(*rec[prot]) == protected_idx ? 1 : 0;
  }
  return ds;
}

Record Decode(std::span<const double> row, const FeatureMap& features) {
  if (static_cast<Eigen::Index>(row.size()) != features.width()) {
    throw ShapeError("Decode: row width " + std::to_string(row.size()) + " != " +
                     std::to_string(features.width()));
  }
  Record rec;
  rec.reserve(features.spans.size());
  for (const auto& span : features.spans) {
    const auto off = static_cast<size_t>(span.offset);
    if (span.kind == AttributeKind::kCategorical) {
      size_t best = 0;
      for (size_t k = 1; k < static_cast<size_t>(span.width); ++k) {
        if (row[off + k] > row[off + best]) best = k;
      }
      rec.emplace_back(static_cast<double>(best));
    } else {
      const double v = span.min + row[off] * (span.max - span.min);
      rec.emplace_back(std::clamp(v, span.min, span.max));
    }
  }
  return rec;
}

RawTable DecodeDataset(const EncodedDataset& ds) {
  const auto& schema = *ds.features.schema;
  RawTable table{ds.features.schema, {}};
  const auto dec = static_cast<size_t>(schema.decision_index());
  const auto prot = static_cast<size_t>(schema.protected_index());
  const int positive = schema.attributes[dec].ValueIndex(schema.decision_positive);
  const int protected_idx = schema.attributes[prot].ValueIndex(schema.protected_value);
  table.rows.reserve(ds.size());
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    const RowVector row = ds.x.row(i);
    const Record xs = Decode(std::span<const double>(row.data(), static_cast<size_t>(row.size())),
                             ds.features);
    Record rec(schema.attributes.size());
    for (size_t k = 0; k < ds.features.spans.size(); ++k) {
      rec[static_cast<size_t>(ds.features.spans[k].attribute)] = xs[k];
    }
    rec[dec] = ds.y[static_cast<size_t>(i)] ? positive : 1 - positive;
    rec[prot] = ds.s[static_cast<size_t>(i)] ? protected_idx : 1 - protected_idx;
    table.rows.push_back(std::move(rec));
  }
  return table;
}

void Discretize(Matrix& x, const FeatureMap& features) {
  if (x.cols() != features.width()) throw ShapeError("Discretize: width mismatch");
  for (const auto& span : features.spans) {
    if (span.kind == AttributeKind::kNumeric) {
      x.col(span.offset) = x.col(span.offset).cwiseMax(0.0).cwiseMin(1.0);
      continue;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      auto block = x.block(i, span.offset, 1, span.width);
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < span.width; ++k) {
        if (block(0, k) > block(0, best)) best = k;
      }
      block.setZero();
      block(0, best) = 1.0;
    }
  }
}

std::vector<size_t> SplitPermutation(size_t n, Rng& rng) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  return perm;
}

SplitResult Split(const EncodedDataset& ds, double ratio, Rng& rng) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("Split: ratio must lie in (0, 1)");
  const size_t n = ds.size();
  if (n < 2) throw DataError("Split: need at least 2 rows");
  const auto perm = SplitPermutation(n, rng);
  const auto n_train = static_cast<size_t>(std::floor(static_cast<double>(n) * ratio));
  std::span<const size_t> all(perm);
  return {ds.Subset(all.first(n_train)), ds.Subset(all.subspan(n_train))};
}

EncodedDataset StratifiedSubsample(const EncodedDataset& ds, size_t n, Rng& rng) {
  const size_t total = ds.size();
  if (n >= total) return ds;
  std::map<std::pair<int, int>, std::vector<size_t>> cells;
  for (size_t i = 0; i < total; ++i) cells[{ds.s[i], ds.y[i]}].push_back(i);
  // Largest-remainder allocation of n across cells.
  std::vector<std::pair<double, std::pair<int, int>>> remainders;
  std::map<std::pair<int, int>, size_t> take;
  size_t assigned = 0;
  for (const auto& [key, idx] : cells) {
    const double exact = static_cast<double>(n) * static_cast<double>(idx.size()) /
                         static_cast<double>(total);
    take[key] = static_cast<size_t>(std::floor(exact));
    assigned += take[key];
    remainders.push_back({exact - std::floor(exact), key});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; assigned < n; ++k, ++assigned) take[remainders[k].second] += 1;

  std::vector<size_t> chosen;
  chosen.reserve(n);
  for (auto& [key, idx] : cells) {
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<long>(take[key]));
  }
  std::sort(chosen.begin(), chosen.end());
  return ds.Subset(chosen);
}

std::shared_ptr<const Schema> ToySchema() {
  static const auto schema = [] {
    auto s = std::make_shared<Schema>();
    Attribute x;
    x.name = "x";
    x.kind = AttributeKind::kNumeric;
    x.min = kToyMin;
    x.max = kToyMax;
    Attribute y;
    y.name = "y";
    y.values = {"0", "1"};
    Attribute sa;
    sa.name = "s";
    sa.values = {"0", "1"};
    s->attributes = {x, y, sa};
    s->decision_name = "y";
    s->decision_positive = "1";
    s->protected_name = "s";
    s->protected_value = "1";
    s->Validate();
    return std::shared_ptr<const Schema>(s);
  }();
  return schema;
}

EncodedDataset SampleToy(size_t n, Rng& rng) {
  if (n == 0) throw DataError("SampleToy: n must be at least 1");
  EncodedDataset ds;
  ds.features = FeatureMap::For(ToySchema());
  ds.x.resize(static_cast<Eigen::Index>(n), 1);
  ds.y.assign(n, 0);
  ds.s.resize(n);
  const double sigma = std::sqrt(kToyVariance);
  for (size_t i = 0; i < n; ++i) {
    const int s = rng.Bernoulli(0.5);
    const double v = rng.Normal(s ? kToyMeanS1 : kToyMeanS0, sigma);
    ds.s[i] = s;
    ds.x(static_cast<Eigen::Index>(i), 0) =
        std::clamp((v - kToyMin) / (kToyMax - kToyMin), 0.0, 1.0);
  }
  return ds;
}

std::vector<std::string> EncodedColumnNames(const FeatureMap& features) {
  std::vector<std::string> names;
  for (const auto& span : features.spans) {
    if (span.kind == AttributeKind::kNumeric) {
      names.push_back(span.name);
    } else {
      const auto& values = features.schema->attributes[static_cast<size_t>(span.attribute)].values;
      for (const auto& v : values) names.push_back(span.name + "=" + v);
    }
  }
  return names;
}

void WriteEncodedCsv(std::ostream& out, const EncodedDataset& ds) {
  const auto names = EncodedColumnNames(ds.features);
  for (const auto& n : names) out << CsvEscape(n) << ",";
  out << "y,s\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << ds.x(i, j) << ",";
    out << ds.y[static_cast<size_t>(i)] << "," << ds.s[static_cast<size_t>(i)] << "\n";
  }
}

}  // namespace fairgan
