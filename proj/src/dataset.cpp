#include "fal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fal/rng.hpp"

namespace fal {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// RFC 4180 style: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

ColumnKind parse_kind(const std::string& kind) {
  if (kind == "numeric") return ColumnKind::Numeric;
  if (kind == "categorical") return ColumnKind::Categorical;
  throw DatasetError("schema: unknown column kind '" + kind + "'");
}

// Maps a set of at most two raw categories to {0, 1}.
std::map<std::string, int> binary_encoding(const std::set<std::string>& values,
                                           const std::string& column,
                                           const std::optional<std::string>& positive) {
  if (values.size() > 2) {
    std::string msg = "column '" + column + "' has more than two categories:";
    for (const auto& v : values) msg += " '" + v + "'";
    throw DatasetError(msg);
  }
  std::map<std::string, int> code;
  int next = 0;
  for (const auto& v : values) code[v] = next++;
  if (positive) {
    if (!values.contains(*positive))
      throw DatasetError("column '" + column + "': positive label '" + *positive + "' not present");
    for (auto& [v, c] : code) c = (v == *positive) ? 1 : 0;
  }
  return code;
}

}  // namespace

RowMatrix Dataset::feature_matrix() const {
  RowMatrix x(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < points.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = points[i].x.transpose();
  return x;
}

Schema Schema::from_json(const nlohmann::json& j) {
  Schema schema;
  try {
    for (const auto& f : j.at("features")) {
      if (f.is_string()) {
        schema.features.push_back({f.get<std::string>(), ColumnKind::Numeric});
      } else {
        schema.features.push_back({f.at("name").get<std::string>(),
                                   parse_kind(f.value("kind", std::string("numeric")))});
      }
    }
    schema.sensitive = j.at("sensitive").get<std::string>();
    schema.label = j.at("label").get<std::string>();
    if (j.contains("sensitive_values"))
      schema.sensitive_values = j.at("sensitive_values").get<std::vector<std::string>>();
    if (j.contains("positive_label")) schema.positive_label = j.at("positive_label").get<std::string>();
    if (j.contains("na_values")) schema.na_values = j.at("na_values").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("schema: ") + e.what());
  }
  if (!schema.sensitive_values.empty() && schema.sensitive_values.size() != 2)
    throw DatasetError("schema: sensitive_values must list exactly two categories");
  for (const auto& f : schema.features) {
    if (f.name == schema.sensitive) throw DatasetError("schema: sensitive column listed as a feature");
    if (f.name == schema.label) throw DatasetError("schema: label column listed as a feature");
  }
  return schema;
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open schema file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("schema " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json Schema::to_json() const {
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : features)
    feats.push_back({{"name", f.name}, {"kind", f.kind == ColumnKind::Numeric ? "numeric" : "categorical"}});
  nlohmann::json j{{"features", feats}, {"sensitive", sensitive}, {"label", label}};
  if (!sensitive_values.empty()) j["sensitive_values"] = sensitive_values;
  if (positive_label) j["positive_label"] = *positive_label;
  if (!na_values.empty()) j["na_values"] = na_values;
  return j;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open data file " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DatasetError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) column_of.emplace(header[i], i);
  auto find_column = [&](const std::string& name) {
    auto it = column_of.find(name);
    if (it == column_of.end()) throw DatasetError(path.string() + ": unknown column '" + name + "'");
    return it->second;
  };
  const std::size_t s_col = find_column(schema.sensitive);
  const std::size_t y_col = find_column(schema.label);
  std::vector<std::size_t> f_cols;
  for (const auto& f : schema.features) f_cols.push_back(find_column(f.name));

  const std::set<std::string> na(schema.na_values.begin(), schema.na_values.end());
  const std::set<std::string> keep_s(schema.sensitive_values.begin(), schema.sensitive_values.end());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> source_rows;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    const std::size_t this_row = data_row++;
    if (fields.size() != header.size())
      throw DatasetError(path.string() + ": row " + std::to_string(this_row + 1) + " has " +
                         std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(header.size()));
    bool missing = na.contains(fields[s_col]) || na.contains(fields[y_col]);
    for (auto c : f_cols) missing = missing || na.contains(fields[c]);
    if (missing) continue;
    if (!keep_s.empty() && !keep_s.contains(fields[s_col])) continue;
    rows.push_back(std::move(fields));
    source_rows.push_back(this_row);
  }

  std::set<std::string> s_values, y_values;
  for (const auto& r : rows) {
    s_values.insert(r[s_col]);
    y_values.insert(r[y_col]);
  }
  const auto s_code = binary_encoding(s_values, schema.sensitive, std::nullopt);
  const auto y_code = binary_encoding(y_values, schema.label, schema.positive_label);

  // Feature layout: numeric columns map to one feature, categorical columns to
  // one indicator per non-reference category.
  struct Layout {
    std::size_t column;
    ColumnKind kind;
    std::vector<std::string> levels;  // categorical, reference dropped
  };
  Dataset ds;
  std::vector<Layout> layout;
  for (std::size_t f = 0; f < schema.features.size(); ++f) {
    Layout l{f_cols[f], schema.features[f].kind, {}};
    if (l.kind == ColumnKind::Categorical) {
      std::set<std::string> levels;
      for (const auto& r : rows) levels.insert(r[l.column]);
      auto it = levels.begin();
      if (it != levels.end()) ++it;
      for (; it != levels.end(); ++it) {
        l.levels.push_back(*it);
        ds.feature_names.push_back(schema.features[f].name + "=" + *it);
      }
    } else {
      ds.feature_names.push_back(schema.features[f].name);
    }
    layout.push_back(std::move(l));
  }

  const auto d = static_cast<Eigen::Index>(ds.feature_names.size());
  ds.points.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    DataPoint p;
    p.id = i;
    p.row = source_rows[i];
    p.s = s_code.at(r[s_col]);
    p.y = y_code.at(r[y_col]);
    p.x = Eigen::VectorXd::Zero(d);
    Eigen::Index k = 0;
    for (const auto& l : layout) {
      if (l.kind == ColumnKind::Numeric) {
        double v;
        if (!parse_double(r[l.column], v))
          throw DatasetError(path.string() + ": row " + std::to_string(p.row + 1) + ", column '" +
                             header[l.column] + "': non-numeric value '" + r[l.column] + "'");
        p.x[k++] = v;
      } else {
        for (const auto& level : l.levels) p.x[k++] = (r[l.column] == level) ? 1.0 : 0.0;
      }
    }
    ds.points.push_back(std::move(p));
  }
  return ds;
}

Standardizer Standardizer::fit(const Dataset& ds) {
  Standardizer st;
  const std::size_t n = ds.size();
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    double mean = 0.0;
    for (const auto& p : ds.points) mean += p.x[static_cast<Eigen::Index>(j)];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& p : ds.points) {
      const double dev = p.x[static_cast<Eigen::Index>(j)] - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (n == 0 || !(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      st.dropped.push_back(ds.feature_names[j]);
      continue;
    }
    st.kept.push_back(j);
    st.stats.push_back({mean, sd});
  }
  return st;
}

Dataset Standardizer::apply(const Dataset& ds) const {
  Dataset out;
  out.num_labels = ds.num_labels;
  out.standardization = stats;
  for (auto j : kept) {
    if (j >= ds.dim()) throw DatasetError("standardizer: dataset has fewer columns than fitted");
    out.feature_names.push_back(ds.feature_names[j]);
  }
  out.points.reserve(ds.size());
  for (const auto& p : ds.points) {
    DataPoint q = p;
    q.x.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k)
      q.x[static_cast<Eigen::Index>(k)] =
          (p.x[static_cast<Eigen::Index>(kept[k])] - stats[k].mean) / stats[k].stddev;
    out.points.push_back(std::move(q));
  }
  return out;
}

Dataset standardize(const Dataset& ds) {
  const auto st = Standardizer::fit(ds);
  for (const auto& name : st.dropped)
    std::cerr << "warning: dropping constant feature '" << name << "'\n";
  return st.apply(ds);
}

namespace {
Dataset take(const Dataset& ds, std::span<const std::size_t> order) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.num_labels = ds.num_labels;
  out.standardization = ds.standardization;
  out.points.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    DataPoint p = ds.points[order[i]];
    p.id = i;
    out.points.push_back(std::move(p));
  }
  return out;
}
}  // namespace

TrainTestSplit split(const Dataset& ds, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw DatasetError("split: train_frac must be in (0, 1)");
  const std::size_t n = ds.size();
  // The small slack keeps e.g. 5875 * 0.6 from rounding up to 3526.
  const auto n_train = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_frac - 1e-9));
  if (n_train == 0 || n_train >= n)
    throw DatasetError("split: degenerate sizes (" + std::to_string(n_train) + ", " +
                       std::to_string(n - std::min(n, n_train)) + ")");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0x5150);
  shuffle(order, rng);
  std::span<const std::size_t> all(order);
  return {take(ds, all.first(n_train)), take(ds, all.subspan(n_train))};
}

Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n >= ds.size()) return take(ds, order);
  Rng rng = make_rng(seed, 0x5ab5);
  shuffle(order, rng);
  order.resize(n);
  std::sort(order.begin(), order.end());
  return take(ds, order);
}

Dataset make_dataset(std::vector<std::string> feature_names, const RowMatrix& x,
                     std::span<const int> s, std::span<const int> y) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (s.size() != n || y.size() != n) throw DatasetError("make_dataset: length mismatch");
  if (feature_names.size() != static_cast<std::size_t>(x.cols()))
    throw DatasetError("make_dataset: feature name count does not match columns");
  Dataset ds;
  ds.feature_names = std::move(feature_names);
  ds.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] != 0 && s[i] != 1) throw DatasetError("make_dataset: sensitive attribute must be 0 or 1");
    if (y[i] < 0 || y[i] >= ds.num_labels) throw DatasetError("make_dataset: label out of range");
    ds.points.push_back({i, i, x.row(static_cast<Eigen::Index>(i)).transpose(), s[i], y[i]});
  }
  return ds;
}

}  // namespace fal
