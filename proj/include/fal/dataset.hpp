#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fal {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One record. `x` never contains the sensitive attribute.
struct DataPoint {
  std::size_t id = 0;   // dense 0..n-1 within its Dataset
  std::size_t row = 0;  // data row in the source file; survives splits
  Eigen::VectorXd x;
  int s = 0;
  int y = 0;
};

struct FeatureStats {
  double mean = 0.0;
  double stddev = 1.0;
};

struct Dataset {
  std::vector<DataPoint> points;
  std::vector<std::string> feature_names;
  int num_labels = 2;
  /// Per-feature statistics used to standardize; empty for raw data.
  std::vector<FeatureStats> standardization;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return feature_names.size(); }

  /// Features of every point as an n x d matrix, in point order.
  RowMatrix feature_matrix() const;
};

enum class ColumnKind { Numeric, Categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
};

/// Column roles for load_csv.
///
/// JSON form:
///   {"features": [{"name": "age", "kind": "numeric"},
///                 {"name": "c_charge_degree", "kind": "categorical"}],
///    "sensitive": "race",
///    "label": "two_year_recid",
///    "sensitive_values": ["African-American", "Caucasian"],   (optional row filter)
///    "positive_label": "1",                                   (optional)
///    "na_values": ["?"]}                                      (optional; rows dropped)
///
/// Binary encodings map the lexicographically smaller category to 0 unless
/// `positive_label` names the label category that maps to 1.
struct Schema {
  std::vector<ColumnSpec> features;
  std::string sensitive;
  std::string label;
  std::vector<std::string> sensitive_values;
  std::optional<std::string> positive_label;
  std::vector<std::string> na_values;

  static Schema from_json(const nlohmann::json& j);
  static Schema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);

/// Column statistics fitted on one dataset and applied unchanged to others.
/// Constant columns are recorded in `dropped` and removed on apply.
struct Standardizer {
  std::vector<std::size_t> kept;  // source column indices
  std::vector<FeatureStats> stats;
  std::vector<std::string> dropped;

  static Standardizer fit(const Dataset& ds);
  Dataset apply(const Dataset& ds) const;
};

/// Zero mean, unit population variance per column. Constant columns are
/// dropped with a warning on stderr.
Dataset standardize(const Dataset& ds);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Shuffled split; train gets ceil(n * train_frac) points. Ids are renumbered
/// densely on each side, `row` is kept.
TrainTestSplit split(const Dataset& ds, double train_frac, std::uint64_t seed);

/// Random subset of `n` points (all points when n >= size), renumbered.
Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed);

/// Dataset from explicit rows; ids are assigned 0..n-1.
Dataset make_dataset(std::vector<std::string> feature_names, const RowMatrix& x,
                     std::span<const int> s, std::span<const int> y);

}  // namespace fal
