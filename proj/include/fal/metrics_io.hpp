#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fal::harness {

/// One labeling iteration of one split. `disparity` is NaN when the measure
/// is undefined for the model (e.g. no positive predictions on V).
struct MetricsRecord {
  std::size_t split_id = 0;
  std::size_t iteration = 0;
  std::string strategy;
  double alpha = 1.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double disparity = 0.0;
  std::string measure;
  double wall_time_s = 0.0;
  // Not part of the CSV layout; carried in JSON only.
  std::size_t selected_id = 0;
  std::size_t train_size = 0;
};

inline constexpr const char* kMetricsCsvHeader =
    "split_id,iteration,strategy,alpha,accuracy,precision,recall,disparity,measure,wall_time_s";

enum class MetricsFormat { Csv, Json };
MetricsFormat parse_format(const std::string& name);

/// Doubles are written with 17 significant digits so they read back exactly.
std::string format_double(double v);

nlohmann::json record_to_json(const MetricsRecord& r);
MetricsRecord record_from_json(const nlohmann::json& j);

/// CSV: header plus one row per record. JSON: {"config", "seeds", "records"}.
void emit_metrics(const std::vector<MetricsRecord>& records, MetricsFormat format, const std::filesystem::path& path,
                  const nlohmann::json& config = nullptr, const std::vector<std::uint64_t>& seeds = {});

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);
std::vector<MetricsRecord> read_metrics_json(const std::filesystem::path& path);

/// A metrics CSV, or a run directory whose raw_split*.csv files are merged.
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

struct CompareRow {
  std::size_t iteration = 0;
  double accuracy_a = 0.0, accuracy_b = 0.0, accuracy_delta = 0.0;
  double disparity_a = 0.0, disparity_b = 0.0, disparity_delta = 0.0;
};

/// Per-iteration means across splits of `a` and `b` and their differences
/// (a - b), over the iterations both contain.
std::vector<CompareRow> compare(const std::vector<MetricsRecord>& a, const std::vector<MetricsRecord>& b);

}  // namespace fal::harness
