#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "fal/config.hpp"
#include "fal/dataset.hpp"
#include "fal/metrics_io.hpp"
#include "fal/strategies.hpp"

namespace fal::harness {

struct SplitResult {
  std::size_t split_id = 0;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> records;
  std::vector<std::size_t> selected_ids;  // in selection order, train-split ids
  std::vector<std::vector<strategies::SelectionScore>> score_tables;  // only with dump_scores
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single split
};

struct IterationSummary {
  std::size_t iteration = 0;
  std::size_t train_size = 0;
  std::size_t n_defined = 0;  // splits whose disparity was defined
  MetricSummary alpha, accuracy, precision, recall, disparity, wall_time_s;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<SplitResult> splits;
  std::vector<IterationSummary> summary;

  std::vector<MetricsRecord> all_records() const;
  nlohmann::json summary_json() const;
};

/// Materializes the configured rows (CSV or generator).
Dataset load_source(const DataSource& src);

SplitResult run_split(const ExperimentConfig& config, std::uint64_t split_seed, std::size_t split_id = 0);
SplitResult run_split(const ExperimentConfig& config, const Dataset& data, std::uint64_t split_seed,
                      std::size_t split_id = 0);

/// Per-iteration mean and sample std across splits. Undefined disparities
/// (NaN) are left out of the disparity aggregate.
std::vector<IterationSummary> summarize(const std::vector<SplitResult>& splits);

/// Seeds are config.seed + i. `max_threads == 0` reads FAL_THREADS, falling
/// back to the hardware concurrency.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t max_threads = 0);

/// <out>/raw_split<i>.csv, <out>/summary.json and, with dump_scores,
/// <out>/scores_split<i>.csv.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace fal::harness
