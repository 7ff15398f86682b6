#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fal/fairness.hpp"
#include "fal/glm.hpp"
#include "fal/schedule.hpp"
#include "fal/strategies.hpp"
#include "fal/synthetic.hpp"

namespace fal::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where the rows come from: a CSV file plus schema, or a generator.
struct DataSource {
  enum class Kind { Csv, CompasLike, Scenario };
  Kind kind = Kind::CompasLike;
  std::filesystem::path path;
  std::filesystem::path schema;
  synthetic::CompasLikeParams compas_like;
  synthetic::ScenarioParams scenario;
  std::uint64_t generator_seed = 0;
};

/// Mirrors the JSON config file; see configs/ for complete examples.
struct ExperimentConfig {
  DataSource data;
  strategies::Strategy strategy = strategies::Strategy::Fal;
  fairness::Measure measure = fairness::Measure::MutualInfo;
  schedule::AlphaSchedule alpha = schedule::AlphaSchedule::linear_decay();
  std::size_t budget = 200;
  std::size_t n_seed_labels = 6;
  std::size_t n_splits = 10;
  double train_frac = 0.6;
  std::uint64_t seed = 0;
  glm::TrainOptions classifier;
  std::optional<std::size_t> candidate_subsample;  // ExpF on a random subset of U
  std::optional<std::size_t> row_subsample;        // rows drawn per split before splitting
  double threshold = 0.5;
  bool fbc_use_abs = true;
  bool record_wall_time = true;  // false writes 0 so outputs are byte-reproducible
  bool dump_scores = false;      // per-iteration score tables (fal / fbc)

  /// Relative dataset paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace fal::harness
