#include "fal/config.hpp"

#include <fstream>
#include <set>

namespace fal::harness {
namespace {

const std::set<std::string> kKnownKeys = {
    "dataset",    "strategy", "measure",   "alpha",           "budget",      "n_seed_labels",
    "n_splits",   "train_frac", "seed",    "classifier",      "candidate_subsample", "row_subsample",
    "threshold",  "fbc_use_abs", "record_wall_time", "dump_scores"};

std::optional<std::size_t> optional_size(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

DataSource parse_source(const nlohmann::json& j, const std::filesystem::path& base) {
  DataSource src;
  const auto kind = j.value("kind", std::string(j.contains("path") ? "csv" : "compas_like"));
  src.generator_seed = j.value("seed", std::uint64_t{0});
  if (kind == "csv") {
    src.kind = DataSource::Kind::Csv;
    src.path = resolve(j.at("path").get<std::string>(), base);
    src.schema = resolve(j.at("schema").get<std::string>(), base);
  } else if (kind == "compas_like") {
    src.kind = DataSource::Kind::CompasLike;
    src.compas_like = synthetic::CompasLikeParams::from_json(j);
  } else if (kind == "scenario") {
    src.kind = DataSource::Kind::Scenario;
    src.scenario = synthetic::ScenarioParams::from_json(j);
  } else {
    throw ConfigError("config: unknown dataset kind '" + kind + "'");
  }
  return src;
}

nlohmann::json source_json(const DataSource& src) {
  switch (src.kind) {
    case DataSource::Kind::Csv:
      return {{"kind", "csv"}, {"path", src.path.string()}, {"schema", src.schema.string()}};
    case DataSource::Kind::CompasLike:
      return {{"kind", "compas_like"},
              {"n", src.compas_like.n},
              {"p_group1", src.compas_like.p_group1},
              {"seed", src.generator_seed}};
    case DataSource::Kind::Scenario: {
      const auto& p = src.scenario;
      return {{"kind", "scenario"},
              {"n_red", p.n_red},
              {"n_blue", p.n_blue},
              {"blue_mean", {p.blue_mean[0], p.blue_mean[1]}},
              {"blue_cov", {{p.blue_cov(0, 0), p.blue_cov(0, 1)}, {p.blue_cov(1, 0), p.blue_cov(1, 1)}}},
              {"boundary", {{"w", {p.truth.w[0], p.truth.w[1]}}, {"offset", p.truth.offset}}},
              {"seed", src.generator_seed}};
    }
  }
  return {};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    for (const auto& [key, _] : j.items())
      if (!kKnownKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    if (j.contains("dataset")) c.data = parse_source(j.at("dataset"), base_dir);
    if (j.contains("strategy")) c.strategy = strategies::parse_strategy(j.at("strategy").get<std::string>());
    if (j.contains("measure")) c.measure = fairness::parse_measure(j.at("measure").get<std::string>());
    if (j.contains("alpha")) c.alpha = schedule::AlphaSchedule::from_json(j.at("alpha"));
    c.budget = j.value("budget", c.budget);
    c.n_seed_labels = j.value("n_seed_labels", c.n_seed_labels);
    c.n_splits = j.value("n_splits", c.n_splits);
    c.train_frac = j.value("train_frac", c.train_frac);
    c.seed = j.value("seed", c.seed);
    if (j.contains("classifier")) {
      const auto& k = j.at("classifier");
      c.classifier.reg_strength = k.value("reg_strength", c.classifier.reg_strength);
      c.classifier.max_iter = k.value("max_iter", c.classifier.max_iter);
      c.classifier.tol = k.value("tol", c.classifier.tol);
    }
    c.candidate_subsample = optional_size(j, "candidate_subsample");
    c.row_subsample = optional_size(j, "row_subsample");
    c.threshold = j.value("threshold", c.threshold);
    c.fbc_use_abs = j.value("fbc_use_abs", c.fbc_use_abs);
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.dump_scores = j.value("dump_scores", c.dump_scores);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"dataset", source_json(data)},
                   {"strategy", strategies::to_string(strategy)},
                   {"measure", fairness::to_string(measure)},
                   {"alpha", alpha.to_json()},
                   {"budget", budget},
                   {"n_seed_labels", n_seed_labels},
                   {"n_splits", n_splits},
                   {"train_frac", train_frac},
                   {"seed", seed},
                   {"classifier",
                    {{"reg_strength", classifier.reg_strength},
                     {"max_iter", classifier.max_iter},
                     {"tol", classifier.tol}}},
                   {"threshold", threshold},
                   {"fbc_use_abs", fbc_use_abs},
                   {"record_wall_time", record_wall_time},
                   {"dump_scores", dump_scores}};
  j["candidate_subsample"] = candidate_subsample ? nlohmann::json(*candidate_subsample) : nlohmann::json(nullptr);
  j["row_subsample"] = row_subsample ? nlohmann::json(*row_subsample) : nlohmann::json(nullptr);
  return j;
}

void ExperimentConfig::validate() const {
  if (budget < 1) throw ConfigError("config: budget must be at least 1");
  if (n_splits < 1) throw ConfigError("config: n_splits must be at least 1");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("config: train_frac must lie in (0, 1)");
  if (!(classifier.reg_strength > 0.0)) throw ConfigError("config: reg_strength must be positive");
  if (classifier.max_iter < 1) throw ConfigError("config: max_iter must be at least 1");
  if (candidate_subsample && *candidate_subsample == 0) throw ConfigError("config: candidate_subsample must be positive");
  if (row_subsample && *row_subsample < 2) throw ConfigError("config: row_subsample must be at least 2");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("config: threshold must lie in [0, 1]");
  if (data.kind == DataSource::Kind::Csv && (data.path.empty() || data.schema.empty()))
    throw ConfigError("config: csv dataset needs path and schema");
  if ((strategy == strategies::Strategy::Fal || strategy == strategies::Strategy::Fbc) && n_seed_labels == 0)
    throw ConfigError("config: fal and fbc need at least one seed label");
}

}  // namespace fal::harness
