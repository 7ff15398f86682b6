#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "fal/harness.hpp"
#include "fal/synthetic.hpp"
#include "support.hpp"

using namespace fal;
using namespace fal::harness;

namespace {

ExperimentConfig small_config(strategies::Strategy s, std::size_t budget = 10, std::size_t splits = 1) {
  auto c = ExperimentConfig::from_json(nlohmann::json::parse(R"({
    "dataset": {"kind": "compas_like", "n": 120, "seed": 3},
    "n_seed_labels": 6, "record_wall_time": false})"));
  c.strategy = s;
  c.budget = budget;
  c.n_splits = splits;
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fal_harness_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

std::vector<MetricsRecord> sample_records() {
  std::vector<MetricsRecord> out;
  for (std::size_t t = 0; t < 3; ++t) {
    MetricsRecord r;
    r.split_id = 1;
    r.iteration = t;
    r.strategy = "fal";
    r.alpha = 1.0 - 0.1 * static_cast<double>(t);
    r.accuracy = 2.0 / 3.0 + 1e-17 * static_cast<double>(t);
    r.precision = 0.1 * static_cast<double>(t);
    r.recall = 1.0 / 7.0;
    r.disparity = t == 1 ? std::nan("") : 3.14159e-9;
    r.measure = "mutual_info";
    r.wall_time_s = 0.001234567890123;
    r.selected_id = 10 + t;
    r.train_size = 7 + t;
    out.push_back(r);
  }
  return out;
}

bool same_numbers(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_CASE("random strategy bookkeeping") {
  const auto res = run_split(small_config(strategies::Strategy::Random), 5);
  REQUIRE(res.records.size() == 10);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(res.records[t].iteration == t);
    CHECK(res.records[t].train_size == 6 + t + 1);
    CHECK(res.records[t].alpha == 1.0);
    CHECK(res.records[t].accuracy >= 0.0);
    CHECK(res.records[t].accuracy <= 1.0);
  }
  CHECK(std::set<std::size_t>(res.selected_ids.begin(), res.selected_ids.end()).size() == 10);
}

TEST_CASE("entropy reports alpha 1 by convention") {
  auto cfg = small_config(strategies::Strategy::Entropy);
  cfg.alpha = schedule::AlphaSchedule::fixed(0.2);
  for (const auto& r : run_split(cfg, 1).records) CHECK(r.alpha == 1.0);
}

TEST_CASE("fal loop replays against a scripted loop") {
  auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(R"({
    "dataset": {"kind": "scenario", "n_red": 25, "n_blue": 25, "seed": 4},
    "strategy": "fal", "budget": 8, "n_seed_labels": 4, "train_frac": 0.6, "record_wall_time": false})"));
  const std::uint64_t seed = 11;
  const auto got = run_split(cfg, seed);

  const auto parts = split(load_source(cfg.data), cfg.train_frac, seed);
  const auto sc = Standardizer::fit(parts.train);
  Pool pool(sc.apply(parts.train), cfg.n_seed_labels, cfg.budget, seed);
  std::vector<std::size_t> want;
  for (std::size_t t = 0; t < cfg.budget; ++t) {
    const auto clf = glm::train(std::span<const LabeledRecord>(pool.labeled()));
    const double alpha = schedule::alpha_at(cfg.alpha, t, cfg.budget);
    const std::size_t id = oracle::select_fal(oracle::state_of(pool), clf, cfg.measure, 0.5, {}, alpha);
    pool.query(id);
    want.push_back(id);
  }
  CHECK(got.selected_ids == want);
}

TEST_CASE("fbc and fal runs produce complete records") {
  for (auto s : {strategies::Strategy::Fal, strategies::Strategy::Fbc}) {
    auto cfg = small_config(s, 12);
    cfg.candidate_subsample = 20;
    cfg.dump_scores = true;
    const auto res = run_split(cfg, 2);
    CHECK(res.records.size() == 12);
    CHECK(res.score_tables.size() == 12);
    CHECK(res.records.front().alpha == 1.0);
    CHECK(res.records.back().alpha == 0.0);
  }
}

TEST_CASE("budget larger than the pool is rejected") {
  auto cfg = small_config(strategies::Strategy::Random, 500);
  CHECK_THROWS(run_split(cfg, 0));
}

TEST_CASE("single split has zero standard deviation") {
  const auto res = run_experiment(small_config(strategies::Strategy::Entropy, 8, 1), 1);
  for (const auto& s : res.summary) {
    CHECK(s.accuracy.std == 0.0);
    CHECK(s.precision.std == 0.0);
    CHECK(s.recall.std == 0.0);
  }
}

TEST_CASE("splits use offset seeds and distinct memberships") {
  auto cfg = small_config(strategies::Strategy::Random, 5, 3);
  cfg.seed = 40;
  const auto res = run_experiment(cfg, 2);
  CHECK(res.seeds == std::vector<std::uint64_t>{40, 41, 42});
  const auto data = load_source(cfg.data);
  std::set<std::set<std::size_t>> memberships;
  for (auto seed : res.seeds) {
    std::set<std::size_t> rows;
    for (const auto& p : split(data, cfg.train_frac, seed).train.points) rows.insert(p.row);
    memberships.insert(rows);
  }
  CHECK(memberships.size() == 3);
}

TEST_CASE("mean of split values equals the pooled mean") {
  const auto res = run_experiment(small_config(strategies::Strategy::Random, 6, 4), 0);
  for (std::size_t t = 0; t < 6; ++t) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : res.all_records())
      if (r.iteration == t) {
        sum += r.accuracy;
        ++n;
      }
    CHECK(res.summary[t].accuracy.mean == doctest::Approx(sum / static_cast<double>(n)).epsilon(1e-15));
  }
}

TEST_CASE("parallel and serial runs agree") {
  const auto cfg = small_config(strategies::Strategy::Fbc, 10, 3);
  const auto a = run_experiment(cfg, 1), b = run_experiment(cfg, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.splits[i].selected_ids == b.splits[i].selected_ids);
}

TEST_CASE("emit_metrics csv layout and round trip") {
  const auto dir = temp_dir("csv");
  const auto recs = sample_records();
  emit_metrics(recs, MetricsFormat::Csv, dir / "m.csv");
  CHECK(count_lines(dir / "m.csv") == 4);
  std::ifstream in(dir / "m.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "split_id,iteration,strategy,alpha,accuracy,precision,recall,disparity,measure,wall_time_s");
  const auto back = read_metrics_csv(dir / "m.csv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].iteration == recs[i].iteration);
    CHECK(back[i].alpha == recs[i].alpha);
    CHECK(back[i].accuracy == recs[i].accuracy);
    CHECK(back[i].recall == recs[i].recall);
    CHECK(same_numbers(back[i].disparity, recs[i].disparity));
    CHECK(back[i].wall_time_s == recs[i].wall_time_s);
  }
}

TEST_CASE("emit_metrics json round trip") {
  const auto dir = temp_dir("json");
  const auto recs = sample_records();
  emit_metrics(recs, MetricsFormat::Json, dir / "m.json", small_config(strategies::Strategy::Fal).to_json(), {7, 8});
  const auto back = read_metrics_json(dir / "m.json");
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].selected_id == recs[i].selected_id);
    CHECK(back[i].train_size == recs[i].train_size);
    CHECK(back[i].precision == recs[i].precision);
    CHECK(same_numbers(back[i].disparity, recs[i].disparity));
  }
  std::ifstream in(dir / "m.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("seeds") == nlohmann::json({7, 8}));
  CHECK(j.at("config").at("strategy") == "fal");
}

TEST_CASE("emit_metrics errors") {
  CHECK_THROWS(parse_format("parquet"));
  CHECK_THROWS(emit_metrics({}, MetricsFormat::Csv, "/tmp/none.csv"));
  CHECK_THROWS(emit_metrics(sample_records(), MetricsFormat::Csv, "/nonexistent/dir/m.csv"));
}

TEST_CASE("compare is antisymmetric") {
  const auto a = run_split(small_config(strategies::Strategy::Entropy, 6), 1).records;
  const auto b = run_split(small_config(strategies::Strategy::Random, 6), 1).records;
  const auto ab = compare(a, b), ba = compare(b, a);
  REQUIRE(ab.size() == 6);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    CHECK(ab[i].accuracy_delta == -ba[i].accuracy_delta);
    CHECK(ab[i].disparity_delta == -ba[i].disparity_delta);
  }
}

TEST_CASE("write_outputs layout and directory reading") {
  const auto dir = temp_dir("out");
  auto cfg = small_config(strategies::Strategy::Fbc, 5, 2);
  cfg.dump_scores = true;
  const auto res = run_experiment(cfg, 1);
  write_outputs(res, dir);
  CHECK(std::filesystem::exists(dir / "raw_split0.csv"));
  CHECK(std::filesystem::exists(dir / "raw_split1.csv"));
  CHECK(std::filesystem::exists(dir / "scores_split0.csv"));
  std::ifstream in(dir / "summary.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("iterations").size() == 5);
  CHECK(j.at("final").at("iteration") == 4);
  CHECK(read_metrics(dir).size() == 10);
}

TEST_CASE("config parsing") {
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"budgett": 3})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"budget": 0})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"n_splits": 0})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"strategy": "margin"})")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"measure": "gini"})")), ConfigError);
  const auto c = small_config(strategies::Strategy::Fbc);
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("synthetic scenario: acceptance under the true boundary") {
  const synthetic::ScenarioParams params;
  const auto ds = synthetic::make_synthetic_scenario(params, 1);
  CHECK(ds.size() == 20000);
  CHECK(std::abs(synthetic::acceptance_rate(ds, params.truth, 0) - 0.5) <= 0.03);
  CHECK(std::abs(synthetic::acceptance_rate(ds, params.truth, 1) - 0.5) <= 0.03);
  CHECK(synthetic::acceptance_rate(ds, synthetic::tilted_boundary(), 1) > 0.53);
}

TEST_CASE("synthetic scenario: distribution parameters") {
  const synthetic::ScenarioParams params;
  const auto ds = synthetic::make_synthetic_scenario(params, 2);
  Eigen::Vector2d red_mean = Eigen::Vector2d::Zero(), blue_mean = Eigen::Vector2d::Zero();
  double red_min = 1.0, red_max = 0.0;
  for (const auto& p : ds.points) {
    if (p.s == 0) {
      red_mean += p.x;
      red_min = std::min(red_min, p.x.minCoeff());
      red_max = std::max(red_max, p.x.maxCoeff());
    } else {
      blue_mean += p.x;
    }
  }
  red_mean /= static_cast<double>(params.n_red);
  blue_mean /= static_cast<double>(params.n_blue);
  CHECK((red_mean - Eigen::Vector2d(0.5, 0.5)).norm() < 0.01);
  CHECK((blue_mean - params.blue_mean).norm() < 0.01);
  CHECK(red_min >= 0.0);
  CHECK(red_max <= 1.0);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : ds.points)
    if (p.s == 1) cov += (p.x - blue_mean) * (p.x - blue_mean).transpose();
  cov /= static_cast<double>(params.n_blue);
  CHECK((cov - params.blue_cov).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("synthetic scenario: determinism and validation") {
  synthetic::ScenarioParams params;
  params.n_red = params.n_blue = 50;
  const auto a = synthetic::make_synthetic_scenario(params, 9), b = synthetic::make_synthetic_scenario(params, 9);
  CHECK(a.feature_matrix() == b.feature_matrix());
  params.blue_cov << 1, 2, 2, 1;
  CHECK_THROWS(synthetic::make_synthetic_scenario(params, 0));
  params.blue_cov << 1, 0.5, 0.2, 1;
  CHECK_THROWS(synthetic::make_synthetic_scenario(params, 0));
}

TEST_CASE("compas-like generator is seeded and group dependent") {
  const auto a = synthetic::make_compas_like({}, 1), b = synthetic::make_compas_like({}, 1);
  CHECK(a.feature_matrix() == b.feature_matrix());
  CHECK(a.size() == 1000);
  double pos0 = 0, n0 = 0, pos1 = 0, n1 = 0;
  for (const auto& p : a.points) (p.s ? pos1 : pos0) += p.y, (p.s ? n1 : n0) += 1;
  CHECK(pos1 / n1 > pos0 / n0);
}

TEST_CASE("synthetic csv writes a loadable file") {
  const auto dir = temp_dir("synth");
  const auto ds = synthetic::make_compas_like({200, 0.5}, 3);
  synthetic::write_csv(ds, dir / "d.csv", dir / "d_schema.json");
  const auto back = load_csv(dir / "d.csv", Schema::load(dir / "d_schema.json"));
  CHECK(back.size() == 200);
  CHECK(back.feature_matrix() == ds.feature_matrix());
}
