#include "fal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fal/fairness.hpp"
#include "fal/glm.hpp"
#include "fal/pool.hpp"
#include "fal/rng.hpp"
#include "fal/schedule.hpp"
#include "fal/synthetic.hpp"

namespace fal::harness {
namespace {

using strategies::Strategy;

struct TestMetrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0;
};

TestMetrics test_metrics(const glm::LinearClassifier& clf, const RowMatrix& x, const std::vector<int>& y,
                         double threshold) {
  const auto pred = clf.predict_all(x, threshold);
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    correct += static_cast<std::size_t>(pred[i] == y[i]);
    tp += static_cast<std::size_t>(pred[i] == 1 && y[i] == 1);
    fp += static_cast<std::size_t>(pred[i] == 1 && y[i] == 0);
    fn += static_cast<std::size_t>(pred[i] == 0 && y[i] == 1);
  }
  TestMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(y.size());
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return m;
}

double safe_disparity(const glm::LinearClassifier& clf, const Population& v, fairness::Measure m, double threshold) {
  try {
    return fairness::evaluate(clf, v, m, threshold);
  } catch (const fairness::UndefinedMeasureError&) {
    return std::nan("");
  }
}

glm::LinearClassifier retrain(const Pool& pool, const glm::TrainOptions& opts) {
  if (pool.labeled().empty()) return glm::LinearClassifier::zeros(pool.dim());
  return glm::train(std::span<const LabeledRecord>(pool.labeled()), opts);
}

std::vector<std::size_t> draw_candidates(const std::vector<std::size_t>& unlabeled, std::size_t m, Rng& rng) {
  if (m >= unlabeled.size()) return unlabeled;
  std::vector<std::size_t> ids = unlabeled;
  for (std::size_t i = 0; i < m; ++i) std::swap(ids[i], ids[i + uniform_index(rng, ids.size() - i)]);
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

MetricSummary summarize_values(const std::vector<double>& v) {
  MetricSummary s;
  if (v.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

nlohmann::json summary_to_json(const MetricSummary& s) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"mean", num(s.mean)}, {"std", num(s.std)}};
}

std::size_t worker_count(std::size_t requested, std::size_t n_splits) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("FAL_THREADS")) {
      try {
        n = static_cast<std::size_t>(std::stoul(env));
      } catch (const std::exception&) {
        throw std::invalid_argument(std::string("FAL_THREADS must be a positive integer, got '") + env + "'");
      }
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  }
  return std::clamp<std::size_t>(n, 1, n_splits);
}

}  // namespace

Dataset load_source(const DataSource& src) {
  switch (src.kind) {
    case DataSource::Kind::Csv:
      return load_csv(src.path, Schema::load(src.schema));
    case DataSource::Kind::CompasLike:
      return synthetic::make_compas_like(src.compas_like, src.generator_seed);
    case DataSource::Kind::Scenario:
      return synthetic::make_synthetic_scenario(src.scenario, src.generator_seed);
  }
  throw std::logic_error("unreachable data source kind");
}

SplitResult run_split(const ExperimentConfig& config, std::uint64_t split_seed, std::size_t split_id) {
  return run_split(config, load_source(config.data), split_seed, split_id);
}

SplitResult run_split(const ExperimentConfig& config, const Dataset& data, std::uint64_t split_seed,
                      std::size_t split_id) {
  config.validate();
  const Dataset rows = config.row_subsample ? subsample(data, *config.row_subsample, split_seed) : data;
  const TrainTestSplit parts = split(rows, config.train_frac, split_seed);
  const Standardizer scaler = Standardizer::fit(parts.train);
  const Dataset train = scaler.apply(parts.train);
  const Dataset test = scaler.apply(parts.test);

  const RowMatrix test_x = test.feature_matrix();
  std::vector<int> test_y;
  test_y.reserve(test.size());
  for (const auto& p : test.points) test_y.push_back(p.y);

  Pool pool(train, config.n_seed_labels, config.budget, split_seed);
  if (pool.unlabeled().size() < config.budget)
    throw std::invalid_argument("budget " + std::to_string(config.budget) + " exceeds the " +
                                std::to_string(pool.unlabeled().size()) + " unlabeled training points");

  const strategies::FairnessEval eval{config.measure, config.threshold, config.classifier};
  const bool weighted = config.strategy == Strategy::Fal || config.strategy == Strategy::Fbc;
  strategies::SensitiveCov sens;
  strategies::CovAggregates agg(pool.dim());
  if (config.strategy == Strategy::Fbc) {
    sens = strategies::init_sensitive_cov(pool.verification());
    agg = strategies::CovAggregates::from_records(pool.labeled(), pool.dim());
  }
  Rng rng = make_rng(split_seed, 0xa11);
  glm::LinearClassifier clf = retrain(pool, config.classifier);

  SplitResult result;
  result.split_id = split_id;
  result.seed = split_seed;
  result.records.reserve(config.budget);
  const std::string strategy_name(strategies::to_string(config.strategy));
  const std::string measure_name(fairness::to_string(config.measure));

  for (std::size_t t = 0; t < config.budget; ++t) {
    const auto start = std::chrono::steady_clock::now();
    const double alpha = weighted ? schedule::alpha_at(config.alpha, t, config.budget) : 1.0;

    std::size_t chosen = 0;
    switch (config.strategy) {
      case Strategy::Random:
        chosen = strategies::select_random(pool.unlabeled(), rng);
        break;
      case Strategy::Entropy:
        chosen = strategies::select_entropy(strategies::CandidateSet::from_pool(pool), clf);
        break;
      case Strategy::Fal: {
        const auto ids = config.candidate_subsample ? draw_candidates(pool.unlabeled(), *config.candidate_subsample, rng)
                                                    : pool.unlabeled();
        const auto cands = strategies::CandidateSet::from_pool(pool, ids);
        const auto labeled = strategies::LabeledSet::from_records(pool.labeled());
        auto sel = strategies::select_fal(cands, labeled, clf, pool.verification(), eval, alpha);
        chosen = sel.id;
        if (config.dump_scores) result.score_tables.push_back(std::move(sel.scores));
        break;
      }
      case Strategy::Fbc: {
        auto sel = strategies::select_fbc(strategies::CandidateSet::from_pool(pool), agg, clf, sens, alpha,
                                          config.fbc_use_abs);
        chosen = sel.id;
        if (config.dump_scores) result.score_tables.push_back(std::move(sel.scores));
        break;
      }
    }

    const Eigen::VectorXd x = pool.features(chosen);
    const int y = pool.query(chosen);
    if (config.strategy == Strategy::Fbc) agg.add(x, y);
    clf = retrain(pool, config.classifier);

    const TestMetrics tm = test_metrics(clf, test_x, test_y, config.threshold);
    MetricsRecord r;
    r.split_id = split_id;
    r.iteration = t;
    r.strategy = strategy_name;
    r.alpha = alpha;
    r.accuracy = tm.accuracy;
    r.precision = tm.precision;
    r.recall = tm.recall;
    r.disparity = safe_disparity(clf, pool.verification(), config.measure, config.threshold);
    r.measure = measure_name;
    r.selected_id = chosen;
    r.train_size = pool.labeled().size();
    if (config.record_wall_time)
      r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.records.push_back(std::move(r));
    result.selected_ids.push_back(chosen);
  }
  return result;
}

std::vector<IterationSummary> summarize(const std::vector<SplitResult>& splits) {
  if (splits.empty()) return {};
  const std::size_t iters = splits.front().records.size();
  for (const auto& s : splits)
    if (s.records.size() != iters) throw std::invalid_argument("summarize: splits have different lengths");
  std::vector<IterationSummary> out(iters);
  for (std::size_t t = 0; t < iters; ++t) {
    std::vector<double> alpha, acc, prec, rec, disp, wall;
    for (const auto& s : splits) {
      const auto& r = s.records[t];
      alpha.push_back(r.alpha);
      acc.push_back(r.accuracy);
      prec.push_back(r.precision);
      rec.push_back(r.recall);
      wall.push_back(r.wall_time_s);
      if (!std::isnan(r.disparity)) disp.push_back(r.disparity);
    }
    auto& row = out[t];
    row.iteration = splits.front().records[t].iteration;
    row.train_size = splits.front().records[t].train_size;
    row.n_defined = disp.size();
    row.alpha = summarize_values(alpha);
    row.accuracy = summarize_values(acc);
    row.precision = summarize_values(prec);
    row.recall = summarize_values(rec);
    row.disparity = summarize_values(disp);
    row.wall_time_s = summarize_values(wall);
  }
  return out;
}

std::vector<MetricsRecord> ExperimentResult::all_records() const {
  std::vector<MetricsRecord> out;
  for (const auto& s : splits) out.insert(out.end(), s.records.begin(), s.records.end());
  return out;
}

nlohmann::json ExperimentResult::summary_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["seeds"] = seeds;
  auto& iters = j["iterations"] = nlohmann::json::array();
  for (const auto& s : summary) {
    iters.push_back({{"iteration", s.iteration},
                     {"train_size", s.train_size},
                     {"n_disparity_defined", s.n_defined},
                     {"alpha", summary_to_json(s.alpha)},
                     {"accuracy", summary_to_json(s.accuracy)},
                     {"precision", summary_to_json(s.precision)},
                     {"recall", summary_to_json(s.recall)},
                     {"disparity", summary_to_json(s.disparity)},
                     {"wall_time_s", summary_to_json(s.wall_time_s)}});
  }
  if (!iters.empty()) j["final"] = iters.back();
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t max_threads) {
  config.validate();
  const Dataset data = load_source(config.data);

  ExperimentResult result;
  result.config = config;
  for (std::size_t i = 0; i < config.n_splits; ++i) result.seeds.push_back(config.seed + i);
  result.splits.resize(config.n_splits);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_split = 0;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.n_splits; i = next++) {
      try {
        result.splits[i] = run_split(config, data, result.seeds[i], i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error || i < error_split) {
          error = std::current_exception();
          error_split = i;
        }
        next = config.n_splits;
      }
    }
  };

  const std::size_t n_workers = worker_count(max_threads, config.n_splits);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("split " + std::to_string(error_split) + " (seed " +
                               std::to_string(result.seeds[error_split]) + "): " + e.what());
    }
  }
  result.summary = summarize(result.splits);
  return result;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& s : result.splits) {
    emit_metrics(s.records, MetricsFormat::Csv, out_dir / ("raw_split" + std::to_string(s.split_id) + ".csv"));
    if (s.score_tables.empty()) continue;
    const auto path = out_dir / ("scores_split" + std::to_string(s.split_id) + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "split_id,iteration,candidate_id,raw_entropy,raw_fairness,entropy_term,fairness_term,combined\n";
    for (std::size_t t = 0; t < s.score_tables.size(); ++t)
      for (const auto& sc : s.score_tables[t])
        out << s.split_id << ',' << t << ',' << sc.candidate_id << ',' << format_double(sc.raw_entropy) << ','
            << format_double(sc.raw_fairness) << ',' << format_double(sc.entropy_term) << ','
            << format_double(sc.fairness_term) << ',' << format_double(sc.combined) << '\n';
  }
  const auto path = out_dir / "summary.json";
  std::ofstream js(path, std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + path.string());
  js << result.summary_json().dump(2) << '\n';
}

}  // namespace fal::harness
