#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fal/fairness.hpp"
#include "fal/harness.hpp"
#include "fal/rng.hpp"
#include "fal/strategies.hpp"
#include "fal/synthetic.hpp"

namespace {

using namespace fal;

std::string fmt(double v) { return harness::format_double(v); }

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out, std::size_t threads,
            bool json) {
  const auto config = harness::ExperimentConfig::load(config_path);
  const auto result = harness::run_experiment(config, threads);
  harness::write_outputs(result, out);
  if (json)
    harness::emit_metrics(result.all_records(), harness::MetricsFormat::Json, out / "metrics.json",
                          config.to_json(), result.seeds);
  const auto& last = result.summary.back();
  std::cout << "wrote " << result.splits.size() << " splits to " << out.string() << '\n'
            << "final iteration " << last.iteration << ": accuracy " << fmt(last.accuracy.mean) << " +- "
            << fmt(last.accuracy.std) << ", " << fairness::to_string(config.measure) << ' '
            << fmt(last.disparity.mean) << " +- " << fmt(last.disparity.std) << '\n';
  return 0;
}

int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto rows = harness::compare(harness::read_metrics(a), harness::read_metrics(b));
  if (rows.empty()) {
    std::cerr << "compare: the inputs share no iterations\n";
    return 1;
  }
  std::cout << "iteration,accuracy_a,accuracy_b,accuracy_delta,disparity_a,disparity_b,disparity_delta\n";
  for (const auto& r : rows)
    std::cout << r.iteration << ',' << fmt(r.accuracy_a) << ',' << fmt(r.accuracy_b) << ',' << fmt(r.accuracy_delta)
              << ',' << fmt(r.disparity_a) << ',' << fmt(r.disparity_b) << ',' << fmt(r.disparity_delta) << '\n';
  std::cout << "final_disparity_delta," << fmt(rows.back().disparity_delta) << '\n'
            << "final_accuracy_delta," << fmt(rows.back().accuracy_delta) << '\n';
  return 0;
}

int cmd_fixture(double p, double eps, std::uint64_t seed, std::size_t draws) {
  const auto f = fairness::measure_disagreement_fixture(p, eps);
  std::cout << "p=" << fmt(p) << " eps=" << fmt(eps) << '\n'
            << "F1(C)  = " << fmt(f.f1_c) << '\n'
            << "F1(C') = " << fmt(f.f1_c_prime) << '\n'
            << "F2(C)  = " << fmt(f.f2_c) << '\n'
            << "F2(C') = " << fmt(f.f2_c_prime) << '\n'
            << "flip (F1 prefers C', F2 prefers C): " << (f.preference_flip() ? "yes" : "no") << '\n';

  Rng rng = make_rng(seed, 0x1e);
  double worst = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const std::size_t n = 20 + uniform_index(rng, 200);
    const std::size_t d = 1 + uniform_index(rng, 6);
    Population pop;
    pop.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      pop.s.push_back(uniform01(rng) < 0.4 ? 1 : 0);
      pop.ids.push_back(i);
      for (std::size_t j = 0; j < d; ++j)
        pop.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = standard_normal(rng) + 0.5 * pop.s[i];
    }
    Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
    for (auto& t : theta) t = standard_normal(rng);
    const auto id = strategies::score_cov_identity(pop, glm::LinearClassifier(theta, standard_normal(rng)));
    worst = std::max(worst, std::abs(id.direct - id.via_features));
  }
  std::cout << "cov(S, theta.x) = theta.cov(S, X): max abs gap " << fmt(worst) << " over " << draws << " draws ("
            << (worst <= 1e-9 ? "ok" : "VIOLATED") << ")\n";
  return 0;
}

int cmd_synth(const std::string& kind, std::size_t n, std::uint64_t seed, const std::filesystem::path& out) {
  Dataset ds;
  if (kind == "two_group") {
    synthetic::ScenarioParams params;
    if (n > 0) params.n_red = params.n_blue = n;
    ds = synthetic::make_synthetic_scenario(params, seed);
  } else if (kind == "compas_like") {
    synthetic::CompasLikeParams params;
    if (n > 0) params.n = n;
    ds = synthetic::make_compas_like(params, seed);
  } else {
    std::cerr << "synth: unknown kind '" << kind << "' (two_group | compas_like)\n";
    return 2;
  }
  auto schema = out;
  schema.replace_filename(out.stem().string() + "_schema.json");
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  synthetic::write_csv(ds, out, schema);
  std::cout << "wrote " << ds.size() << " rows to " << out.string() << " (schema " << schema.string() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair active learning experiments"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* run = app.add_subcommand("run", "run an experiment config and write metrics");
  std::string config, out;
  std::size_t threads = 0;
  bool json = false;
  run->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--threads", threads, "parallel split workers (default: FAL_THREADS or all cores)");
  run->add_flag("--json", json, "also write metrics.json with every record");

  auto* cmp = app.add_subcommand("compare", "per-iteration deltas between two runs (a - b)");
  std::string a, b;
  cmp->add_option("a", a, "metrics CSV or run directory")->required()->check(CLI::ExistingPath);
  cmp->add_option("b", b, "metrics CSV or run directory")->required()->check(CLI::ExistingPath);

  auto* fix = app.add_subcommand("fixture", "measure-disagreement tables and score covariance identity");
  double p = 0.75, eps = 0.01;
  std::uint64_t fixture_seed = 0;
  std::size_t draws = 50;
  fix->add_option("--p", p, "P(S=1)")->check(CLI::Range(0.0, 1.0));
  fix->add_option("--eps", eps, "table perturbation");
  fix->add_option("--seed", fixture_seed, "seed for the identity draws");
  fix->add_option("--draws", draws, "identity draws");

  auto* syn = app.add_subcommand("synth", "write a synthetic dataset as CSV plus schema");
  std::string kind = "two_group", synth_out;
  std::size_t n = 0;
  std::uint64_t synth_seed = 0;
  syn->add_option("--kind", kind, "two_group | compas_like");
  syn->add_option("--n", n, "points per group (two_group) or rows (compas_like)");
  syn->add_option("--seed", synth_seed, "generator seed");
  syn->add_option("--out", synth_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, threads, json);
    if (*cmp) return cmd_compare(a, b);
    if (*fix) return cmd_fixture(p, eps, fixture_seed, draws);
    if (*syn) return cmd_synth(kind, n, synth_seed, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
