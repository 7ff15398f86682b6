#include "fal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fal/rng.hpp"

namespace fal::synthetic {
namespace {

int poisson(Rng& rng, double lambda) {
  const double limit = std::exp(-lambda);
  int k = 0;
  double prod = uniform01(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

int bernoulli(Rng& rng, double p) { return uniform01(rng) < p ? 1 : 0; }

Eigen::Vector2d read_vec2(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw std::invalid_argument("expected a 2-vector");
  return {v[0], v[1]};
}

}  // namespace

Eigen::Matrix2d ScenarioParams::default_blue_cov() {
  const Eigen::Vector2d along = Eigen::Vector2d(1.0, -1.0).normalized();
  const Eigen::Vector2d across = Eigen::Vector2d(1.0, 1.0).normalized();
  return 0.15 * 0.15 * along * along.transpose() + 0.05 * 0.05 * across * across.transpose();
}

ScenarioParams ScenarioParams::from_json(const nlohmann::json& j) {
  ScenarioParams p;
  p.n_red = j.value("n_red", p.n_red);
  p.n_blue = j.value("n_blue", p.n_blue);
  if (j.contains("blue_mean")) p.blue_mean = read_vec2(j.at("blue_mean"));
  if (j.contains("blue_cov")) {
    const auto rows = j.at("blue_cov").get<std::vector<std::vector<double>>>();
    if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
      throw std::invalid_argument("blue_cov must be 2x2");
    p.blue_cov << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
  }
  if (j.contains("boundary")) {
    p.truth.w = read_vec2(j.at("boundary").at("w"));
    p.truth.offset = j.at("boundary").at("offset").get<double>();
  }
  return p;
}

LinearBoundary tilted_boundary() {
  LinearBoundary b;
  b.w = {1.0, 0.8};
  b.offset = b.w.dot(Eigen::Vector2d(0.5, 0.5));
  return b;
}

Dataset make_synthetic_scenario(const ScenarioParams& params, std::uint64_t seed) {
  if (params.n_red == 0 && params.n_blue == 0) throw std::invalid_argument("scenario: no points requested");
  if (!params.blue_cov.isApprox(params.blue_cov.transpose()))
    throw std::invalid_argument("scenario: blue covariance must be symmetric");
  Eigen::LLT<Eigen::Matrix2d> llt(params.blue_cov);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("scenario: blue covariance must be positive definite");
  const Eigen::Matrix2d chol = llt.matrixL();

  Rng rng = make_rng(seed, 0x7ed);
  const std::size_t n = params.n_red + params.n_blue;
  RowMatrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> s(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector2d p;
    if (i < params.n_red) {
      p = {uniform01(rng), uniform01(rng)};
      s[i] = 0;
    } else {
      const double z1 = standard_normal(rng);
      const double z2 = standard_normal(rng);
      p = params.blue_mean + chol * Eigen::Vector2d(z1, z2);
      s[i] = 1;
    }
    x.row(static_cast<Eigen::Index>(i)) = p.transpose();
    y[i] = params.truth.label(p);
  }
  return make_dataset({"x1", "x2"}, x, s, y);
}

double acceptance_rate(const Dataset& ds, const LinearBoundary& boundary, int group) {
  std::size_t total = 0, accepted = 0;
  for (const auto& p : ds.points) {
    if (p.s != group) continue;
    ++total;
    accepted += static_cast<std::size_t>(boundary.label(p.x));
  }
  if (total == 0) throw std::invalid_argument("acceptance_rate: group is empty");
  return static_cast<double>(accepted) / static_cast<double>(total);
}

CompasLikeParams CompasLikeParams::from_json(const nlohmann::json& j) {
  CompasLikeParams p;
  p.n = j.value("n", p.n);
  p.p_group1 = j.value("p_group1", p.p_group1);
  return p;
}

Dataset make_compas_like(const CompasLikeParams& params, std::uint64_t seed) {
  if (params.n == 0) throw std::invalid_argument("compas_like: n must be positive");
  if (!(params.p_group1 > 0.0 && params.p_group1 < 1.0))
    throw std::invalid_argument("compas_like: p_group1 must lie in (0, 1)");
  Rng rng = make_rng(seed, 0xc0);
  const std::vector<std::string> names = {"age",         "priors_count", "juv_fel_count", "juv_misd_count",
                                          "felony_charge", "male",       "log_days_in_custody", "employment_gap"};
  RowMatrix x(static_cast<Eigen::Index>(params.n), static_cast<Eigen::Index>(names.size()));
  std::vector<int> s(params.n), y(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    const int g = bernoulli(rng, params.p_group1);
    const double age = std::clamp(34.0 - 3.0 * g + 11.0 * standard_normal(rng), 18.0, 80.0);
    const double risk = standard_normal(rng);
    const int priors = poisson(rng, std::exp(0.4 + 0.7 * g + 0.5 * risk));
    const int juv_fel = poisson(rng, 0.05 + 0.15 * g);
    const int juv_misd = poisson(rng, 0.08 + 0.12 * g);
    const int felony = bernoulli(rng, 0.58 + 0.08 * g);
    const int male = bernoulli(rng, 0.8);
    const double custody = 1.4 + 0.4 * g + 1.1 * standard_normal(rng);
    const double gap = 0.5 * risk + standard_normal(rng);

    const double logit = -0.9 + 0.22 * priors - 0.05 * (age - 34.0) + 0.45 * juv_fel + 0.3 * juv_misd +
                         0.25 * felony + 0.3 * male + 0.12 * custody + 0.35 * gap + 0.6 * risk;
    const double prob = 1.0 / (1.0 + std::exp(-logit));
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r) << age, priors, juv_fel, juv_misd, felony, male, custody, gap;
    s[i] = g;
    y[i] = bernoulli(rng, prob);
  }
  return make_dataset(names, x, s, y);
}

void write_csv(const Dataset& ds, const std::filesystem::path& csv, const std::filesystem::path& schema) {
  std::ofstream out(csv);
  if (!out) throw DatasetError("cannot write " + csv.string());
  out << std::setprecision(17);
  for (const auto& name : ds.feature_names) out << name << ',';
  out << "s,y\n";
  for (const auto& p : ds.points) {
    for (Eigen::Index j = 0; j < p.x.size(); ++j) out << p.x[j] << ',';
    out << p.s << ',' << p.y << '\n';
  }
  if (!out) throw DatasetError("write failed: " + csv.string());

  Schema sc;
  for (const auto& name : ds.feature_names) sc.features.push_back({name, ColumnKind::Numeric});
  sc.sensitive = "s";
  sc.label = "y";
  std::ofstream js(schema);
  if (!js) throw DatasetError("cannot write " + schema.string());
  js << sc.to_json().dump(2) << '\n';
}

}  // namespace fal::synthetic
