#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Dense>
#include <json.hpp>

#include "fal/dataset.hpp"

namespace fal::synthetic {

/// A line w^T x >= offset in the plane; points on or above it are positive.
struct LinearBoundary {
  Eigen::Vector2d w{1.0, 1.0};
  double offset = 1.0;

  int label(const Eigen::Ref<const Eigen::VectorXd>& x) const { return w.dot(x.head<2>()) >= offset ? 1 : 0; }
};

/// Two groups on two features: red (S = 0) uniform on the unit square and
/// blue (S = 1) Gaussian. Defaults place the blue mean on the line
/// x1 + x2 = 1 with the long axis of its ellipse along that line, so the
/// true boundary accepts half of each group.
struct ScenarioParams {
  std::size_t n_red = 10000;
  std::size_t n_blue = 10000;
  Eigen::Vector2d blue_mean{0.75, 0.25};
  Eigen::Matrix2d blue_cov = default_blue_cov();
  LinearBoundary truth{};

  static Eigen::Matrix2d default_blue_cov();
  static ScenarioParams from_json(const nlohmann::json& j);
};

/// A boundary that still halves the red square (it passes through its
/// centre) but is rotated away from the blue ellipse's long axis.
LinearBoundary tilted_boundary();

Dataset make_synthetic_scenario(const ScenarioParams& params, std::uint64_t seed);

/// P(boundary accepts x | S = group) over the dataset.
double acceptance_rate(const Dataset& ds, const LinearBoundary& boundary, int group);

/// Recidivism-style tabular data: a binary group attribute that shifts
/// several features (prior counts, juvenile records, custody length), and a
/// label driven by those features so that an unconstrained classifier
/// inherits a group disparity through proxies.
struct CompasLikeParams {
  std::size_t n = 1000;
  double p_group1 = 0.6;

  static CompasLikeParams from_json(const nlohmann::json& j);
};

Dataset make_compas_like(const CompasLikeParams& params, std::uint64_t seed);

/// Writes features, `s` and `y` columns, plus a matching schema JSON.
void write_csv(const Dataset& ds, const std::filesystem::path& csv, const std::filesystem::path& schema);

}  // namespace fal::synthetic
