#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fal/dataset.hpp"
#include "fal/pool.hpp"

namespace fal::glm {

class GlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kProbFloor = 1e-12;

/// Numerically stable logistic function.
double sigmoid(double z);

/// Clamps a probability into [1e-12, 1 - 1e-12].
double clamp_probability(double p);

struct TrainOptions {
  double reg_strength = 1.0;
  int max_iter = 100;
  double tol = 1e-6;
};

/// theta^T x + intercept, passed through a sigmoid for P(y = 1 | x).
class LinearClassifier {
 public:
  LinearClassifier() = default;
  LinearClassifier(Eigen::VectorXd theta, double intercept, std::size_t trained_on = 0);

  /// All-zero model of dimension d (predicts 0.5 everywhere).
  static LinearClassifier zeros(std::size_t d);

  const Eigen::VectorXd& theta() const { return theta_; }
  double intercept() const { return intercept_; }
  std::size_t trained_on() const { return trained_on_; }
  std::size_t dim() const { return static_cast<std::size_t>(theta_.size()); }

  double linear_score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Clamped into [1e-12, 1 - 1e-12].
  double predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// 1 iff predict_proba(x) >= threshold.
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x, double threshold = 0.5) const;

  /// Scores / hard labels of every row.
  Eigen::VectorXd linear_scores(const RowMatrix& x) const;
  std::vector<int> predict_all(const RowMatrix& x, double threshold = 0.5) const;

  nlohmann::json to_json() const;
  static LinearClassifier from_json(const nlohmann::json& j);

  bool operator==(const LinearClassifier&) const = default;

 private:
  void check_dim(Eigen::Index d) const;

  Eigen::VectorXd theta_;
  double intercept_ = 0.0;
  std::size_t trained_on_ = 0;
};

struct FitResult {
  LinearClassifier model;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  /// Regularized loss at the start point and after each accepted step.
  std::vector<double> loss_history;
};

/// Sum of log-losses plus (reg/2)*||theta||^2. The intercept is not penalized.
double regularized_loss(const RowMatrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                        double intercept, double reg_strength);

/// Gradient of regularized_loss; the last entry is the intercept derivative.
Eigen::VectorXd loss_gradient(const RowMatrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                              double intercept, double reg_strength);

/// Newton iterations with step halving, starting from zero. Labels are 0/1.
FitResult fit(const RowMatrix& x, const Eigen::VectorXd& y, const TrainOptions& opts = {});

LinearClassifier train(const RowMatrix& x, const Eigen::VectorXd& y, const TrainOptions& opts = {});
LinearClassifier train(std::span<const LabeledRecord> records, const TrainOptions& opts = {});

}  // namespace fal::glm
