#include "fal/glm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fal::glm {
namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_inputs(const RowMatrix& x, const Eigen::VectorXd& y, const TrainOptions& opts) {
  if (x.rows() == 0) throw GlmError("train: no labeled records");
  if (x.cols() == 0) throw GlmError("train: no features");
  if (y.size() != x.rows()) throw GlmError("train: label count does not match rows");
  if (!(opts.reg_strength > 0.0)) throw GlmError("train: reg_strength must be positive");
  if (opts.max_iter < 0) throw GlmError("train: max_iter must be nonnegative");
  if (!x.allFinite()) throw GlmError("train: non-finite feature value");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0) throw GlmError("train: labels must be 0 or 1");
}

// Loss given precomputed scores.
double loss_from_scores(const Eigen::VectorXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                        double reg) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z[i]) - y[i] * z[i];
  return loss + 0.5 * reg * theta.squaredNorm();
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_probability(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

LinearClassifier::LinearClassifier(Eigen::VectorXd theta, double intercept, std::size_t trained_on)
    : theta_(std::move(theta)), intercept_(intercept), trained_on_(trained_on) {
  if (!theta_.allFinite() || !std::isfinite(intercept_)) throw GlmError("classifier: non-finite weights");
}

LinearClassifier LinearClassifier::zeros(std::size_t d) {
  return LinearClassifier(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), 0.0, 0);
}

void LinearClassifier::check_dim(Eigen::Index d) const {
  if (d != theta_.size())
    throw GlmError("classifier: dimension mismatch (model " + std::to_string(theta_.size()) + ", input " +
                   std::to_string(d) + ")");
}

double LinearClassifier::linear_score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x.size());
  return theta_.dot(x) + intercept_;
}

double LinearClassifier::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return clamp_probability(sigmoid(linear_score(x)));
}

int LinearClassifier::predict(const Eigen::Ref<const Eigen::VectorXd>& x, double threshold) const {
  return predict_proba(x) >= threshold ? 1 : 0;
}

Eigen::VectorXd LinearClassifier::linear_scores(const RowMatrix& x) const {
  check_dim(x.cols());
  Eigen::VectorXd z = x * theta_;
  z.array() += intercept_;
  return z;
}

std::vector<int> LinearClassifier::predict_all(const RowMatrix& x, double threshold) const {
  const Eigen::VectorXd z = linear_scores(x);
  std::vector<int> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i)
    out[static_cast<std::size_t>(i)] = clamp_probability(sigmoid(z[i])) >= threshold ? 1 : 0;
  return out;
}

nlohmann::json LinearClassifier::to_json() const {
  return {{"theta", std::vector<double>(theta_.data(), theta_.data() + theta_.size())},
          {"intercept", intercept_},
          {"d", theta_.size()},
          {"trained_on", trained_on_}};
}

LinearClassifier LinearClassifier::from_json(const nlohmann::json& j) {
  try {
    const auto w = j.at("theta").get<std::vector<double>>();
    const auto d = j.at("d").get<std::size_t>();
    if (w.size() != d) throw GlmError("classifier json: theta length does not match d");
    return LinearClassifier(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())),
                            j.at("intercept").get<double>(), j.value("trained_on", std::size_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw GlmError(std::string("classifier json: ") + e.what());
  }
}

double regularized_loss(const RowMatrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                        double intercept, double reg_strength) {
  Eigen::VectorXd z = x * theta;
  z.array() += intercept;
  return loss_from_scores(z, y, theta, reg_strength);
}

Eigen::VectorXd loss_gradient(const RowMatrix& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                              double intercept, double reg_strength) {
  Eigen::VectorXd z = x * theta;
  z.array() += intercept;
  Eigen::VectorXd r(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) r[i] = sigmoid(z[i]) - y[i];
  Eigen::VectorXd g(theta.size() + 1);
  g.head(theta.size()) = x.transpose() * r + reg_strength * theta;
  g[theta.size()] = r.sum();
  return g;
}

FitResult fit(const RowMatrix& x, const Eigen::VectorXd& y, const TrainOptions& opts) {
  check_inputs(x, y, opts);
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double reg = opts.reg_strength;

  // Design with a trailing intercept column.
  RowMatrix xa(n, d + 1);
  xa.leftCols(d) = x;
  xa.col(d).setOnes();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p(n), w(n), grad(d + 1), candidate(d + 1), z_candidate(n);
  Eigen::MatrixXd hessian(d + 1, d + 1);

  FitResult result;
  double loss = loss_from_scores(z, y, beta.head(d), reg);
  result.loss_history.push_back(loss);

  auto gradient_at = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(z[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    grad.noalias() = xa.transpose() * (p - y);
    grad.head(d) += reg * beta.head(d);
    return grad.norm();
  };

  double gnorm = gradient_at();
  while (true) {
    if (gnorm <= opts.tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= opts.max_iter) break;

    hessian.noalias() = xa.transpose() * (xa.array().colwise() * w.array()).matrix();
    hessian.diagonal().head(d).array() += reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      // Intercept curvature can underflow on one-class data; a tiny ridge keeps the solve defined.
      hessian.diagonal().array() += 1e-10;
      step = hessian.ldlt().solve(grad);
      if (!step.allFinite()) break;
    }

    double scale = 1.0;
    bool accepted = false;
    double loss_candidate = loss;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = beta - scale * step;
      z_candidate.noalias() = xa * candidate;
      loss_candidate = loss_from_scores(z_candidate, y, candidate.head(d), reg);
      if (loss_candidate <= loss) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left

    beta = candidate;
    z = z_candidate;
    loss = loss_candidate;
    result.loss_history.push_back(loss);
    ++result.iterations;
    gnorm = gradient_at();
  }

  result.gradient_norm = gnorm;
  result.model = LinearClassifier(beta.head(d), beta[d], static_cast<std::size_t>(n));
  return result;
}

LinearClassifier train(const RowMatrix& x, const Eigen::VectorXd& y, const TrainOptions& opts) {
  return fit(x, y, opts).model;
}

LinearClassifier train(std::span<const LabeledRecord> records, const TrainOptions& opts) {
  if (records.empty()) throw GlmError("train: no labeled records");
  const auto d = records.front().x.size();
  RowMatrix x(static_cast<Eigen::Index>(records.size()), d);
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].x.size() != d) throw GlmError("train: inconsistent feature dimension");
    x.row(static_cast<Eigen::Index>(i)) = records[i].x.transpose();
    y[static_cast<Eigen::Index>(i)] = records[i].y;
  }
  return train(x, y, opts);
}

}  // namespace fal::glm
