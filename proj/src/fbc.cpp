#include <cmath>
#include <string>

#include "fal/strategies.hpp"

namespace fal::strategies {
namespace {

void check_feature(const CovAggregates& agg, std::size_t i) {
  if (i >= agg.dim()) throw std::out_of_range("covariance aggregates: feature " + std::to_string(i) + " out of range");
}

// Expression order shared by cov_from_aggregates and hypothetical_cov.
double cov_formula(double g_z, double g_x, double g_y, double n) { return g_z / n - (g_x / n) * (g_y / n); }

// Expected covariance improvement for one candidate with |cov_i| precomputed.
double improvement(const CovAggregates& agg, const Eigen::VectorXd& abs_cov,
                   const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t i, double p1) {
  const double c = abs_cov[static_cast<Eigen::Index>(i)];
  return (c - std::abs(hypothetical_cov(agg, x, i, 0))) * (1.0 - p1) +
         (c - std::abs(hypothetical_cov(agg, x, i, 1))) * p1;
}

Eigen::VectorXd abs_covariances(const CovAggregates& agg) {
  Eigen::VectorXd out(agg.g_x.size());
  for (std::size_t i = 0; i < agg.dim(); ++i) out[static_cast<Eigen::Index>(i)] = std::abs(cov_from_aggregates(agg, i));
  return out;
}

Eigen::VectorXd multipliers(const glm::LinearClassifier& clf, const SensitiveCov& sens, bool use_abs) {
  if (clf.theta().size() != sens.cov_sx.size()) throw std::invalid_argument("fbc: dimension mismatch");
  Eigen::VectorXd m = clf.theta().cwiseProduct(sens.cov_sx);
  if (use_abs) m = m.cwiseAbs();
  return m;
}

double score_with(const CovAggregates& agg, const Eigen::VectorXd& abs_cov, const Eigen::VectorXd& mult,
                  const Eigen::Ref<const Eigen::VectorXd>& x, double p1) {
  double total = 0.0;
  for (std::size_t i = 0; i < agg.dim(); ++i)
    total += mult[static_cast<Eigen::Index>(i)] * improvement(agg, abs_cov, x, i, p1);
  return total;
}

}  // namespace

void CovAggregates::add(const Eigen::Ref<const Eigen::VectorXd>& x, int y) {
  if (static_cast<std::size_t>(x.size()) != dim()) throw std::invalid_argument("update_aggregates: dimension mismatch");
  const double yd = static_cast<double>(y);
  n += 1;
  g_y += yd;
  g_x += x;
  for (Eigen::Index i = 0; i < x.size(); ++i) g_z[i] += x[i] * yd;
}

CovAggregates CovAggregates::from_records(std::span<const LabeledRecord> records, std::size_t d) {
  CovAggregates agg(d);
  for (const auto& r : records) agg.add(r.x, r.y);
  return agg;
}

CovAggregates update_aggregates(CovAggregates agg, const Eigen::Ref<const Eigen::VectorXd>& x, int y) {
  agg.add(x, y);
  return agg;
}

double cov_from_aggregates(const CovAggregates& agg, std::size_t i) {
  if (agg.n == 0) throw std::invalid_argument("cov_from_aggregates: no labeled records");
  check_feature(agg, i);
  const auto k = static_cast<Eigen::Index>(i);
  return cov_formula(agg.g_z[k], agg.g_x[k], agg.g_y, static_cast<double>(agg.n));
}

double hypothetical_cov(const CovAggregates& agg, const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t i, int k) {
  if (agg.n == 0) throw std::invalid_argument("hypothetical_cov: no labeled records");
  check_feature(agg, i);
  const auto j = static_cast<Eigen::Index>(i);
  const double kd = static_cast<double>(k);
  return cov_formula(agg.g_z[j] + x[j] * kd, agg.g_x[j] + x[j], agg.g_y + kd, static_cast<double>(agg.n + 1));
}

SensitiveCov init_sensitive_cov(const Population& initial_pool) {
  const std::size_t n = initial_pool.size();
  if (n == 0) throw std::invalid_argument("init_sensitive_cov: empty pool");
  std::vector<double> s(initial_pool.s.begin(), initial_pool.s.end());
  std::vector<double> col(n);
  SensitiveCov out;
  out.cov_sx.resize(initial_pool.x.cols());
  for (Eigen::Index j = 0; j < initial_pool.x.cols(); ++j) {
    for (std::size_t r = 0; r < n; ++r) col[r] = initial_pool.x(static_cast<Eigen::Index>(r), j);
    out.cov_sx[j] = population_covariance(s, col);
  }
  return out;
}

ScoreCovIdentity score_cov_identity(const Population& pop, const glm::LinearClassifier& clf) {
  if (static_cast<std::size_t>(pop.x.cols()) != clf.dim())
    throw std::invalid_argument("score_cov_identity: dimension mismatch");
  const Eigen::VectorXd scores = clf.linear_scores(pop.x);
  std::vector<double> s(pop.s.begin(), pop.s.end());
  ScoreCovIdentity out;
  out.direct = population_covariance(s, std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())));
  out.via_features = clf.theta().dot(init_sensitive_cov(pop).cov_sx);
  return out;
}

Eigen::VectorXd expected_cov_improvement(const CovAggregates& agg, const Eigen::Ref<const Eigen::VectorXd>& x,
                                         const glm::LinearClassifier& clf) {
  if (static_cast<std::size_t>(x.size()) != agg.dim()) throw std::invalid_argument("expected_cov_improvement: dimension mismatch");
  const Eigen::VectorXd abs_cov = abs_covariances(agg);
  const double p1 = glm::sigmoid(clf.linear_score(x));
  Eigen::VectorXd out(x.size());
  for (std::size_t i = 0; i < agg.dim(); ++i) out[static_cast<Eigen::Index>(i)] = improvement(agg, abs_cov, x, i, p1);
  return out;
}

double fbc_score(const Eigen::Ref<const Eigen::VectorXd>& x, const CovAggregates& agg,
                 const glm::LinearClassifier& clf, const SensitiveCov& sens, bool use_abs) {
  if (static_cast<std::size_t>(x.size()) != agg.dim()) throw std::invalid_argument("fbc_score: dimension mismatch");
  const Eigen::VectorXd mult = multipliers(clf, sens, use_abs);
  const double p1 = glm::sigmoid(clf.linear_score(x));
  return score_with(agg, abs_covariances(agg), mult, x, p1);
}

Selection select_fbc(const CandidateSet& candidates, const CovAggregates& agg, const glm::LinearClassifier& clf,
                     const SensitiveCov& sens, double alpha, bool use_abs) {
  if (candidates.empty()) throw SelectionError("select_fbc: empty pool");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw SelectionError("select_fbc: alpha must lie in [0, 1]");
  if (static_cast<std::size_t>(candidates.x.cols()) != agg.dim()) throw std::invalid_argument("select_fbc: dimension mismatch");

  const std::size_t m = candidates.size();
  const Eigen::VectorXd z = clf.linear_scores(candidates.x);
  const Eigen::VectorXd abs_cov = abs_covariances(agg);
  const Eigen::VectorXd mult = multipliers(clf, sens, use_abs);

  std::vector<double> h(m), f(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double p1 = glm::sigmoid(z[row]);
    h[i] = binary_entropy(p1);
    f[i] = score_with(agg, abs_cov, mult, candidates.x.row(row).transpose(), p1);
  }

  Selection sel;
  sel.scores.resize(m);
  for (std::size_t i = 0; i < m; ++i) sel.scores[i] = {candidates.ids[i], h[i], f[i], 0.0, 0.0, 0.0};
  normalize_min_max(h);
  normalize_min_max(f);
  std::vector<double> combined(m);
  for (std::size_t i = 0; i < m; ++i) {
    combined[i] = alpha * h[i] + (1.0 - alpha) * f[i];
    sel.scores[i].entropy_term = h[i];
    sel.scores[i].fairness_term = f[i];
    sel.scores[i].combined = combined[i];
  }
  sel.id = candidates.ids[argmax_first(combined)];
  return sel;
}

}  // namespace fal::strategies
