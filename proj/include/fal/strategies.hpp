#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fal/fairness.hpp"
#include "fal/glm.hpp"
#include "fal/pool.hpp"
#include "fal/rng.hpp"

namespace fal::strategies {

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { Random, Entropy, Fal, Fbc };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Candidate points (features + sensitive attribute) in ascending id order.
struct CandidateSet {
  std::vector<std::size_t> ids;
  RowMatrix x;
  std::vector<int> s;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }

  /// `ids` must be ascending and unlabeled in `pool`.
  static CandidateSet from_pool(const Pool& pool, std::span<const std::size_t> ids);
  static CandidateSet from_pool(const Pool& pool) { return from_pool(pool, pool.unlabeled()); }
};

/// Labeled pool as a design matrix.
struct LabeledSet {
  RowMatrix x;
  Eigen::VectorXd y;

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  static LabeledSet from_records(std::span<const LabeledRecord> records);
};

/// One row of a selection score table.
struct SelectionScore {
  std::size_t candidate_id = 0;
  double raw_entropy = 0.0;
  double raw_fairness = 0.0;  // fairness improvement before normalization
  double entropy_term = 0.0;  // normalized to [0, 1]
  double fairness_term = 0.0;
  double combined = 0.0;
};

struct Selection {
  std::size_t id = 0;
  std::vector<SelectionScore> scores;
};

/// Shannon entropy in nats; probs must sum to 1 within 1e-9.
double entropy(std::span<const double> probs);

/// Entropy of (1 - p, p) after clamping p.
double binary_entropy(double p);

/// Min-max normalization in place; a constant vector becomes all zeros.
void normalize_min_max(std::vector<double>& values);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax_first(std::span<const double> values);

/// Maximum-entropy candidate, ties to the smallest id.
std::size_t select_entropy(const CandidateSet& candidates, const glm::LinearClassifier& clf);

/// Uniform over `ids`.
std::size_t select_random(std::span<const std::size_t> ids, Rng& rng);

struct FairnessEval {
  fairness::Measure measure = fairness::Measure::MutualInfo;
  double threshold = 0.5;
  glm::TrainOptions train;
};

/// Expected disparity on `reference` of the model retrained on L plus the
/// candidate, weighting each hypothetical label k by P(y = k | x) from `clf`.
double expected_fairness(const Eigen::VectorXd& candidate_x, const LabeledSet& labeled,
                         const glm::LinearClassifier& clf, const Population& reference, const FairnessEval& eval);

/// Chooses argmax alpha * H~ + (1 - alpha) * F~ where H is the entropy under
/// `clf`, F = F(clf) - E[F] is the expected fairness improvement, and ~ is
/// min-max normalization over the candidates. Expected fairness is skipped
/// when alpha == 1 (fairness columns of the table are then 0).
Selection select_fal(const CandidateSet& candidates, const LabeledSet& labeled, const glm::LinearClassifier& clf,
                     const Population& reference, const FairnessEval& eval, double alpha);

/// Population covariance of two equally long sequences.
double population_covariance(std::span<const double> a, std::span<const double> b);

// ---- covariance-based selection --------------------------------------------

/// Running sums over L for O(1) covariance updates.
struct CovAggregates {
  std::size_t n = 0;
  double g_y = 0.0;
  Eigen::VectorXd g_x;  // sum of x_i
  Eigen::VectorXd g_z;  // sum of x_i * y

  CovAggregates() = default;
  explicit CovAggregates(std::size_t d)
      : g_x(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))),
        g_z(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d))) {}

  std::size_t dim() const { return static_cast<std::size_t>(g_x.size()); }
  void add(const Eigen::Ref<const Eigen::VectorXd>& x, int y);
  static CovAggregates from_records(std::span<const LabeledRecord> records, std::size_t d);
};

/// cov(S, x_i) over the initial pool; fixed for the whole run.
struct SensitiveCov {
  Eigen::VectorXd cov_sx;
};

SensitiveCov init_sensitive_cov(const Population& initial_pool);

/// Both sides of cov(S, theta^T x + b) = theta^T cov(S, X) over `pop`.
struct ScoreCovIdentity {
  double direct = 0.0;        // covariance of S with the linear scores
  double via_features = 0.0;  // theta . cov(S, X)
};

ScoreCovIdentity score_cov_identity(const Population& pop, const glm::LinearClassifier& clf);

CovAggregates update_aggregates(CovAggregates agg, const Eigen::Ref<const Eigen::VectorXd>& x, int y);

/// cov_L(x_i, y) from the aggregates.
double cov_from_aggregates(const CovAggregates& agg, std::size_t i);

/// cov(x_i, y) over L plus (x, k), in O(1). Bit-identical to recomputing
/// after update_aggregates.
double hypothetical_cov(const CovAggregates& agg, const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t i, int k);

/// Per-feature E[|cov_i| - |cov_{i,k}|] under P(y = k | x) from `clf`.
Eigen::VectorXd expected_cov_improvement(const CovAggregates& agg, const Eigen::Ref<const Eigen::VectorXd>& x,
                                         const glm::LinearClassifier& clf);

/// sum_i m_i * E[cov improvement]_i with m_i = |theta_i * cov(S, x_i)|, or the
/// signed product when use_abs is false. The intercept does not take part.
double fbc_score(const Eigen::Ref<const Eigen::VectorXd>& x, const CovAggregates& agg,
                 const glm::LinearClassifier& clf, const SensitiveCov& sens, bool use_abs = true);

Selection select_fbc(const CandidateSet& candidates, const CovAggregates& agg, const glm::LinearClassifier& clf,
                     const SensitiveCov& sens, double alpha, bool use_abs = true);

}  // namespace fal::strategies
