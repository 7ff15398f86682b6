#include "fal/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fal::strategies {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Random: return "random";
    case Strategy::Entropy: return "entropy";
    case Strategy::Fal: return "fal";
    case Strategy::Fbc: return "fbc";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::Random, Strategy::Entropy, Strategy::Fal, Strategy::Fbc})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

CandidateSet CandidateSet::from_pool(const Pool& pool, std::span<const std::size_t> ids) {
  CandidateSet set;
  set.ids.assign(ids.begin(), ids.end());
  set.x.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(pool.dim()));
  set.s.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0 && ids[i] <= ids[i - 1]) throw SelectionError("candidate ids must be strictly ascending");
    if (!pool.is_unlabeled(ids[i])) throw SelectionError("candidate " + std::to_string(ids[i]) + " is not unlabeled");
    set.x.row(static_cast<Eigen::Index>(i)) = pool.features(ids[i]).transpose();
    set.s.push_back(pool.sensitive(ids[i]));
  }
  return set;
}

LabeledSet LabeledSet::from_records(std::span<const LabeledRecord> records) {
  LabeledSet set;
  const Eigen::Index d = records.empty() ? 0 : records.front().x.size();
  set.x.resize(static_cast<Eigen::Index>(records.size()), d);
  set.y.resize(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    set.x.row(static_cast<Eigen::Index>(i)) = records[i].x.transpose();
    set.y[static_cast<Eigen::Index>(i)] = records[i].y;
  }
  return set;
}

double entropy(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("entropy: probability outside [0, 1]");
    total += p;
  }
  if (probs.empty() || std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double binary_entropy(double p) {
  const double q = glm::clamp_probability(p);
  return -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
}

void normalize_min_max(std::vector<double>& values) {
  if (values.empty()) return;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  for (double& v : values) v = (v - min) / range;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw SelectionError("argmax over an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

namespace {

std::vector<double> candidate_entropies(const CandidateSet& candidates, const glm::LinearClassifier& clf) {
  const Eigen::VectorXd z = clf.linear_scores(candidates.x);
  std::vector<double> h(candidates.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = binary_entropy(glm::sigmoid(z[static_cast<Eigen::Index>(i)]));
  return h;
}

// L with one spare row that holds the hypothetical candidate.
class HypotheticalTrainer {
 public:
  explicit HypotheticalTrainer(const LabeledSet& labeled)
      : n_(labeled.x.rows()), x_(labeled.x.rows() + 1, labeled.x.cols()), y_(labeled.y.size() + 1) {
    if (n_ == 0) throw SelectionError("expected fairness needs at least one labeled record");
    x_.topRows(n_) = labeled.x;
    y_.head(n_) = labeled.y;
  }

  double disparity(const Eigen::Ref<const Eigen::VectorXd>& candidate, int k, const Population& reference,
                   const FairnessEval& eval) {
    x_.row(n_) = candidate.transpose();
    y_[n_] = k;
    const auto model = glm::train(x_, y_, eval.train);
    return fairness::evaluate(model, reference, eval.measure, eval.threshold);
  }

  double expected(const Eigen::Ref<const Eigen::VectorXd>& candidate, double p1, const Population& reference,
                  const FairnessEval& eval) {
    const double f0 = disparity(candidate, 0, reference, eval);
    const double f1 = disparity(candidate, 1, reference, eval);
    return f0 * (1.0 - p1) + f1 * p1;
  }

 private:
  Eigen::Index n_;
  RowMatrix x_;
  Eigen::VectorXd y_;
};

}  // namespace

std::size_t select_entropy(const CandidateSet& candidates, const glm::LinearClassifier& clf) {
  if (candidates.empty()) throw SelectionError("select_entropy: empty pool");
  const auto h = candidate_entropies(candidates, clf);
  return candidates.ids[argmax_first(h)];
}

std::size_t select_random(std::span<const std::size_t> ids, Rng& rng) {
  if (ids.empty()) throw SelectionError("select_random: empty pool");
  return ids[uniform_index(rng, ids.size())];
}

double expected_fairness(const Eigen::VectorXd& candidate_x, const LabeledSet& labeled,
                         const glm::LinearClassifier& clf, const Population& reference, const FairnessEval& eval) {
  HypotheticalTrainer trainer(labeled);
  // Weights use the unclamped probability; clamping only guards logarithms.
  const double p1 = glm::sigmoid(clf.linear_score(candidate_x));
  return trainer.expected(candidate_x, p1, reference, eval);
}

Selection select_fal(const CandidateSet& candidates, const LabeledSet& labeled, const glm::LinearClassifier& clf,
                     const Population& reference, const FairnessEval& eval, double alpha) {
  if (candidates.empty()) throw SelectionError("select_fal: empty pool");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw SelectionError("select_fal: alpha must lie in [0, 1]");

  const std::size_t m = candidates.size();
  std::vector<double> h = candidate_entropies(candidates, clf);
  std::vector<double> f(m, 0.0);
  if (alpha < 1.0) {
    const double current = fairness::evaluate(clf, reference, eval.measure, eval.threshold);
    const Eigen::VectorXd z = clf.linear_scores(candidates.x);
    HypotheticalTrainer trainer(labeled);
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double p1 = glm::sigmoid(z[row]);
      f[i] = current - trainer.expected(candidates.x.row(row).transpose(), p1, reference, eval);
    }
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

double population_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("covariance: length mismatch");
  if (a.empty()) throw std::invalid_argument("covariance: empty input");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / n;
}

}  // namespace fal::strategies
