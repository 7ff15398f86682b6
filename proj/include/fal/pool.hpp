#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fal/dataset.hpp"

namespace fal {

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledRecord {
  std::size_t id = 0;
  Eigen::VectorXd x;
  int s = 0;
  int y = 0;
};

/// Features and sensitive attribute of a reference population (no labels).
struct Population {
  RowMatrix x;
  std::vector<int> s;
  std::vector<std::size_t> ids;

  std::size_t size() const { return s.size(); }
  static Population from_points(std::span<const DataPoint> points);
};

/// Dataset-backed labeling oracle. Labels are fixed at construction, so the
/// same id always answers the same label.
class Oracle {
 public:
  explicit Oracle(std::vector<int> labels) : labels_(std::move(labels)) {}

  int label(std::size_t id);
  std::size_t calls_made() const { return calls_; }

 private:
  std::vector<int> labels_;
  std::size_t calls_ = 0;
};

/// Unlabeled pool U, labeled pool L, the frozen snapshot V of the initial U
/// and the remaining budget. Single owner: one selection loop mutates a pool.
class Pool {
 public:
  /// Snapshots every training point into V, then reveals `n_seed_labels`
  /// random points for free (they do not consume budget).
  Pool(const Dataset& train, std::size_t n_seed_labels, std::size_t budget, std::uint64_t seed);

  /// Ids still unlabeled, ascending.
  const std::vector<std::size_t>& unlabeled() const { return unlabeled_; }
  const std::vector<LabeledRecord>& labeled() const { return labeled_; }
  const Population& verification() const { return verification_; }
  std::size_t budget_remaining() const { return budget_; }
  std::size_t oracle_calls() const { return oracle_.calls_made(); }
  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t size() const { return s_.size(); }
  bool is_unlabeled(std::size_t id) const { return id < in_u_.size() && in_u_[id]; }

  Eigen::VectorXd features(std::size_t id) const { return x_.row(static_cast<Eigen::Index>(id)).transpose(); }
  int sensitive(std::size_t id) const { return s_.at(id); }

  /// Buys the label of `id`, moving it from U to L.
  int query(std::size_t id);

 private:
  void move_to_labeled(std::size_t id, int y);

  RowMatrix x_;
  std::vector<int> s_;
  Oracle oracle_;
  std::vector<std::size_t> unlabeled_;
  std::vector<char> in_u_;
  std::vector<LabeledRecord> labeled_;
  Population verification_;
  std::size_t budget_;
};

}  // namespace fal
