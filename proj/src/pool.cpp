#include "fal/pool.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "fal/rng.hpp"

namespace fal {

Population Population::from_points(std::span<const DataPoint> points) {
  Population pop;
  const Eigen::Index d = points.empty() ? 0 : points.front().x.size();
  pop.x.resize(static_cast<Eigen::Index>(points.size()), d);
  pop.s.reserve(points.size());
  pop.ids.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    pop.x.row(static_cast<Eigen::Index>(i)) = points[i].x.transpose();
    pop.s.push_back(points[i].s);
    pop.ids.push_back(points[i].id);
  }
  return pop;
}

int Oracle::label(std::size_t id) {
  if (id >= labels_.size()) throw PoolError("oracle: unknown id " + std::to_string(id));
  ++calls_;
  return labels_[id];
}

namespace {
std::vector<int> labels_of(const Dataset& ds) {
  std::vector<int> y;
  y.reserve(ds.size());
  for (const auto& p : ds.points) y.push_back(p.y);
  return y;
}
}  // namespace

Pool::Pool(const Dataset& train, std::size_t n_seed_labels, std::size_t budget, std::uint64_t seed)
    : x_(train.feature_matrix()),
      oracle_(labels_of(train)),
      in_u_(train.size(), 1),
      verification_(Population::from_points(train.points)),
      budget_(budget) {
  if (n_seed_labels > train.size())
    throw PoolError("init_pool: " + std::to_string(n_seed_labels) + " seed labels requested from a pool of " +
                    std::to_string(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.points[i].id != i) throw PoolError("init_pool: dataset ids must be dense 0..n-1");
    s_.push_back(train.points[i].s);
  }
  unlabeled_.resize(train.size());
  std::iota(unlabeled_.begin(), unlabeled_.end(), std::size_t{0});

  std::vector<std::size_t> order = unlabeled_;
  Rng rng = make_rng(seed, 0x5eed);
  // Partial Fisher-Yates: the first n_seed_labels slots are the seed set.
  for (std::size_t i = 0; i < n_seed_labels; ++i) {
    const std::size_t j = i + uniform_index(rng, order.size() - i);
    std::swap(order[i], order[j]);
  }
  for (std::size_t i = 0; i < n_seed_labels; ++i) move_to_labeled(order[i], train.points[order[i]].y);
}

void Pool::move_to_labeled(std::size_t id, int y) {
  in_u_[id] = 0;
  unlabeled_.erase(std::lower_bound(unlabeled_.begin(), unlabeled_.end(), id));
  labeled_.push_back({id, features(id), s_[id], y});
}

int Pool::query(std::size_t id) {
  if (!is_unlabeled(id)) throw PoolError("oracle_label: id " + std::to_string(id) + " is not in the unlabeled pool");
  if (budget_ == 0) throw PoolError("oracle_label: labeling budget exhausted");
  const int y = oracle_.label(id);
  --budget_;
  move_to_labeled(id, y);
  return y;
}

}  // namespace fal
