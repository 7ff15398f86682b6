#pragma once

// Test-side generators and brute-force oracles. Nothing here calls the
// library's selection, fairness or aggregate code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fal/dataset.hpp"
#include "fal/fairness.hpp"
#include "fal/glm.hpp"
#include "fal/pool.hpp"
#include "fal/rng.hpp"

namespace oracle {

using fal::RowMatrix;

// n points in d dims; S shifts the first feature, y is a noisy logistic label.
inline fal::Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double s_shift = 0.8) {
  fal::Rng rng = fal::make_rng(seed, 0x7e57);
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> s(n), y(n);
  std::vector<double> w(d);
  for (auto& v : w) v = fal::standard_normal(rng);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = fal::uniform01(rng) < 0.45 ? 1 : 0;
    double z = 0.2;
    for (std::size_t j = 0; j < d; ++j) {
      double v = fal::standard_normal(rng);
      if (j == 0) v += s_shift * s[i];
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      z += w[j] * v;
    }
    y[i] = fal::uniform01(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  return fal::make_dataset(names, x, s, y);
}

inline double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double score(const fal::glm::LinearClassifier& clf, const double* x, std::size_t d) {
  double z = clf.intercept();
  for (std::size_t j = 0; j < d; ++j) z += clf.theta()[static_cast<Eigen::Index>(j)] * x[j];
  return z;
}

struct Counts {
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;  // (s, yhat)
};

inline Counts count(const std::vector<int>& yhat, const std::vector<int>& s) {
  Counts c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 0 && yhat[i] == 0) c.n00 += 1;
    if (s[i] == 0 && yhat[i] == 1) c.n01 += 1;
    if (s[i] == 1 && yhat[i] == 0) c.n10 += 1;
    if (s[i] == 1 && yhat[i] == 1) c.n11 += 1;
  }
  return c;
}

// I(S; yhat) summed cell by cell.
inline double mutual_info(const Counts& c) {
  const double n = c.n00 + c.n01 + c.n10 + c.n11;
  const double cell[2][2] = {{c.n00 / n, c.n01 / n}, {c.n10 / n, c.n11 / n}};
  double total = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int y = 0; y < 2; ++y) {
      const double ps = cell[s][0] + cell[s][1];
      const double py = cell[0][y] + cell[1][y];
      if (cell[s][y] > 0) total += cell[s][y] * std::log(cell[s][y] / (ps * py));
    }
  return std::max(total, 0.0);
}

// Disparity of a model's hard predictions on a population, from raw counts.
inline double disparity(const fal::glm::LinearClassifier& clf, const fal::Population& v, fal::fairness::Measure m,
                        double threshold) {
  const std::size_t d = static_cast<std::size_t>(v.x.cols());
  std::vector<int> yhat(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    yhat[i] = sig(score(clf, v.x.row(static_cast<Eigen::Index>(i)).data(), d)) >= threshold ? 1 : 0;
  const Counts c = count(yhat, v.s);
  const double n = c.n00 + c.n01 + c.n10 + c.n11;
  const double acc0 = c.n01 / (c.n00 + c.n01), acc1 = c.n11 / (c.n10 + c.n11);
  const double comp = c.n11 / (c.n01 + c.n11), base = (c.n10 + c.n11) / n;
  using fal::fairness::Measure;
  switch (m) {
    case Measure::MutualInfo: return mutual_info(c);
    case Measure::Covariance: return std::abs(c.n00 * c.n11 - c.n01 * c.n10) / (n * n);
    case Measure::AbsDiffAcceptance: return std::abs(acc0 - acc1);
    case Measure::AbsDiffComposition: return std::abs(comp - base);
    case Measure::RatioAcceptance: return 1.0 - std::min(acc0 / acc1, acc1 / acc0);
    case Measure::RatioComposition: return 1.0 - std::min(comp / base, base / comp);
  }
  return NAN;
}

struct State {
  RowMatrix lx;
  Eigen::VectorXd ly;
  std::vector<std::size_t> ids;  // candidates, ascending
  RowMatrix ux;
  fal::Population v;
};

inline State state_of(const fal::Pool& pool) {
  State st;
  const auto& lab = pool.labeled();
  const auto d = static_cast<Eigen::Index>(pool.dim());
  st.lx.resize(static_cast<Eigen::Index>(lab.size()), d);
  st.ly.resize(static_cast<Eigen::Index>(lab.size()));
  for (std::size_t i = 0; i < lab.size(); ++i) {
    st.lx.row(static_cast<Eigen::Index>(i)) = lab[i].x.transpose();
    st.ly[static_cast<Eigen::Index>(i)] = lab[i].y;
  }
  st.ids = pool.unlabeled();
  st.ux.resize(static_cast<Eigen::Index>(st.ids.size()), d);
  for (std::size_t i = 0; i < st.ids.size(); ++i) st.ux.row(static_cast<Eigen::Index>(i)) = pool.features(st.ids[i]).transpose();
  st.v = pool.verification();
  return st;
}

// Retrain on L plus (x, k) and measure on V, for both k; weight by P(y=1|x).
inline double expected_fairness(const State& st, const Eigen::VectorXd& x, const fal::glm::LinearClassifier& clf,
                                fal::fairness::Measure m, double threshold, const fal::glm::TrainOptions& opts) {
  const Eigen::Index n = st.lx.rows();
  double total = 0.0;
  const double p1 = sig(score(clf, x.data(), static_cast<std::size_t>(x.size())));
  for (int k = 0; k < 2; ++k) {
    RowMatrix ax(n + 1, st.lx.cols());
    Eigen::VectorXd ay(n + 1);
    for (Eigen::Index r = 0; r < n; ++r) {
      ax.row(r) = st.lx.row(r);
      ay[r] = st.ly[r];
    }
    ax.row(n) = x.transpose();
    ay[n] = k;
    const auto model = fal::glm::train(ax, ay, opts);
    total += disparity(model, st.v, m, threshold) * (k == 1 ? p1 : 1.0 - p1);
  }
  return total;
}

inline double entropy2(double p) {
  p = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

inline std::vector<double> minmax(std::vector<double> v) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  for (auto& e : v) e = hi > lo ? (e - lo) / (hi - lo) : 0.0;
  return v;
}

inline std::size_t pick(const std::vector<std::size_t>& ids, const std::vector<double>& h, const std::vector<double>& f,
                        double alpha) {
  const auto hn = minmax(h), fn = minmax(f);
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double v = alpha * hn[i] + (1 - alpha) * fn[i];
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return ids[best];
}

inline std::size_t select_fal(const State& st, const fal::glm::LinearClassifier& clf, fal::fairness::Measure m,
                              double threshold, const fal::glm::TrainOptions& opts, double alpha) {
  const std::size_t d = static_cast<std::size_t>(st.ux.cols());
  std::vector<double> h, f;
  const double now = alpha < 1.0 ? disparity(clf, st.v, m, threshold) : 0.0;
  for (std::size_t i = 0; i < st.ids.size(); ++i) {
    const Eigen::VectorXd x = st.ux.row(static_cast<Eigen::Index>(i)).transpose();
    h.push_back(entropy2(sig(score(clf, x.data(), d))));
    f.push_back(alpha < 1.0 ? now - expected_fairness(st, x, clf, m, threshold, opts) : 0.0);
  }
  return pick(st.ids, h, f, alpha);
}

// E[ab] - E[a]E[b]
inline double cov(const std::vector<double>& a, const std::vector<double>& b) {
  double sa = 0, sb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
  }
  const double n = static_cast<double>(a.size());
  return sab / n - (sa / n) * (sb / n);
}

inline std::vector<double> column(const RowMatrix& x, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) out[static_cast<std::size_t>(r)] = x(r, j);
  return out;
}

// FbC by recomputing every covariance from the labeled rows.
inline double fbc_score(const State& st, const Eigen::VectorXd& x, const fal::glm::LinearClassifier& clf,
                        bool use_abs) {
  const std::size_t d = static_cast<std::size_t>(x.size());
  const double p1 = sig(score(clf, x.data(), d));
  std::vector<double> s(st.v.s.begin(), st.v.s.end());
  std::vector<double> y(st.ly.data(), st.ly.data() + st.ly.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    double mult = clf.theta()[j] * cov(s, column(st.v.x, j));
    if (use_abs) mult = std::abs(mult);
    auto xi = column(st.lx, j);
    const double now = std::abs(cov(xi, y));
    xi.push_back(x[j]);
    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
      auto yk = y;
      yk.push_back(k);
      expected += (now - std::abs(cov(xi, yk))) * (k == 1 ? p1 : 1.0 - p1);
    }
    total += mult * expected;
  }
  return total;
}

inline std::size_t select_fbc(const State& st, const fal::glm::LinearClassifier& clf, double alpha, bool use_abs) {
  const std::size_t d = static_cast<std::size_t>(st.ux.cols());
  std::vector<double> h, f;
  for (std::size_t i = 0; i < st.ids.size(); ++i) {
    const Eigen::VectorXd x = st.ux.row(static_cast<Eigen::Index>(i)).transpose();
    h.push_back(entropy2(sig(score(clf, x.data(), d))));
    f.push_back(fbc_score(st, x, clf, use_abs));
  }
  return pick(st.ids, h, f, alpha);
}

}  // namespace oracle
