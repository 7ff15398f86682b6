#include "fal/fairness.hpp"

#include <algorithm>
#include <cmath>

namespace fal::fairness {
namespace {

void require_nonempty(const JointTable& t) {
  if (!(t.n() > 0.0)) throw std::invalid_argument("joint table is empty");
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw std::invalid_argument("joint table has a negative cell");
}

double ratio_disparity(double num, double den) {
  const double r = num / den;
  return 1.0 - std::min(r, 1.0 / r);
}

// p * ln(p / q) with the 0 * ln(0) = 0 convention.
double mi_term(double joint, double marginal_product) {
  return joint > 0.0 ? joint * std::log(joint / marginal_product) : 0.0;
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::MutualInfo: return "mutual_info";
    case Measure::Covariance: return "covariance";
    case Measure::AbsDiffAcceptance: return "abs_diff_acceptance";
    case Measure::AbsDiffComposition: return "abs_diff_composition";
    case Measure::RatioAcceptance: return "ratio_acceptance";
    case Measure::RatioComposition: return "ratio_composition";
  }
  return "unknown";
}

Measure parse_measure(std::string_view name) {
  for (auto m : kAllMeasures)
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown disparity measure '" + std::string(name) + "'");
}

JointTable contingency(std::span<const int> predictions, std::span<const int> sensitive) {
  if (predictions.size() != sensitive.size()) throw std::invalid_argument("contingency: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("contingency: empty input");
  std::size_t cells[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int yh = predictions[i];
    const int s = sensitive[i];
    if ((yh != 0 && yh != 1) || (s != 0 && s != 1)) throw std::invalid_argument("contingency: non-binary entry");
    ++cells[s][yh];
  }
  return {static_cast<double>(cells[0][0]), static_cast<double>(cells[0][1]), static_cast<double>(cells[1][0]),
          static_cast<double>(cells[1][1])};
}

double mutual_information(const JointTable& t) {
  require_nonempty(t);
  const double n = t.n();
  const double p00 = t.a / n, p01 = t.b / n, p10 = t.c / n, p11 = t.d / n;
  const double s0 = p00 + p01, s1 = p10 + p11;
  const double y0 = p00 + p10, y1 = p01 + p11;
  const double mi = mi_term(p00, s0 * y0) + mi_term(p01, s0 * y1) + mi_term(p10, s1 * y0) + mi_term(p11, s1 * y1);
  // Clears the sign of roundoff on independent tables.
  return std::max(mi, 0.0);
}

double covariance_measure(const JointTable& t) {
  require_nonempty(t);
  const double n = t.n();
  return std::abs(t.a * t.d - t.b * t.c) / (n * n);
}

double abs_diff_acceptance(const JointTable& t) {
  require_nonempty(t);
  if (!(t.a + t.b > 0.0) || !(t.c + t.d > 0.0))
    throw UndefinedMeasureError("abs_diff_acceptance: a sensitive group is empty");
  return std::abs(t.b / (t.a + t.b) - t.d / (t.c + t.d));
}

double abs_diff_composition(const JointTable& t) {
  require_nonempty(t);
  if (!(t.b + t.d > 0.0)) throw UndefinedMeasureError("abs_diff_composition: no positive predictions");
  return std::abs(t.d / (t.b + t.d) - (t.c + t.d) / t.n());
}

double ratio_acceptance(const JointTable& t) {
  require_nonempty(t);
  if (!(t.a + t.b > 0.0) || !(t.c + t.d > 0.0))
    throw UndefinedMeasureError("ratio_acceptance: a sensitive group is empty");
  const double r0 = t.b / (t.a + t.b);
  const double r1 = t.d / (t.c + t.d);
  if (!(r0 > 0.0) || !(r1 > 0.0))
    throw UndefinedMeasureError("ratio_acceptance: a group has zero acceptance rate");
  return ratio_disparity(r0, r1);
}

double ratio_composition(const JointTable& t) {
  require_nonempty(t);
  if (!(t.b + t.d > 0.0)) throw UndefinedMeasureError("ratio_composition: no positive predictions");
  const double share = t.d / (t.b + t.d);
  const double base = (t.c + t.d) / t.n();
  if (!(share > 0.0) || !(base > 0.0))
    throw UndefinedMeasureError("ratio_composition: group S=1 absent from a denominator");
  return ratio_disparity(share, base);
}

double measure(Measure m, const JointTable& t) {
  switch (m) {
    case Measure::MutualInfo: return mutual_information(t);
    case Measure::Covariance: return covariance_measure(t);
    case Measure::AbsDiffAcceptance: return abs_diff_acceptance(t);
    case Measure::AbsDiffComposition: return abs_diff_composition(t);
    case Measure::RatioAcceptance: return ratio_acceptance(t);
    case Measure::RatioComposition: return ratio_composition(t);
  }
  throw std::invalid_argument("unknown measure");
}

double evaluate(const glm::LinearClassifier& clf, const Population& reference, Measure m, double threshold) {
  if (reference.size() == 0) throw std::invalid_argument("evaluate: empty reference population");
  const auto predictions = clf.predict_all(reference.x, threshold);
  return measure(m, contingency(predictions, reference.s));
}

MeasureDisagreement measure_disagreement_fixture(double p, double eps) {
  if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("fixture: p must lie in (0.5, 1)");
  if (!(eps >= 0.0 && eps < 1.0 - p)) throw std::invalid_argument("fixture: eps must lie in [0, 1 - p)");
  MeasureDisagreement out;
  // Rows S=0, S=1; columns y_hat=0, y_hat=1.
  out.c = {(1.0 - p - eps) / 2.0, (1.0 - p + eps) / 2.0, (p + eps) / 2.0, (p - eps) / 2.0};
  out.c_prime = {(1.0 - p + eps) / 2.0, (1.0 - p - eps) / 2.0, (p - eps) / 2.0, (p + eps) / 2.0};
  out.f1_c = abs_diff_acceptance(out.c);
  out.f1_c_prime = abs_diff_acceptance(out.c_prime);
  out.f2_c = abs_diff_composition(out.c);
  out.f2_c_prime = abs_diff_composition(out.c_prime);
  return out;
}

}  // namespace fal::fairness
