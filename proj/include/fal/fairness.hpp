#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fal/glm.hpp"
#include "fal/pool.hpp"

namespace fal::fairness {

/// Raised when a measure's conditional probabilities have an empty
/// denominator. Degenerate pools must not read as perfectly fair.
class UndefinedMeasureError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// 2x2 table of (S, y_hat): a = (0,0), b = (0,1), c = (1,0), d = (1,1).
/// Cells hold counts or joint probabilities; every measure is scale-free.
struct JointTable {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double n() const { return a + b + c + d; }
  /// Rows exchanged (S relabelled 0 <-> 1).
  JointTable swapped_groups() const { return {c, d, a, b}; }
};

enum class Measure {
  MutualInfo,
  Covariance,
  AbsDiffAcceptance,
  AbsDiffComposition,
  RatioAcceptance,
  RatioComposition,
};

inline constexpr Measure kAllMeasures[] = {Measure::MutualInfo,         Measure::Covariance,
                                           Measure::AbsDiffAcceptance,  Measure::AbsDiffComposition,
                                           Measure::RatioAcceptance,    Measure::RatioComposition};

std::string_view to_string(Measure m);
/// Accepts "mutual_info", "covariance", "abs_diff_acceptance", ...
Measure parse_measure(std::string_view name);

JointTable contingency(std::span<const int> predictions, std::span<const int> sensitive);

/// I(y_hat; S) in nats.
double mutual_information(const JointTable& t);
/// |cov(S, y_hat)| with population normalization, i.e. |ad - bc| / n^2.
double covariance_measure(const JointTable& t);
/// |P(y_hat=1 | S=0) - P(y_hat=1 | S=1)|
double abs_diff_acceptance(const JointTable& t);
/// |P(S=1 | y_hat=1) - P(S=1)|
double abs_diff_composition(const JointTable& t);
/// 1 - min(r, 1/r) for r = P(y_hat=1 | S=0) / P(y_hat=1 | S=1)
double ratio_acceptance(const JointTable& t);
/// 1 - min(r, 1/r) for r = P(S=1 | y_hat=1) / P(S=1)
double ratio_composition(const JointTable& t);

double measure(Measure m, const JointTable& t);

/// Predicts every point of `reference` at `threshold` and applies `m` to the
/// resulting (S, y_hat) table.
double evaluate(const glm::LinearClassifier& clf, const Population& reference, Measure m, double threshold = 0.5);

/// Two classifiers over a binary S with P(S=1) = p, built from the joint
/// probability tables of the "optimizing one demographic measure may not
/// optimize the other" counterexample, scored with F1 = abs_diff_acceptance
/// and F2 = abs_diff_composition.
struct MeasureDisagreement {
  JointTable c;
  JointTable c_prime;
  double f1_c = 0.0;
  double f1_c_prime = 0.0;
  double f2_c = 0.0;
  double f2_c_prime = 0.0;

  /// True when F1 strictly prefers C' and F2 strictly prefers C, with a
  /// margin of `tol` against floating-point ties.
  bool preference_flip(double tol = 1e-12) const {
    return f1_c_prime < f1_c - tol && f2_c < f2_c_prime - tol;
  }
};

MeasureDisagreement measure_disagreement_fixture(double p, double eps);

}  // namespace fal::fairness
